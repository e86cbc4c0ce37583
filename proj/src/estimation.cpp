// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/estimation.hpp"

#include <algorithm>

#include "mubsim/pilot_metrics.hpp"

namespace mubsim {

arma::cx_mat sample_covariance(const arma::cx_mat& y) {
    if (y.n_cols < 1)
        throw InvalidParameter("need at least one observation column");
    arma::cx_mat r = (y * y.t()) / static_cast<double>(y.n_cols);
    return 0.5 * (r + r.t());
}

arma::vec nnls_active_set(const arma::mat& gram, const arma::vec& rhs, const NnlsOptions& opts,
                          double* kkt_residual, arma::uword* iterations) {
    const arma::uword n = rhs.n_elem;
    const arma::uword max_iter = opts.max_iterations > 0 ? opts.max_iterations : 10 * n;
    const double tol = opts.kkt_tolerance * std::max(1.0, arma::abs(rhs).max());

    arma::vec x(n, arma::fill::zeros);
    std::vector<bool> passive(n, false);
    std::vector<bool> rejected(n, false); // pivots whose subproblem went degenerate
    arma::vec w = rhs;                    // dual: A^T b - A^T A x

    auto solve_passive = [&](const std::vector<arma::uword>& idx) -> arma::vec {
        const arma::uvec uidx(idx);
        const arma::mat gpp = gram.submat(uidx, uidx);
        const arma::vec cp = rhs.elem(uidx);
        arma::vec z;
        if (!arma::solve(z, gpp, cp, arma::solve_opts::likely_sympd + arma::solve_opts::no_approx))
            z = arma::pinv(gpp) * cp;
        return z;
    };

    arma::uword iter = 0;
    while (iter < max_iter) {
        double wmax = 0.0;
        arma::sword jmax = -1;
        for (arma::uword k = 0; k < n; ++k) {
            if (!passive[k] && !rejected[k] && w(k) > wmax) {
                wmax = w(k);
                jmax = static_cast<arma::sword>(k);
            }
        }
        if (jmax < 0 || wmax <= tol)
            break;
        const arma::uword entering = static_cast<arma::uword>(jmax);
        passive[entering] = true;

        while (true) {
            ++iter;
            std::vector<arma::uword> idx;
            for (arma::uword k = 0; k < n; ++k)
                if (passive[k])
                    idx.push_back(k);
            const arma::vec z = solve_passive(idx);

            double alpha = 1.0;
            bool feasible = true;
            for (arma::uword t = 0; t < idx.size(); ++t) {
                if (z(t) <= 0.0) {
                    feasible = false;
                    alpha = std::min(alpha, x(idx[t]) / (x(idx[t]) - z(t)));
                }
            }
            if (feasible) {
                x.zeros();
                for (arma::uword t = 0; t < idx.size(); ++t)
                    x(idx[t]) = z(t);
                std::fill(rejected.begin(), rejected.end(), false);
                break;
            }
            const double clamp = 1e-14 * std::max(1.0, x.max());
            for (arma::uword t = 0; t < idx.size(); ++t)
                x(idx[t]) += alpha * (z(t) - x(idx[t]));
            for (arma::uword t = 0; t < idx.size(); ++t) {
                if (x(idx[t]) <= clamp) {
                    x(idx[t]) = 0.0;
                    passive[idx[t]] = false;
                }
            }
            // entering pivot collapsed back to zero: park it to avoid cycling
            if (!passive[entering]) {
                rejected[entering] = true;
                break;
            }
            if (iter >= max_iter)
                break;
        }
        w = rhs - gram * x;
    }

    w = rhs - gram * x;
    double kkt = 0.0;
    for (arma::uword k = 0; k < n; ++k) {
        if (x(k) > 0.0)
            kkt = std::max(kkt, std::abs(w(k)));
        else
            kkt = std::max(kkt, std::max(w(k), 0.0));
    }
    if (kkt_residual != nullptr)
        *kkt_residual = kkt;
    if (iterations != nullptr)
        *iterations = iter;
    if (kkt > tol)
        throw SolverFailure("NNLS did not reach the KKT tolerance, residual " + std::to_string(kkt));
    return x;
}

GainEstimate estimate_large_scale(const arma::cx_mat& r_hat, const Codebook& cb, double sigma_u2,
                                  const NnlsOptions& opts) {
    const arma::uword q = cb.length;
    if (r_hat.n_rows != q || r_hat.n_cols != q)
        throw DimensionMismatch("covariance must be Q x Q");
    if (cb.total_codes() > q * q)
        throw CapacityExceeded("at most Q^2 gains are resolvable, got " +
                               std::to_string(cb.total_codes()));

    const DMatrix d = build_d_matrix(cb);
    arma::cx_mat target = r_hat;
    target.diag() -= sigma_u2;
    const arma::cx_vec b = arma::vectorise(target);

    // Real normal equations; D^H D and D^H vec(.) are real for Hermitian input.
    const arma::mat gram = arma::real(d.matrix.t() * d.matrix);
    const arma::vec rhs = arma::real(d.matrix.t() * b);

    GainEstimate est;
    est.theta = nnls_active_set(gram, rhs, opts, &est.kkt_residual, &est.iterations);

    arma::cx_mat fit = target;
    for (arma::uword c = 0; c < cb.total_codes(); ++c)
        fit -= est.theta(c) * (cb.matrix.col(c) * cb.matrix.col(c).t());
    const double fro = arma::norm(fit, "fro");
    est.residual = fro * fro;
    return est;
}

GroupPartition partition_groups(const GainEstimate& estimate, arma::uword home_cell,
                                arma::uword j_cells, arma::uword q, arma::uword k) {
    const arma::uword total = j_cells * k;
    if (estimate.theta.n_elem != total)
        throw DimensionMismatch("gain vector size must equal J*K");
    if (home_cell >= j_cells)
        throw InvalidParameter("home cell index out of range");
    if (k > q)
        throw InvalidParameter("users per cell cannot exceed the pilot length");
    if (total < q)
        throw InvalidParameter("group a needs J*K >= Q codes");

    GroupPartition part;
    part.home_cell = home_cell;
    part.in_cell_count = k;
    for (arma::uword c = 0; c < k; ++c)
        part.group_a.push_back(home_cell * k + c);

    std::vector<arma::uword> others;
    for (arma::uword c = 0; c < total; ++c)
        if (c / k != home_cell)
            others.push_back(c);
    std::stable_sort(others.begin(), others.end(), [&](arma::uword a, arma::uword b) {
        if (estimate.theta(a) != estimate.theta(b))
            return estimate.theta(a) > estimate.theta(b);
        return a < b;
    });
    for (arma::uword t = 0; t < q - k; ++t)
        part.group_a.push_back(others[t]);
    for (arma::uword t = q - k; t < others.size(); ++t)
        part.group_b.push_back(others[t]);
    std::sort(part.group_b.begin(), part.group_b.end());
    return part;
}

SmallScaleEstimate mmse_small_scale(const arma::cx_mat& y, const arma::cx_mat& pilots,
                                    const GroupPartition& part, const GainEstimate& estimate,
                                    double sigma_u2, double beta) {
    if (beta < 0.0 || beta > 1.0)
        throw InvalidBeta("beta must lie in [0, 1]");
    if (sigma_u2 <= 0.0)
        throw NonPositiveNoise("uplink noise power must be positive");
    if (pilots.n_rows != y.n_rows)
        throw DimensionMismatch("pilot length must match observation rows");

    const arma::uword q = y.n_rows;
    arma::cx_mat bracket(q, q, arma::fill::zeros);
    for (const arma::uword c : part.group_a)
        bracket += estimate.theta(c) * (pilots.col(c) * pilots.col(c).t());
    if (beta > 0.0) {
        for (const arma::uword c : part.group_b)
            bracket += beta * estimate.theta(c) * (pilots.col(c) * pilots.col(c).t());
    }
    bracket.diag() += sigma_u2;

    arma::cx_mat pa(q, part.group_a.size());
    for (arma::uword t = 0; t < part.group_a.size(); ++t)
        pa.col(t) = pilots.col(part.group_a[t]);

    // solve as a linear system, never forming the inverse
    const arma::cx_mat solved = arma::solve(bracket, y, arma::solve_opts::likely_sympd);

    SmallScaleEstimate sse;
    sse.beta = beta;
    sse.unscaled_rows = pa.t() * solved;
    sse.rows = sse.unscaled_rows;
    for (arma::uword t = 0; t < part.group_a.size(); ++t)
        sse.rows.row(t) *= estimate.theta(part.group_a[t]);
    return sse;
}

} // namespace mubsim

// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/pilot_metrics.hpp"

namespace mubsim {

DMatrix build_d_matrix(const arma::cx_mat& pilots) {
    const arma::uword q = pilots.n_rows;
    DMatrix d;
    d.matrix.set_size(q * q, pilots.n_cols);
    for (arma::uword c = 0; c < pilots.n_cols; ++c)
        d.matrix.col(c) = arma::kron(arma::conj(pilots.col(c)), pilots.col(c));
    return d;
}

DMatrix build_d_matrix(const Codebook& cb) { return build_d_matrix(cb.matrix); }

SpectrumReport spectrum(const DMatrix& d, double rank_tol) {
    // D^H D has entries |p_i^H p_j|^2: real symmetric PSD
    const arma::mat gram = arma::real(d.matrix.t() * d.matrix);
    arma::vec ev;
    if (!arma::eig_sym(ev, arma::symmatu(gram)))
        throw SolverFailure("eigendecomposition of D^H D failed");

    SpectrumReport rep;
    rep.eigenvalues = arma::reverse(ev);
    const double lam_max = rep.eigenvalues.n_elem > 0 ? std::max(rep.eigenvalues(0), 0.0) : 0.0;
    const double cut = rank_tol * lam_max;
    for (const double lam : rep.eigenvalues) {
        if (lam > cut && lam > 0.0) {
            ++rep.numerical_rank;
            rep.trace_pinv += 1.0 / lam;
        }
    }
    return rep;
}

double noise_enhancement(const Codebook& cb) { return spectrum(build_d_matrix(cb)).trace_pinv; }

arma::cx_mat gram_matrix(const Codebook& cb) { return cb.matrix.t() * cb.matrix; }

double welch_type_bound(arma::uword j_cells, arma::uword q, arma::uword k) {
    if (j_cells < 2)
        throw DegenerateInput("coherence bound needs at least two cells");
    const double jk = static_cast<double>(j_cells * k);
    const double qd = static_cast<double>(q);
    if (jk <= qd)
        return 0.0;
    return std::sqrt((jk - qd) / (static_cast<double>(k) * qd * (static_cast<double>(j_cells) - 1.0)));
}

double lemma2_column_sum(const arma::cx_mat& block) {
    const arma::uword q = block.n_rows;
    if (block.n_cols != q)
        throw DimensionMismatch("column-sum identity needs a square block");
    const double c1 = arma::norm(block.t() * block - arma::eye<arma::cx_mat>(q, q), "fro");
    if (c1 >= 1e-10)
        throw InvalidParameter("block fails per-cell orthogonality");

    arma::cx_vec sum(q * q, arma::fill::zeros);
    for (arma::uword m = 0; m < q; ++m)
        sum += arma::kron(arma::conj(block.col(m)), block.col(m));
    for (arma::uword r = 0; r < q; ++r)
        sum(r * q + r) -= 1.0;
    return arma::abs(sum).max();
}

} // namespace mubsim

// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/downlink.hpp"

namespace mubsim {

PrecoderSet zf_precoders(const arma::cx_mat& rows, const GroupPartition& part, arma::uword served,
                         ZfPolicy policy) {
    (void)part; // in-cell users occupy the leading rows by construction
    const arma::uword n_rows = rows.n_rows;
    if (served < 1 || served > n_rows)
        throw InvalidParameter("served user count out of range");
    if (rows.n_cols < n_rows)
        throw RankDeficient("need at least as many antennas as estimated rows");

    arma::cx_mat u, v;
    arma::vec sv;
    if (!arma::svd_econ(u, sv, v, rows))
        throw RankDeficient("SVD of the estimated channel rows failed");
    if (sv(0) <= 0.0)
        throw RankDeficient("estimated channel rows are all zero");
    const double cutoff = 1e-6 * sv(0); // sigma ratio 1e-6 <=> gram condition 1e12
    if (policy == ZfPolicy::reject_rank_deficient && sv(sv.n_elem - 1) <= cutoff)
        throw RankDeficient("estimated channel rows are numerically rank deficient");

    arma::uword rank = 0;
    while (rank < sv.n_elem && sv(rank) > cutoff)
        ++rank;
    const arma::cx_mat pinv = v.cols(0, rank - 1) *
                              arma::diagmat(1.0 / sv.head(rank)) *
                              u.cols(0, rank - 1).t(); // M x n_rows

    PrecoderSet out;
    out.v.set_size(rows.n_cols, served);
    for (arma::uword k = 0; k < served; ++k) {
        const double norm = arma::norm(pinv.col(k));
        if (norm <= 0.0)
            throw RankDeficient("served user has no usable precoding direction");
        out.v.col(k) = pinv.col(k) / norm;
    }
    return out;
}

RateSample compute_sinr(const std::vector<PrecoderSet>& precoders,
                        const std::vector<arma::cx_mat>& channels, double sigma_d2,
                        arma::uword pilot_length) {
    const arma::uword j_cells = precoders.size();
    if (channels.size() != j_cells)
        throw DimensionMismatch("need one channel realization per cell");
    const arma::uword k_users = precoders.front().v.n_cols;

    RateSample sample;
    sample.sinr.set_size(j_cells, k_users);
    sample.effective_rate.set_size(j_cells, k_users);
    const double activity = static_cast<double>(k_users) / static_cast<double>(pilot_length);

    for (arma::uword i = 0; i < j_cells; ++i) {
        for (arma::uword k = 0; k < k_users; ++k) {
            const arma::cx_rowvec own = channels[i].row(i * k_users + k);
            const double signal = std::norm(arma::as_scalar(own * precoders[i].v.col(k)));
            double interference = 0.0;
            for (arma::uword kp = 0; kp < k_users; ++kp)
                if (kp != k)
                    interference += std::norm(arma::as_scalar(own * precoders[i].v.col(kp)));
            for (arma::uword j = 0; j < j_cells; ++j) {
                if (j == i)
                    continue;
                const arma::cx_rowvec through = channels[j].row(i * k_users + k);
                for (arma::uword kp = 0; kp < k_users; ++kp)
                    interference += std::norm(arma::as_scalar(through * precoders[j].v.col(kp)));
            }
            const double sinr = signal / (interference + sigma_d2);
            sample.sinr(i, k) = sinr;
            sample.effective_rate(i, k) = activity * std::log2(1.0 + sinr);
        }
    }
    return sample;
}

} // namespace mubsim

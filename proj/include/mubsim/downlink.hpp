// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_DOWNLINK_HPP
#define MUBSIM_DOWNLINK_HPP

#include <armadillo>
#include <vector>

#include "mubsim/errors.hpp"
#include "mubsim/estimation.hpp"

namespace mubsim {

struct PrecoderSet {
    arma::cx_mat v; // M x K, unit-norm columns, one per served in-cell user
};

struct RateSample {
    arma::mat sinr;           // J x K
    arma::mat effective_rate; // J x K, (K/Q) log2(1 + sinr)
};

enum class ZfPolicy {
    /// reject inputs whose row Gram has condition number above 1e12
    reject_rank_deficient,
    /// SVD pseudo-inverse with relative tolerance 1e-12: dependent nulling
    /// directions are dropped instead of inverted. Needed for unbiased
    /// codebooks, whose columns admit exact linear dependencies across
    /// blocks, so a group-a submatrix can be singular by construction.
    truncate_null_directions,
};

/// Zero-forcing precoders: columns of the normalized pseudo-inverse
/// H^H (H H^H)^-1, keeping the first `served` columns (the in-cell users;
/// group-a ordering puts them first). Effective-channel convention is
/// row-times-column: H v_k is proportional to e_k.
PrecoderSet zf_precoders(const arma::cx_mat& rows, const GroupPartition& part, arma::uword served,
                         ZfPolicy policy = ZfPolicy::reject_rank_deficient);

/// SINR and effective rate against the true channels. Interference from
/// base station j reaches user (i,k) through the channel between BS j and
/// that user (row i*K+k of BS j's stacked channel).
RateSample compute_sinr(const std::vector<PrecoderSet>& precoders,
                        const std::vector<arma::cx_mat>& channels, double sigma_d2,
                        arma::uword pilot_length);

} // namespace mubsim

#endif

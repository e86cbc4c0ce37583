// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_ESTIMATION_HPP
#define MUBSIM_ESTIMATION_HPP

#include <armadillo>
#include <vector>

#include "mubsim/codebook.hpp"
#include "mubsim/errors.hpp"

namespace mubsim {

struct NnlsOptions {
    double kkt_tolerance = 1e-9; // scaled by max(1, ||A^T b||_inf)
    arma::uword max_iterations = 0; // 0 -> 10 * variable count
};

struct GainEstimate {
    arma::vec theta;           // JK nonnegative gains, codebook column order
    double residual = 0.0;     // ||R_hat - P Theta P^H - sigma^2 I||_F^2 at the solution
    double kkt_residual = 0.0; // max KKT violation of the NNLS solution
    arma::uword iterations = 0;
};

struct GroupPartition {
    std::vector<arma::uword> group_a; // in-cell codes first, then strongest out-of-cell
    std::vector<arma::uword> group_b; // everything else
    arma::uword home_cell = 0;
    arma::uword in_cell_count = 0; // K: leading entries of group_a
};

struct SmallScaleEstimate {
    arma::cx_mat rows;          // |group_a| x M, the gain-weighted MMSE estimate
    arma::cx_mat unscaled_rows; // |group_a| x M, Pa^H B^-1 Y (no Ghat_a row scaling)
    double beta = 0.0;
};

/// Hermitized (1/M) Y Y^H
arma::cx_mat sample_covariance(const arma::cx_mat& y);

/// Nonnegative least-squares fit of the diagonal gain matrix:
/// min ||R_hat - P Theta P^H - sigma_u2 I||_F^2 s.t. Theta >= 0, solved as
/// an active-set NNLS on the lifted system D theta = vec(R_hat - sigma_u2 I).
GainEstimate estimate_large_scale(const arma::cx_mat& r_hat, const Codebook& cb, double sigma_u2,
                                  const NnlsOptions& opts = {});

/// Generic NNLS: min ||A x - b||^2 s.t. x >= 0 over the normal equations
/// (gram = A^T A, rhs = A^T b). Lawson-Hanson active set.
arma::vec nnls_active_set(const arma::mat& gram, const arma::vec& rhs, const NnlsOptions& opts,
                          double* kkt_residual = nullptr, arma::uword* iterations = nullptr);

/// K home-cell codes plus the Q-K strongest out-of-cell codes by estimated
/// gain (ties to the lower column index).
GroupPartition partition_groups(const GainEstimate& estimate, arma::uword home_cell,
                                arma::uword j_cells, arma::uword q, arma::uword k);

/// Weighted MMSE estimate of the group-a rows of the stacked channel:
/// Ghat_a Pa^H [Pa Ghat_a Pa^H + beta Pb Ghat_b Pb^H + sigma_u2 I]^-1 Y.
/// Also returns the rows without the leading Ghat_a scaling; column-normalized
/// zero-forcing precoders are invariant to that scaling wherever it is
/// positive, and the unscaled rows stay well defined at zero estimated gain.
SmallScaleEstimate mmse_small_scale(const arma::cx_mat& y, const arma::cx_mat& pilots,
                                    const GroupPartition& part, const GainEstimate& estimate,
                                    double sigma_u2, double beta);

} // namespace mubsim

#endif

// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_PILOT_METRICS_HPP
#define MUBSIM_PILOT_METRICS_HPP

#include <armadillo>

#include "mubsim/codebook.hpp"

namespace mubsim {

/// Q^2 x (J*K) matrix whose column c is conj(p_c) (x) p_c, the vectorised
/// rank-one outer product of pilot column c. Lifts the covariance fit
/// R - sigma^2 I = P Theta P^H to the linear system D theta = vec(.).
struct DMatrix {
    arma::cx_mat matrix;
};

struct SpectrumReport {
    arma::vec eigenvalues;        // descending
    arma::uword numerical_rank = 0; // count above rank_tol * lambda_max
    double trace_pinv = 0.0;        // sum of reciprocals over that count
};

DMatrix build_d_matrix(const Codebook& cb);
DMatrix build_d_matrix(const arma::cx_mat& pilots);

/// Hermitian eigendecomposition of D^H D; trace_pinv sums 1/lambda over
/// eigenvalues above rank_tol * lambda_max (pseudo-inverse trace; D^H D is
/// rank deficient for complete-block codebooks).
SpectrumReport spectrum(const DMatrix& d, double rank_tol = 1e-8);

/// Tr((D^H D)^+) of the codebook's D matrix; lower is better for
/// large-scale gain estimation.
double noise_enhancement(const Codebook& cb);

/// Gram matrix P^H P
arma::cx_mat gram_matrix(const Codebook& cb);

/// Generalized Welch-type lower bound on the cross-cell coherence c of any
/// codebook with orthonormal per-cell blocks: sqrt((JK-Q)/(KQ(J-1))),
/// floored at zero when JK <= Q.
double welch_type_bound(arma::uword j_cells, arma::uword q, arma::uword k);

/// Residual of the column-sum identity for one orthonormal block: the Q
/// lifted columns sum to the vectorised identity pattern. Returns the
/// max-norm deviation.
double lemma2_column_sum(const arma::cx_mat& block);

} // namespace mubsim

#endif

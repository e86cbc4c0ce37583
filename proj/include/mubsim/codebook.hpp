// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_CODEBOOK_HPP
#define MUBSIM_CODEBOOK_HPP

#include <armadillo>
#include <string>

#include "mubsim/errors.hpp"
#include "mubsim/rng.hpp"

namespace mubsim {

enum class CodebookKind { mub_phase, mub, incomplete, orthogonal_reused };

std::string to_string(CodebookKind kind);
CodebookKind codebook_kind_from_string(const std::string& name);

/// Pilot codebook: Q x (J*K) matrix of unit-norm columns, partitioned into
/// J per-cell blocks of K columns each.
struct Codebook {
    arma::cx_mat matrix; // Q x (J*K)
    arma::uword cells = 0;          // J
    arma::uword length = 0;         // Q
    arma::uword codes_per_cell = 0; // K
    CodebookKind kind = CodebookKind::incomplete;

    arma::uword total_codes() const { return cells * codes_per_cell; }

    /// View of cell j's Q x K block
    arma::subview<std::complex<double>> block(arma::uword j) {
        return matrix.cols(j * codes_per_cell, (j + 1) * codes_per_cell - 1);
    }
    const arma::subview<std::complex<double>> block(arma::uword j) const {
        return matrix.cols(j * codes_per_cell, (j + 1) * codes_per_cell - 1);
    }
};

struct ValidationReport {
    double c1_residual = 0.0;            // max_j ||P_j^H P_j - I||_F
    double coherence = 0.0;              // max cross-cell |<p_i, p_j>|
    double entry_amplitude_spread = 0.0; // max - min entry modulus
    double max_column_norm_error = 0.0;  // max | ||p||-1 |
};

/// Constant-amplitude mutually unbiased bases for prime Q, J <= Q blocks.
/// Q=2 uses the explicit Hadamard pair; odd primes use the quadratic
/// exponential family (1/sqrt(Q)) * w^(r k^2 + m k), w = exp(2 pi i / Q).
Codebook build_mub_phase(arma::uword q, arma::uword j_cells);

/// [U, U*P_1, ..., U*P_J] from a phase-only MUB set; result has J+1 blocks
/// and loses the constant-amplitude property (kind mub).
Codebook augment_with_unitary(const Codebook& cb, const arma::cx_mat& unitary);

/// J blocks selected uniformly out of the augmented (Q+1)-member family,
/// built from a random unitary. Requires J <= Q+1.
Codebook build_mub(arma::uword q, arma::uword j_cells, RngStream& rng);

/// J independent Haar-random unitary blocks; satisfies per-cell orthogonality only.
Codebook build_incomplete(arma::uword q, arma::uword j_cells, RngStream& rng);

/// One Haar-random unitary block replicated in every cell.
Codebook build_orthogonal_reused(arma::uword q, arma::uword j_cells, RngStream& rng);

/// Keep the first K columns of each block.
Codebook truncate_codes(const Codebook& cb, arma::uword k);

ValidationReport validate(const Codebook& cb);

/// True when the declared-kind invariants hold (used by `certify`).
bool passes_kind_invariants(const Codebook& cb, const ValidationReport& report);

/// Text format: header "Q J K kind", then one "row col real imag" line per
/// entry with 17 significant digits; round-trips bit-exactly.
void save_codebook(const Codebook& cb, const std::string& path);
Codebook load_codebook(const std::string& path);

bool is_prime(arma::uword n);

arma::cx_mat random_unitary(arma::uword q, RngStream& rng);

} // namespace mubsim

#endif

// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/codebook.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mubsim {

std::string to_string(CodebookKind kind) {
    switch (kind) {
    case CodebookKind::mub_phase:
        return "mub_phase";
    case CodebookKind::mub:
        return "mub";
    case CodebookKind::incomplete:
        return "incomplete";
    case CodebookKind::orthogonal_reused:
        return "orthogonal_reused";
    }
    return "incomplete";
}

CodebookKind codebook_kind_from_string(const std::string& name) {
    if (name == "mub_phase")
        return CodebookKind::mub_phase;
    if (name == "mub")
        return CodebookKind::mub;
    if (name == "incomplete")
        return CodebookKind::incomplete;
    if (name == "orthogonal_reused")
        return CodebookKind::orthogonal_reused;
    throw InvalidParameter("unknown codebook kind: " + name);
}

bool is_prime(arma::uword n) {
    if (n < 2)
        return false;
    for (arma::uword d = 2; d * d <= n; ++d)
        if (n % d == 0)
            return false;
    return true;
}

arma::cx_mat random_unitary(arma::uword q, RngStream& rng) {
    arma::cx_mat a = rng.cgauss(q, q);
    arma::cx_mat qm, rm;
    arma::qr(qm, rm, a);
    // fix the QR phase ambiguity so the draw is Haar and seed-deterministic
    for (arma::uword i = 0; i < q; ++i) {
        const std::complex<double> d = rm(i, i);
        const double m = std::abs(d);
        qm.col(i) *= (m > 0.0) ? d / m : std::complex<double>(1.0, 0.0);
    }
    return qm;
}

Codebook build_mub_phase(arma::uword q, arma::uword j_cells) {
    if (!is_prime(q))
        throw NonPrimeDimension("pilot length Q must be prime, got " + std::to_string(q));
    if (j_cells < 1)
        throw InvalidParameter("cell count must be at least 1");
    if (j_cells > q)
        throw TooManyBases("phase-only family has at most Q = " + std::to_string(q) + " bases");

    Codebook cb;
    cb.cells = j_cells;
    cb.length = q;
    cb.codes_per_cell = q;
    cb.kind = CodebookKind::mub_phase;
    cb.matrix.set_size(q, j_cells * q);

    if (q == 2) {
        const double s = 1.0 / std::sqrt(2.0);
        arma::cx_mat p1(2, 2), p2(2, 2);
        p1(0, 0) = s;
        p1(0, 1) = s;
        p1(1, 0) = s;
        p1(1, 1) = -s;
        p2(0, 0) = s;
        p2(0, 1) = s;
        p2(1, 0) = std::complex<double>(0.0, s);
        p2(1, 1) = std::complex<double>(0.0, -s);
        cb.matrix.cols(0, 1) = p1;
        if (j_cells == 2)
            cb.matrix.cols(2, 3) = p2;
        return cb;
    }

    const double scale = 1.0 / std::sqrt(static_cast<double>(q));
    for (arma::uword r = 0; r < j_cells; ++r) {
        for (arma::uword m = 0; m < q; ++m) {
            for (arma::uword k = 0; k < q; ++k) {
                const arma::uword e = (r * k * k + m * k) % q;
                const double phase = 2.0 * arma::datum::pi * static_cast<double>(e) / static_cast<double>(q);
                cb.matrix(k, r * q + m) = scale * std::complex<double>(std::cos(phase), std::sin(phase));
            }
        }
    }
    return cb;
}

Codebook augment_with_unitary(const Codebook& cb, const arma::cx_mat& unitary) {
    if (cb.kind != CodebookKind::mub_phase)
        throw InvalidParameter("augmentation requires a phase-only MUB codebook");
    if (unitary.n_rows != cb.length || unitary.n_cols != cb.length)
        throw DimensionMismatch("augmenting unitary must be Q x Q");
    const double res = arma::norm(unitary.t() * unitary - arma::eye<arma::cx_mat>(cb.length, cb.length), "fro");
    if (res >= 1e-10)
        throw NotUnitary("matrix fails unitarity, ||U^H U - I||_F = " + std::to_string(res));

    Codebook out;
    out.cells = cb.cells + 1;
    out.length = cb.length;
    out.codes_per_cell = cb.length;
    out.kind = CodebookKind::mub;
    out.matrix.set_size(cb.length, out.cells * cb.length);
    out.matrix.cols(0, cb.length - 1) = unitary;
    for (arma::uword j = 0; j < cb.cells; ++j)
        out.matrix.cols((j + 1) * cb.length, (j + 2) * cb.length - 1) = unitary * cb.block(j);
    return out;
}

Codebook build_mub(arma::uword q, arma::uword j_cells, RngStream& rng) {
    if (j_cells < 1)
        throw InvalidParameter("cell count must be at least 1");
    if (j_cells > q + 1)
        throw TooManyBases("at most Q+1 mutually unbiased bases exist");

    const Codebook phase = build_mub_phase(q, q);
    const Codebook full = augment_with_unitary(phase, random_unitary(q, rng));
    std::vector<arma::uword> pick = rng.sample_without_replacement(q + 1, j_cells);
    std::sort(pick.begin(), pick.end());

    Codebook out;
    out.cells = j_cells;
    out.length = q;
    out.codes_per_cell = q;
    out.kind = CodebookKind::mub;
    out.matrix.set_size(q, j_cells * q);
    for (arma::uword j = 0; j < j_cells; ++j)
        out.matrix.cols(j * q, (j + 1) * q - 1) = full.block(pick[j]);
    return out;
}

Codebook build_incomplete(arma::uword q, arma::uword j_cells, RngStream& rng) {
    if (q < 2)
        throw InvalidParameter("pilot length must be at least 2");
    if (j_cells < 1)
        throw InvalidParameter("cell count must be at least 1");
    Codebook cb;
    cb.cells = j_cells;
    cb.length = q;
    cb.codes_per_cell = q;
    cb.kind = CodebookKind::incomplete;
    cb.matrix.set_size(q, j_cells * q);
    for (arma::uword j = 0; j < j_cells; ++j)
        cb.matrix.cols(j * q, (j + 1) * q - 1) = random_unitary(q, rng);
    return cb;
}

Codebook build_orthogonal_reused(arma::uword q, arma::uword j_cells, RngStream& rng) {
    if (q < 2)
        throw InvalidParameter("pilot length must be at least 2");
    if (j_cells < 1)
        throw InvalidParameter("cell count must be at least 1");
    Codebook cb;
    cb.cells = j_cells;
    cb.length = q;
    cb.codes_per_cell = q;
    cb.kind = CodebookKind::orthogonal_reused;
    cb.matrix.set_size(q, j_cells * q);
    const arma::cx_mat block = random_unitary(q, rng);
    for (arma::uword j = 0; j < j_cells; ++j)
        cb.matrix.cols(j * q, (j + 1) * q - 1) = block;
    return cb;
}

Codebook truncate_codes(const Codebook& cb, arma::uword k) {
    if (k < 1 || k > cb.codes_per_cell)
        throw InvalidParameter("codes per cell must be in [1, K]");
    Codebook out;
    out.cells = cb.cells;
    out.length = cb.length;
    out.codes_per_cell = k;
    out.kind = cb.kind;
    out.matrix.set_size(cb.length, cb.cells * k);
    for (arma::uword j = 0; j < cb.cells; ++j)
        out.matrix.cols(j * k, (j + 1) * k - 1) = cb.matrix.cols(j * cb.codes_per_cell, j * cb.codes_per_cell + k - 1);
    return out;
}

ValidationReport validate(const Codebook& cb) {
    ValidationReport rep;
    const arma::uword k = cb.codes_per_cell;
    const arma::cx_mat eye_k = arma::eye<arma::cx_mat>(k, k);

    for (arma::uword c = 0; c < cb.total_codes(); ++c)
        rep.max_column_norm_error =
            std::max(rep.max_column_norm_error, std::abs(arma::norm(cb.matrix.col(c)) - 1.0));

    for (arma::uword j = 0; j < cb.cells; ++j) {
        const arma::cx_mat blk = cb.block(j);
        rep.c1_residual = std::max(rep.c1_residual, arma::norm(blk.t() * blk - eye_k, "fro"));
    }

    for (arma::uword i = 0; i + 1 < cb.cells; ++i) {
        const arma::cx_mat gi = cb.block(i);
        for (arma::uword j = i + 1; j < cb.cells; ++j) {
            const arma::mat cross = arma::abs(gi.t() * cb.block(j));
            rep.coherence = std::max(rep.coherence, cross.max());
        }
    }

    const arma::mat mods = arma::abs(cb.matrix);
    rep.entry_amplitude_spread = mods.max() - mods.min();
    return rep;
}

bool passes_kind_invariants(const Codebook& cb, const ValidationReport& rep) {
    if (rep.max_column_norm_error >= 1e-12)
        return false;
    const double inv_sqrt_q = 1.0 / std::sqrt(static_cast<double>(cb.length));
    switch (cb.kind) {
    case CodebookKind::mub_phase: {
        if (rep.c1_residual >= 1e-10)
            return false;
        if (cb.cells > 1 && std::abs(rep.coherence - inv_sqrt_q) >= 1e-9)
            return false;
        // constant amplitude: every entry modulus 1/sqrt(Q)
        const arma::mat mods = arma::abs(cb.matrix);
        return std::abs(mods.max() - inv_sqrt_q) < 1e-12 && std::abs(mods.min() - inv_sqrt_q) < 1e-12;
    }
    case CodebookKind::mub: {
        if (rep.c1_residual >= 1e-10)
            return false;
        if (cb.cells == 1)
            return true;
        // every cross-cell inner product at 1/sqrt(Q), not just the max
        for (arma::uword i = 0; i + 1 < cb.cells; ++i) {
            const arma::cx_mat gi = cb.block(i);
            for (arma::uword j = i + 1; j < cb.cells; ++j) {
                const arma::mat cross = arma::abs(gi.t() * cb.block(j));
                if (arma::abs(cross - inv_sqrt_q).max() >= 1e-9)
                    return false;
            }
        }
        return true;
    }
    case CodebookKind::incomplete:
        return rep.c1_residual < 1e-10;
    case CodebookKind::orthogonal_reused: {
        if (rep.c1_residual >= 1e-10)
            return false;
        for (arma::uword j = 1; j < cb.cells; ++j)
            if (arma::norm(arma::cx_mat(cb.block(j)) - arma::cx_mat(cb.block(0)), "fro") != 0.0)
                return false;
        return true;
    }
    }
    return false;
}

void save_codebook(const Codebook& cb, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr)
        throw IoError("cannot open for writing: " + path);
    std::fprintf(f, "%llu %llu %llu %s\n", static_cast<unsigned long long>(cb.length),
                 static_cast<unsigned long long>(cb.cells),
                 static_cast<unsigned long long>(cb.codes_per_cell), to_string(cb.kind).c_str());
    for (arma::uword c = 0; c < cb.matrix.n_cols; ++c)
        for (arma::uword r = 0; r < cb.matrix.n_rows; ++r)
            std::fprintf(f, "%llu %llu %.17g %.17g\n", static_cast<unsigned long long>(r),
                         static_cast<unsigned long long>(c), cb.matrix(r, c).real(),
                         cb.matrix(r, c).imag());
    if (std::fclose(f) != 0)
        throw IoError("write failed: " + path);
}

Codebook load_codebook(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open for reading: " + path);
    std::string header;
    if (!std::getline(in, header))
        throw IoError("missing header line in " + path);
    std::istringstream hs(header);
    unsigned long long q = 0, j = 0, k = 0;
    std::string kind;
    if (!(hs >> q >> j >> k >> kind))
        throw IoError("malformed header in " + path);

    Codebook cb;
    cb.length = q;
    cb.cells = j;
    cb.codes_per_cell = k;
    cb.kind = codebook_kind_from_string(kind);
    cb.matrix.zeros(q, j * k);

    unsigned long long r = 0, c = 0;
    double re = 0.0, im = 0.0;
    arma::uword count = 0;
    while (in >> r >> c >> re >> im) {
        if (r >= cb.matrix.n_rows || c >= cb.matrix.n_cols)
            throw IoError("entry index out of range in " + path);
        cb.matrix(r, c) = std::complex<double>(re, im);
        ++count;
    }
    if (count != cb.matrix.n_elem)
        throw IoError("expected " + std::to_string(cb.matrix.n_elem) + " entries, got " +
                      std::to_string(count) + " in " + path);
    return cb;
}

} // namespace mubsim

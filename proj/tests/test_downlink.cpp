// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include <catch2/catch_amalgamated.hpp>

#include "mubsim/codebook.hpp"
#include "mubsim/downlink.hpp"
#include "mubsim/rng.hpp"

using namespace mubsim;

namespace {

GroupPartition trivial_partition(arma::uword rows, arma::uword served) {
    GroupPartition part;
    part.in_cell_count = served;
    for (arma::uword r = 0; r < rows; ++r)
        part.group_a.push_back(r);
    return part;
}

} // namespace

TEST_CASE("single-row precoder is the matched filter", "[downlink]") {
    RngStream rng(1, 0);
    const arma::cx_mat h = rng.cgauss(1, 16);
    const PrecoderSet set = zf_precoders(h, trivial_partition(1, 1), 1);
    const arma::cx_vec expect = arma::conj(h.row(0).st()) / arma::norm(h.row(0));
    CHECK(arma::norm(set.v.col(0) - expect, 2) < 1e-12);
    CHECK(std::abs(arma::norm(set.v.col(0)) - 1.0) < 1e-12);
}

TEST_CASE("perfect-CSI zero forcing nulls the other rows", "[downlink]") {
    RngStream rng(2, 0);
    const arma::cx_mat rows = rng.cgauss(7, 128);
    const PrecoderSet set = zf_precoders(rows, trivial_partition(7, 7), 7);
    for (arma::uword k = 0; k < 7; ++k) {
        const arma::cx_vec eff = rows * set.v.col(k);
        const double own = std::abs(eff(k));
        for (arma::uword r = 0; r < 7; ++r) {
            if (r != k)
                CHECK(std::abs(eff(r)) < 1e-9 * own);
        }
        CHECK(std::abs(arma::norm(set.v.col(k)) - 1.0) < 1e-12);
    }
}

TEST_CASE("precoders are orthogonal to the unserved group-a rows", "[downlink]") {
    RngStream rng(3, 0);
    const arma::cx_mat rows = rng.cgauss(7, 128);
    const PrecoderSet set = zf_precoders(rows, trivial_partition(7, 3), 3);
    REQUIRE(set.v.n_cols == 3);
    for (arma::uword k = 0; k < 3; ++k)
        for (arma::uword r = 0; r < 7; ++r) {
            if (r == k)
                continue;
            const double ip = std::abs(arma::as_scalar(rows.row(r) * set.v.col(k)));
            CHECK(ip < 1e-9 * arma::norm(rows.row(r)));
        }
}

TEST_CASE("rank-deficient rows are rejected", "[downlink]") {
    RngStream rng(4, 0);
    arma::cx_mat rows = rng.cgauss(4, 64);
    rows.row(3) = rows.row(0); // duplicate direction
    CHECK_THROWS_AS(zf_precoders(rows, trivial_partition(4, 2), 2), RankDeficient);

    // more rows than antennas cannot be zero forced
    CHECK_THROWS_AS(zf_precoders(rng.cgauss(5, 4), trivial_partition(5, 2), 2), RankDeficient);
}

TEST_CASE("truncation serves users through dependent nulling rows", "[downlink]") {
    // unbiased-codebook column subsets can be exactly dependent; find one
    const Codebook cb = build_mub_phase(7, 7);
    RngStream rng(5, 1);
    arma::cx_mat pa(7, 7);
    bool found = false;
    for (int attempt = 0; attempt < 500 && !found; ++attempt) {
        const arma::uword home = rng.uniform_index(7);
        const auto own = rng.sample_without_replacement(7, 3);
        for (arma::uword k = 0; k < 3; ++k)
            pa.col(k) = cb.matrix.col(home * 7 + own[k]);
        for (arma::uword k = 3; k < 7; ++k) {
            arma::uword cell = rng.uniform_index(6);
            if (cell >= home)
                ++cell;
            pa.col(k) = cb.matrix.col(cell * 7 + rng.uniform_index(7));
        }
        const arma::vec sv = arma::svd(pa);
        found = sv(6) < 1e-10 * sv(0);
    }
    REQUIRE(found);

    const arma::cx_mat rows = pa.t() * rng.cgauss(7, 64); // exact row dependency
    CHECK_THROWS_AS(zf_precoders(rows, trivial_partition(7, 3), 3), RankDeficient);

    const PrecoderSet set =
        zf_precoders(rows, trivial_partition(7, 3), 3, ZfPolicy::truncate_null_directions);
    for (arma::uword k = 0; k < 3; ++k) {
        CHECK(std::abs(arma::norm(set.v.col(k)) - 1.0) < 1e-12);
        // served rows are still separated from each other
        for (arma::uword r = 0; r < 3; ++r) {
            if (r == k)
                continue;
            const double leak = std::abs(arma::as_scalar(rows.row(r) * set.v.col(k)));
            const double own_gain = std::abs(arma::as_scalar(rows.row(k) * set.v.col(k)));
            CHECK(leak < 1e-6 * own_gain);
        }
    }
}

TEST_CASE("single-user SINR equals the matched-filter closed form", "[downlink]") {
    RngStream rng(5, 0);
    const arma::cx_mat h = rng.cgauss(1, 32);
    const double sigma_d2 = 1e-4;

    std::vector<PrecoderSet> pre{zf_precoders(h, trivial_partition(1, 1), 1)};
    std::vector<arma::cx_mat> chans{h};
    const RateSample sample = compute_sinr(pre, chans, sigma_d2, 7);

    const double expect = std::pow(arma::norm(h.row(0)), 2) / sigma_d2;
    CHECK(sample.sinr(0, 0) == Catch::Approx(expect).epsilon(1e-9));
    CHECK(sample.effective_rate(0, 0) ==
          Catch::Approx((1.0 / 7.0) * std::log2(1.0 + expect)).epsilon(1e-12));
}

TEST_CASE("full-load perfect CSI removes intra-cell interference", "[downlink]") {
    RngStream rng(6, 0);
    const arma::cx_mat h = rng.cgauss(7, 128);
    std::vector<PrecoderSet> pre{zf_precoders(h, trivial_partition(7, 7), 7)};
    std::vector<arma::cx_mat> chans{h};
    const RateSample sample = compute_sinr(pre, chans, 1e-4, 7);
    for (arma::uword k = 0; k < 7; ++k) {
        const double sig = std::norm(arma::as_scalar(h.row(k) * pre[0].v.col(k)));
        const double res = sig / sample.sinr(0, k) - 1e-4; // recovered interference
        CHECK(res < 1e-9 * sig);
    }
}

TEST_CASE("two-cell toy instance matches a term-by-term oracle", "[downlink]") {
    // J = 2 cells, K = 1 user each, M = 2 antennas, hand-built channels
    const std::complex<double> i1(0.0, 1.0);
    arma::cx_mat h0(2, 2), h1(2, 2); // rows: (cell, user) channels to this BS
    h0(0, 0) = 1.0;
    h0(0, 1) = 0.5 * i1; // UE(0,0) to BS0
    h0(1, 0) = 0.3;
    h0(1, 1) = -0.2; // UE(1,0) to BS0
    h1(0, 0) = 0.1 - 0.1 * i1;
    h1(0, 1) = 0.2; // UE(0,0) to BS1
    h1(1, 0) = -1.0;
    h1(1, 1) = 0.7 * i1; // UE(1,0) to BS1

    std::vector<PrecoderSet> pre;
    pre.push_back(zf_precoders(h0.row(0), trivial_partition(1, 1), 1));
    pre.push_back(zf_precoders(h1.row(1), trivial_partition(1, 1), 1));

    const double sigma_d2 = 0.01;
    const RateSample sample = compute_sinr(pre, {h0, h1}, sigma_d2, 2);

    // every term spelled out
    const double sig00 = std::norm(arma::as_scalar(h0.row(0) * pre[0].v.col(0)));
    const double inter00 = std::norm(arma::as_scalar(h1.row(0) * pre[1].v.col(0)));
    CHECK(sample.sinr(0, 0) == Catch::Approx(sig00 / (inter00 + sigma_d2)).epsilon(1e-12));

    const double sig10 = std::norm(arma::as_scalar(h1.row(1) * pre[1].v.col(0)));
    const double inter10 = std::norm(arma::as_scalar(h0.row(1) * pre[0].v.col(0)));
    CHECK(sample.sinr(1, 0) == Catch::Approx(sig10 / (inter10 + sigma_d2)).epsilon(1e-12));

    CHECK(sample.effective_rate(0, 0) ==
          Catch::Approx(0.5 * std::log2(1.0 + sample.sinr(0, 0))).epsilon(1e-12));
}

TEST_CASE("rates are monotone in SINR and zero at zero", "[downlink]") {
    RngStream rng(7, 0);
    const arma::cx_mat h = rng.cgauss(3, 16);
    std::vector<PrecoderSet> pre{zf_precoders(h, trivial_partition(3, 3), 3)};

    const RateSample low = compute_sinr(pre, {h}, 1e-2, 7);
    const RateSample high = compute_sinr(pre, {h}, 1e-4, 7);
    for (arma::uword k = 0; k < 3; ++k) {
        CHECK(high.sinr(0, k) > low.sinr(0, k));
        CHECK(high.effective_rate(0, k) > low.effective_rate(0, k));
    }
    CHECK((3.0 / 7.0) * std::log2(1.0 + 0.0) == 0.0);
}

TEST_CASE("SINR is invariant to per-column phase rotations", "[downlink]") {
    RngStream rng(8, 0);
    const arma::cx_mat h0 = rng.cgauss(2, 16);
    const arma::cx_mat h1 = rng.cgauss(2, 16);
    std::vector<PrecoderSet> pre;
    pre.push_back(zf_precoders(h0, trivial_partition(2, 1), 1));
    pre.push_back(zf_precoders(h1.row(1), trivial_partition(1, 1), 1));
    const RateSample base = compute_sinr(pre, {h0, h1}, 1e-3, 7);

    const std::complex<double> phase = std::polar(1.0, 1.234);
    pre[0].v.col(0) *= phase;
    pre[1].v.col(0) *= std::polar(1.0, -0.777);
    const RateSample rotated = compute_sinr(pre, {h0, h1}, 1e-3, 7);
    CHECK(arma::abs(base.sinr - rotated.sinr).max() < 1e-9);
}

TEST_CASE("out-of-cell group-a users are protected under perfect CSI", "[downlink]") {
    RngStream rng(9, 0);
    // BS serves 3 of 7 group-a rows; rows 3..6 are out-of-cell channels
    const arma::cx_mat rows = rng.cgauss(7, 128);
    const PrecoderSet set = zf_precoders(rows, trivial_partition(7, 3), 3);
    const double served = std::norm(arma::as_scalar(rows.row(0) * set.v.col(0)));
    for (arma::uword out = 3; out < 7; ++out)
        for (arma::uword k = 0; k < 3; ++k) {
            const double leak = std::norm(arma::as_scalar(rows.row(out) * set.v.col(k)));
            CHECK(leak < 1e-9 * served);
        }
}

// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "mubsim/pilot_metrics.hpp"
#include "mubsim/simulator.hpp"

namespace {

int cmd_simulate(const std::string& config_path, long long trials_override,
                 long long seed_override, const std::string& out_path, unsigned threads) {
    mubsim::SimConfig cfg = mubsim::load_config(config_path);
    if (trials_override > 0)
        cfg.trials = static_cast<arma::uword>(trials_override);
    if (seed_override >= 0)
        cfg.seed = static_cast<std::uint64_t>(seed_override);
    cfg.check();

    const mubsim::CampaignResult result = mubsim::run_campaign(cfg, threads);
    std::printf("kind=%s K=%llu trials=%llu completed=%llu excluded=%llu samples=%zu\n",
                mubsim::to_string(cfg.codebook_kind).c_str(),
                static_cast<unsigned long long>(cfg.K),
                static_cast<unsigned long long>(result.trials_requested),
                static_cast<unsigned long long>(result.trials_completed),
                static_cast<unsigned long long>(result.trials_excluded),
                result.rate_samples.size());
    if (!result.rate_samples.empty())
        std::printf("mean=%.6f p5=%.6f p50=%.6f p90=%.6f\n", result.mean, result.p5, result.p50,
                    result.p90);
    if (!out_path.empty()) {
        mubsim::export_cdf(result, out_path);
        std::printf("wrote %s\n", out_path.c_str());
    }
    return 0;
}

int cmd_certify(const std::string& codebook_path) {
    const mubsim::Codebook cb = mubsim::load_codebook(codebook_path);
    const mubsim::ValidationReport rep = mubsim::validate(cb);
    const mubsim::SpectrumReport spec = mubsim::spectrum(mubsim::build_d_matrix(cb));

    std::printf("kind: %s (Q=%llu J=%llu K=%llu)\n", mubsim::to_string(cb.kind).c_str(),
                static_cast<unsigned long long>(cb.length),
                static_cast<unsigned long long>(cb.cells),
                static_cast<unsigned long long>(cb.codes_per_cell));
    std::printf("c1_residual: %.3e\n", rep.c1_residual);
    std::printf("coherence: %.12f\n", rep.coherence);
    if (cb.cells >= 2)
        std::printf("welch_bound: %.12f\n",
                    mubsim::welch_type_bound(cb.cells, cb.length, cb.codes_per_cell));
    std::printf("entry_amplitude_spread: %.3e\n", rep.entry_amplitude_spread);
    std::printf("noise_enhancement: %.9f\n", spec.trace_pinv);
    std::printf("spectrum: rank=%llu lambda_max=%.9f lambda_min_nonzero=%.9f\n",
                static_cast<unsigned long long>(spec.numerical_rank), spec.eigenvalues(0),
                spec.eigenvalues(spec.numerical_rank - 1));

    const bool ok = mubsim::passes_kind_invariants(cb, rep);
    std::printf("invariants: %s\n", ok ? "pass" : "FAIL");
    return ok ? 0 : 2;
}

int cmd_make_codebook(const std::string& kind, unsigned long long q, unsigned long long j,
                      long long seed, const std::string& out_path) {
    mubsim::RngStream rng(static_cast<std::uint64_t>(seed), 0);
    mubsim::Codebook cb;
    const mubsim::CodebookKind k = mubsim::codebook_kind_from_string(kind);
    switch (k) {
    case mubsim::CodebookKind::mub_phase:
        cb = mubsim::build_mub_phase(q, j);
        break;
    case mubsim::CodebookKind::mub:
        cb = mubsim::build_mub(q, j, rng);
        break;
    case mubsim::CodebookKind::incomplete:
        cb = mubsim::build_incomplete(q, j, rng);
        break;
    case mubsim::CodebookKind::orthogonal_reused:
        cb = mubsim::build_orthogonal_reused(q, j, rng);
        break;
    }
    mubsim::save_codebook(cb, out_path);
    std::printf("wrote %s (%s, Q=%llu, J=%llu)\n", out_path.c_str(), kind.c_str(), q, j);
    return 0;
}

int cmd_geometry(const std::string& out_path, double radius, double alpha) {
    const mubsim::NetworkGeometry geo = mubsim::build_geometry(radius, alpha);
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (f == nullptr)
        throw mubsim::IoError("cannot open for writing: " + out_path);
    std::fprintf(f, "type,index,x,y\n");
    for (arma::uword i = 0; i < geo.bs_positions.n_rows; ++i)
        std::fprintf(f, "bs,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(i),
                     geo.bs_positions(i, 0), geo.bs_positions(i, 1));
    for (arma::uword t = 0; t < geo.wrap_translations.n_rows; ++t)
        std::fprintf(f, "wrap,%llu,%.17g,%.17g\n", static_cast<unsigned long long>(t),
                     geo.wrap_translations(t, 0), geo.wrap_translations(t, 1));
    std::fclose(f);
    std::printf("wrote %s\n", out_path.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"non-orthogonal pilot codebook design and multicell training simulator"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "run a Monte Carlo campaign from a config file");
    std::string config_path, sim_out;
    long long trials_override = -1, seed_override = -1;
    unsigned threads = 0;
    sim->add_option("--config", config_path, "key=value config file")->required();
    sim->add_option("--trials", trials_override, "override trial count");
    sim->add_option("--seed", seed_override, "override seed");
    sim->add_option("--out", sim_out, "CDF output CSV path");
    sim->add_option("--threads", threads, "worker threads (0 = hardware)");

    auto* cert = app.add_subcommand("certify", "validate a codebook file and print its metrics");
    std::string codebook_path;
    cert->add_option("--codebook", codebook_path, "codebook file")->required();

    auto* make = app.add_subcommand("make-codebook", "construct and save a codebook");
    std::string kind = "mub", make_out;
    unsigned long long q = 7, j = 7;
    long long make_seed = 1;
    make->add_option("--kind", kind, "mub_phase | mub | incomplete | orthogonal_reused");
    make->add_option("--q", q, "pilot length");
    make->add_option("--j", j, "cell count");
    make->add_option("--seed", make_seed, "RNG seed");
    make->add_option("--out", make_out, "output path")->required();

    auto* geom = app.add_subcommand("geometry", "dump BS positions and wrap translations as CSV");
    std::string geom_out;
    double radius = 10.0, alpha = 2.5;
    geom->add_option("--out", geom_out, "output path")->required();
    geom->add_option("--radius", radius, "cell radius in meters");
    geom->add_option("--alpha", alpha, "path-loss exponent");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, trials_override, seed_override, sim_out, threads);
        if (cert->parsed())
            return cmd_certify(codebook_path);
        if (make->parsed())
            return cmd_make_codebook(kind, q, j, make_seed, make_out);
        if (geom->parsed())
            return cmd_geometry(geom_out, radius, alpha);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid configuration: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 2;
    }
    return 0;
}

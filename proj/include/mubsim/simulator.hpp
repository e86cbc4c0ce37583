// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#ifndef MUBSIM_SIMULATOR_HPP
#define MUBSIM_SIMULATOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mubsim/channel_model.hpp"
#include "mubsim/codebook.hpp"
#include "mubsim/downlink.hpp"
#include "mubsim/estimation.hpp"

namespace mubsim {

struct SimConfig {
    arma::uword J = 7;
    arma::uword Q = 7;
    arma::uword K = 3;
    arma::uword M = 128;
    double R = 10.0;
    double alpha = 2.5;
    double sigma_u2 = 1e-3;
    double sigma_d2 = 1e-4;
    double beta = 0.0;
    CodebookKind codebook_kind = CodebookKind::mub;
    arma::uword trials = 1;
    std::uint64_t seed = 1;
    double d_min = 0.5;
    bool perfect_csi = false;

    void check() const; // throws InvalidParameter
};

/// Flat key=value text, keys exactly the SimConfig field names; '#' starts a
/// comment. Unknown keys are an error.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

struct CampaignResult {
    std::vector<double> rate_samples; // trial-major, J*K per completed trial
    arma::uword trials_requested = 0;
    arma::uword trials_completed = 0;
    arma::uword trials_excluded = 0;
    arma::uword users_per_trial = 0;
    double mean = 0.0;
    double p5 = 0.0;
    double p50 = 0.0;
    double p90 = 0.0;
};

/// Immutable per-campaign inputs shared by all trials.
struct CampaignContext {
    Codebook codebook;
    NetworkGeometry geometry;
};

/// Codebook for a campaign: kind mub is the augmented family with J blocks
/// selected at random (stream id 0 of the seed); the other kinds call their
/// constructors directly.
CampaignContext make_campaign_context(const SimConfig& cfg);

/// One Monte Carlo trial: drop users, assign each cell's K users distinct
/// pilot columns from its block, run uplink training, per-BS estimation and
/// precoding, then evaluate SINR against the true channels.
/// Throws RankDeficient for degenerate trials (caller records and excludes).
RateSample run_trial(const SimConfig& cfg, const CampaignContext& ctx, arma::uword trial_index);

/// Runs all trials (optionally on several threads; results are merged by
/// trial index so any execution order gives identical output).
CampaignResult run_campaign(const SimConfig& cfg, unsigned n_threads = 0);
CampaignResult run_campaign(const SimConfig& cfg, const CampaignContext& ctx,
                            unsigned n_threads = 0);

/// CSV "rate_bps_hz,cdf", rows sorted ascending, cdf = rank/N.
void export_cdf(const CampaignResult& result, const std::string& path);

double percentile(std::vector<double> sorted_or_not, double p);

} // namespace mubsim

#endif

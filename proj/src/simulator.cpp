// SPDX-License-Identifier: Apache-2.0
//
// mubsim - non-orthogonal pilot codebook design and multicell training simulator

#include "mubsim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace mubsim {

namespace {

constexpr std::uint64_t kCampaignStream = 0; // trial t uses stream t+1

struct PerfectGains {
    // wraps true gains in the GainEstimate shape used by partition/mmse
    static GainEstimate at_bs(const LargeScaleGains& gains, arma::uword bs, arma::uword j_cells,
                              arma::uword k_users) {
        GainEstimate est;
        est.theta.set_size(j_cells * k_users);
        for (arma::uword j = 0; j < j_cells; ++j)
            for (arma::uword k = 0; k < k_users; ++k)
                est.theta(j * k_users + k) = gains.g(bs, j, k);
        return est;
    }
};

} // namespace

void SimConfig::check() const {
    if (J != 7 && J != 1)
        throw InvalidParameter("supported cell counts are 1 and 7");
    if (Q < 2)
        throw InvalidParameter("pilot length must be at least 2");
    if (K < 1 || K > Q)
        throw InvalidParameter("users per cell must lie in [1, Q]");
    if (J * K > Q * Q)
        throw InvalidParameter("J*K exceeds the Q^2 resolvability cap");
    if (M < 1)
        throw InvalidParameter("antenna count must be at least 1");
    if (R <= 0.0)
        throw InvalidParameter("cell radius must be positive");
    if (alpha <= 0.0)
        throw InvalidParameter("path-loss exponent must be positive");
    if (sigma_u2 <= 0.0)
        throw InvalidParameter("uplink noise power must be positive");
    if (sigma_d2 <= 0.0)
        throw InvalidParameter("downlink noise power must be positive");
    if (beta < 0.0 || beta > 1.0)
        throw InvalidParameter("beta must lie in [0, 1]");
    if (trials < 1)
        throw InvalidParameter("need at least one trial");
    if (d_min < 0.0)
        throw InvalidParameter("minimum user distance cannot be negative");
    if ((codebook_kind == CodebookKind::mub_phase && J > Q) ||
        (codebook_kind == CodebookKind::mub && J > Q + 1))
        throw InvalidParameter("cell count exceeds the available basis family");
}

SimConfig parse_config(const std::string& text) {
    SimConfig cfg;
    std::istringstream in(text);
    std::string line;
    arma::uword line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter("config line " + std::to_string(line_no) + ": expected key=value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw InvalidParameter("config line " + std::to_string(line_no) + ": empty key or value");

        try {
            if (key == "J")
                cfg.J = std::stoull(value);
            else if (key == "Q")
                cfg.Q = std::stoull(value);
            else if (key == "K")
                cfg.K = std::stoull(value);
            else if (key == "M")
                cfg.M = std::stoull(value);
            else if (key == "R")
                cfg.R = std::stod(value);
            else if (key == "alpha")
                cfg.alpha = std::stod(value);
            else if (key == "sigma_u2")
                cfg.sigma_u2 = std::stod(value);
            else if (key == "sigma_d2")
                cfg.sigma_d2 = std::stod(value);
            else if (key == "beta")
                cfg.beta = std::stod(value);
            else if (key == "codebook_kind")
                cfg.codebook_kind = codebook_kind_from_string(value);
            else if (key == "trials")
                cfg.trials = std::stoull(value);
            else if (key == "seed")
                cfg.seed = std::stoull(value);
            else if (key == "d_min")
                cfg.d_min = std::stod(value);
            else if (key == "perfect_csi")
                cfg.perfect_csi = (value == "1" || value == "true");
            else
                throw InvalidParameter("unknown config key: " + key);
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception&) {
            throw InvalidParameter("config line " + std::to_string(line_no) + ": bad value for " + key);
        }
    }
    cfg.check();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

CampaignContext make_campaign_context(const SimConfig& cfg) {
    cfg.check();
    CampaignContext ctx;
    RngStream rng(cfg.seed, kCampaignStream);
    switch (cfg.codebook_kind) {
    case CodebookKind::mub_phase:
        ctx.codebook = build_mub_phase(cfg.Q, cfg.J);
        break;
    case CodebookKind::mub:
        ctx.codebook = build_mub(cfg.Q, cfg.J, rng);
        break;
    case CodebookKind::incomplete:
        ctx.codebook = build_incomplete(cfg.Q, cfg.J, rng);
        break;
    case CodebookKind::orthogonal_reused:
        ctx.codebook = build_orthogonal_reused(cfg.Q, cfg.J, rng);
        break;
    }
    ctx.geometry = cfg.J == 1 ? build_single_cell_geometry(cfg.R, cfg.alpha)
                              : build_geometry(cfg.R, cfg.alpha);
    return ctx;
}

RateSample run_trial(const SimConfig& cfg, const CampaignContext& ctx, arma::uword trial_index) {
    const arma::uword j_cells = cfg.J;
    const arma::uword q = cfg.Q;
    const arma::uword k_users = cfg.K;

    RngStream rng(cfg.seed, static_cast<std::uint64_t>(trial_index) + 1);

    const UserDrop drop = drop_users(ctx.geometry, k_users, cfg.d_min, rng);

    // distinct pilot columns per cell, sampled without replacement
    arma::cx_mat pilots(q, j_cells * k_users);
    for (arma::uword j = 0; j < j_cells; ++j) {
        const std::vector<arma::uword> pick = rng.sample_without_replacement(q, k_users);
        for (arma::uword k = 0; k < k_users; ++k)
            pilots.col(j * k_users + k) = ctx.codebook.matrix.col(j * q + pick[k]);
    }
    Codebook effective;
    effective.matrix = pilots;
    effective.cells = j_cells;
    effective.length = q;
    effective.codes_per_cell = k_users;
    effective.kind = ctx.codebook.kind;

    const LargeScaleGains gains = compute_gains(ctx.geometry, drop);
    const std::vector<ChannelRealization> channels = draw_channels(gains, cfg.M, rng);

    std::vector<PrecoderSet> precoders;
    precoders.reserve(j_cells);
    const bool benchmark = cfg.codebook_kind == CodebookKind::orthogonal_reused;

    for (arma::uword i = 0; i < j_cells; ++i) {
        if (cfg.perfect_csi) {
            GainEstimate truth = PerfectGains::at_bs(gains, i, j_cells, k_users);
            GroupPartition part;
            if (j_cells * k_users >= q) {
                part = partition_groups(truth, i, j_cells, q, k_users);
            } else {
                part.home_cell = i;
                part.in_cell_count = k_users;
                for (arma::uword k = 0; k < k_users; ++k)
                    part.group_a.push_back(i * k_users + k);
            }
            arma::cx_mat rows(part.group_a.size(), cfg.M);
            for (arma::uword t = 0; t < part.group_a.size(); ++t)
                rows.row(t) = channels[i].row(part.group_a[t]);
            precoders.push_back(zf_precoders(rows, part, k_users, ZfPolicy::truncate_null_directions));
            continue;
        }

        const arma::cx_mat y = uplink_receive(pilots, channels[i], cfg.sigma_u2, rng);
        const arma::cx_mat r_hat = sample_covariance(y);

        if (benchmark) {
            // conventional path: the BS only knows its own K pilots
            GroupPartition part;
            part.home_cell = i;
            part.in_cell_count = k_users;
            for (arma::uword k = 0; k < k_users; ++k)
                part.group_a.push_back(i * k_users + k);

            Codebook own;
            own.matrix = pilots.cols(i * k_users, (i + 1) * k_users - 1);
            own.cells = 1;
            own.length = q;
            own.codes_per_cell = k_users;
            own.kind = CodebookKind::orthogonal_reused;
            GainEstimate own_est = estimate_large_scale(r_hat, own, cfg.sigma_u2);

            // re-index the K own gains into the full JK layout for mmse
            GainEstimate full;
            full.theta.zeros(j_cells * k_users);
            for (arma::uword k = 0; k < k_users; ++k)
                full.theta(i * k_users + k) = own_est.theta(k);
            const SmallScaleEstimate sse =
                mmse_small_scale(y, pilots, part, full, cfg.sigma_u2, 0.0);
            precoders.push_back(
                zf_precoders(sse.unscaled_rows, part, k_users, ZfPolicy::truncate_null_directions));
            continue;
        }

        const GainEstimate est = estimate_large_scale(r_hat, effective, cfg.sigma_u2);
        const GroupPartition part = partition_groups(est, i, j_cells, q, k_users);
        const SmallScaleEstimate sse =
            mmse_small_scale(y, pilots, part, est, cfg.sigma_u2, cfg.beta);
        precoders.push_back(
            zf_precoders(sse.unscaled_rows, part, k_users, ZfPolicy::truncate_null_directions));
    }

    return compute_sinr(precoders, channels, cfg.sigma_d2, q);
}

CampaignResult run_campaign(const SimConfig& cfg, unsigned n_threads) {
    return run_campaign(cfg, make_campaign_context(cfg), n_threads);
}

CampaignResult run_campaign(const SimConfig& cfg, const CampaignContext& ctx, unsigned n_threads) {
    cfg.check();
    const arma::uword users = cfg.J * cfg.K;
    if (n_threads == 0)
        n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, cfg.trials);

    std::vector<std::vector<double>> per_trial(cfg.trials);
    std::vector<char> excluded(cfg.trials, 0);
    std::atomic<arma::uword> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&]() {
        while (true) {
            const arma::uword t = next.fetch_add(1);
            if (t >= cfg.trials)
                return;
            try {
                const RateSample sample = run_trial(cfg, ctx, t);
                std::vector<double> flat;
                flat.reserve(users);
                for (arma::uword i = 0; i < cfg.J; ++i)
                    for (arma::uword k = 0; k < cfg.K; ++k)
                        flat.push_back(sample.effective_rate(i, k));
                per_trial[t] = std::move(flat);
            } catch (const RankDeficient&) {
                excluded[t] = 1;
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                return;
            }
        }
    };

    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (first_error)
        std::rethrow_exception(first_error);

    CampaignResult result;
    result.trials_requested = cfg.trials;
    result.users_per_trial = users;
    for (arma::uword t = 0; t < cfg.trials; ++t) {
        if (excluded[t]) {
            ++result.trials_excluded;
            continue;
        }
        ++result.trials_completed;
        result.rate_samples.insert(result.rate_samples.end(), per_trial[t].begin(),
                                   per_trial[t].end());
    }
    if (!result.rate_samples.empty()) {
        result.mean = std::accumulate(result.rate_samples.begin(), result.rate_samples.end(), 0.0) /
                      static_cast<double>(result.rate_samples.size());
        result.p5 = percentile(result.rate_samples, 5.0);
        result.p50 = percentile(result.rate_samples, 50.0);
        result.p90 = percentile(result.rate_samples, 90.0);
    }
    return result;
}

double percentile(std::vector<double> values, double p) {
    if (values.empty())
        throw InvalidParameter("percentile of empty sample");
    std::sort(values.begin(), values.end());
    const double rank = p / 100.0 * static_cast<double>(values.size() - 1);
    const arma::uword lo = static_cast<arma::uword>(std::floor(rank));
    const arma::uword hi = std::min<arma::uword>(lo + 1, values.size() - 1);
    const double frac = rank - std::floor(rank);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

void export_cdf(const CampaignResult& result, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr)
        throw IoError("cannot open for writing: " + path);
    std::fprintf(f, "rate_bps_hz,cdf\n");
    std::vector<double> sorted = result.rate_samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    for (arma::uword r = 0; r < sorted.size(); ++r)
        std::fprintf(f, "%.17g,%.17g\n", sorted[r], static_cast<double>(r + 1) / n);
    if (std::fclose(f) != 0)
        throw IoError("write failed: " + path);
}

} // namespace mubsim

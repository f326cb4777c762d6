#include <string>
#include <vector>

#include "railsim/access/access.hpp"
#include "railsim/core/experiment.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

access::AccessConfig access_config_from(const core::ScenarioConfig& cfg) {
    access::AccessConfig acc;
    acc.rail_users = static_cast<int>(cfg.get("access.rail_users"));
    acc.onboard_users = static_cast<int>(cfg.get("access.onboard_users"));
    acc.pilot_len = static_cast<int>(cfg.get("access.pilot_len"));
    acc.activity_prob = cfg.get("access.activity_prob");
    acc.train_present_prob = cfg.get("access.train_present_prob");
    acc.snr_db = cfg.get("access.snr_db");
    return acc;
}

/// Redraws until at least one user is active; bounded and deterministic.
access::SparseProblem nonempty_problem(const access::AccessConfig& acc,
                                       core::RngStream& stream) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        auto sub = stream.substream("draw/" + std::to_string(attempt));
        access::SparseProblem problem = access::gen_problem(acc, sub);
        if (!problem.truth_support.empty()) return problem;
    }
    throw std::runtime_error("no active users after 1000 draws");
}

MetricsTable run_access_fig25(TrialContext& ctx) {
    access::AccessConfig acc = access_config_from(ctx.config);
    MetricsTable table;
    table.columns = {"snr_db", "nmse_omp",  "nmse_sp",  "nmse_cosamp",
                     "nmse_samp", "nmse_ista", "nmse_amp"};
    for (double snr : {0.0, 10.0, 20.0, 30.0}) {
        acc.snr_db = snr;
        auto stream = ctx.stream.substream("fig25/" + std::to_string(snr));
        const access::SparseProblem problem = nonempty_problem(acc, stream);
        const int k = static_cast<int>(problem.truth_support.size());
        table.append_row({snr,
                          access::solve_omp(problem, k).nmse,
                          access::solve_sp(problem, k).nmse,
                          access::solve_cosamp(problem, k).nmse,
                          access::solve_samp(problem).nmse,
                          access::solve_ista(problem).nmse,
                          access::solve_amp(problem).nmse});
    }
    return table;
}

MetricsTable run_access_fig26(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    access::FrameConfig frame_cfg;
    frame_cfg.access = access_config_from(cfg);
    frame_cfg.columns = static_cast<int>(cfg.get("access.frame_columns"));
    MetricsTable table;
    table.columns = {"snr_db", "mu_samp", "mu_bsamp_cp"};
    for (double snr : {0.0, 10.0, 20.0, 30.0}) {
        frame_cfg.access.snr_db = snr;
        auto stream = ctx.stream.substream("fig26/" + std::to_string(snr));
        access::FramedSignal frame;
        for (int attempt = 0;; ++attempt) {
            auto sub = stream.substream("draw/" + std::to_string(attempt));
            frame = access::gen_framed(frame_cfg, sub);
            if (!frame.truth_support.empty() || attempt >= 1000) break;
        }
        const auto samp = access::solve_samp_frame(frame);
        const auto bsamp = access::solve_bsamp_cp(frame);
        table.append_row({snr, samp.mu_data, bsamp.mu_data});
    }
    return table;
}

MetricsTable run_access_bimodal(TrialContext& ctx) {
    const access::AccessConfig acc = access_config_from(ctx.config);
    const int draws = static_cast<int>(ctx.config.get("access.bimodal_draws"));

    std::vector<int> histogram(acc.total_users() + 1, 0);
    for (int d = 0; d < draws; ++d) {
        auto stream = ctx.stream.substream("bimodal/" + std::to_string(d));
        const bool train = stream.bernoulli(acc.train_present_prob);
        int active = stream.binomial(acc.rail_users, acc.activity_prob);
        if (train) active += stream.binomial(acc.onboard_users, acc.activity_prob);
        ++histogram[active];
    }

    MetricsTable table;
    table.columns = {"active_count", "frequency"};
    for (size_t k = 0; k < histogram.size(); ++k) {
        table.append_row({static_cast<double>(k),
                          static_cast<double>(histogram[k]) / draws});
    }
    return table;
}

}  // namespace

void register_access() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("access.rail_users", 40.0, "rail-side users N_r");
    keys.add("access.onboard_users", 24.0, "onboard users N_o");
    keys.add("access.pilot_len", 32.0, "pilot length l_p");
    keys.add("access.activity_prob", 0.1, "per-user activity probability p");
    keys.add("access.train_present_prob", 0.5, "train presence probability");
    keys.add("access.snr_db", 20.0, "receive SNR (dB)");
    keys.add("access.frame_columns", 13.0, "frame columns J (pilot + data)");
    keys.add("access.bimodal_draws", 10000.0, "draws for the activity histogram");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"access_fig25",
                       "channel-estimation NMSE vs SNR per solver",
                       1, run_access_fig25});
    reg.add(Experiment{"access_fig26",
                       "data recovery ratio vs SNR: SAMP vs BSAMP-CP",
                       1, run_access_fig26});
    reg.add(Experiment{"access_bimodal",
                       "active-user count histogram under train passing",
                       1, run_access_bimodal});
}

}  // namespace railsim::experiments

#include <cmath>
#include <string>
#include <vector>

#include "railsim/core/experiment.hpp"
#include "railsim/otfs/otfs.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

otfs::TfGrid grid_from(const core::ScenarioConfig& cfg) {
    otfs::TfGrid grid;
    grid.subcarriers = static_cast<int>(cfg.get("otfs.subcarriers"));
    grid.symbols = static_cast<int>(cfg.get("otfs.symbols"));
    grid.subcarrier_spacing_hz = cfg.get("otfs.subcarrier_spacing");
    grid.validate();
    return grid;
}

MetricsTable run_otfs_fig14(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const otfs::TfGrid grid = grid_from(cfg);
    const int base_bin = static_cast<int>(cfg.get("otfs.base_delay_bin"));
    const double coherence_frac = cfg.get("otfs.coherence_frac");

    MetricsTable table;
    table.columns = {"offset_frac", "eff_paths_static", "compactness_static",
                     "compactness_tv", "peak_offset"};
    for (double frac : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        otfs::TdlChannel truth;
        otfs::Tap tap;
        tap.delay_s = (base_bin + frac) * grid.delay_resolution_s();
        tap.doppler_hz = 2.0 * grid.doppler_resolution_hz();
        tap.gain = {1.0, 0.0};
        truth.taps.push_back(tap);

        const auto tf_static = otfs::tdl_to_tf(truth, grid);
        const auto dd_static = otfs::sfft(tf_static, grid);
        const auto metrics_static = otfs::leakage_metrics(dd_static, truth, grid);

        otfs::TdlChannel varying = truth;
        varying.coherence_time_s =
            coherence_frac * grid.symbols * grid.symbol_duration_s();
        auto stream = ctx.stream.substream("otfs/" + std::to_string(frac));
        const auto tf_tv = otfs::tdl_to_tf(varying, grid, &stream);
        const auto dd_tv = otfs::sfft(tf_tv, grid);
        const auto metrics_tv = otfs::leakage_metrics(dd_tv, varying, grid);

        table.append_row({frac,
                          static_cast<double>(metrics_static.effective_path_count),
                          metrics_static.compactness, metrics_tv.compactness,
                          metrics_static.peak_offset.empty()
                              ? 0.0
                              : metrics_static.peak_offset[0]});
    }
    return table;
}

MetricsTable run_otfs_ddgrid(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const otfs::TfGrid grid = grid_from(cfg);

    otfs::TdlChannel truth;
    truth.taps.push_back({cfg.get("otfs.tap0_delay"),
                          cfg.get("otfs.tap0_doppler"),
                          {1.0, 0.0}});
    if (cfg.get("otfs.tap1_gain") > 0.0) {
        truth.taps.push_back({cfg.get("otfs.tap1_delay"),
                              cfg.get("otfs.tap1_doppler"),
                              {cfg.get("otfs.tap1_gain"), 0.0}});
    }

    const auto dd = otfs::sfft(otfs::tdl_to_tf(truth, grid), grid);
    MetricsTable table;
    table.columns = {"delay_bin", "doppler_bin", "magnitude"};
    for (int l = 0; l < dd.delay_bins; ++l) {
        for (int k = 0; k < dd.doppler_bins; ++k) {
            table.append_row({static_cast<double>(l), static_cast<double>(k),
                              std::abs(dd.at(l, k))});
        }
    }
    return table;
}

}  // namespace

void register_otfs() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("otfs.subcarriers", 32.0, "M, power of two >= 4");
    keys.add("otfs.symbols", 32.0, "N, power of two >= 4");
    keys.add("otfs.subcarrier_spacing", 15e3, "delta_f (Hz)");
    keys.add("otfs.base_delay_bin", 3.0, "integer part of the swept tap delay");
    keys.add("otfs.coherence_frac", 0.25,
             "coherence time as a fraction of the frame length");
    keys.add("otfs.tap0_delay", 0.0, "tap 0 delay (s)");
    keys.add("otfs.tap0_doppler", 0.0, "tap 0 Doppler (Hz)");
    keys.add("otfs.tap1_gain", 0.0, "tap 1 gain (0 disables the tap)");
    keys.add("otfs.tap1_delay", 0.0, "tap 1 delay (s)");
    keys.add("otfs.tap1_doppler", 0.0, "tap 1 Doppler (Hz)");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"otfs_fig14",
                       "spreading-function compactness vs fractional offset and fading",
                       1, run_otfs_fig14});
    reg.add(Experiment{"otfs_ddgrid",
                       "delay-Doppler grid magnitude dump (delay_bin, doppler_bin, magnitude)",
                       2, run_otfs_ddgrid});
}

}  // namespace railsim::experiments

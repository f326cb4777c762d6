#include <cmath>
#include <string>
#include <vector>

#include "railsim/channel/aging.hpp"
#include "railsim/channel/ris.hpp"
#include "railsim/core/experiment.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

channel::RisConfig ris_config_from(const core::ScenarioConfig& cfg,
                                   int elements, std::uint64_t ray_seed) {
    channel::RisConfig ris;
    ris.element_count = elements;
    ris.element_phases.assign(elements, 0.0);
    ris.carrier_freq_hz = cfg.get("channel.carrier_ghz") * 1e9;
    ris.train_speed_mps = cfg.get("channel.train_speed");
    ris.bs_pos = {0.0, cfg.get("channel.bs_distance"), 10.0};
    ris.ris_center = {0.0, 0.0, 0.0};
    ris.rx_pos = {0.5, -cfg.get("channel.rx_offset"), 0.0};
    ris.element_gain = cfg.get("channel.element_gain");
    ris.aperture_elements = cfg.get("channel.aperture_elements");
    ris.ray_seed = ray_seed;
    const int clusters = static_cast<int>(cfg.get("channel.cluster_count"));
    const int rays = static_cast<int>(cfg.get("channel.cluster_rays"));
    const double power = cfg.get("channel.cluster_power");
    for (int c = 0; c < clusters; ++c) {
        channel::ClusterSpec cl;
        cl.position = {15.0 + 7.0 * c, 10.0 + 4.0 * c, 2.0};
        cl.mean_power = power;
        cl.ray_count = rays;
        ris.clusters.push_back(cl);
    }
    return ris;
}

MetricsTable run_ris_fig3(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const int draws = static_cast<int>(cfg.get("channel.ris_draws"));
    MetricsTable table;
    table.columns = {"n_elements", "cir_mean", "cir_var"};
    for (int elements : {8, 32, 128}) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int d = 0; d < draws; ++d) {
            auto draw_stream =
                ctx.stream.substream("ris/" + std::to_string(elements) + "/" +
                                     std::to_string(d));
            channel::RisConfig ris =
                ris_config_from(cfg, elements, draw_stream.next_u64());
            ris.element_phases = channel::optimize_phases(ris, 0.0);
            const channel::Cir cir = channel::ris_cir(ris, 0.0);
            const double mag = std::abs(cir.total);
            sum += mag;
            sum_sq += mag * mag;
        }
        const double mean = sum / draws;
        const double var = sum_sq / draws - mean * mean;
        table.append_row({static_cast<double>(elements), mean, var});
    }
    return table;
}

MetricsTable run_aging_fig11(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const int horizon = static_cast<int>(cfg.get("channel.horizon"));
    const int antennas = static_cast<int>(cfg.get("channel.tx_antennas"));
    const int trials = static_cast<int>(cfg.get("channel.se_trials"));
    const double snr_db = cfg.get("channel.snr_db");
    const double gain = cfg.get("channel.se_element_gain");

    struct Config {
        double fdts;
        int elements;
        std::string name;
    };
    const std::vector<Config> grid = {
        {0.01, 32, "se_fd001_n32"},
        {0.05, 32, "se_fd005_n32"},
        {0.01, 128, "se_fd001_n128"},
        {0.05, 128, "se_fd005_n128"},
    };

    MetricsTable table;
    table.columns = {"slot"};
    for (const auto& g : grid) table.columns.push_back(g.name);

    std::vector<std::vector<double>> curves;
    for (const auto& g : grid) {
        auto stream = ctx.stream.substream("aging/" + g.name);
        channel::FadingProcess fading{g.fdts, antennas};
        curves.push_back(channel::average_se_curve(
            g.elements, gain, fading, horizon, antennas, snr_db, trials, stream));
    }
    for (int n = 0; n < horizon; ++n) {
        std::vector<double> row{static_cast<double>(n)};
        for (const auto& curve : curves) row.push_back(curve[n]);
        table.append_row(std::move(row));
    }
    return table;
}

MetricsTable run_aging_fig12(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const int antennas = static_cast<int>(cfg.get("channel.tx_antennas"));
    const int trials = static_cast<int>(cfg.get("channel.se_trials"));
    const double snr_db = cfg.get("channel.snr_db");
    const double gain = cfg.get("channel.se_element_gain");
    const int slot = static_cast<int>(cfg.get("channel.fig12_slot"));

    MetricsTable table;
    table.columns = {"fdts", "se_n32", "se_n128"};
    for (double fdts : {0.005, 0.01, 0.02, 0.05, 0.1}) {
        std::vector<double> row{fdts};
        for (int elements : {32, 128}) {
            auto stream = ctx.stream.substream(
                "fig12/" + std::to_string(elements) + "/" + std::to_string(fdts));
            channel::FadingProcess fading{fdts, antennas};
            const auto curve = channel::average_se_curve(
                elements, gain, fading, slot + 1, antennas, snr_db, trials,
                stream);
            row.push_back(curve[slot]);
        }
        table.append_row(std::move(row));
    }
    return table;
}

}  // namespace

void register_channel() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("channel.carrier_ghz", 3.5, "carrier frequency in GHz");
    keys.add("channel.train_speed", 83.0, "train speed (m/s; accepts km/h)");
    keys.add("channel.bs_distance", 50.0, "BS distance from the RIS (m)");
    keys.add("channel.rx_offset", 2.0, "receiver offset behind the RIS (m)");
    keys.add("channel.element_gain", 50.0, "per-element re-radiation gain");
    keys.add("channel.aperture_elements", 40.0,
             "element count that covers the window aperture");
    keys.add("channel.cluster_count", 3.0, "scatterer cluster count");
    keys.add("channel.cluster_rays", 12.0, "rays per cluster");
    keys.add("channel.cluster_power", 0.3,
             "cluster power relative to unit LoS reference");
    keys.add("channel.ris_draws", 500.0, "CIR draws per element count");
    keys.add("channel.horizon", 60.0, "SE curve horizon (slots)");
    keys.add("channel.tx_antennas", 4.0, "BS antennas for the SE curve");
    keys.add("channel.se_trials", 200.0, "Monte Carlo trials per SE curve");
    keys.add("channel.snr_db", 10.0, "transmit SNR for the SE curve (dB)");
    keys.add("channel.se_element_gain", 0.05,
             "per-element channel power boost in the SE model");
    keys.add("channel.fdts", 0.01, "normalized Doppler f_D*T_s");
    keys.add("channel.fig12_slot", 50.0, "slot sampled for the SE-vs-fdts sweep");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"ris_fig3",
                       "mean/variance of |CIR| with optimized phases vs element count",
                       1, run_ris_fig3});
    reg.add(Experiment{"aging_fig11",
                       "per-slot spectral efficiency under channel aging",
                       1, run_aging_fig11});
    reg.add(Experiment{"aging_fig12",
                       "spectral efficiency at a fixed slot vs normalized Doppler",
                       1, run_aging_fig12});
}

}  // namespace railsim::experiments

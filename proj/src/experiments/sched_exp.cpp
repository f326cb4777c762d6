#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "railsim/core/experiment.hpp"
#include "railsim/sched/sched.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

sched::TopoParams topo_params_from(const core::ScenarioConfig& cfg) {
    sched::TopoParams params;
    params.bs_antennas = static_cast<int>(cfg.get("sched.bs_antennas"));
    params.rau_count = static_cast<int>(cfg.get("sched.rau_count"));
    params.mr_count = static_cast<int>(cfg.get("sched.mr_count"));
    params.beamwidth_rad = cfg.get("sched.beamwidth");
    params.rate_floor_frac = cfg.get("sched.rate_floor");
    params.budget.carrier_freq_hz = cfg.get("sched.carrier");
    params.budget.bandwidth_hz = cfg.get("sched.bandwidth");
    params.budget.efficiency = cfg.get("sched.efficiency");
    params.budget.tx_power_w = cfg.get("sched.tx_power");
    params.budget.tx_gain_dbi = cfg.get("sched.tx_gain");
    params.budget.rx_gain_dbi = cfg.get("sched.rx_gain");
    params.budget.noise_psd_w_per_hz = cfg.get("sched.noise_psd");
    params.budget.absorption_per_m = cfg.get("sched.absorption");
    return params;
}

sched::Frame frame_from(const core::ScenarioConfig& cfg) {
    sched::Frame frame;
    frame.pilot_time_s = cfg.get("sched.pilot_time");
    frame.slot_count = static_cast<int>(cfg.get("sched.slot_count"));
    frame.slot_len_s = cfg.get("sched.slot_len");
    return frame;
}

std::vector<sched::FlowReq> draw_flows(const sched::Topology& topo,
                                       int num_flows, double qos_min,
                                       double qos_max,
                                       core::RngStream& stream) {
    std::vector<int> mrs(topo.mrs.size());
    for (size_t i = 0; i < mrs.size(); ++i) mrs[i] = static_cast<int>(i);
    // Partial Fisher-Yates for a deterministic distinct-MR draw.
    for (int i = 0; i < num_flows; ++i) {
        const int j =
            i + static_cast<int>(stream.uniform_int(mrs.size() - i));
        std::swap(mrs[i], mrs[j]);
    }
    std::vector<sched::FlowReq> flows;
    for (int i = 0; i < num_flows; ++i) {
        sched::FlowReq flow;
        flow.flow_id = i;
        flow.mr = mrs[i];
        flow.qos_bps = stream.uniform(qos_min, qos_max);
        flows.push_back(flow);
    }
    return flows;
}

void require_feasible(const sched::Schedule& schedule,
                      const sched::Topology& topo, const sched::Frame& frame,
                      const std::vector<sched::FlowReq>& flows,
                      const std::string& who) {
    const auto feas = sched::check_feasible(schedule, topo, frame, flows);
    if (!feas.ok)
        throw std::runtime_error(who + " schedule failed the feasibility check: " +
                                 feas.violations.front().detail);
}

MetricsTable run_sched_sweep(TrialContext& ctx, bool throughput) {
    const auto& cfg = ctx.config;
    const sched::Topology topo = sched::make_topology(topo_params_from(cfg));
    const sched::Frame frame = frame_from(cfg);
    const double qos_min = cfg.get("sched.qos_min");
    const double qos_max = cfg.get("sched.qos_max");
    const int max_flows = static_cast<int>(cfg.get("sched.max_flows"));
    const int step = static_cast<int>(cfg.get("sched.flow_step"));

    MetricsTable table;
    if (throughput) {
        table.columns = {"num_flows", "tput_proposed_bps", "tput_serial_bps",
                         "tput_greedy_bps"};
    } else {
        table.columns = {"num_flows", "slots_proposed", "slots_serial",
                         "slots_greedy"};
    }

    for (int n = step; n <= max_flows; n += step) {
        auto stream = ctx.stream.substream("sched/" + std::to_string(n));
        const auto flows = draw_flows(topo, n, qos_min, qos_max, stream);

        const auto proposed = sched::schedule_location_aware(topo, flows, frame);
        const auto serial = sched::schedule_serial_baseline(topo, flows, frame);
        const auto greedy = sched::schedule_greedy_qos(topo, flows, frame);
        require_feasible(proposed, topo, frame, flows, "location-aware");
        require_feasible(serial, topo, frame, flows, "serial");
        require_feasible(greedy, topo, frame, flows, "greedy-qos");

        if (throughput) {
            table.append_row({static_cast<double>(n),
                              sched::system_throughput(proposed, frame),
                              sched::system_throughput(serial, frame),
                              sched::system_throughput(greedy, frame)});
        } else {
            table.append_row({static_cast<double>(n),
                              static_cast<double>(proposed.slots_used),
                              static_cast<double>(serial.slots_used),
                              static_cast<double>(greedy.slots_used)});
        }
    }
    return table;
}

MetricsTable run_sched_fig18(TrialContext& ctx) {
    return run_sched_sweep(ctx, false);
}

MetricsTable run_sched_fig19(TrialContext& ctx) {
    return run_sched_sweep(ctx, true);
}

}  // namespace

void register_sched() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("sched.bs_antennas", 4.0, "BS transmit antennas N_Bt");
    keys.add("sched.rau_count", 6.0, "RAUs along the tube");
    keys.add("sched.mr_count", 24.0, "mobile relays on the train roof");
    keys.add("sched.beamwidth", 0.02, "half-power beamwidth (rad)");
    keys.add("sched.rate_floor", 0.7, "slot admission rate floor (fraction of nominal)");
    keys.add("sched.carrier", 340e9, "carrier frequency (Hz)");
    keys.add("sched.bandwidth", 1e9, "link bandwidth W (Hz)");
    keys.add("sched.efficiency", 0.5, "transceiver efficiency eta");
    keys.add("sched.tx_power", 1.0, "transmit power (W)");
    keys.add("sched.tx_gain", 30.0, "transmit antenna gain (dBi)");
    keys.add("sched.rx_gain", 30.0, "receive antenna gain (dBi)");
    keys.add("sched.noise_psd", 4e-21, "noise PSD N0 (W/Hz)");
    keys.add("sched.absorption", 1e-3, "molecular absorption k (1/m)");
    keys.add("sched.pilot_time", 0.0, "frame pilot time T_s (s)");
    keys.add("sched.slot_count", 1200.0, "slots per frame M");
    keys.add("sched.slot_len", 10e-6, "slot length (s)");
    keys.add("sched.qos_min", 10e6, "QoS lower bound (bit/s)");
    keys.add("sched.qos_max", 500e6, "QoS upper bound (bit/s)");
    keys.add("sched.max_flows", 24.0, "largest swept flow count");
    keys.add("sched.flow_step", 4.0, "flow count sweep step");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"sched_fig18",
                       "slots used vs requested flows for the three schedulers",
                       1, run_sched_fig18});
    reg.add(Experiment{"sched_fig19",
                       "system throughput vs requested flows for the three schedulers",
                       1, run_sched_fig19});
}

}  // namespace railsim::experiments

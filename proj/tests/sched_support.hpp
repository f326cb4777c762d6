#ifndef RAILSIM_TESTS_SCHED_SUPPORT_HPP
#define RAILSIM_TESTS_SCHED_SUPPORT_HPP

// Test-side scheduling oracle: exhaustive search over per-flow routes and
// per-slot activation sets, sharing only the system model (rates with
// interference, relay buffering) with the implementation under test.

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

#include "railsim/sched/sched.hpp"

namespace railsim::testsupport {

struct OracleResult {
    int min_slots = -1;  // -1: no complete schedule within the horizon
};

namespace detail {

inline bool subset_structurally_valid(const sched::Topology& topo,
                                      const std::vector<sched::Demand>& demands,
                                      const std::vector<int>& subset) {
    int bs_tx = 0;
    std::map<int, int> rau_tx, rau_rx, mr_rx;
    for (int id : subset) {
        const sched::Demand& d = demands[id];
        if (d.src.kind == sched::NodeKind::Bs) ++bs_tx;
        if (d.src.kind == sched::NodeKind::Rau) ++rau_tx[d.src.index];
        if (d.dst.kind == sched::NodeKind::Rau) ++rau_rx[d.dst.index];
        if (d.dst.kind == sched::NodeKind::Mr) ++mr_rx[d.dst.index];
    }
    if (bs_tx > topo.bs_antennas) return false;
    for (const auto& [rau, n] : rau_tx) {
        if (n > 1 || rau_rx.count(rau)) return false;
    }
    for (const auto& [rau, n] : rau_rx) {
        if (n > 1) return false;
    }
    for (const auto& [mr, n] : mr_rx) {
        if (n > 1) return false;
    }
    return true;
}

struct RouteSearch {
    const sched::Topology& topo;
    const sched::Frame& frame;
    std::vector<sched::Demand> demands;
    std::vector<std::vector<int>> subsets;          // structurally valid
    std::vector<std::vector<double>> subset_rates;  // per subset, per member

    bool dfs(std::vector<double>& delivered, std::map<int, double>& backlog,
             int remaining_slots) {
        bool all_met = true;
        const double frame_time = frame.duration_s();
        for (const auto& d : demands) {
            if (delivered[d.id] < d.qos_bps * frame_time * (1.0 - 1e-12)) {
                all_met = false;
                break;
            }
        }
        if (all_met) return true;
        if (remaining_slots == 0) return false;

        for (size_t s = 0; s < subsets.size(); ++s) {
            const auto& subset = subsets[s];
            if (subset.empty()) continue;
            // Apply the slot.
            std::vector<double> saved_delivered = delivered;
            std::map<int, double> saved_backlog = backlog;
            for (size_t i = 0; i < subset.size(); ++i) {
                const sched::Demand& d = demands[subset[i]];
                double bits = subset_rates[s][i] * frame.slot_len_s;
                if (d.hop == 1) {
                    double& b = backlog[d.flow_id];
                    bits = std::min(bits, b);
                    b -= bits;
                } else if (d.dst.kind == sched::NodeKind::Rau) {
                    backlog[d.flow_id] += bits;
                }
                delivered[d.id] += bits;
            }
            if (dfs(delivered, backlog, remaining_slots - 1)) return true;
            delivered = std::move(saved_delivered);
            backlog = std::move(saved_backlog);
        }
        return false;
    }
};

inline std::vector<sched::Demand> demands_for_routes(
    const sched::Topology& topo, const std::vector<sched::FlowReq>& flows,
    const std::vector<int>& route) {  // route[f]: -1 direct, else RAU index
    std::vector<sched::Demand> demands;
    for (size_t f = 0; f < flows.size(); ++f) {
        const sched::NodeRef bs{sched::NodeKind::Bs, 0};
        const sched::NodeRef mr{sched::NodeKind::Mr, flows[f].mr};
        if (route[f] < 0) {
            sched::Demand d;
            d.id = static_cast<int>(demands.size());
            d.flow_id = flows[f].flow_id;
            d.hop = 0;
            d.src = bs;
            d.dst = mr;
            d.distance_m = topo.distance(bs, mr);
            d.nominal_rate_bps = topo.nominal_rate(bs, mr);
            d.qos_bps = flows[f].qos_bps;
            demands.push_back(d);
        } else {
            const sched::NodeRef rau{sched::NodeKind::Rau, route[f]};
            sched::Demand leg1;
            leg1.id = static_cast<int>(demands.size());
            leg1.flow_id = flows[f].flow_id;
            leg1.hop = 0;
            leg1.src = bs;
            leg1.dst = rau;
            leg1.distance_m = topo.distance(bs, rau);
            leg1.nominal_rate_bps = topo.nominal_rate(bs, rau);
            leg1.qos_bps = flows[f].qos_bps;
            demands.push_back(leg1);
            sched::Demand leg2;
            leg2.id = static_cast<int>(demands.size());
            leg2.flow_id = flows[f].flow_id;
            leg2.hop = 1;
            leg2.src = rau;
            leg2.dst = mr;
            leg2.distance_m = topo.distance(rau, mr);
            leg2.nominal_rate_bps = topo.nominal_rate(rau, mr);
            leg2.qos_bps = flows[f].qos_bps;
            demands.push_back(leg2);
        }
    }
    return demands;
}

}  // namespace detail

/// Minimum slot count over every route assignment and activation sequence,
/// or -1 when no schedule completes within frame.slot_count slots.
inline OracleResult brute_force_min_slots(const sched::Topology& topo,
                                          const std::vector<sched::FlowReq>& flows,
                                          const sched::Frame& frame) {
    const int n_flows = static_cast<int>(flows.size());
    const int n_routes = 1 + static_cast<int>(topo.raus.size());

    std::vector<int> route(n_flows, -1);
    OracleResult best;
    int combos = 1;
    for (int f = 0; f < n_flows; ++f) combos *= n_routes;

    for (int combo = 0; combo < combos; ++combo) {
        int rest = combo;
        for (int f = 0; f < n_flows; ++f) {
            route[f] = rest % n_routes - 1;
            rest /= n_routes;
        }
        detail::RouteSearch search{topo, frame,
                                   detail::demands_for_routes(topo, flows, route),
                                   {},
                                   {}};
        const int n_demands = static_cast<int>(search.demands.size());
        for (int mask = 1; mask < (1 << n_demands); ++mask) {
            std::vector<int> subset;
            for (int d = 0; d < n_demands; ++d) {
                if (mask & (1 << d)) subset.push_back(d);
            }
            if (!detail::subset_structurally_valid(topo, search.demands, subset))
                continue;
            search.subset_rates.push_back(
                sched::slot_rates(topo, search.demands, subset));
            search.subsets.push_back(std::move(subset));
        }

        for (int horizon = 0; horizon <= frame.slot_count; ++horizon) {
            if (best.min_slots >= 0 && horizon >= best.min_slots) break;
            std::vector<double> delivered(n_demands, 0.0);
            std::map<int, double> backlog;
            if (search.dfs(delivered, backlog, horizon)) {
                best.min_slots = horizon;
                break;
            }
        }
    }
    return best;
}

}  // namespace railsim::testsupport

#endif

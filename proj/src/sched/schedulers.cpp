#include "railsim/sched/sched.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace railsim::sched {

namespace {

enum class Routing {
    // TDMA view: pick whatever maximizes the single-link serial rate
    // (direct vs the harmonic two-hop combination).
    SerialBest,
    // Location-based relay selection with QoS consideration: flows are
    // placed (heaviest first) on the option that minimizes the frame's
    // bottleneck airtime. A relayed bit costs its RAU both a receive and
    // a transmit slot share; BS airtime divides across the antennas.
    BalancedRelay,
};

std::vector<int> balanced_routes(const Topology& topo,
                                 const std::vector<FlowReq>& flows) {
    const NodeRef bs{NodeKind::Bs, 0};
    std::vector<size_t> order(flows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return flows[a].qos_bps > flows[b].qos_bps;
    });

    std::vector<int> route(flows.size(), -1);
    double bs_air = 0.0;
    std::vector<double> rau_air(topo.raus.size(), 0.0);
    for (size_t f : order) {
        const NodeRef mr{NodeKind::Mr, flows[f].mr};
        const double q = flows[f].qos_bps;

        double best_bottleneck = 0.0;
        int best_option = -2;
        auto consider = [&](int option, double bs_add, double rau_add) {
            double bottleneck =
                (bs_air + bs_add) / topo.bs_antennas;
            for (size_t r = 0; r < topo.raus.size(); ++r) {
                const double load =
                    rau_air[r] +
                    (option == static_cast<int>(r) ? rau_add : 0.0);
                bottleneck = std::max(bottleneck, load);
            }
            if (best_option == -2 || bottleneck < best_bottleneck) {
                best_bottleneck = bottleneck;
                best_option = option;
            }
        };
        consider(-1, q / topo.nominal_rate(bs, mr), 0.0);
        for (size_t r = 0; r < topo.raus.size(); ++r) {
            const NodeRef rau{NodeKind::Rau, static_cast<int>(r)};
            const double leg1 = q / topo.nominal_rate(bs, rau);
            const double leg2 = q / topo.nominal_rate(rau, mr);
            consider(static_cast<int>(r), leg1, leg1 + leg2);
        }

        route[f] = best_option;
        if (best_option < 0) {
            bs_air += q / topo.nominal_rate(bs, mr);
        } else {
            const NodeRef rau{NodeKind::Rau, best_option};
            const double leg1 = q / topo.nominal_rate(bs, rau);
            bs_air += leg1;
            rau_air[best_option] += leg1 + q / topo.nominal_rate(rau, mr);
        }
    }
    return route;
}

std::vector<Demand> build_demands(const Topology& topo,
                                  const std::vector<FlowReq>& flows,
                                  Routing routing) {
    std::vector<int> routes(flows.size(), -1);
    if (routing == Routing::BalancedRelay) {
        routes = balanced_routes(topo, flows);
    }

    std::vector<Demand> demands;
    for (size_t f = 0; f < flows.size(); ++f) {
        const FlowReq& flow = flows[f];
        if (!(flow.qos_bps > 0.0))
            throw std::invalid_argument("flow QoS must be > 0");
        const NodeRef mr{NodeKind::Mr, flow.mr};
        const NodeRef bs{NodeKind::Bs, 0};

        int best_rau = routes[f];
        if (routing == Routing::SerialBest) {
            const double direct_rate = topo.nominal_rate(bs, mr);
            double best_eff = direct_rate;
            for (size_t r = 0; r < topo.raus.size(); ++r) {
                const NodeRef rau{NodeKind::Rau, static_cast<int>(r)};
                const double r1 = topo.nominal_rate(bs, rau);
                const double r2 = topo.nominal_rate(rau, mr);
                const double eff = 1.0 / (1.0 / r1 + 1.0 / r2);
                if (eff > best_eff) {
                    best_eff = eff;
                    best_rau = static_cast<int>(r);
                }
            }
        }

        if (best_rau < 0) {
            Demand d;
            d.id = static_cast<int>(demands.size());
            d.flow_id = flow.flow_id;
            d.hop = 0;
            d.src = bs;
            d.dst = mr;
            d.distance_m = topo.distance(bs, mr);
            d.nominal_rate_bps = topo.nominal_rate(bs, mr);
            d.qos_bps = flow.qos_bps;
            demands.push_back(d);
        } else {
            const NodeRef rau{NodeKind::Rau, best_rau};
            Demand leg1;
            leg1.id = static_cast<int>(demands.size());
            leg1.flow_id = flow.flow_id;
            leg1.hop = 0;
            leg1.src = bs;
            leg1.dst = rau;
            leg1.distance_m = topo.distance(bs, rau);
            leg1.nominal_rate_bps = topo.nominal_rate(bs, rau);
            leg1.qos_bps = flow.qos_bps;
            demands.push_back(leg1);
            Demand leg2;
            leg2.id = static_cast<int>(demands.size());
            leg2.flow_id = flow.flow_id;
            leg2.hop = 1;
            leg2.src = rau;
            leg2.dst = mr;
            leg2.distance_m = topo.distance(rau, mr);
            leg2.nominal_rate_bps = topo.nominal_rate(rau, mr);
            leg2.qos_bps = flow.qos_bps;
            demands.push_back(leg2);
        }
    }
    return demands;
}

struct SlotCounts {
    int bs_tx = 0;
    std::map<int, int> rau_tx, rau_rx, mr_rx;
};

bool admits(const Topology& topo, const SlotCounts& counts, const Demand& d) {
    if (d.src.kind == NodeKind::Bs && counts.bs_tx + 1 > topo.bs_antennas)
        return false;
    if (d.src.kind == NodeKind::Rau) {
        auto tx = counts.rau_tx.find(d.src.index);
        if (tx != counts.rau_tx.end() && tx->second >= 1) return false;
        if (counts.rau_rx.count(d.src.index)) return false;  // half-duplex
    }
    if (d.dst.kind == NodeKind::Rau) {
        if (counts.rau_rx.count(d.dst.index)) return false;
        if (counts.rau_tx.count(d.dst.index)) return false;  // half-duplex
    }
    if (d.dst.kind == NodeKind::Mr && counts.mr_rx.count(d.dst.index))
        return false;
    return true;
}

void count(SlotCounts& counts, const Demand& d) {
    if (d.src.kind == NodeKind::Bs) ++counts.bs_tx;
    if (d.src.kind == NodeKind::Rau) ++counts.rau_tx[d.src.index];
    if (d.dst.kind == NodeKind::Rau) ++counts.rau_rx[d.dst.index];
    if (d.dst.kind == NodeKind::Mr) ++counts.mr_rx[d.dst.index];
}

enum class Mode { Concurrent, Serial };

Schedule run_greedy(const Topology& topo, const std::vector<FlowReq>& flows,
                    const Frame& frame, const std::vector<int>& order,
                    std::vector<Demand> demands, Mode mode) {
    Schedule sched;
    sched.demands = std::move(demands);
    const double frame_time = frame.duration_s();

    std::vector<double> delivered_bits(sched.demands.size(), 0.0);
    std::map<int, double> backlog_bits;
    std::vector<bool> met(sched.demands.size(), false);

    auto required_bits = [&](const Demand& d) {
        return d.qos_bps * frame_time;
    };
    auto eligible = [&](const Demand& d) {
        if (met[d.id]) return false;
        if (d.hop == 1) {
            auto it = backlog_bits.find(d.flow_id);
            if (it == backlog_bits.end() || it->second <= 0.0) return false;
        }
        return true;
    };

    int remaining = static_cast<int>(sched.demands.size());

    // A candidate joins the slot only when every admitted link keeps at
    // least rate_floor_frac of its interference-free rate; destructive
    // beam overlaps serialize instead.
    auto rates_acceptable = [&](const std::vector<int>& candidate) {
        const auto rates = slot_rates(topo, sched.demands, candidate);
        for (size_t i = 0; i < candidate.size(); ++i) {
            const Demand& d = sched.demands[candidate[i]];
            if (rates[i] < topo.rate_floor_frac * d.nominal_rate_bps)
                return false;
        }
        return true;
    };

    for (int t = 0; t < frame.slot_count && remaining > 0; ++t) {
        std::vector<int> active;
        SlotCounts counts;
        for (int id : order) {
            const Demand& d = sched.demands[id];
            if (!eligible(d)) continue;
            if (!admits(topo, counts, d)) continue;
            if (mode == Mode::Concurrent && !active.empty()) {
                std::vector<int> candidate = active;
                candidate.push_back(id);
                if (!rates_acceptable(candidate)) continue;
            }
            active.push_back(id);
            count(counts, d);
            if (mode == Mode::Serial) break;
        }
        if (active.empty()) break;  // nothing can make progress anymore

        const auto rates = slot_rates(topo, sched.demands, active);
        for (size_t i = 0; i < active.size(); ++i) {
            const Demand& d = sched.demands[active[i]];
            double bits = rates[i] * frame.slot_len_s;
            if (d.hop == 1) {
                double& backlog = backlog_bits[d.flow_id];
                bits = std::min(bits, backlog);
                backlog -= bits;
            } else if (d.dst.kind == NodeKind::Rau) {
                backlog_bits[d.flow_id] += bits;
            }
            delivered_bits[d.id] += bits;
            if (!met[d.id] &&
                delivered_bits[d.id] >= required_bits(d) * (1.0 - 1e-12)) {
                met[d.id] = true;
                --remaining;
            }
        }
        sched.slots.push_back(std::move(active));
    }

    sched.achieved_bps.resize(sched.demands.size());
    for (size_t i = 0; i < sched.demands.size(); ++i)
        sched.achieved_bps[i] = delivered_bits[i] / frame_time;

    for (const FlowReq& flow : flows) {
        bool all_met = true;
        for (const Demand& d : sched.demands) {
            if (d.flow_id == flow.flow_id && !met[d.id]) all_met = false;
        }
        (all_met ? sched.met_flows : sched.unmet_flows).push_back(flow.flow_id);
    }
    sched.slots_used = static_cast<int>(sched.slots.size());
    return sched;
}

}  // namespace

// Admission order: flows ranked by a flow-level key, and inside each flow
// the RAU->MR leg ahead of the BS->RAU leg. Draining the relay first keeps
// the parked backlog at one slot's worth, so a frame cutoff strands as
// little traffic as possible.
std::vector<int> flow_major_order(const std::vector<Demand>& demands,
                                  const std::vector<FlowReq>& flows,
                                  const std::vector<double>& flow_key) {
    std::vector<size_t> flow_order(flows.size());
    for (size_t i = 0; i < flows.size(); ++i) flow_order[i] = i;
    std::stable_sort(flow_order.begin(), flow_order.end(),
                     [&](size_t a, size_t b) {
                         if (flow_key[a] != flow_key[b])
                             return flow_key[a] > flow_key[b];
                         return flows[a].flow_id < flows[b].flow_id;
                     });
    std::vector<int> order;
    order.reserve(demands.size());
    for (size_t f : flow_order) {
        int leg1 = -1, leg2 = -1;
        for (const Demand& d : demands) {
            if (d.flow_id != flows[f].flow_id) continue;
            (d.hop == 0 ? leg1 : leg2) = d.id;
        }
        if (leg2 >= 0) order.push_back(leg2);
        if (leg1 >= 0) order.push_back(leg1);
    }
    return order;
}

Schedule schedule_location_aware(const Topology& topo,
                                 const std::vector<FlowReq>& flows,
                                 const Frame& frame) {
    if (flows.size() > topo.mrs.size())
        throw std::invalid_argument("more flows than MRs");
    auto demands = build_demands(topo, flows, Routing::BalancedRelay);

    // Flow key: the combined Pr over the flow's legs (reciprocal of the
    // total slot need), so fast-to-finish flows go first.
    std::vector<double> flow_key(flows.size(), 0.0);
    for (size_t f = 0; f < flows.size(); ++f) {
        double inv = 0.0;
        for (const Demand& d : demands) {
            if (d.flow_id == flows[f].flow_id) inv += 1.0 / priority(d, frame);
        }
        flow_key[f] = 1.0 / inv;
    }
    const auto order = flow_major_order(demands, flows, flow_key);
    return run_greedy(topo, flows, frame, order, std::move(demands),
                      Mode::Concurrent);
}

Schedule schedule_serial_baseline(const Topology& topo,
                                  const std::vector<FlowReq>& flows,
                                  const Frame& frame) {
    auto demands = build_demands(topo, flows, Routing::SerialBest);
    std::vector<int> order(demands.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    // Arrival order: demands are built flow by flow, hop 0 before hop 1.
    return run_greedy(topo, flows, frame, order, std::move(demands),
                      Mode::Serial);
}

Schedule schedule_greedy_qos(const Topology& topo,
                             const std::vector<FlowReq>& flows,
                             const Frame& frame) {
    // Comparator without the location-based relay selection: routes come
    // from the plain serial-rate rule, slots fill by descending QoS.
    auto demands = build_demands(topo, flows, Routing::SerialBest);
    std::vector<double> flow_key(flows.size());
    for (size_t f = 0; f < flows.size(); ++f) flow_key[f] = flows[f].qos_bps;
    const auto order = flow_major_order(demands, flows, flow_key);
    return run_greedy(topo, flows, frame, order, std::move(demands),
                      Mode::Concurrent);
}

}  // namespace railsim::sched

#include "railsim/sched/sched.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace railsim::sched {

namespace {

constexpr double kRelTol = 1e-9;

double angle_between(const Vec2& origin, const Vec2& a, const Vec2& b) {
    const double ax = a.x - origin.x, ay = a.y - origin.y;
    const double bx = b.x - origin.x, by = b.y - origin.y;
    const double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = (ax * bx + ay * by) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

}  // namespace

std::vector<double> slot_rates(const Topology& topo,
                               const std::vector<Demand>& demands,
                               const std::vector<int>& active) {
    std::vector<double> rates(active.size(), 0.0);
    for (size_t i = 0; i < active.size(); ++i) {
        const Demand& me = demands[active[i]];
        const Vec2 victim = topo.position(me.dst);
        double interference = 0.0;
        for (size_t j = 0; j < active.size(); ++j) {
            if (j == i) continue;
            const Demand& other = demands[active[j]];
            if (other.src == me.src && other.dst == me.dst) continue;
            const Vec2 tx = topo.position(other.src);
            const Vec2 aim = topo.position(other.dst);
            if (angle_between(tx, aim, victim) <= 0.5 * topo.beamwidth_rad) {
                channel::ThzLinkParams stray = topo.budget;
                stray.distance_m =
                    std::max(1e-3, std::hypot(tx.x - victim.x, tx.y - victim.y));
                interference += channel::received_power_w(stray);
            }
        }
        channel::ThzLinkParams link = topo.budget;
        link.distance_m = me.distance_m;
        rates[i] = channel::thz_rate(link, interference);
    }
    return rates;
}

Feasibility check_feasible(const Schedule& schedule, const Topology& topo,
                           const Frame& frame,
                           const std::vector<FlowReq>& flows) {
    Feasibility result;
    auto violate = [&](Violation::Kind kind, int slot, int demand,
                       std::string detail) {
        result.violations.push_back(Violation{kind, slot, demand, std::move(detail)});
    };

    if (static_cast<int>(schedule.slots.size()) > frame.slot_count) {
        violate(Violation::Kind::DimensionMismatch, -1, -1,
                "schedule has more slots than the frame");
        return result;
    }
    for (const auto& slot : schedule.slots) {
        for (int d : slot) {
            if (d < 0 || d >= static_cast<int>(schedule.demands.size())) {
                violate(Violation::Kind::DimensionMismatch, -1, d,
                        "demand id out of range");
                return result;
            }
        }
    }

    const double frame_time = frame.duration_s();
    result.achieved_bps.assign(schedule.demands.size(), 0.0);
    std::map<int, double> relay_backlog_bits;  // flow -> bits at the RAU
    double bs_bits_prefix = 0.0;
    double rau_bits_prefix = 0.0;

    for (size_t t = 0; t < schedule.slots.size(); ++t) {
        const auto& active = schedule.slots[t];

        // Structural constraints.
        std::map<int, int> rau_tx, rau_rx, node_rx_mr;
        int bs_tx = 0;
        for (int d : active) {
            const Demand& dem = schedule.demands[d];
            if (dem.src.kind == NodeKind::Bs) ++bs_tx;
            if (dem.src.kind == NodeKind::Rau) ++rau_tx[dem.src.index];
            if (dem.dst.kind == NodeKind::Rau) ++rau_rx[dem.dst.index];
            if (dem.dst.kind == NodeKind::Mr) ++node_rx_mr[dem.dst.index];
        }
        if (bs_tx > topo.bs_antennas) {
            violate(Violation::Kind::TxAntennas, static_cast<int>(t), -1,
                    "BS transmits " + std::to_string(bs_tx) + " links, has " +
                        std::to_string(topo.bs_antennas) + " antennas");
        }
        for (const auto& [rau, n] : rau_tx) {
            if (n > 1)
                violate(Violation::Kind::TxAntennas, static_cast<int>(t), -1,
                        "RAU " + std::to_string(rau) + " transmits " +
                            std::to_string(n) + " links");
            if (rau_rx.count(rau))
                violate(Violation::Kind::HalfDuplex, static_cast<int>(t), -1,
                        "RAU " + std::to_string(rau) +
                            " transmits and receives in the same slot");
        }
        for (const auto& [rau, n] : rau_rx) {
            if (n > 1)
                violate(Violation::Kind::RxConflict, static_cast<int>(t), -1,
                        "RAU " + std::to_string(rau) + " receives " +
                            std::to_string(n) + " links");
        }
        for (const auto& [mr, n] : node_rx_mr) {
            if (n > 1)
                violate(Violation::Kind::RxConflict, static_cast<int>(t), -1,
                        "MR " + std::to_string(mr) + " receives " +
                            std::to_string(n) + " links");
        }

        // Rate accounting with relay buffering.
        const auto rates = slot_rates(topo, schedule.demands, active);
        for (size_t i = 0; i < active.size(); ++i) {
            const Demand& dem = schedule.demands[active[i]];
            double bits = rates[i] * frame.slot_len_s;
            if (dem.hop == 1) {
                double& backlog = relay_backlog_bits[dem.flow_id];
                bits = std::min(bits, backlog);
                backlog -= bits;
                rau_bits_prefix += bits;
            } else {
                if (dem.dst.kind == NodeKind::Rau)
                    relay_backlog_bits[dem.flow_id] += bits;
                bs_bits_prefix += bits;
            }
            result.achieved_bps[active[i]] += bits / frame_time;
        }
        if (bs_bits_prefix + kRelTol * (1.0 + bs_bits_prefix) < rau_bits_prefix) {
            violate(Violation::Kind::PrefixThroughput, static_cast<int>(t), -1,
                    "cumulative RAU throughput exceeds cumulative BS throughput");
        }
    }

    // Flow accounting: met flows must meet the QoS on every hop; every flow
    // must be listed exactly once as met or unmet.
    std::map<int, bool> listed;
    for (int f : schedule.met_flows) listed[f] = true;
    for (int f : schedule.unmet_flows) {
        if (listed.count(f))
            violate(Violation::Kind::FlowUnaccounted, -1, -1,
                    "flow " + std::to_string(f) + " listed as both met and unmet");
        listed[f] = false;
    }
    for (const auto& flow : flows) {
        auto it = listed.find(flow.flow_id);
        if (it == listed.end()) {
            violate(Violation::Kind::FlowUnaccounted, -1, -1,
                    "flow " + std::to_string(flow.flow_id) + " not listed");
            continue;
        }
        if (!it->second) continue;  // unmet: partial delivery is fine
        for (const Demand& dem : schedule.demands) {
            if (dem.flow_id != flow.flow_id) continue;
            const double achieved = result.achieved_bps[dem.id];
            if (achieved + kRelTol * (1.0 + dem.qos_bps) < dem.qos_bps) {
                std::ostringstream os;
                os << "flow " << flow.flow_id << " hop " << dem.hop
                   << " achieved " << achieved << " bps < QoS " << dem.qos_bps;
                violate(Violation::Kind::QosUnmet, -1, dem.id, os.str());
            }
        }
    }

    for (const Demand& dem : schedule.demands) {
        const bool final_hop =
            dem.dst.kind == NodeKind::Mr;  // delivered at destination
        if (final_hop) result.system_throughput_bps += result.achieved_bps[dem.id];
    }

    result.ok = result.violations.empty();
    return result;
}

double priority(const Demand& demand, const Frame& frame) {
    return demand.nominal_rate_bps * frame.slot_len_s /
           (demand.qos_bps * frame.duration_s());
}

double system_throughput(const Schedule& schedule, const Frame& frame) {
    (void)frame;
    double total = 0.0;
    for (const Demand& dem : schedule.demands) {
        if (dem.dst.kind == NodeKind::Mr) total += schedule.achieved_bps[dem.id];
    }
    return total;
}

std::string schedule_to_csv(const Schedule& schedule, const Topology& topo) {
    std::ostringstream os;
    os << "slot,link_src,link_dst,rate_bps\n";
    auto name = [](NodeRef node) {
        switch (node.kind) {
            case NodeKind::Bs:
                return std::string("BS");
            case NodeKind::Rau:
                return "RAU" + std::to_string(node.index);
            case NodeKind::Mr:
                return "MR" + std::to_string(node.index);
        }
        return std::string("?");
    };
    for (size_t t = 0; t < schedule.slots.size(); ++t) {
        const auto rates = slot_rates(topo, schedule.demands, schedule.slots[t]);
        for (size_t i = 0; i < schedule.slots[t].size(); ++i) {
            const Demand& dem = schedule.demands[schedule.slots[t][i]];
            os << t << ',' << name(dem.src) << ',' << name(dem.dst) << ','
               << rates[i] << '\n';
        }
    }
    return os.str();
}

}  // namespace railsim::sched

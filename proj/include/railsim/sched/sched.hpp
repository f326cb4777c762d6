#ifndef RAILSIM_SCHED_SCHED_HPP
#define RAILSIM_SCHED_SCHED_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "railsim/channel/thz.hpp"
#include "railsim/core/rng.hpp"

namespace railsim::sched {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

enum class NodeKind { Bs, Rau, Mr };

struct NodeRef {
    NodeKind kind = NodeKind::Bs;
    int index = 0;
    bool operator==(const NodeRef&) const = default;
};

struct TopoParams {
    int bs_antennas = 4;          // N_Bt
    Vec2 bs{0.0, 14.0};
    int rau_count = 6;
    double rau_start_m = 50.0;
    double rau_spacing_m = 120.0;
    double rau_height_m = 6.0;
    int mr_count = 24;            // MRs on the train roof
    double mr_start_m = 80.0;
    double mr_spacing_m = 25.0;
    double mr_height_m = 4.5;
    double beamwidth_rad = 0.02;  // half-power beamwidth of the tx cone
    // Admission floor: a link joins a slot only if no admitted link's
    // interference-recomputed rate falls below this fraction of nominal.
    double rate_floor_frac = 0.7;
    // Tube penetration loss on direct BS->MR paths; RAUs are mounted on
    // the tube and reach the roof relays without it.
    double direct_penalty_db = 12.0;
    channel::ThzLinkParams budget;  // link budget template; distance per link
};

/// A link instance carrying one flow's traffic over one hop.
struct Demand {
    int id = 0;
    int flow_id = 0;
    int hop = 0;  // 0 = BS-sourced (direct or first relay leg), 1 = RAU->MR
    NodeRef src, dst;
    double distance_m = 0.0;
    double nominal_rate_bps = 0.0;  // interference-free
    double qos_bps = 0.0;           // q_l
};

struct Topology {
    int bs_antennas = 0;
    Vec2 bs;
    std::vector<Vec2> raus;
    std::vector<Vec2> mrs;
    double beamwidth_rad = 0.02;
    double rate_floor_frac = 0.7;
    double direct_penalty_db = 12.0;
    channel::ThzLinkParams budget;

    Vec2 position(NodeRef node) const;
    double distance(NodeRef a, NodeRef b) const;
    /// Interference-free rate of a hop between two nodes.
    double nominal_rate(NodeRef src, NodeRef dst) const;
    /// Extra path loss (dB) applying to a src->dst leg; nonzero only for
    /// BS->MR paths, which cross the tube wall.
    double leg_penalty_db(NodeRef src, NodeRef dst) const;
};

Topology make_topology(const TopoParams& params);

struct FlowReq {
    int flow_id = 0;
    int mr = 0;          // destination MR index
    double qos_bps = 0;  // q_i > 0
};

struct Frame {
    double pilot_time_s = 0.0;  // T_s
    int slot_count = 1000;      // M
    double slot_len_s = 10e-6;  // delta T
    double duration_s() const { return pilot_time_s + slot_count * slot_len_s; }
};

struct Schedule {
    std::vector<Demand> demands;             // all link instances
    std::vector<std::vector<int>> slots;     // active demand ids per slot
    std::vector<double> achieved_bps;        // q_l^a per demand
    std::vector<int> met_flows;
    std::vector<int> unmet_flows;
    int slots_used = 0;                      // delta
};

/// Per-slot rates under the cone-sector interference model: a concurrent
/// transmitter contributes its received power at a victim only when the
/// victim sits inside the transmitter's half-power beam cone.
std::vector<double> slot_rates(const Topology& topo,
                               const std::vector<Demand>& demands,
                               const std::vector<int>& active);

struct Violation {
    enum class Kind {
        DimensionMismatch,
        HalfDuplex,
        RxConflict,
        TxAntennas,
        QosUnmet,
        PrefixThroughput,
        FlowUnaccounted,
    };
    Kind kind;
    int slot = -1;
    int demand = -1;
    std::string detail;
};

struct Feasibility {
    bool ok = false;
    std::vector<Violation> violations;
    std::vector<double> achieved_bps;   // per demand, recomputed from scratch
    double system_throughput_bps = 0.0; // sum of delivered-at-MR throughput
};

/// Independent verification of a schedule: re-derives every slot's rates
/// from the topology, replays the relay buffers (a RAU forwards at most
/// what its flow has received), and checks half-duplex, single-receive,
/// transmit-antenna, QoS, and the BS>=RAU cumulative-throughput prefix.
Feasibility check_feasible(const Schedule& schedule, const Topology& topo,
                           const Frame& frame,
                           const std::vector<FlowReq>& flows);

/// Pr(l) = R_l * dT / (q_l * (T_s + M*dT)): the reciprocal of the slot
/// count link l needs to meet its QoS.
double priority(const Demand& demand, const Frame& frame);

/// Location-aware relay selection + QoS-priority greedy frame build.
Schedule schedule_location_aware(const Topology& topo,
                                 const std::vector<FlowReq>& flows,
                                 const Frame& frame);

/// TDMA comparator: one link active per slot, flows in arrival order.
Schedule schedule_serial_baseline(const Topology& topo,
                                  const std::vector<FlowReq>& flows,
                                  const Frame& frame);

/// Concurrent comparator picking links by descending QoS instead of Pr.
Schedule schedule_greedy_qos(const Topology& topo,
                             const std::vector<FlowReq>& flows,
                             const Frame& frame);

/// Sum over flows of achieved destination throughput. Requires a schedule
/// that passes check_feasible.
double system_throughput(const Schedule& schedule, const Frame& frame);

/// CSV dump: slot,link_src,link_dst,rate_bps rows.
std::string schedule_to_csv(const Schedule& schedule, const Topology& topo);

}  // namespace railsim::sched

#endif

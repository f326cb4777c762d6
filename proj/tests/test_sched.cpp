#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "railsim/core/rng.hpp"
#include "railsim/sched/sched.hpp"

#include "sched_support.hpp"

using namespace railsim;
using sched::FlowReq;
using sched::Frame;
using sched::NodeKind;
using sched::NodeRef;
using sched::Topology;

namespace {

sched::TopoParams desk_params(int mrs, int raus, int antennas) {
    sched::TopoParams params;
    params.bs_antennas = antennas;
    params.rau_count = raus;
    params.mr_count = mrs;
    params.mr_start_m = 80.0;
    params.mr_spacing_m = 25.0;
    params.rau_start_m = 50.0;
    params.rau_spacing_m = 120.0;
    params.beamwidth_rad = 0.02;
    params.budget.absorption_per_m = 1e-3;
    return params;
}

Frame desk_frame(int slots = 2000) {
    Frame frame;
    frame.pilot_time_s = 0.0;
    frame.slot_count = slots;
    frame.slot_len_s = 10e-6;
    return frame;
}

std::vector<FlowReq> random_flows(const Topology& topo, int n,
                                  core::RngStream& stream,
                                  double qos_lo = 10e6, double qos_hi = 500e6) {
    std::vector<int> mrs(topo.mrs.size());
    for (size_t i = 0; i < mrs.size(); ++i) mrs[i] = static_cast<int>(i);
    for (int i = 0; i < n; ++i) {
        const int j = i + static_cast<int>(stream.uniform_int(mrs.size() - i));
        std::swap(mrs[i], mrs[j]);
    }
    std::vector<FlowReq> flows;
    for (int i = 0; i < n; ++i)
        flows.push_back({i, mrs[i], stream.uniform(qos_lo, qos_hi)});
    return flows;
}

}  // namespace

TEST_CASE("empty schedule with empty flows is feasible") {
    const Topology topo = sched::make_topology(desk_params(2, 1, 2));
    const sched::Schedule empty;
    const auto feas = sched::check_feasible(empty, topo, desk_frame(), {});
    CHECK(feas.ok);
    CHECK(feas.system_throughput_bps == 0.0);
}

TEST_CASE("half-duplex violation is reported with the slot") {
    const Topology topo = sched::make_topology(desk_params(2, 1, 2));
    sched::Schedule bad;
    sched::Demand in;
    in.id = 0;
    in.flow_id = 0;
    in.hop = 0;
    in.src = NodeRef{NodeKind::Bs, 0};
    in.dst = NodeRef{NodeKind::Rau, 0};
    in.distance_m = topo.distance(in.src, in.dst);
    in.qos_bps = 1e6;
    sched::Demand out;
    out.id = 1;
    out.flow_id = 1;
    out.hop = 1;
    out.src = NodeRef{NodeKind::Rau, 0};
    out.dst = NodeRef{NodeKind::Mr, 0};
    out.distance_m = topo.distance(out.src, out.dst);
    out.qos_bps = 1e6;
    bad.demands = {in, out};
    bad.slots = {{}, {}, {}, {0, 1}};
    bad.unmet_flows = {0, 1};
    const auto feas = sched::check_feasible(
        bad, topo, desk_frame(), {{0, 0, 1e6}, {1, 0, 1e6}});
    CHECK_FALSE(feas.ok);
    bool found = false;
    for (const auto& v : feas.violations) {
        if (v.kind == sched::Violation::Kind::HalfDuplex && v.slot == 3)
            found = true;
    }
    CHECK(found);
}

TEST_CASE("a schedule meeting the QoS exactly passes at the boundary") {
    const Topology topo = sched::make_topology(desk_params(1, 0, 2));
    const Frame frame = desk_frame(100);
    std::vector<FlowReq> flows = {{0, 0, 50e6}};
    auto schedule = sched::schedule_location_aware(topo, flows, frame);
    REQUIRE(schedule.unmet_flows.empty());
    // Re-declare the QoS as exactly the achieved throughput.
    const double achieved = schedule.achieved_bps[0];
    flows[0].qos_bps = achieved;
    schedule.demands[0].qos_bps = achieved;
    const auto feas = sched::check_feasible(schedule, topo, frame, flows);
    CHECK(feas.ok);
}

TEST_CASE("priority is the reciprocal slot need") {
    Frame frame;
    frame.pilot_time_s = 0.0;
    frame.slot_count = 100;
    frame.slot_len_s = 1e-5;
    sched::Demand d;
    d.nominal_rate_bps = 10e9;
    d.qos_bps = 500e6;
    // Desk oracle: Pr = R*dT / (q*M*dT) = 10e9 / (500e6 * 100) = 0.2.
    CHECK(sched::priority(d, frame) == doctest::Approx(10e9 / (500e6 * 100.0)));
    sched::Demand doubled = d;
    doubled.nominal_rate_bps *= 2.0;
    CHECK(sched::priority(doubled, frame) ==
          doctest::Approx(2.0 * sched::priority(d, frame)));
    // Pr = 1 exactly when R*dT = q*(Ts + M*dT).
    sched::Demand unit = d;
    unit.nominal_rate_bps = d.qos_bps * frame.duration_s() / frame.slot_len_s;
    CHECK(sched::priority(unit, frame) == doctest::Approx(1.0));
}

TEST_CASE("priority order is invariant under common scaling") {
    const Frame frame = desk_frame(500);
    core::RngStream stream(21, "scale");
    std::vector<sched::Demand> demands(8);
    for (int i = 0; i < 8; ++i) {
        demands[i].id = i;
        demands[i].nominal_rate_bps = stream.uniform(1e8, 1e10);
        demands[i].qos_bps = stream.uniform(1e6, 5e8);
    }
    auto order_of = [&](double scale) {
        std::vector<int> order(8);
        for (int i = 0; i < 8; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            sched::Demand da = demands[a], db = demands[b];
            da.nominal_rate_bps *= scale;
            da.qos_bps *= scale;
            db.nominal_rate_bps *= scale;
            db.qos_bps *= scale;
            const double pa = sched::priority(da, frame);
            const double pb = sched::priority(db, frame);
            if (pa != pb) return pa > pb;
            return a < b;
        });
        return order;
    };
    CHECK(order_of(1.0) == order_of(7.25));
}

TEST_CASE("single direct flow uses the closed-form slot count") {
    const Topology topo = sched::make_topology(desk_params(1, 0, 2));
    const Frame frame = desk_frame(3000);
    const double rate = topo.nominal_rate(NodeRef{NodeKind::Bs, 0},
                                          NodeRef{NodeKind::Mr, 0});
    const double qos = 120e6;
    const auto schedule =
        sched::schedule_location_aware(topo, {{0, 0, qos}}, frame);
    REQUIRE(schedule.unmet_flows.empty());
    const int expected = static_cast<int>(
        std::ceil(qos * frame.duration_s() / (rate * frame.slot_len_s)));
    CHECK(schedule.slots_used == expected);
}

TEST_CASE("two independent flows run concurrently") {
    auto params = desk_params(2, 0, 2);
    params.mr_start_m = 60.0;
    params.mr_spacing_m = 200.0;  // far apart, no cone overlap
    const Topology topo = sched::make_topology(params);
    const Frame frame = desk_frame(3000);
    const std::vector<FlowReq> flows = {{0, 0, 150e6}, {1, 1, 90e6}};

    const auto both = sched::schedule_location_aware(topo, flows, frame);
    const auto only_a = sched::schedule_location_aware(topo, {flows[0]}, frame);
    const auto only_b = sched::schedule_location_aware(topo, {flows[1]}, frame);
    REQUIRE(both.unmet_flows.empty());
    CHECK(both.slots_used == std::max(only_a.slots_used, only_b.slots_used));
}

TEST_CASE("serial baseline basics") {
    const Topology topo = sched::make_topology(desk_params(2, 0, 2));
    Frame frame = desk_frame(3000);
    const double rate = topo.nominal_rate(NodeRef{NodeKind::Bs, 0},
                                          NodeRef{NodeKind::Mr, 0});
    // One-slot flows: q*frame_time just below R*dT.
    const double one_slot_q = rate * frame.slot_len_s / frame.duration_s();
    const std::vector<FlowReq> flows = {{0, 0, one_slot_q * 0.99},
                                        {1, 1, one_slot_q * 0.5}};
    const auto schedule = sched::schedule_serial_baseline(topo, flows, frame);
    CHECK(schedule.slots_used == 2);
    CHECK(sched::check_feasible(schedule, topo, frame, flows).ok);

    const auto empty = sched::schedule_serial_baseline(topo, {}, frame);
    CHECK(empty.slots_used == 0);
}

TEST_CASE("serial slot count never drops when a flow is added") {
    const Topology topo = sched::make_topology(desk_params(6, 2, 3));
    const Frame frame = desk_frame(4000);
    core::RngStream stream(31, "serial-mono");
    for (int trial = 0; trial < 20; ++trial) {
        auto sub = stream.substream(std::to_string(trial));
        auto flows = random_flows(topo, 4, sub, 10e6, 200e6);
        const auto base = sched::schedule_serial_baseline(
            topo, {flows.begin(), flows.begin() + 3}, frame);
        const auto more = sched::schedule_serial_baseline(topo, flows, frame);
        CHECK(more.slots_used >= base.slots_used);
    }
}

TEST_CASE("equal-rate instance: greedy-qos and location-aware agree") {
    auto params = desk_params(2, 0, 2);
    params.bs = {150.0, 14.0};
    params.mr_start_m = 100.0;
    params.mr_spacing_m = 100.0;  // both MRs 50 m from the BS in x
    const Topology topo = sched::make_topology(params);
    const Frame frame = desk_frame(3000);
    const std::vector<FlowReq> flows = {{0, 0, 220e6}, {1, 1, 80e6}};
    const auto loc = sched::schedule_location_aware(topo, flows, frame);
    const auto qos = sched::schedule_greedy_qos(topo, flows, frame);
    CHECK(loc.slots_used == qos.slots_used);
}

TEST_CASE("every scheduler's output passes the checker on random instances") {
    const Topology topo = sched::make_topology(desk_params(12, 3, 4));
    const Frame frame = desk_frame(2500);
    core::RngStream stream(47, "fuzz");
    for (int trial = 0; trial < 30; ++trial) {
        auto sub = stream.substream(std::to_string(trial));
        const auto flows = random_flows(topo, 8, sub);
        for (const auto& schedule :
             {sched::schedule_location_aware(topo, flows, frame),
              sched::schedule_serial_baseline(topo, flows, frame),
              sched::schedule_greedy_qos(topo, flows, frame)}) {
            const auto feas = sched::check_feasible(schedule, topo, frame, flows);
            if (!feas.ok) {
                CAPTURE(trial);
                CAPTURE(feas.violations.front().detail);
            }
            CHECK(feas.ok);
        }
    }
}

TEST_CASE("location-aware beats or ties serial on at least 90% of seeds") {
    const Topology topo = sched::make_topology(desk_params(10, 3, 4));
    const Frame frame = desk_frame(4000);
    core::RngStream stream(53, "fig18");
    int wins = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        auto sub = stream.substream(std::to_string(s));
        const auto flows = random_flows(topo, 10, sub);
        const auto loc = sched::schedule_location_aware(topo, flows, frame);
        const auto serial = sched::schedule_serial_baseline(topo, flows, frame);
        if (loc.slots_used <= serial.slots_used) ++wins;
    }
    CHECK(wins >= 90);
}

TEST_CASE("system throughput equals the checker's recomputation") {
    const Topology topo = sched::make_topology(desk_params(8, 2, 3));
    const Frame frame = desk_frame(2000);
    core::RngStream stream(59, "tput");
    auto flows = random_flows(topo, 6, stream);
    const auto schedule = sched::schedule_location_aware(topo, flows, frame);
    const auto feas = sched::check_feasible(schedule, topo, frame, flows);
    REQUIRE(feas.ok);
    CHECK(sched::system_throughput(schedule, frame) ==
          doctest::Approx(feas.system_throughput_bps).epsilon(1e-12));
}

TEST_CASE("one flow meeting its QoS exactly yields throughput q") {
    const Topology topo = sched::make_topology(desk_params(1, 0, 2));
    const Frame frame = desk_frame(200);
    std::vector<FlowReq> flows = {{0, 0, 40e6}};
    auto schedule = sched::schedule_location_aware(topo, flows, frame);
    REQUIRE(schedule.unmet_flows.empty());
    const double q_exact = schedule.achieved_bps[0];
    CHECK(sched::system_throughput(schedule, frame) ==
          doctest::Approx(q_exact).epsilon(1e-12));
}

TEST_CASE("schedule csv dump has the documented shape") {
    const Topology topo = sched::make_topology(desk_params(1, 1, 2));
    const Frame frame = desk_frame(500);
    const auto schedule =
        sched::schedule_location_aware(topo, {{0, 0, 60e6}}, frame);
    const std::string csv = sched::schedule_to_csv(schedule, topo);
    CHECK(csv.rfind("slot,link_src,link_dst,rate_bps\n", 0) == 0);
    CHECK(csv.find("BS") != std::string::npos);
}

TEST_CASE("micro instances: location-aware is near the brute-force optimum") {
    core::RngStream stream(61, "micro");
    int within_one = 0;
    int evaluated = 0;
    const int instances = 12;
    for (int i = 0; i < instances; ++i) {
        auto sub = stream.substream(std::to_string(i));
        auto params = desk_params(3, 1, 2);
        params.mr_spacing_m = sub.uniform(60.0, 180.0);
        const Topology topo = sched::make_topology(params);
        Frame frame = desk_frame(4);

        const double ref_rate = topo.nominal_rate(NodeRef{NodeKind::Bs, 0},
                                                  NodeRef{NodeKind::Mr, 0});
        const double one_slot = ref_rate * frame.slot_len_s / frame.duration_s();
        const int n_flows = 2 + static_cast<int>(sub.uniform_int(2));
        std::vector<FlowReq> flows;
        for (int f = 0; f < n_flows; ++f)
            flows.push_back({f, f, one_slot * sub.uniform(0.3, 1.4)});

        const auto oracle = testsupport::brute_force_min_slots(topo, flows, frame);
        if (oracle.min_slots < 0) continue;  // not completable in 4 slots
        const auto loc = sched::schedule_location_aware(topo, flows, frame);
        if (!loc.unmet_flows.empty()) continue;
        ++evaluated;
        CHECK(loc.slots_used >= oracle.min_slots);  // oracle is a true bound
        if (loc.slots_used <= oracle.min_slots + 1) ++within_one;
    }
    CHECK(evaluated >= instances / 2);
    CHECK(within_one >= evaluated - 1);
}

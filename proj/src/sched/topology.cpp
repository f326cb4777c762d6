#include "railsim/sched/sched.hpp"

#include <cmath>
#include <stdexcept>

namespace railsim::sched {

Vec2 Topology::position(NodeRef node) const {
    switch (node.kind) {
        case NodeKind::Bs:
            return bs;
        case NodeKind::Rau:
            return raus.at(node.index);
        case NodeKind::Mr:
            return mrs.at(node.index);
    }
    throw std::logic_error("bad node kind");
}

double Topology::distance(NodeRef a, NodeRef b) const {
    const Vec2 pa = position(a);
    const Vec2 pb = position(b);
    return std::hypot(pa.x - pb.x, pa.y - pb.y);
}

double Topology::leg_penalty_db(NodeRef src, NodeRef dst) const {
    const bool crosses_tube =
        src.kind == NodeKind::Bs && dst.kind == NodeKind::Mr;
    return crosses_tube ? direct_penalty_db : 0.0;
}

double Topology::nominal_rate(NodeRef src, NodeRef dst) const {
    channel::ThzLinkParams link = budget;
    link.distance_m = distance(src, dst);
    link.rx_gain_dbi -= leg_penalty_db(src, dst);
    return channel::thz_rate(link, 0.0);
}

Topology make_topology(const TopoParams& params) {
    if (params.bs_antennas < 1)
        throw std::invalid_argument("bs_antennas must be >= 1");
    if (params.mr_count < 1)
        throw std::invalid_argument("mr_count must be >= 1");
    Topology topo;
    topo.bs_antennas = params.bs_antennas;
    topo.bs = params.bs;
    topo.beamwidth_rad = params.beamwidth_rad;
    topo.rate_floor_frac = params.rate_floor_frac;
    topo.direct_penalty_db = params.direct_penalty_db;
    topo.budget = params.budget;
    for (int r = 0; r < params.rau_count; ++r) {
        topo.raus.push_back(
            {params.rau_start_m + r * params.rau_spacing_m, params.rau_height_m});
    }
    for (int i = 0; i < params.mr_count; ++i) {
        topo.mrs.push_back(
            {params.mr_start_m + i * params.mr_spacing_m, params.mr_height_m});
    }
    return topo;
}

}  // namespace railsim::sched

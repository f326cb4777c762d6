#include <algorithm>
#include <string>
#include <vector>

#include "railsim/core/experiment.hpp"
#include "railsim/twin/twin.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

struct TwinInstance {
    std::vector<twin::BsNode> bss;
    std::vector<twin::TwinSpec> twins;
    twin::ChainParams chain;
};

TwinInstance instance_from(const core::ScenarioConfig& cfg,
                           core::RngStream& stream) {
    TwinInstance inst;
    const int n_bs = static_cast<int>(cfg.get("twin.bs_count"));
    const int n_twins = static_cast<int>(cfg.get("twin.twin_count"));
    for (int i = 0; i < n_bs; ++i) {
        twin::BsNode bs;
        bs.id = i;
        bs.cpu_hz = stream.uniform(1e9, 5e9);
        bs.uplink_bps = stream.uniform(5e7, 2e8);
        bs.downlink_bps = stream.uniform(5e7, 2e8);
        bs.coins = 10;
        inst.bss.push_back(bs);
    }
    for (int j = 0; j < n_twins; ++j) {
        twin::TwinSpec spec;
        spec.id = j;
        spec.data_samples = stream.uniform(500.0, 3000.0);
        spec.batch = 32.0;
        inst.twins.push_back(spec);
    }
    inst.chain.bs_count = n_bs;
    inst.chain.producer_count = static_cast<int>(cfg.get("twin.producers"));
    inst.chain.block_bits = cfg.get("twin.block_bits");
    inst.chain.hop_factor = cfg.get("twin.hop_factor");
    inst.chain.verify_cycles_per_bit = cfg.get("twin.verify_cycles_per_bit");
    inst.chain.model_bits = cfg.get("twin.model_bits");
    inst.chain.cycles_per_sample = cfg.get("twin.cycles_per_sample");
    return inst;
}

MetricsTable run_twin_timing(TrialContext& ctx) {
    auto stream = ctx.stream.substream("twin");
    const TwinInstance inst = instance_from(ctx.config, stream);
    const twin::AssocMap assoc =
        twin::optimize_assoc(inst.bss, inst.twins, inst.chain);
    const twin::IterationTiming timing =
        twin::iteration_time(assoc, inst.bss, inst.twins, inst.chain);

    MetricsTable table;
    table.columns = {"bs_id", "t_cmp", "t_la", "t_pt"};
    for (const auto& row : timing.per_bs) {
        table.append_row({static_cast<double>(row.bs_id), row.t_cmp, row.t_la,
                          row.t_pt});
    }
    // Totals row: the maxima entering the iteration total.
    table.append_row({-1.0, timing.t_cmp_max, timing.t_la_max,
                      timing.t_broadcast_max});
    return table;
}

MetricsTable run_twin_dpos(TrialContext& ctx) {
    auto stream = ctx.stream.substream("twin");
    TwinInstance inst = instance_from(ctx.config, stream);
    const int rounds = static_cast<int>(ctx.config.get("twin.dpos_rounds"));

    MetricsTable table;
    table.columns = {"round", "bs_id", "coins", "is_producer"};
    for (int r = 0; r < rounds; ++r) {
        std::vector<bool> verified(inst.bss.size());
        for (size_t i = 0; i < inst.bss.size(); ++i)
            verified[i] = stream.bernoulli(0.8);
        const auto round = twin::dpos_round(inst.bss, inst.chain, r, verified);
        for (size_t i = 0; i < inst.bss.size(); ++i) {
            const bool producer =
                std::find(round.producers.begin(), round.producers.end(),
                          inst.bss[i].id) != round.producers.end();
            table.append_row({static_cast<double>(r),
                              static_cast<double>(inst.bss[i].id),
                              static_cast<double>(round.coins[i]),
                              producer ? 1.0 : 0.0});
            inst.bss[i].coins = round.coins[i];
        }
    }
    return table;
}

}  // namespace

void register_twin() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("twin.bs_count", 3.0, "base stations M");
    keys.add("twin.twin_count", 8.0, "digital twins to associate");
    keys.add("twin.producers", 2.0, "block producers M_p");
    keys.add("twin.block_bits", 1e6, "block size S_B (bits)");
    keys.add("twin.hop_factor", 1.0, "broadcast hop factor xi");
    keys.add("twin.verify_cycles_per_bit", 10.0, "verification cycles f^v");
    keys.add("twin.model_bits", 1e6, "global model size |w_g| (bits)");
    keys.add("twin.cycles_per_sample", 1e5, "training cycles per sample f^C");
    keys.add("twin.dpos_rounds", 10.0, "consensus rounds to simulate");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"twin_timing",
                       "per-BS timing breakdown of one optimized iteration",
                       1, run_twin_timing});
    reg.add(Experiment{"twin_dpos",
                       "training-coin ledger under DPoS rounds",
                       2, run_twin_dpos});
}

}  // namespace railsim::experiments

#include "railsim/twin/twin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace railsim::twin {

void ChainParams::validate(size_t n_bs) const {
    if (bs_count != static_cast<int>(n_bs))
        throw std::invalid_argument("chain.bs_count != number of BS nodes");
    if (producer_count < 1 || producer_count > bs_count)
        throw std::invalid_argument("need 1 <= M_p <= M");
    if (!(block_bits > 0) || !(hop_factor > 0) || !(verify_cycles_per_bit > 0) ||
        !(model_bits > 0) || !(cycles_per_sample > 0) || !(agg_cycles_per_bit > 0))
        throw std::invalid_argument("chain parameters must be positive");
}

IterationTiming iteration_time(const AssocMap& assoc,
                               const std::vector<BsNode>& bss,
                               const std::vector<TwinSpec>& twins,
                               const ChainParams& chain) {
    chain.validate(bss.size());
    if (assoc.bs_of_twin.size() != twins.size())
        throw std::invalid_argument("association must cover every twin");
    for (int bs : assoc.bs_of_twin) {
        if (bs < 0 || bs >= static_cast<int>(bss.size()))
            throw std::invalid_argument("association points at a missing BS");
    }

    const int m = chain.bs_count;
    const double log2_m = std::log2(static_cast<double>(m));
    const double log2_mp = std::log2(static_cast<double>(chain.producer_count));

    std::vector<double> work(bss.size(), 0.0);  // sum b_j * D_DT_j
    std::vector<int> twin_count(bss.size(), 0);
    for (size_t j = 0; j < twins.size(); ++j) {
        work[assoc.bs_of_twin[j]] += twins[j].batch * twins[j].data_samples;
        ++twin_count[assoc.bs_of_twin[j]];
    }

    IterationTiming timing;
    for (size_t i = 0; i < bss.size(); ++i) {
        IterationTiming::PerBs row;
        row.bs_id = bss[i].id;
        row.t_cmp = work[i] * chain.cycles_per_sample / bss[i].cpu_hz;
        row.t_la = twin_count[i] * chain.model_bits * chain.agg_cycles_per_bit /
                   bss[i].cpu_hz;
        row.t_pt = chain.hop_factor * log2_m * twin_count[i] *
                   chain.model_bits / bss[i].uplink_bps;
        timing.t_cmp_max = std::max(timing.t_cmp_max, row.t_cmp);
        timing.t_la_max = std::max(timing.t_la_max, row.t_la);
        timing.t_broadcast_max = std::max(timing.t_broadcast_max, row.t_pt);

        const double download =
            chain.hop_factor * log2_mp * chain.block_bits / bss[i].downlink_bps;
        timing.t_block_download = std::max(timing.t_block_download, download);
        const double verify = chain.block_bits * chain.verify_cycles_per_bit /
                              (bss[i].cpu_hz * bss[i].verify_scale);
        timing.t_block_verify = std::max(timing.t_block_verify, verify);

        timing.per_bs.push_back(row);
    }
    timing.total = timing.t_cmp_max + timing.t_broadcast_max +
                   timing.t_block_download + timing.t_block_verify;
    return timing;
}

namespace {

double assoc_total(const AssocMap& assoc, const std::vector<BsNode>& bss,
                   const std::vector<TwinSpec>& twins,
                   const ChainParams& chain) {
    return iteration_time(assoc, bss, twins, chain).total;
}

AssocMap greedy_seed(const std::vector<BsNode>& bss,
                     const std::vector<TwinSpec>& twins,
                     const ChainParams& chain) {
    std::vector<size_t> order(twins.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double wa = twins[a].batch * twins[a].data_samples;
        const double wb = twins[b].batch * twins[b].data_samples;
        if (wa != wb) return wa > wb;
        return a < b;
    });

    AssocMap assoc;
    assoc.bs_of_twin.assign(twins.size(), 0);
    std::vector<TwinSpec> placed;
    AssocMap partial;
    for (size_t j : order) {
        double best = std::numeric_limits<double>::infinity();
        int best_bs = 0;
        placed.push_back(twins[j]);
        partial.bs_of_twin.push_back(0);
        for (size_t i = 0; i < bss.size(); ++i) {
            partial.bs_of_twin.back() = static_cast<int>(i);
            const double t = assoc_total(partial, bss, placed, chain);
            if (t < best) {
                best = t;
                best_bs = static_cast<int>(i);
            }
        }
        partial.bs_of_twin.back() = best_bs;
        assoc.bs_of_twin[j] = best_bs;
    }
    return assoc;
}

void local_search(AssocMap& assoc, const std::vector<BsNode>& bss,
                  const std::vector<TwinSpec>& twins,
                  const ChainParams& chain) {
    double best = assoc_total(assoc, bss, twins, chain);
    bool improved = true;
    int guard = 0;
    while (improved && ++guard < 10000) {
        improved = false;
        // Single-twin moves.
        for (size_t j = 0; j < twins.size(); ++j) {
            const int original = assoc.bs_of_twin[j];
            for (size_t i = 0; i < bss.size(); ++i) {
                if (static_cast<int>(i) == original) continue;
                assoc.bs_of_twin[j] = static_cast<int>(i);
                const double t = assoc_total(assoc, bss, twins, chain);
                if (t < best - 1e-15) {
                    best = t;
                    improved = true;
                } else {
                    assoc.bs_of_twin[j] = original;
                }
                if (improved) break;
            }
            if (improved) break;
        }
        if (improved) continue;
        // Pairwise swaps.
        for (size_t a = 0; a < twins.size() && !improved; ++a) {
            for (size_t b = a + 1; b < twins.size() && !improved; ++b) {
                if (assoc.bs_of_twin[a] == assoc.bs_of_twin[b]) continue;
                std::swap(assoc.bs_of_twin[a], assoc.bs_of_twin[b]);
                const double t = assoc_total(assoc, bss, twins, chain);
                if (t < best - 1e-15) {
                    best = t;
                    improved = true;
                } else {
                    std::swap(assoc.bs_of_twin[a], assoc.bs_of_twin[b]);
                }
            }
        }
    }
}

}  // namespace

AssocMap optimize_assoc(const std::vector<BsNode>& bss,
                        const std::vector<TwinSpec>& twins,
                        const ChainParams& chain) {
    if (bss.empty()) throw std::invalid_argument("needs >= 1 BS");
    chain.validate(bss.size());

    std::vector<AssocMap> starts;
    starts.push_back(greedy_seed(bss, twins, chain));
    // All-on-one baseline: best single host.
    {
        AssocMap best_single;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < bss.size(); ++i) {
            AssocMap one;
            one.bs_of_twin.assign(twins.size(), static_cast<int>(i));
            const double t = assoc_total(one, bss, twins, chain);
            if (t < best) {
                best = t;
                best_single = one;
            }
        }
        starts.push_back(best_single);
    }
    // Round-robin baseline.
    {
        AssocMap rr;
        for (size_t j = 0; j < twins.size(); ++j)
            rr.bs_of_twin.push_back(static_cast<int>(j % bss.size()));
        starts.push_back(rr);
    }

    AssocMap best_assoc = starts[0];
    double best = std::numeric_limits<double>::infinity();
    for (AssocMap& start : starts) {
        local_search(start, bss, twins, chain);
        const double t = assoc_total(start, bss, twins, chain);
        if (t < best) {
            best = t;
            best_assoc = start;
        }
    }
    return best_assoc;
}

DposRound dpos_round(const std::vector<BsNode>& bss, const ChainParams& chain,
                     int round_index, const std::vector<bool>& verified,
                     std::uint64_t reward) {
    chain.validate(bss.size());
    if (verified.size() != bss.size())
        throw std::invalid_argument("verification flags must cover every BS");

    std::vector<size_t> order(bss.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (bss[a].coins != bss[b].coins) return bss[a].coins > bss[b].coins;
        return bss[a].id < bss[b].id;
    });

    DposRound round;
    for (int i = 0; i < chain.producer_count; ++i)
        round.producers.push_back(bss[order[i]].id);
    for (int block = 0; block < chain.producer_count; ++block) {
        round.block_schedule.push_back(
            round.producers[(block + round_index) % chain.producer_count]);
    }
    for (size_t i = 0; i < bss.size(); ++i)
        round.coins.push_back(bss[i].coins + (verified[i] ? reward : 0));
    return round;
}

}  // namespace railsim::twin

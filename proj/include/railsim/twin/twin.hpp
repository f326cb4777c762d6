#ifndef RAILSIM_TWIN_TWIN_HPP
#define RAILSIM_TWIN_TWIN_HPP

#include <cstdint>
#include <vector>

namespace railsim::twin {

struct BsNode {
    int id = 0;
    double cpu_hz = 1e9;          // f_i^C
    double verify_scale = 1.0;    // s in the validation denominator f_i * s
    double uplink_bps = 1e8;      // R_i^U
    double downlink_bps = 1e8;    // R_i^D
    std::uint64_t coins = 0;
};

struct TwinSpec {
    int id = 0;
    double data_samples = 1e3;  // D_DT_j
    double batch = 32.0;        // b_j <= D_DT_j
};

struct ChainParams {
    int bs_count = 1;                  // M
    int producer_count = 1;            // M_p <= M
    double block_bits = 1e6;           // S_B
    double hop_factor = 1.0;           // xi
    double verify_cycles_per_bit = 1;  // f^v
    double model_bits = 1e6;           // |w_g|
    double cycles_per_sample = 1e6;    // f^C
    double agg_cycles_per_bit = 1.0;   // f_b^C in the aggregation term

    void validate(size_t n_bs) const;  // throws std::invalid_argument
};

struct AssocMap {
    std::vector<int> bs_of_twin;  //every twin maps to exactly one BS index
};

struct IterationTiming {
    struct PerBs {
        int bs_id = 0;
        double t_cmp = 0.0;
        double t_la = 0.0;  // aggregation (reported, excluded from total)
        double t_pt = 0.0;
    };
    std::vector<PerBs> per_bs;
    double t_cmp_max = 0.0;
    double t_la_max = 0.0;
    double t_broadcast_max = 0.0;
    double t_block_download = 0.0;  // worst downlink across BSs
    double t_block_verify = 0.0;    // worst verifier
    double total = 0.0;  // cmp_max + broadcast_max + download + verify
};

/// Per-iteration time of blockchain-anchored federated twin training:
///   T = max_i T_i^cmp + max_i T_i^pt
///       + xi*log2(Mp)*S_B/R^D + max_i S_B*f^v/(f_i*s).
/// The aggregation time T_i^la is computed and reported but excluded from
/// the total.
IterationTiming iteration_time(const AssocMap& assoc,
                               const std::vector<BsNode>& bss,
                               const std::vector<TwinSpec>& twins,
                               const ChainParams& chain);

/// Greedy seed (heaviest twins first onto the BS that minimizes the
/// resulting total) refined by move/swap local search; the search also
/// starts from the all-on-one-BS and round-robin baselines, so it never
/// returns a worse total than either.
AssocMap optimize_assoc(const std::vector<BsNode>& bss,
                        const std::vector<TwinSpec>& twins,
                        const ChainParams& chain);

struct DposRound {
    std::vector<int> producers;       // M_p BS ids, stake-ranked
    std::vector<int> block_schedule;  // producer id per block in the round
    std::vector<std::uint64_t> coins; // updated balances, aligned with bss
};

/// Stake-ranked producer election (ties by ascending id) with per-block
/// rotation; verified BSs earn a fixed coin reward.
DposRound dpos_round(const std::vector<BsNode>& bss, const ChainParams& chain,
                     int round_index, const std::vector<bool>& verified,
                     std::uint64_t reward = 1);

}  // namespace railsim::twin

#endif

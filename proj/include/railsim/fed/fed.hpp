#ifndef RAILSIM_FED_FED_HPP
#define RAILSIM_FED_FED_HPP

#include <utility>
#include <vector>

namespace railsim::fed {

struct FlTask {
    int id = 0;
    double model_bits = 1e6;          // |w|
    double cycles_per_sample = 1e6;   // f^C
    double value = 10.0;              // Val_{m,v}, utility per user
    int rounds = 10;                  // T
    int quota = 1;                    // matching capacity
};

struct FlUser {
    int id = 0;
    double dataset_samples = 1e3;  // D_v
    double cpu_hz = 1e9;
    double channel_gain = 1.0;
    double tx_power_w = 0.1;
    double energy_price = 1.0;     // zeta, utility per joule
};

struct RadioParams {
    double noise_psd = 4e-21;  // W/Hz
    double cpu_kappa = 1e-28;  // effective switched capacitance (energy model)
};

struct DelayBreakdown {
    double comp_s = 0.0;
    double comm_s = 0.0;
    double total_s = 0.0;
};

/// comp = D_v*fC/cpu; comm = |w| / (B*log2(1 + g*P/(N0*B))).
DelayBreakdown round_delay(const FlUser& user, const FlTask& task,
                           double bandwidth_hz, const RadioParams& radio = {});

double comp_energy_j(const FlUser& user, const FlTask& task,
                     const RadioParams& radio = {});
double comm_energy_j(const FlUser& user, const FlTask& task,
                     double bandwidth_hz, const RadioParams& radio = {});

/// O_v(m) = Val - zeta*T*(E_comp + E_comm).
double user_benefit(const FlUser& user, const FlTask& task,
                    double bandwidth_hz, const RadioParams& radio = {});

/// K_m(v) = 1 / (comp + comm).
double task_benefit(const FlUser& user, const FlTask& task,
                    double bandwidth_hz, const RadioParams& radio = {});

// ---- bandwidth allocation --------------------------------------------

struct AllocationResult {
    std::vector<double> bandwidth_hz;  // per member, >= 0, sums to <= B
    double max_delay_s = 0.0;
    bool converged = true;
};

/// Minimizes the worst member round delay over the simplex
/// {b >= 0, sum b <= B} by projected gradient on a log-sum-exp surrogate
/// with annealed temperature. At the optimum every member's total delay
/// is equal (KKT balance).
AllocationResult bandwidth_allocate(const std::vector<FlUser>& members,
                                    const FlTask& task,
                                    double system_bandwidth_hz,
                                    const RadioParams& radio = {});

/// Relative spread max|d_v - mean| / mean of member delays under an
/// allocation; the KKT balance residual.
double kkt_imbalance(const std::vector<FlUser>& members, const FlTask& task,
                     const std::vector<double>& bandwidth_hz,
                     const RadioParams& radio = {});

// ---- coalition formation (single server) ------------------------------

struct Coalition {
    int task_id = 0;
    std::vector<int> members;          // user ids
    std::vector<double> bandwidth_hz;  // aligned with members
};

struct CoalitionResult {
    std::vector<Coalition> coalitions;   // one per task
    std::vector<int> task_of_user;       // -1 = stays out
    int switch_count = 0;
    bool converged = true;  // false when the switch guard tripped
};

/// Hedonic best-response loop: a user switches coalitions when the move
/// strictly improves (own benefit, network utility) lexicographically.
/// Terminates at a Nash-stable partition; per-coalition bandwidth comes
/// from bandwidth_allocate on an equal per-task share of the system band.
CoalitionResult coalition_form(const std::vector<FlTask>& tasks,
                               const std::vector<FlUser>& users,
                               double system_bandwidth_hz,
                               const RadioParams& radio = {});

/// Sum over tasks of the slowest member's round delay (empty coalitions
/// contribute zero) under per-coalition allocations.
double partition_total_delay(const std::vector<FlTask>& tasks,
                             const std::vector<FlUser>& users,
                             const std::vector<int>& task_of_user,
                             double system_bandwidth_hz,
                             const RadioParams& radio = {});

/// G = sum of matched users' benefits (values minus energy costs).
double network_utility(const std::vector<FlTask>& tasks,
                       const std::vector<FlUser>& users,
                       const std::vector<int>& task_of_user,
                       double system_bandwidth_hz,
                       const RadioParams& radio = {});

// ---- stable matching (multi server) ------------------------------------

struct MatchingState {
    std::vector<int> task_of_user;             // -1 = unmatched
    std::vector<std::vector<int>> users_of_task;
    std::vector<std::vector<int>> user_pref;   // per user: acceptable tasks, O desc
    std::vector<std::vector<int>> task_pref;   // per task: all users, K desc
};

/// Deferred acceptance at a fixed per-user reference bandwidth. Users
/// propose in O order (task-proposing variant available for comparison);
/// a task keeps the K-best proposals up to its quota. Ties break on
/// ascending id. The result admits no blocking pair.
MatchingState match_stable(const std::vector<FlTask>& tasks,
                           const std::vector<FlUser>& users,
                           double reference_bandwidth_hz,
                           const RadioParams& radio = {},
                           bool user_proposing = true);

/// Exhaustive blocking-pair scan; empty for a stable matching.
std::vector<std::pair<int, int>> blocking_pairs(
    const MatchingState& state, const std::vector<FlTask>& tasks,
    const std::vector<FlUser>& users, double reference_bandwidth_hz,
    const RadioParams& radio = {});

}  // namespace railsim::fed

#endif

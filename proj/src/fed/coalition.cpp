#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "railsim/fed/fed.hpp"

namespace railsim::fed {

namespace {

std::vector<std::vector<int>> group_members(const std::vector<FlTask>& tasks,
                                            const std::vector<int>& task_of_user) {
    std::vector<std::vector<int>> members(tasks.size());
    for (size_t u = 0; u < task_of_user.size(); ++u) {
        if (task_of_user[u] >= 0) members[task_of_user[u]].push_back(static_cast<int>(u));
    }
    return members;
}

struct CoalitionEval {
    std::vector<double> bandwidth;  // aligned with member list
    std::vector<double> benefit;    // O_v per member
};

CoalitionEval evaluate_coalition(const std::vector<FlUser>& users,
                                 const FlTask& task,
                                 const std::vector<int>& members,
                                 double task_bandwidth,
                                 const RadioParams& radio) {
    CoalitionEval eval;
    if (members.empty()) return eval;
    std::vector<FlUser> group;
    for (int u : members) group.push_back(users[u]);
    const AllocationResult alloc =
        bandwidth_allocate(group, task, task_bandwidth, radio);
    eval.bandwidth = alloc.bandwidth_hz;
    for (size_t i = 0; i < members.size(); ++i) {
        eval.benefit.push_back(
            user_benefit(group[i], task, eval.bandwidth[i], radio));
    }
    return eval;
}

}  // namespace

double network_utility(const std::vector<FlTask>& tasks,
                       const std::vector<FlUser>& users,
                       const std::vector<int>& task_of_user,
                       double system_bandwidth_hz, const RadioParams& radio) {
    const double task_band = system_bandwidth_hz / tasks.size();
    const auto members = group_members(tasks, task_of_user);
    double total = 0.0;
    for (size_t m = 0; m < tasks.size(); ++m) {
        const CoalitionEval eval =
            evaluate_coalition(users, tasks[m], members[m], task_band, radio);
        for (double o : eval.benefit) total += o;
    }
    return total;
}

double partition_total_delay(const std::vector<FlTask>& tasks,
                             const std::vector<FlUser>& users,
                             const std::vector<int>& task_of_user,
                             double system_bandwidth_hz,
                             const RadioParams& radio) {
    const double task_band = system_bandwidth_hz / tasks.size();
    const auto members = group_members(tasks, task_of_user);
    double total = 0.0;
    for (size_t m = 0; m < tasks.size(); ++m) {
        if (members[m].empty()) continue;
        std::vector<FlUser> group;
        for (int u : members[m]) group.push_back(users[u]);
        const AllocationResult alloc =
            bandwidth_allocate(group, tasks[m], task_band, radio);
        total += alloc.max_delay_s;
    }
    return total;
}

CoalitionResult coalition_form(const std::vector<FlTask>& tasks,
                               const std::vector<FlUser>& users,
                               double system_bandwidth_hz,
                               const RadioParams& radio) {
    if (tasks.empty()) throw std::invalid_argument("needs >= 1 task");
    const double task_band = system_bandwidth_hz / tasks.size();
    const int n_users = static_cast<int>(users.size());
    const int n_tasks = static_cast<int>(tasks.size());

    CoalitionResult result;
    result.task_of_user.assign(n_users, -1);

    // Seed: each user picks the task maximizing their stand-alone benefit
    // (out when nothing is profitable).
    for (int u = 0; u < n_users; ++u) {
        double best = 0.0;
        int best_task = -1;
        for (int m = 0; m < n_tasks; ++m) {
            const double o = user_benefit(users[u], tasks[m], task_band, radio);
            if (o > best) {
                best = o;
                best_task = m;
            }
        }
        result.task_of_user[u] = best_task;
    }

    auto own_benefit = [&](const std::vector<int>& assignment, int user) {
        const int m = assignment[user];
        if (m < 0) return 0.0;
        const auto members = group_members(tasks, assignment);
        const CoalitionEval eval = evaluate_coalition(
            users, tasks[m], members[m], task_band, radio);
        for (size_t i = 0; i < members[m].size(); ++i) {
            if (members[m][i] == user) return eval.benefit[i];
        }
        return 0.0;
    };

    constexpr int kSwitchGuard = 10000;
    constexpr double kEps = 1e-12;
    bool changed = true;
    while (changed && result.switch_count < kSwitchGuard) {
        changed = false;
        for (int u = 0; u < n_users && result.switch_count < kSwitchGuard; ++u) {
            const int current = result.task_of_user[u];
            const double cur_o = own_benefit(result.task_of_user, u);
            const double cur_g = network_utility(tasks, users,
                                                 result.task_of_user,
                                                 system_bandwidth_hz, radio);
            int best_target = current;
            double best_o = cur_o;
            double best_g = cur_g;
            for (int m = -1; m < n_tasks; ++m) {
                if (m == current) continue;
                std::vector<int> trial = result.task_of_user;
                trial[u] = m;
                const double o = own_benefit(trial, u);
                const double g = network_utility(tasks, users, trial,
                                                 system_bandwidth_hz, radio);
                // Not-entirely-selfish order: own benefit first, network
                // utility as the tie-breaker.
                const bool better =
                    o > best_o + kEps ||
                    (std::fabs(o - best_o) <= kEps && g > best_g + kEps);
                if (better) {
                    best_target = m;
                    best_o = o;
                    best_g = g;
                }
            }
            if (best_target != current) {
                result.task_of_user[u] = best_target;
                ++result.switch_count;
                changed = true;
            }
        }
    }
    result.converged = result.switch_count < kSwitchGuard;

    const auto members = group_members(tasks, result.task_of_user);
    for (int m = 0; m < n_tasks; ++m) {
        Coalition c;
        c.task_id = tasks[m].id;
        c.members = members[m];
        const CoalitionEval eval =
            evaluate_coalition(users, tasks[m], members[m], task_band, radio);
        c.bandwidth_hz = eval.bandwidth;
        result.coalitions.push_back(std::move(c));
    }
    return result;
}

}  // namespace railsim::fed

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <vector>

#include "railsim/fed/fed.hpp"

namespace railsim::fed {

namespace {

/// Strict preference of task m between two users (true when a beats b).
bool task_prefers(const FlTask& task, const std::vector<FlUser>& users, int a,
                  int b, double bw, const RadioParams& radio) {
    const double ka = task_benefit(users[a], task, bw, radio);
    const double kb = task_benefit(users[b], task, bw, radio);
    if (ka != kb) return ka > kb;
    return a < b;
}

}  // namespace

MatchingState match_stable(const std::vector<FlTask>& tasks,
                           const std::vector<FlUser>& users,
                           double reference_bandwidth_hz,
                           const RadioParams& radio, bool user_proposing) {
    const int n_users = static_cast<int>(users.size());
    const int n_tasks = static_cast<int>(tasks.size());
    for (const auto& t : tasks) {
        if (t.quota < 0) throw std::invalid_argument("quota must be >= 0");
    }

    MatchingState state;
    state.task_of_user.assign(n_users, -1);
    state.users_of_task.assign(n_tasks, {});

    // Preference lists, strictly ordered after the id tie-break.
    state.user_pref.assign(n_users, {});
    for (int u = 0; u < n_users; ++u) {
        std::vector<std::pair<double, int>> scored;
        for (int m = 0; m < n_tasks; ++m) {
            const double o =
                user_benefit(users[u], tasks[m], reference_bandwidth_hz, radio);
            if (o > 0.0) scored.push_back({o, m});
        }
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (const auto& [o, m] : scored) state.user_pref[u].push_back(m);
    }
    state.task_pref.assign(n_tasks, {});
    for (int m = 0; m < n_tasks; ++m) {
        std::vector<int> order(n_users);
        for (int u = 0; u < n_users; ++u) order[u] = u;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return task_prefers(tasks[m], users, a, b, reference_bandwidth_hz,
                                radio);
        });
        state.task_pref[m] = std::move(order);
    }

    if (user_proposing) {
        std::vector<size_t> next_proposal(n_users, 0);
        std::deque<int> free_users;
        for (int u = 0; u < n_users; ++u) free_users.push_back(u);
        while (!free_users.empty()) {
            const int u = free_users.front();
            free_users.pop_front();
            if (next_proposal[u] >= state.user_pref[u].size()) continue;
            const int m = state.user_pref[u][next_proposal[u]++];
            auto& held = state.users_of_task[m];
            if (static_cast<int>(held.size()) < tasks[m].quota) {
                held.push_back(u);
                state.task_of_user[u] = m;
            } else if (tasks[m].quota > 0) {
                // Find the held user the task likes least.
                int worst_pos = 0;
                for (size_t i = 1; i < held.size(); ++i) {
                    if (task_prefers(tasks[m], users, held[worst_pos], held[i],
                                     reference_bandwidth_hz, radio))
                        worst_pos = static_cast<int>(i);
                }
                if (task_prefers(tasks[m], users, u, held[worst_pos],
                                 reference_bandwidth_hz, radio)) {
                    const int bumped = held[worst_pos];
                    held[worst_pos] = u;
                    state.task_of_user[u] = m;
                    state.task_of_user[bumped] = -1;
                    free_users.push_back(bumped);
                } else {
                    free_users.push_back(u);  // rejected, tries next choice
                }
            } else {
                free_users.push_back(u);
            }
        }
    } else {
        // Task-proposing deferred acceptance; users hold their best offer.
        std::vector<size_t> next_proposal(n_tasks, 0);
        auto user_rank = [&](int u, int m) -> int {
            for (size_t i = 0; i < state.user_pref[u].size(); ++i) {
                if (state.user_pref[u][i] == m) return static_cast<int>(i);
            }
            return -1;  // unacceptable
        };
        bool progress = true;
        while (progress) {
            progress = false;
            for (int m = 0; m < n_tasks; ++m) {
                while (static_cast<int>(state.users_of_task[m].size()) <
                           tasks[m].quota &&
                       next_proposal[m] < state.task_pref[m].size()) {
                    const int u = state.task_pref[m][next_proposal[m]++];
                    progress = true;
                    const int rank_new = user_rank(u, m);
                    if (rank_new < 0) continue;
                    const int held = state.task_of_user[u];
                    if (held < 0) {
                        state.task_of_user[u] = m;
                        state.users_of_task[m].push_back(u);
                    } else if (user_rank(u, held) > rank_new) {
                        auto& old_list = state.users_of_task[held];
                        old_list.erase(
                            std::find(old_list.begin(), old_list.end(), u));
                        state.task_of_user[u] = m;
                        state.users_of_task[m].push_back(u);
                    }
                }
            }
        }
    }

    for (auto& held : state.users_of_task) std::sort(held.begin(), held.end());
    return state;
}

std::vector<std::pair<int, int>> blocking_pairs(
    const MatchingState& state, const std::vector<FlTask>& tasks,
    const std::vector<FlUser>& users, double reference_bandwidth_hz,
    const RadioParams& radio) {
    std::vector<std::pair<int, int>> blocking;
    const int n_users = static_cast<int>(users.size());
    const int n_tasks = static_cast<int>(tasks.size());

    auto user_rank = [&](int u, int m) -> int {
        for (size_t i = 0; i < state.user_pref[u].size(); ++i) {
            if (state.user_pref[u][i] == m) return static_cast<int>(i);
        }
        return -1;
    };

    for (int u = 0; u < n_users; ++u) {
        for (int m = 0; m < n_tasks; ++m) {
            if (state.task_of_user[u] == m) continue;
            const int rank_new = user_rank(u, m);
            if (rank_new < 0) continue;  // user finds m unacceptable
            const int held = state.task_of_user[u];
            const bool user_wants =
                held < 0 || user_rank(u, held) > rank_new;
            if (!user_wants) continue;

            bool task_wants = false;
            if (static_cast<int>(state.users_of_task[m].size()) < tasks[m].quota) {
                task_wants = true;
            } else {
                for (int held_user : state.users_of_task[m]) {
                    if (task_prefers(tasks[m], users, u, held_user,
                                     reference_bandwidth_hz, radio)) {
                        task_wants = true;
                        break;
                    }
                }
            }
            if (task_wants) blocking.push_back({u, m});
        }
    }
    return blocking;
}

}  // namespace railsim::fed

#include <string>
#include <vector>

#include "railsim/core/experiment.hpp"
#include "railsim/fed/fed.hpp"

#include "experiments.hpp"

namespace railsim::experiments {

namespace {

using core::Experiment;
using core::MetricsTable;
using core::TrialContext;

std::vector<fed::FlTask> draw_tasks(const core::ScenarioConfig& cfg) {
    const int n = static_cast<int>(cfg.get("fed.tasks"));
    std::vector<fed::FlTask> tasks;
    for (int m = 0; m < n; ++m) {
        fed::FlTask task;
        task.id = m;
        task.model_bits = cfg.get("fed.model_bits");
        task.cycles_per_sample = cfg.get("fed.cycles_per_sample");
        task.value = cfg.get("fed.task_value");
        task.rounds = static_cast<int>(cfg.get("fed.rounds"));
        task.quota = static_cast<int>(cfg.get("fed.quota"));
        tasks.push_back(task);
    }
    return tasks;
}

std::vector<fed::FlUser> draw_users(const core::ScenarioConfig& cfg,
                                    core::RngStream& stream) {
    const int n = static_cast<int>(cfg.get("fed.users"));
    std::vector<fed::FlUser> users;
    for (int u = 0; u < n; ++u) {
        fed::FlUser user;
        user.id = u;
        user.dataset_samples = stream.uniform(500.0, 2000.0);
        user.cpu_hz = stream.uniform(0.5e9, 3e9);
        user.channel_gain = stream.uniform(0.2, 2.0);
        user.tx_power_w = cfg.get("fed.tx_power");
        user.energy_price = cfg.get("fed.energy_price");
        users.push_back(user);
    }
    return users;
}

MetricsTable run_fed_matching(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const auto tasks = draw_tasks(cfg);
    auto stream = ctx.stream.substream("fed/users");
    const auto users = draw_users(cfg, stream);
    const double ref_bw = cfg.get("fed.system_bandwidth") / users.size();

    const auto state = fed::match_stable(tasks, users, ref_bw);

    MetricsTable table;
    table.columns = {"user", "task", "delay_s", "benefit"};
    for (size_t u = 0; u < users.size(); ++u) {
        const int m = state.task_of_user[u];
        double delay = 0.0;
        double benefit = 0.0;
        if (m >= 0) {
            delay = fed::round_delay(users[u], tasks[m], ref_bw).total_s;
            benefit = fed::user_benefit(users[u], tasks[m], ref_bw);
        }
        table.append_row({static_cast<double>(u), static_cast<double>(m), delay,
                          benefit});
    }
    return table;
}

MetricsTable run_fed_coalition(TrialContext& ctx) {
    const auto& cfg = ctx.config;
    const auto tasks = draw_tasks(cfg);
    auto stream = ctx.stream.substream("fed/users");
    const auto users = draw_users(cfg, stream);
    const double system_bw = cfg.get("fed.system_bandwidth");

    const auto result = fed::coalition_form(tasks, users, system_bw);

    MetricsTable table;
    table.columns = {"task", "coalition_size", "task_delay_s"};
    const double task_bw = system_bw / tasks.size();
    for (size_t m = 0; m < tasks.size(); ++m) {
        const auto& coalition = result.coalitions[m];
        double delay = 0.0;
        if (!coalition.members.empty()) {
            std::vector<fed::FlUser> group;
            for (int u : coalition.members) group.push_back(users[u]);
            delay = fed::bandwidth_allocate(group, tasks[m], task_bw).max_delay_s;
        }
        table.append_row({static_cast<double>(m),
                          static_cast<double>(coalition.members.size()), delay});
    }
    return table;
}

}  // namespace

void register_fed() {
    auto& keys = core::KeyRegistry::instance();
    keys.add("fed.tasks", 2.0, "federated task count");
    keys.add("fed.users", 8.0, "user count");
    keys.add("fed.model_bits", 5e6, "model size |w| (bits)");
    keys.add("fed.cycles_per_sample", 1e6, "CPU cycles per sample f^C");
    keys.add("fed.task_value", 20.0, "task value Val (utility)");
    keys.add("fed.rounds", 10.0, "training rounds T");
    keys.add("fed.quota", 4.0, "per-task matching quota");
    keys.add("fed.tx_power", 0.1, "user transmit power (W)");
    keys.add("fed.energy_price", 1.0, "energy price zeta (utility/J)");
    keys.add("fed.system_bandwidth", 10e6, "system bandwidth (Hz)");

    auto& reg = core::ExperimentRegistry::instance();
    reg.add(Experiment{"fed_matching",
                       "stable task-user matching dump (user, task, delay, benefit)",
                       1, run_fed_matching});
    reg.add(Experiment{"fed_coalition",
                       "task-driven coalition sizes and per-task delays",
                       1, run_fed_coalition});
}

}  // namespace railsim::experiments

#ifndef RAILSIM_CORE_EXPERIMENT_HPP
#define RAILSIM_CORE_EXPERIMENT_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "railsim/core/config.hpp"
#include "railsim/core/metrics.hpp"
#include "railsim/core/rng.hpp"

namespace railsim::core {

struct TrialContext {
    const ScenarioConfig& config;
    int trial_index;
    RngStream stream;
};

/// A registered experiment produces one table per trial; all trials must
/// produce the same shape. The leading `key_columns` columns are sweep
/// keys (slot index, SNR point, ...) that are identical across trials and
/// pass through aggregation unscathed.
struct Experiment {
    std::string name;
    std::string description;
    int key_columns = 0;
    std::function<MetricsTable(TrialContext&)> run_trial;
};

class ExperimentRegistry {
public:
    static ExperimentRegistry& instance();
    void add(Experiment exp);
    const Experiment* find(const std::string& name) const;
    std::vector<std::string> names() const;
    const std::map<std::string, Experiment>& all() const { return experiments_; }

private:
    std::map<std::string, Experiment> experiments_;
};

/// Dispatches to the registered experiment and aggregates per-trial
/// tables: the cell-wise mean lands in the original column; with more
/// than one trial, `<col>_std`, `<col>_min`, `<col>_max` columns are
/// appended per metric column. Aggregation is an ordered reduction by
/// trial index, so the result is independent of execution interleaving.
MetricsTable run_scenario(const ScenarioConfig& config);

/// Compile-time build identifier (git describe when available).
const char* build_id();

}  // namespace railsim::core

namespace railsim::experiments {
/// Registers every experiment and its scenario keys. Call once at startup
/// before load_scenario / run_scenario.
void register_all();
}  // namespace railsim::experiments

#endif

#include "railsim/core/experiment.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace railsim::core {

#ifndef RAILSIM_BUILD_ID
#define RAILSIM_BUILD_ID "dev"
#endif

const char* build_id() { return RAILSIM_BUILD_ID; }

ExperimentRegistry& ExperimentRegistry::instance() {
    static ExperimentRegistry reg;
    return reg;
}

void ExperimentRegistry::add(Experiment exp) {
    experiments_[exp.name] = std::move(exp);
}

const Experiment* ExperimentRegistry::find(const std::string& name) const {
    auto it = experiments_.find(name);
    return it == experiments_.end() ? nullptr : &it->second;
}

std::vector<std::string> ExperimentRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(experiments_.size());
    for (const auto& [name, exp] : experiments_) out.push_back(name);
    return out;
}

namespace {

void check_same_shape(const MetricsTable& a, const MetricsTable& b,
                      int trial_index) {
    if (a.columns != b.columns || a.rows.size() != b.rows.size())
        throw std::runtime_error(
            "trial " + std::to_string(trial_index) +
            ": table shape differs from trial 0 (non-deterministic experiment?)");
}

}  // namespace

MetricsTable run_scenario(const ScenarioConfig& config) {
    const Experiment* exp =
        ExperimentRegistry::instance().find(config.scenario_name);
    if (!exp)
        throw ConfigError(ConfigError::Kind::Validation,
                          "unknown scenario '" + config.scenario_name + "'");

    const auto t0 = std::chrono::steady_clock::now();

    std::vector<MetricsTable> per_trial;
    per_trial.reserve(config.trials);
    for (int t = 0; t < config.trials; ++t) {
        TrialContext ctx{config, t,
                         RngStream(config.seed, "trial/" + std::to_string(t))};
        try {
            per_trial.push_back(exp->run_trial(ctx));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(t) + ": " +
                                     e.what());
        }
        if (t > 0) check_same_shape(per_trial[0], per_trial[t], t);
    }

    const MetricsTable& first = per_trial[0];
    const size_t n_cols = first.columns.size();
    const size_t n_rows = first.rows.size();
    const int key_cols = exp->key_columns;
    const int trials = config.trials;

    MetricsTable out;
    out.meta.scenario = config.scenario_name;
    out.meta.seed = config.seed;
    out.meta.build_id = build_id();

    out.columns = first.columns;
    if (trials > 1) {
        for (size_t c = key_cols; c < n_cols; ++c) {
            out.columns.push_back(first.columns[c] + "_std");
            out.columns.push_back(first.columns[c] + "_min");
            out.columns.push_back(first.columns[c] + "_max");
        }
    }

    for (size_t r = 0; r < n_rows; ++r) {
        std::vector<double> row;
        row.reserve(out.columns.size());
        for (size_t c = 0; c < n_cols; ++c) {
            if (static_cast<int>(c) < key_cols) {
                const double key = first.rows[r][c];
                for (int t = 1; t < trials; ++t) {
                    if (per_trial[t].rows[r][c] != key)
                        throw std::runtime_error(
                            "key column '" + first.columns[c] +
                            "' differs across trials at row " + std::to_string(r));
                }
                row.push_back(key);
            } else {
                double mean = 0.0;
                for (int t = 0; t < trials; ++t)
                    mean += per_trial[t].rows[r][c];
                mean /= trials;
                row.push_back(mean);
            }
        }
        if (trials > 1) {
            for (size_t c = key_cols; c < n_cols; ++c) {
                double mean = 0.0;
                for (int t = 0; t < trials; ++t)
                    mean += per_trial[t].rows[r][c];
                mean /= trials;
                double ss = 0.0;
                double lo = per_trial[0].rows[r][c];
                double hi = lo;
                for (int t = 0; t < trials; ++t) {
                    const double v = per_trial[t].rows[r][c];
                    ss += (v - mean) * (v - mean);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                row.push_back(std::sqrt(ss / (trials - 1)));
                row.push_back(lo);
                row.push_back(hi);
            }
        }
        out.append_row(std::move(row));
    }

    const auto t1 = std::chrono::steady_clock::now();
    out.meta.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.check_finite();
    return out;
}

}  // namespace railsim::core

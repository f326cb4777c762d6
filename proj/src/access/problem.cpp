#include "railsim/access/access.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace railsim::access {

void AccessConfig::validate() const {
    if (rail_users < 0 || onboard_users < 0)
        throw std::invalid_argument("user counts must be >= 0");
    if (pilot_len < 1 || pilot_len >= total_users())
        throw std::invalid_argument("pilot_len must satisfy 1 <= l_p < N");
    if (activity_prob < 0.0 || activity_prob > 1.0)
        throw std::invalid_argument("activity_prob must be in [0,1]");
    if (train_present_prob < 0.0 || train_present_prob > 1.0)
        throw std::invalid_argument("train_present_prob must be in [0,1]");
}

SparseProblem gen_problem(const AccessConfig& config, core::RngStream& stream) {
    config.validate();
    const int n = config.total_users();
    const int l = config.pilot_len;

    SparseProblem problem;
    problem.train_present = stream.bernoulli(config.train_present_prob);

    problem.truth_gains = VectorXcd::Zero(n);
    for (int k = 0; k < config.rail_users; ++k) {
        if (stream.bernoulli(config.activity_prob)) {
            problem.truth_support.push_back(k);
            problem.truth_gains(k) = stream.cnormal();
        }
    }
    for (int k = config.rail_users; k < n; ++k) {
        const bool active =
            problem.train_present && stream.bernoulli(config.activity_prob);
        if (active) {
            problem.truth_support.push_back(k);
            problem.truth_gains(k) = stream.cnormal();
        }
    }

    problem.pilot.resize(l, n);
    const double col_scale = 1.0 / std::sqrt(static_cast<double>(l));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < l; ++i) {
            problem.pilot(i, k) = col_scale * stream.cnormal();
        }
    }

    // SNR is defined against the expected active count so the noise floor
    // does not depend on the realized draw (p = 0 still yields y = n).
    problem.noise_var = std::max(config.expected_active(), 1.0) / l *
                        std::pow(10.0, -config.snr_db / 10.0);
    const double noise_amp = std::sqrt(problem.noise_var);
    problem.noise.resize(l);
    for (int i = 0; i < l; ++i) problem.noise(i) = noise_amp * stream.cnormal();

    problem.received = problem.pilot * problem.truth_gains + problem.noise;
    return problem;
}

double nmse(const VectorXcd& truth, const VectorXcd& estimate) {
    if (truth.size() != estimate.size())
        throw std::invalid_argument("nmse: size mismatch");
    const double denom = truth.squaredNorm();
    const double num = (truth - estimate).squaredNorm();
    if (denom == 0.0)
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

}  // namespace railsim::access

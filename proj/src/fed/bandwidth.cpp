#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "railsim/fed/fed.hpp"

namespace railsim::fed {

namespace {

double member_delay(const FlUser& user, const FlTask& task, double bw,
                    const RadioParams& radio) {
    return round_delay(user, task, bw, radio).total_s;
}

/// d/db of the member delay; strictly negative.
double member_delay_grad(const FlUser& user, const FlTask& task, double bw,
                         const RadioParams& radio) {
    const double a = user.channel_gain * user.tx_power_w / radio.noise_psd;
    const double se = std::log2(1.0 + a / bw);
    const double b_se_prime = -a / (std::numbers::ln2_v<double> * (bw + a));
    return -task.model_bits * (se + b_se_prime) / (bw * se * bw * se);
}

/// Euclidean projection onto {b >= lo, sum b = total}.
void project_simplex(std::vector<double>& b, double total, double lo) {
    const int n = static_cast<int>(b.size());
    // Shift so the lower bound becomes zero.
    double budget = total - n * lo;
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = b[i] - lo;
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cumsum = 0.0;
    double tau = 0.0;
    for (int i = 0; i < n; ++i) {
        cumsum += u[i];
        const double candidate = (cumsum - budget) / (i + 1);
        if (u[i] - candidate > 0.0) tau = candidate;
    }
    for (int i = 0; i < n; ++i) b[i] = std::max(0.0, v[i] - tau) + lo;
}

}  // namespace

double kkt_imbalance(const std::vector<FlUser>& members, const FlTask& task,
                     const std::vector<double>& bandwidth_hz,
                     const RadioParams& radio) {
    if (members.size() != bandwidth_hz.size())
        throw std::invalid_argument("allocation size mismatch");
    if (members.size() < 2) return 0.0;
    double mean = 0.0;
    std::vector<double> delays(members.size());
    for (size_t i = 0; i < members.size(); ++i) {
        delays[i] = member_delay(members[i], task, bandwidth_hz[i], radio);
        mean += delays[i];
    }
    mean /= members.size();
    double worst = 0.0;
    for (double d : delays) worst = std::max(worst, std::fabs(d - mean));
    return worst / mean;
}

AllocationResult bandwidth_allocate(const std::vector<FlUser>& members,
                                    const FlTask& task,
                                    double system_bandwidth_hz,
                                    const RadioParams& radio) {
    if (members.empty())
        throw std::invalid_argument("bandwidth_allocate needs >= 1 member");
    if (!(system_bandwidth_hz > 0.0))
        throw std::invalid_argument("system bandwidth must be > 0");

    const int n = static_cast<int>(members.size());
    AllocationResult result;
    if (n == 1) {
        result.bandwidth_hz = {system_bandwidth_hz};
        result.max_delay_s =
            member_delay(members[0], task, system_bandwidth_hz, radio);
        return result;
    }

    const double lo = 1e-9 * system_bandwidth_hz / n;
    std::vector<double> b(n, system_bandwidth_hz / n);

    auto delays = [&](const std::vector<double>& alloc) {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i)
            d[i] = member_delay(members[i], task, alloc[i], radio);
        return d;
    };

    // Temperature annealing on the log-sum-exp surrogate
    //   f(b) = mu * log sum exp(d_v(b)/mu).
    const std::vector<double> d0 = delays(b);
    const double scale = *std::max_element(d0.begin(), d0.end());
    double mu = 0.1 * scale;
    const double mu_floor = 1e-11 * scale;

    while (mu >= mu_floor) {
        double step = 0.1 * system_bandwidth_hz / n;
        for (int it = 0; it < 400; ++it) {
            const std::vector<double> d = delays(b);
            const double dmax = *std::max_element(d.begin(), d.end());
            double z = 0.0;
            std::vector<double> w(n);
            for (int i = 0; i < n; ++i) {
                w[i] = std::exp((d[i] - dmax) / mu);
                z += w[i];
            }
            std::vector<double> grad(n);
            double gnorm = 0.0;
            for (int i = 0; i < n; ++i) {
                grad[i] = w[i] / z *
                          member_delay_grad(members[i], task, b[i], radio);
                gnorm = std::max(gnorm, std::fabs(grad[i]));
            }
            if (gnorm == 0.0) break;

            auto surrogate = [&](const std::vector<double>& alloc) {
                const std::vector<double> dd = delays(alloc);
                const double m = *std::max_element(dd.begin(), dd.end());
                double acc = 0.0;
                for (double v : dd) acc += std::exp((v - m) / mu);
                return m + mu * std::log(acc);
            };

            const double f0 = surrogate(b);
            bool moved = false;
            double trial_step = step;
            for (int bt = 0; bt < 30; ++bt) {
                std::vector<double> cand(n);
                for (int i = 0; i < n; ++i)
                    cand[i] = b[i] - trial_step * grad[i] / gnorm;
                project_simplex(cand, system_bandwidth_hz, lo);
                if (surrogate(cand) < f0) {
                    b = std::move(cand);
                    step = std::min(trial_step * 2.0,
                                    0.1 * system_bandwidth_hz / n);
                    moved = true;
                    break;
                }
                trial_step *= 0.5;
            }
            if (!moved) break;  // stationary at this temperature
        }
        mu *= 0.5;
    }

    result.bandwidth_hz = b;
    const std::vector<double> final_delays = delays(b);
    result.max_delay_s =
        *std::max_element(final_delays.begin(), final_delays.end());
    result.converged = kkt_imbalance(members, task, b, radio) < 1e-5;
    return result;
}

}  // namespace railsim::fed

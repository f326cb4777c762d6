#include <cmath>
#include <stdexcept>

#include "railsim/fed/fed.hpp"

namespace railsim::fed {

DelayBreakdown round_delay(const FlUser& user, const FlTask& task,
                           double bandwidth_hz, const RadioParams& radio) {
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("bandwidth must be > 0");
    DelayBreakdown d;
    d.comp_s = user.dataset_samples * task.cycles_per_sample / user.cpu_hz;
    const double snr = user.channel_gain * user.tx_power_w /
                       (radio.noise_psd * bandwidth_hz);
    const double se = std::log2(1.0 + snr);  // bit/s/Hz
    d.comm_s = task.model_bits / (bandwidth_hz * se);
    d.total_s = d.comp_s + d.comm_s;
    return d;
}

double comp_energy_j(const FlUser& user, const FlTask& task,
                     const RadioParams& radio) {
    return radio.cpu_kappa * user.cpu_hz * user.cpu_hz *
           user.dataset_samples * task.cycles_per_sample;
}

double comm_energy_j(const FlUser& user, const FlTask& task,
                     double bandwidth_hz, const RadioParams& radio) {
    return user.tx_power_w * round_delay(user, task, bandwidth_hz, radio).comm_s;
}

double user_benefit(const FlUser& user, const FlTask& task,
                    double bandwidth_hz, const RadioParams& radio) {
    const double energy = task.rounds * (comp_energy_j(user, task, radio) +
                                         comm_energy_j(user, task,
                                                       bandwidth_hz, radio));
    return task.value - user.energy_price * energy;
}

double task_benefit(const FlUser& user, const FlTask& task,
                    double bandwidth_hz, const RadioParams& radio) {
    return 1.0 / round_delay(user, task, bandwidth_hz, radio).total_s;
}

}  // namespace railsim::fed

#include "railsim/channel/thz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace railsim::channel {

void ThzLinkParams::validate() const {
    if (!(efficiency > 0.0 && efficiency < 1.0))
        throw std::domain_error("efficiency must be in (0,1)");
    if (!(carrier_freq_hz > 0.0)) throw std::domain_error("carrier_freq_hz <= 0");
    if (!(bandwidth_hz > 0.0)) throw std::domain_error("bandwidth_hz <= 0");
    if (!(tx_power_w > 0.0)) throw std::domain_error("tx_power_w <= 0");
    if (!(noise_psd_w_per_hz > 0.0)) throw std::domain_error("noise_psd <= 0");
    if (!(distance_m > 0.0)) throw std::domain_error("distance_m <= 0");
    if (absorption_per_m < 0.0) throw std::domain_error("absorption_per_m < 0");
}

double fspl_db(double freq_hz, double distance_m) {
    if (!(freq_hz > 0.0) || !(distance_m > 0.0))
        throw std::domain_error("fspl_db requires positive frequency and distance");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * freq_hz /
                             kSpeedOfLight);
}

double received_power_w(const ThzLinkParams& link) {
    link.validate();
    const double gains_db = link.tx_gain_dbi + link.rx_gain_dbi -
                            fspl_db(link.carrier_freq_hz, link.distance_m);
    return link.tx_power_w * std::pow(10.0, gains_db / 10.0) *
           std::exp(-link.absorption_per_m * link.distance_m);
}

double thz_rate(const ThzLinkParams& link, double interference_w) {
    if (interference_w < 0.0)
        throw std::domain_error("interference must be >= 0");
    const double pr = received_power_w(link);
    const double noise = link.noise_psd_w_per_hz * link.bandwidth_hz;
    const double rate = link.efficiency * link.bandwidth_hz *
                        std::log2(1.0 + pr / (noise + interference_w));
    if (!std::isfinite(rate) || rate < 0.0)
        throw std::runtime_error("thz_rate produced a non-finite rate");
    return rate;
}

}  // namespace railsim::channel

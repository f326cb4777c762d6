#include "railsim/channel/aging.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace railsim::channel {

double aging_rho(double fdts) {
    if (fdts < 0.0) throw std::domain_error("fdts must be >= 0");
    if (fdts == 0.0) return 1.0;
    return std::cyl_bessel_j(0.0, 2.0 * std::numbers::pi * fdts);
}

void age_step(std::vector<std::complex<double>>& h, double rho,
              core::RngStream& stream) {
    const double innovation = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (auto& entry : h) {
        entry = rho * entry + innovation * stream.cnormal();
    }
}

std::vector<std::complex<double>> aged_channel(
    const std::vector<std::complex<double>>& h0, const FadingProcess& fading,
    int steps, core::RngStream& stream) {
    if (steps < 0) throw std::domain_error("steps must be >= 0");
    const double rho = aging_rho(fading.fdts);
    auto h = h0;
    for (int n = 0; n < steps; ++n) age_step(h, rho, stream);
    return h;
}

std::vector<double> average_se_curve(int ris_elements, double element_gain,
                                     const FadingProcess& fading, int horizon,
                                     int tx_antennas, double snr_db, int trials,
                                     core::RngStream& stream) {
    if (horizon < 1 || tx_antennas < 1 || trials < 1)
        throw std::domain_error("horizon, tx_antennas, trials must be >= 1");
    const double rho = aging_rho(fading.fdts);
    const double sigma = std::sqrt(1.0 + ris_elements * element_gain);
    const double snr_lin = std::pow(10.0, snr_db / 10.0);

    std::vector<double> se(horizon, 0.0);
    for (int trial = 0; trial < trials; ++trial) {
        auto ts = stream.substream("se/" + std::to_string(trial));
        std::vector<std::complex<double>> h(tx_antennas);
        double h0_norm2 = 0.0;
        for (auto& entry : h) {
            entry = sigma * ts.cnormal();
            h0_norm2 += std::norm(entry);
        }
        // Maximum-ratio beamformer from the slot-0 channel, never refreshed.
        std::vector<std::complex<double>> w(tx_antennas);
        const double h0_norm = std::sqrt(h0_norm2);
        for (int a = 0; a < tx_antennas; ++a) w[a] = h[a] / h0_norm;

        for (int n = 0; n < horizon; ++n) {
            std::complex<double> inner{};
            for (int a = 0; a < tx_antennas; ++a)
                inner += std::conj(w[a]) * h[a];
            se[n] += std::log2(1.0 + snr_lin * std::norm(inner));
            age_step(h, rho, ts);
        }
    }
    for (auto& v : se) v /= trials;
    return se;
}

}  // namespace railsim::channel

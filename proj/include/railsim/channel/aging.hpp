#ifndef RAILSIM_CHANNEL_AGING_HPP
#define RAILSIM_CHANNEL_AGING_HPP

#include <complex>
#include <vector>

#include "railsim/core/rng.hpp"

namespace railsim::channel {

/// First-order Gauss-Markov aging, Jakes-consistent: the slot-to-slot
/// correlation is rho = J0(2*pi*fdts).
struct FadingProcess {
    double fdts = 0.0;  // normalized Doppler f_D * T_s, >= 0
    int dimension = 1;  // taps / antennas
};

/// rho = J0(2*pi*fdts). Exactly 1 at fdts = 0.
double aging_rho(double fdts);

/// One step h <- rho*h + sqrt(1-rho^2)*e, e unit-variance white complex
/// Gaussian. Per-entry variance is preserved.
void age_step(std::vector<std::complex<double>>& h, double rho,
              core::RngStream& stream);

/// Channel after n steps of the recursion starting from h0.
std::vector<std::complex<double>> aged_channel(
    const std::vector<std::complex<double>>& h0, const FadingProcess& fading,
    int steps, core::RngStream& stream);

/// Spectral-efficiency trajectory under a stale beamformer: maximum-ratio
/// combining weights are fixed from the slot-0 channel, the channel ages
/// via the Gauss-Markov recursion, and SE_n = log2(1 + SNR * |w^H h_n|^2).
/// Per-antenna channel variance is 1 + ris_elements * element_gain.
/// Returns the per-slot average over `trials` independent trials.
std::vector<double> average_se_curve(int ris_elements, double element_gain,
                                     const FadingProcess& fading, int horizon,
                                     int tx_antennas, double snr_db, int trials,
                                     core::RngStream& stream);

}  // namespace railsim::channel

#endif

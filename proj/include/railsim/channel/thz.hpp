#ifndef RAILSIM_CHANNEL_THZ_HPP
#define RAILSIM_CHANNEL_THZ_HPP

namespace railsim::channel {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

struct ThzLinkParams {
    double carrier_freq_hz = 340e9;
    double bandwidth_hz = 1e9;         // W
    double efficiency = 0.5;           // eta, in (0,1)
    double tx_power_w = 1.0;
    double tx_gain_dbi = 30.0;
    double rx_gain_dbi = 30.0;
    double noise_psd_w_per_hz = 4e-21;  // N0
    double absorption_per_m = 0.0;      // molecular absorption coefficient k
    double distance_m = 100.0;

    /// Throws std::domain_error on out-of-range fields.
    void validate() const;
};

/// Free-space path loss 20*log10(4*pi*d*f/c) in dB. Throws
/// std::domain_error on non-positive inputs.
double fspl_db(double freq_hz, double distance_m);

/// Received power after FSPL, antenna gains, and exp(-k*d) molecular
/// absorption.
double received_power_w(const ThzLinkParams& link);

/// Shannon rate eta*W*log2(1 + Pr/(N0*W + I)) in bit/s. interference_w
/// must be >= 0. Throws std::runtime_error if the result is not finite.
double thz_rate(const ThzLinkParams& link, double interference_w);

}  // namespace railsim::channel

#endif

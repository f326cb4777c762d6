#ifndef RAILSIM_CHANNEL_RIS_HPP
#define RAILSIM_CHANNEL_RIS_HPP

#include <complex>
#include <cstdint>
#include <vector>

namespace railsim::channel {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

Vec3 operator-(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
double dot(const Vec3& a, const Vec3& b);

struct ClusterSpec {
    Vec3 position;
    double mean_power = 0.0;  // cluster ray-sum power relative to LoS power
    int ray_count = 1;
};

/// On-board RIS channel geometry. The surface is a uniform linear array
/// along the x axis at ris_center; RIS and receiver ride the train, so
/// Doppler enters on the BS-side legs and on scatterer->receiver legs.
struct RisConfig {
    int element_count = 0;                   // N
    std::vector<double> element_phases;      // phi_n, radians in [0, 2*pi)
    Vec3 bs_pos{0.0, 50.0, 10.0};
    Vec3 ris_center{0.0, 0.0, 0.0};
    Vec3 rx_pos{0.0, -2.0, 0.0};
    double element_spacing_wl = 0.5;         // in wavelengths, > 0
    double train_speed_mps = 0.0;            // v_R
    double travel_azimuth_rad = 0.0;         // gamma_R, 0 = +x
    double carrier_freq_hz = 3.5e9;
    std::vector<ClusterSpec> clusters;
    std::uint64_t ray_seed = 0;              // fixes all random ray phases

    double element_gain = 50.0;       // re-radiation amplitude gain per element
    double mb_power_scale = 0.25;     // MB cluster power relative to SB
    double mbr_power_scale = 0.25;    // extra-bounce attenuation for MBR rays
    // Elements mounted on the train window intercept part of the diffuse
    // aperture: SB/MB ray power scales with the uncovered fraction
    // 1 - min(1, N / aperture_elements).
    double aperture_elements = 40.0;

    void validate() const;  // throws std::invalid_argument
};

/// Channel impulse response decomposed into the five propagation cases.
struct Cir {
    std::complex<double> total;
    std::complex<double> sbr, mbr, los, sb, mb;
    double timestamp = 0.0;
};

/// CIR at time t. total is exactly the sum of the five components.
/// Throws std::invalid_argument on degenerate geometry (coincident nodes).
Cir ris_cir(const RisConfig& config, double t);

/// Phase configuration maximizing |h_SBR + h_LoS + h_SB|^2 at time t:
/// each element's cascaded phase is rotated onto arg(h_LoS + h_SB).
/// Requires element_count >= 1.
std::vector<double> optimize_phases(const RisConfig& config, double t);

/// The optimization objective |h_SBR + h_LoS + h_SB|^2 for a given phase
/// vector (element_phases taken from `phases`, not from config).
double phase_objective(const RisConfig& config, double t,
                       const std::vector<double>& phases);

}  // namespace railsim::channel

#endif

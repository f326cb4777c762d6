#include "railsim/channel/ris.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "railsim/core/rng.hpp"
#include "railsim/channel/thz.hpp"

namespace railsim::channel {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using cd = std::complex<double>;

Vec3 unit(const Vec3& v) {
    const double n = norm(v);
    return {v.x / n, v.y / n, v.z / n};
}

cd expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

struct Decomposition {
    cd los, sb, mb;
    std::vector<cd> sbr_base;  // per element, phi_n = 0
    std::vector<cd> mbr_base;  // per element, phi_n = 0
};

/// All geometry- and seed-determined parts of the CIR at time t. The
/// element phase shifts are applied afterwards so the optimizer can reuse
/// the same decomposition.
Decomposition decompose(const RisConfig& cfg, double t) {
    cfg.validate();

    const double lambda = kSpeedOfLight / cfg.carrier_freq_hz;
    const double k = kTwoPi / lambda;
    const Vec3 vel{cfg.train_speed_mps * std::cos(cfg.travel_azimuth_rad),
                   cfg.train_speed_mps * std::sin(cfg.travel_azimuth_rad), 0.0};
    // Doppler of a leg whose far end is `from` as seen by a moving node
    // at `at`: positive when the node closes on the far end.
    auto doppler = [&](const Vec3& from, const Vec3& at) {
        return dot(vel, unit(from - at)) / lambda;
    };

    Decomposition d;

    // LoS
    const double d_br = norm(cfg.bs_pos - cfg.rx_pos);
    if (d_br <= 0.0) throw std::invalid_argument("BS and Rx coincide");
    const double f_los = doppler(cfg.bs_pos, cfg.rx_pos);
    const double los_amp = lambda / (4.0 * std::numbers::pi * d_br);
    d.los = los_amp * expj(-k * d_br + kTwoPi * f_los * t);

    // Diffuse power retained once N elements cover part of the window.
    const double covered =
        cfg.aperture_elements > 0.0
            ? std::min(1.0, cfg.element_count / cfg.aperture_elements)
            : 0.0;
    const double retain_amp = std::sqrt(1.0 - covered);

    core::RngStream rays(cfg.ray_seed, "ris/rays");

    // SB and MB: cluster ray sums with i.i.d. uniform ray phases. Cluster
    // powers are relative to the LoS path power.
    for (size_t c = 0; c < cfg.clusters.size(); ++c) {
        const ClusterSpec& cl = cfg.clusters[c];
        const double f_cl = doppler(cl.position, cfg.rx_pos);
        auto sb_stream = rays.substream("sb/" + std::to_string(c));
        auto mb_stream = rays.substream("mb/" + std::to_string(c));
        const double sb_amp = retain_amp * los_amp *
                              std::sqrt(cl.mean_power / cl.ray_count);
        const double mb_amp = sb_amp * std::sqrt(cfg.mb_power_scale);
        for (int r = 0; r < cl.ray_count; ++r) {
            const double psi_sb = sb_stream.uniform(0.0, kTwoPi);
            const double psi_mb = mb_stream.uniform(0.0, kTwoPi);
            d.sb += sb_amp * expj(psi_sb + kTwoPi * f_cl * t);
            d.mb += mb_amp * expj(psi_mb + kTwoPi * f_cl * t);
        }
    }

    // SBR / MBR: cascade BS -> element_n (-> cluster) -> Rx.
    d.sbr_base.assign(cfg.element_count, cd{});
    d.mbr_base.assign(cfg.element_count, cd{});
    for (int n = 0; n < cfg.element_count; ++n) {
        const double offset =
            (n - 0.5 * (cfg.element_count - 1)) * cfg.element_spacing_wl * lambda;
        const Vec3 elem{cfg.ris_center.x + offset, cfg.ris_center.y,
                        cfg.ris_center.z};
        const double d1 = norm(cfg.bs_pos - elem);
        const double d2 = norm(elem - cfg.rx_pos);
        if (d1 <= 0.0 || d2 <= 0.0)
            throw std::invalid_argument("RIS element coincides with BS or Rx");
        const double f_bs_leg = doppler(cfg.bs_pos, elem);
        const double amp = cfg.element_gain * lambda /
                           (4.0 * std::numbers::pi * d1) * lambda /
                           (4.0 * std::numbers::pi * d2);
        d.sbr_base[n] = amp * expj(-k * (d1 + d2) + kTwoPi * f_bs_leg * t);

        auto mbr_stream = rays.substream("mbr/" + std::to_string(n));
        for (size_t c = 0; c < cfg.clusters.size(); ++c) {
            const ClusterSpec& cl = cfg.clusters[c];
            const double d2a = norm(elem - cl.position);
            const double d2b = norm(cl.position - cfg.rx_pos);
            if (d2a <= 0.0 || d2b <= 0.0)
                throw std::invalid_argument("cluster coincides with element or Rx");
            const double f_elem_cl = doppler(cl.position, elem);
            const double f_cl_rx = doppler(cl.position, cfg.rx_pos);
            // One extra bounce: free-space decay over the full scattered
            // path plus the cluster's relative reflectivity.
            const double ray_amp =
                cfg.element_gain * lambda / (4.0 * std::numbers::pi * d1) *
                lambda / (4.0 * std::numbers::pi * (d2a + d2b)) *
                std::sqrt(cfg.mbr_power_scale * cl.mean_power / cl.ray_count);
            for (int r = 0; r < cl.ray_count; ++r) {
                const double psi = mbr_stream.uniform(0.0, kTwoPi);
                d.mbr_base[n] +=
                    ray_amp * expj(psi - k * d1 +
                                   kTwoPi * (f_bs_leg + f_elem_cl + f_cl_rx) * t);
            }
        }
    }
    return d;
}

Cir assemble(const Decomposition& d, const std::vector<double>& phases,
             double t) {
    Cir cir;
    cir.timestamp = t;
    cir.los = d.los;
    cir.sb = d.sb;
    cir.mb = d.mb;
    for (size_t n = 0; n < d.sbr_base.size(); ++n) {
        const cd rot = expj(phases[n]);
        cir.sbr += rot * d.sbr_base[n];
        cir.mbr += rot * d.mbr_base[n];
    }
    cir.total = cir.sbr + cir.mbr + cir.los + cir.sb + cir.mb;
    return cir;
}

}  // namespace

Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
}

double norm(const Vec3& v) {
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

double dot(const Vec3& a, const Vec3& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

void RisConfig::validate() const {
    if (element_count < 0)
        throw std::invalid_argument("element_count must be >= 0");
    if (element_count > 0 &&
        element_phases.size() != static_cast<size_t>(element_count))
        throw std::invalid_argument("element_phases size != element_count");
    if (!(element_spacing_wl > 0.0))
        throw std::invalid_argument("element spacing must be > 0");
    if (!(carrier_freq_hz > 0.0))
        throw std::invalid_argument("carrier frequency must be > 0");
    for (const auto& cl : clusters) {
        if (cl.mean_power < 0.0)
            throw std::invalid_argument("cluster power must be >= 0");
        if (cl.ray_count < 1)
            throw std::invalid_argument("cluster ray count must be >= 1");
    }
}

Cir ris_cir(const RisConfig& config, double t) {
    if (t < 0.0) throw std::invalid_argument("t must be >= 0");
    const Decomposition d = decompose(config, t);
    return assemble(d, config.element_phases, t);
}

std::vector<double> optimize_phases(const RisConfig& config, double t) {
    if (config.element_count < 1)
        throw std::invalid_argument("optimize_phases requires N >= 1");
    RisConfig probe = config;
    probe.element_phases.assign(config.element_count, 0.0);
    const Decomposition d = decompose(probe, t);

    const double target = std::arg(d.los + d.sb);
    std::vector<double> phases(config.element_count);
    for (int n = 0; n < config.element_count; ++n) {
        double phi = target - std::arg(d.sbr_base[n]);
        phi = std::fmod(phi, kTwoPi);
        if (phi < 0.0) phi += kTwoPi;
        phases[n] = phi;
    }
    return phases;
}

double phase_objective(const RisConfig& config, double t,
                       const std::vector<double>& phases) {
    if (phases.size() != static_cast<size_t>(config.element_count))
        throw std::invalid_argument("phase vector size != element_count");
    RisConfig probe = config;
    probe.element_phases = phases;
    const Cir cir = ris_cir(probe, t);
    return std::norm(cir.sbr + cir.los + cir.sb);
}

}  // namespace railsim::channel

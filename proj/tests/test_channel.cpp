#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "railsim/channel/aging.hpp"
#include "railsim/channel/ris.hpp"
#include "railsim/channel/thz.hpp"
#include "railsim/core/rng.hpp"

using namespace railsim;
using channel::RisConfig;

namespace {

RisConfig desk_ris(int elements, std::uint64_t ray_seed) {
    RisConfig cfg;
    cfg.element_count = elements;
    cfg.element_phases.assign(elements, 0.0);
    cfg.bs_pos = {0.0, 50.0, 10.0};
    cfg.ris_center = {0.0, 0.0, 0.0};
    cfg.rx_pos = {0.5, -2.0, 0.0};
    cfg.carrier_freq_hz = 3.5e9;
    cfg.train_speed_mps = 83.0;
    cfg.travel_azimuth_rad = 0.0;
    cfg.ray_seed = ray_seed;
    cfg.clusters.push_back({{15.0, 10.0, 2.0}, 0.3, 12});
    cfg.clusters.push_back({{22.0, 14.0, 2.0}, 0.3, 12});
    cfg.clusters.push_back({{29.0, 18.0, 2.0}, 0.3, 12});
    return cfg;
}

}  // namespace

TEST_CASE("fspl frequency doubling adds 20*log10(2) dB") {
    // Friis: doubling the frequency quadruples the free-space loss.
    const double delta_expected = 20.0 * std::log10(2.0);  // 6.0206 dB
    core::RngStream stream(11, "fspl");
    for (int i = 0; i < 100; ++i) {
        const double f = stream.uniform(1e9, 1e12);
        const double d = stream.uniform(1.0, 5000.0);
        const double delta = channel::fspl_db(2 * f, d) - channel::fspl_db(f, d);
        CHECK(delta == doctest::Approx(delta_expected).epsilon(1e-12));
        const double delta_d =
            channel::fspl_db(f, 2 * d) - channel::fspl_db(f, d);
        CHECK(delta_d == doctest::Approx(delta_expected).epsilon(1e-12));
    }
}

TEST_CASE("fspl at 340 GHz over 100 m matches the hand-computed value") {
    // Independent route: 20*(log10(4*pi) + log10(d) + log10(f) - log10(c)).
    const double oracle = 20.0 * (std::log10(4.0 * std::numbers::pi) +
                                  std::log10(100.0) + std::log10(3.4e11) -
                                  std::log10(299792458.0));
    CHECK(channel::fspl_db(3.4e11, 100.0) ==
          doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("fspl rejects non-positive inputs") {
    CHECK_THROWS_AS(channel::fspl_db(0.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(channel::fspl_db(1e9, -1.0), std::domain_error);
}

TEST_CASE("thz rate hits eta*W when Pr equals the noise floor") {
    channel::ThzLinkParams link;
    link.efficiency = 0.5;
    link.bandwidth_hz = 1e9;
    link.absorption_per_m = 0.0;
    // Arrange Pr = N0*W exactly by setting the noise floor to Pr.
    link.noise_psd_w_per_hz =
        channel::received_power_w(link) / link.bandwidth_hz;
    const double rate = channel::thz_rate(link, 0.0);
    CHECK(rate == doctest::Approx(link.efficiency * link.bandwidth_hz)
                      .epsilon(1e-12));
}

TEST_CASE("thz rate vanishes as interference grows") {
    channel::ThzLinkParams link;
    const double r0 = channel::thz_rate(link, 0.0);
    const double r_huge = channel::thz_rate(link, 1e12);
    CHECK(r_huge < 1e-6 * r0);
}

TEST_CASE("thz rate desk oracle: W=1GHz, eta=0.5, SNR 20dB") {
    channel::ThzLinkParams link;
    link.efficiency = 0.5;
    link.bandwidth_hz = 1e9;
    link.absorption_per_m = 0.0;
    // Pin the SNR to exactly 100 by choosing the noise PSD.
    const double pr = channel::received_power_w(link);
    link.noise_psd_w_per_hz = pr / (100.0 * link.bandwidth_hz);
    const double oracle = 0.5 * 1e9 * std::log2(101.0);
    CHECK(channel::thz_rate(link, 0.0) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("thz rate is monotone in power and interference") {
    core::RngStream stream(5, "mono");
    for (int i = 0; i < 200; ++i) {
        channel::ThzLinkParams link;
        link.carrier_freq_hz = stream.uniform(1e11, 1e12);
        link.distance_m = stream.uniform(5.0, 500.0);
        link.tx_power_w = stream.uniform(0.01, 2.0);
        link.absorption_per_m = stream.uniform(0.0, 1e-2);
        const double interference = stream.uniform(0.0, 1e-9);

        const double base = channel::thz_rate(link, interference);
        channel::ThzLinkParams more_power = link;
        more_power.tx_power_w *= 1.5;
        CHECK(channel::thz_rate(more_power, interference) >= base);
        CHECK(channel::thz_rate(link, interference * 2.0 + 1e-15) <= base);
    }
}

TEST_CASE("ris cir components sum to the total") {
    auto cfg = desk_ris(16, 99);
    const auto cir = channel::ris_cir(cfg, 0.5e-3);
    const auto sum = cir.sbr + cir.mbr + cir.los + cir.sb + cir.mb;
    CHECK(std::abs(cir.total - sum) <= 1e-12 * std::abs(cir.total));
}

TEST_CASE("ris cir with zero elements has no surface components") {
    auto cfg = desk_ris(0, 3);
    const auto cir = channel::ris_cir(cfg, 0.0);
    CHECK(cir.sbr == std::complex<double>(0.0, 0.0));
    CHECK(cir.mbr == std::complex<double>(0.0, 0.0));
    CHECK(std::abs(cir.los) > 0.0);
}

TEST_CASE("optimized phases make the surface sum fully coherent") {
    // With aligned phases |SBR| equals the sum of per-element amplitudes,
    // i.e. N times the single-element amplitude when they are equal.
    auto cfg = desk_ris(8, 17);
    cfg.element_phases = channel::optimize_phases(cfg, 0.0);
    const auto cir = channel::ris_cir(cfg, 0.0);

    double amp_sum = 0.0;
    for (int n = 0; n < cfg.element_count; ++n) {
        auto single = desk_ris(1, 17);
        single.aperture_elements = cfg.aperture_elements;
        // Reuse the geometry of element n by shifting the array center.
        const double lambda = 299792458.0 / cfg.carrier_freq_hz;
        const double offset =
            (n - 0.5 * (cfg.element_count - 1)) * cfg.element_spacing_wl * lambda;
        single.ris_center = {cfg.ris_center.x + offset, cfg.ris_center.y,
                             cfg.ris_center.z};
        single.element_phases = {0.0};
        const auto lone = channel::ris_cir(single, 0.0);
        amp_sum += std::abs(lone.sbr);
    }
    CHECK(std::abs(cir.sbr) == doctest::Approx(amp_sum).epsilon(1e-9));
}

TEST_CASE("single-element optimal phase matches the closed form") {
    auto cfg = desk_ris(1, 23);
    const auto phases = channel::optimize_phases(cfg, 0.0);
    // Closed form: phi = arg(LoS + SB) - cascade phase.
    auto probe = cfg;
    probe.element_phases = {0.0};
    const auto cir = channel::ris_cir(probe, 0.0);
    double expected = std::arg(cir.los + cir.sb) - std::arg(cir.sbr);
    expected = std::fmod(expected, 2.0 * std::numbers::pi);
    if (expected < 0.0) expected += 2.0 * std::numbers::pi;
    CHECK(phases[0] == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("alignment is within 1% of an exhaustive 16-level grid search") {
    auto cfg = desk_ris(3, 41);
    const auto phases = channel::optimize_phases(cfg, 0.0);
    const double aligned = channel::phase_objective(cfg, 0.0, phases);

    double best_grid = 0.0;
    const int levels = 16;
    for (int a = 0; a < levels; ++a) {
        for (int b = 0; b < levels; ++b) {
            for (int c = 0; c < levels; ++c) {
                const std::vector<double> grid = {
                    2.0 * std::numbers::pi * a / levels,
                    2.0 * std::numbers::pi * b / levels,
                    2.0 * std::numbers::pi * c / levels};
                best_grid =
                    std::max(best_grid, channel::phase_objective(cfg, 0.0, grid));
            }
        }
    }
    CHECK(aligned >= best_grid * 0.99);
}

TEST_CASE("optimizer never loses to zero phases on random geometries") {
    core::RngStream stream(2024, "geom");
    for (int trial = 0; trial < 1000; ++trial) {
        auto cfg = desk_ris(4, stream.next_u64());
        cfg.bs_pos.y = stream.uniform(20.0, 120.0);
        cfg.rx_pos.x = stream.uniform(-3.0, 3.0);
        const auto phases = channel::optimize_phases(cfg, 0.0);
        const double optimized = channel::phase_objective(cfg, 0.0, phases);
        const double zero = channel::phase_objective(
            cfg, 0.0, std::vector<double>(4, 0.0));
        CHECK(optimized >= zero - 1e-12 * std::max(1.0, zero));
    }
}

TEST_CASE("mean |CIR| grows with the element count") {
    double prev = 0.0;
    for (int elements : {8, 32, 128}) {
        double mean = 0.0;
        const int draws = 200;
        core::RngStream stream(7, "fig3/" + std::to_string(elements));
        for (int d = 0; d < draws; ++d) {
            auto cfg = desk_ris(elements, stream.next_u64());
            cfg.element_phases = channel::optimize_phases(cfg, 0.0);
            mean += std::abs(channel::ris_cir(cfg, 0.0).total);
        }
        mean /= draws;
        CHECK(mean > prev);
        prev = mean;
    }
}

TEST_CASE("aging rho is 1 at zero Doppler and the channel freezes") {
    CHECK(channel::aging_rho(0.0) == 1.0);
    core::RngStream stream(1, "aging");
    std::vector<std::complex<double>> h0 = {{1.0, -0.5}, {0.25, 2.0}};
    const auto h = channel::aged_channel(h0, {0.0, 2}, 100, stream);
    CHECK(h[0] == h0[0]);
    CHECK(h[1] == h0[1]);
}

TEST_CASE("empirical lag-1 autocorrelation matches J0(2 pi fdts)") {
    const double fdts = 0.05;
    const double rho = channel::aging_rho(fdts);
    core::RngStream stream(13, "lag1");
    std::vector<std::complex<double>> h = {stream.cnormal()};
    double corr = 0.0;
    double power = 0.0;
    const int steps = 100000;
    for (int n = 0; n < steps; ++n) {
        const auto prev = h[0];
        channel::age_step(h, rho, stream);
        corr += (std::conj(prev) * h[0]).real();
        power += std::norm(prev);
    }
    CHECK(corr / power == doctest::Approx(rho).epsilon(0.01));
}

TEST_CASE("aging preserves per-entry variance") {
    // Variance across independent replicas after 10^4 steps (time averages
    // along one trajectory converge far too slowly at this correlation).
    const double rho = channel::aging_rho(0.02);
    core::RngStream stream(29, "variance");
    const int replicas = 5000;
    std::vector<std::complex<double>> h(replicas);
    for (auto& entry : h) entry = stream.cnormal();
    const int steps = 10000;
    for (int n = 0; n < steps; ++n) channel::age_step(h, rho, stream);
    double power = 0.0;
    for (const auto& entry : h) power += std::norm(entry);
    CHECK(power / replicas == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("aging marginal stays standard complex normal (KS sanity)") {
    // Kolmogorov-Smirnov on |h|^2 ~ Exp(1) after burn-in, 5% level
    // (critical value 1.36/sqrt(n); tolerance documented by the check).
    const double rho = channel::aging_rho(0.03);
    core::RngStream stream(31, "ks");
    std::vector<std::complex<double>> h = {stream.cnormal()};
    const int n = 100000;
    std::vector<double> samples;
    samples.reserve(n);
    for (int i = 0; i < n; ++i) {
        channel::age_step(h, rho, stream);
        samples.push_back(std::norm(h[0]));
    }
    std::sort(samples.begin(), samples.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 1.0 - std::exp(-samples[i]);
        ks = std::max(ks, std::fabs(cdf - (i + 1.0) / n));
        ks = std::max(ks, std::fabs(cdf - static_cast<double>(i) / n));
    }
    CHECK(ks < 1.36 / std::sqrt(static_cast<double>(n)) * 3.0);
}

TEST_CASE("SE curve is flat without aging and ordered with it") {
    core::RngStream s1(5, "flat");
    const auto flat = channel::average_se_curve(32, 0.05, {0.0, 4}, 30, 4,
                                                10.0, 50, s1);
    for (size_t n = 1; n < flat.size(); ++n)
        CHECK(flat[n] == doctest::Approx(flat[0]).epsilon(1e-12));

    core::RngStream s2(5, "slow");
    core::RngStream s3(5, "slow");
    const auto slow = channel::average_se_curve(32, 0.05, {0.01, 4}, 51, 4,
                                                10.0, 200, s2);
    const auto fast = channel::average_se_curve(32, 0.05, {0.05, 4}, 51, 4,
                                                10.0, 200, s3);
    CHECK(fast[50] < slow[50]);
}

TEST_CASE("more RIS elements lift the SE curve at every slot") {
    core::RngStream s1(9, "n32");
    core::RngStream s2(9, "n32");
    const auto low = channel::average_se_curve(32, 0.05, {0.02, 4}, 40, 4,
                                               10.0, 200, s1);
    const auto high = channel::average_se_curve(128, 0.05, {0.02, 4}, 40, 4,
                                                10.0, 200, s2);
    for (size_t n = 0; n < low.size(); ++n) CHECK(high[n] > low[n]);
}

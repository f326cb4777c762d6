#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "railsim/core/rng.hpp"
#include "railsim/otfs/otfs.hpp"

using namespace railsim;
using otfs::TdlChannel;
using otfs::TfGrid;

namespace {

using cd = std::complex<double>;

TfGrid desk_grid(int m = 16, int n = 16) {
    TfGrid grid;
    grid.subcarriers = m;
    grid.symbols = n;
    grid.subcarrier_spacing_hz = 15e3;
    return grid;
}

double grid_energy(const otfs::TfResponse& tf) {
    double e = 0.0;
    for (const auto& v : tf) e += std::norm(v);
    return e;
}

}  // namespace

TEST_CASE("flat tap gives an all-ones response") {
    TdlChannel ch;
    ch.taps.push_back({0.0, 0.0, {1.0, 0.0}});
    const auto grid = desk_grid();
    const auto tf = otfs::tdl_to_tf(ch, grid);
    for (const auto& v : tf) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::fabs(v.imag()) < 1e-12);
    }
}

TEST_CASE("pure-delay tap is constant in time with a linear phase in frequency") {
    const auto grid = desk_grid();
    TdlChannel ch;
    ch.taps.push_back({3.0 * grid.delay_resolution_s(), 0.0, {1.0, 0.0}});
    const auto tf = otfs::tdl_to_tf(ch, grid);
    const int m_sc = grid.subcarriers;
    const double slope = -2.0 * std::numbers::pi * 3.0 / m_sc;
    for (int n = 0; n < grid.symbols; ++n) {
        for (int m = 0; m < m_sc; ++m) {
            const cd expected{std::cos(slope * m), std::sin(slope * m)};
            CHECK(std::abs(tf[n * m_sc + m] - expected) < 1e-9);
        }
    }
}

TEST_CASE("two-tap response matches direct pointwise evaluation") {
    const auto grid = desk_grid(32, 16);
    TdlChannel ch;
    ch.taps.push_back({1.7e-6, 211.0, {0.8, 0.3}});
    ch.taps.push_back({5.4e-6, -150.0, {-0.2, 0.6}});
    const auto tf = otfs::tdl_to_tf(ch, grid);

    core::RngStream stream(3, "points");
    const double t_sym = grid.symbol_duration_s();
    for (int i = 0; i < 16; ++i) {
        const int n = static_cast<int>(stream.uniform_int(grid.symbols));
        const int m = static_cast<int>(stream.uniform_int(grid.subcarriers));
        cd expected{0.0, 0.0};
        for (const auto& tap : ch.taps) {
            const double phase =
                2.0 * std::numbers::pi *
                (tap.doppler_hz * n * t_sym -
                 tap.delay_s * m * grid.subcarrier_spacing_hz);
            expected += tap.gain * cd{std::cos(phase), std::sin(phase)};
        }
        CHECK(std::abs(tf[n * grid.subcarriers + m] - expected) < 1e-9);
    }
}

TEST_CASE("taps outside the delay guard are rejected") {
    const auto grid = desk_grid();
    TdlChannel ch;
    ch.taps.push_back(
        {grid.symbols * grid.symbol_duration_s(), 0.0, {1.0, 0.0}});
    CHECK_THROWS_AS(otfs::tdl_to_tf(ch, grid), std::invalid_argument);
}

TEST_CASE("all-ones response concentrates at the origin bin") {
    const auto grid = desk_grid();
    const otfs::TfResponse ones(grid.subcarriers * grid.symbols, cd{1.0, 0.0});
    const auto dd = otfs::sfft(ones, grid);
    const double total = dd.total_energy();
    CHECK(std::norm(dd.at(0, 0)) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("sfft satisfies Parseval and inverts") {
    const auto grid = desk_grid(32, 16);
    core::RngStream stream(11, "parseval");
    otfs::TfResponse tf(grid.subcarriers * grid.symbols);
    for (auto& v : tf) v = stream.cnormal();

    const auto dd = otfs::sfft(tf, grid);
    CHECK(dd.total_energy() ==
          doctest::Approx(grid_energy(tf)).epsilon(1e-9));

    const auto back = otfs::isfft(dd, grid);
    double err = 0.0;
    for (size_t i = 0; i < tf.size(); ++i) err += std::norm(back[i] - tf[i]);
    CHECK(err <= 1e-18 * grid_energy(tf));
}

TEST_CASE("on-grid tap maps to a single impulse bin") {
    const auto grid = desk_grid();
    const int delay_bin = 4;
    const int doppler_bin = 5;
    TdlChannel ch;
    ch.taps.push_back({delay_bin * grid.delay_resolution_s(),
                       doppler_bin * grid.doppler_resolution_hz(),
                       {1.0, 0.0}});
    const auto dd = otfs::sfft(otfs::tdl_to_tf(ch, grid), grid);
    const double total = dd.total_energy();
    const double peak = std::norm(dd.at(delay_bin, doppler_bin));
    // Closed-form: the double geometric series collapses, all energy in
    // one bin.
    CHECK(peak == doctest::Approx(total).epsilon(1e-9));
    CHECK(total - peak < 1e-9 * total);

    const auto metrics = otfs::leakage_metrics(dd, ch, grid);
    CHECK(metrics.effective_path_count == 1);
    CHECK(metrics.compactness == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(metrics.peak_offset[0] == doctest::Approx(0.0));
}

TEST_CASE("half-bin offset spreads energy across bins") {
    const auto grid = desk_grid();
    TdlChannel ch;
    ch.taps.push_back({3.5 * grid.delay_resolution_s(), 0.0, {1.0, 0.0}});
    const auto dd = otfs::sfft(otfs::tdl_to_tf(ch, grid), grid);
    const auto metrics = otfs::leakage_metrics(dd, ch, grid);
    CHECK(metrics.effective_path_count > 1);
    CHECK(metrics.compactness < 0.9);
}

TEST_CASE("compactness decays monotonically with the fractional offset") {
    const auto grid = desk_grid();
    double prev = 2.0;
    for (double frac : {0.0, 0.1, 0.2, 0.3, 0.4, 0.5}) {
        TdlChannel ch;
        ch.taps.push_back({(3.0 + frac) * grid.delay_resolution_s(), 0.0,
                           {1.0, 0.0}});
        const auto dd = otfs::sfft(otfs::tdl_to_tf(ch, grid), grid);
        const auto metrics = otfs::leakage_metrics(dd, ch, grid);
        CHECK(metrics.compactness <= prev + 1e-12);
        prev = metrics.compactness;
    }
}

TEST_CASE("time-varying taps are less compact than static ones") {
    const auto grid = desk_grid();
    TdlChannel ch;
    ch.taps.push_back({2.0 * grid.delay_resolution_s(),
                       1.0 * grid.doppler_resolution_hz(),
                       {1.0, 0.0}});
    const auto dd_static = otfs::sfft(otfs::tdl_to_tf(ch, grid), grid);
    const auto static_metrics = otfs::leakage_metrics(dd_static, ch, grid);

    TdlChannel varying = ch;
    varying.coherence_time_s = 0.25 * grid.symbols * grid.symbol_duration_s();
    core::RngStream stream(17, "tv");
    const auto dd_tv = otfs::sfft(otfs::tdl_to_tf(varying, grid, &stream), grid);
    const auto tv_metrics = otfs::leakage_metrics(dd_tv, varying, grid);

    CHECK(tv_metrics.compactness < static_metrics.compactness);
}

TEST_CASE("doubling M doubles the peak delay-bin index of a fixed tap") {
    const double tau = 4.0 / (16 * 15e3);  // bin 4 on the 16-wide grid
    for (int m_sc : {16, 32}) {
        auto grid = desk_grid(m_sc, 16);
        TdlChannel ch;
        ch.taps.push_back({tau, 0.0, {1.0, 0.0}});
        const auto dd = otfs::sfft(otfs::tdl_to_tf(ch, grid), grid);
        int best_l = 0, best_k = 0;
        double best = -1.0;
        for (int l = 0; l < dd.delay_bins; ++l) {
            for (int k = 0; k < dd.doppler_bins; ++k) {
                if (std::norm(dd.at(l, k)) > best) {
                    best = std::norm(dd.at(l, k));
                    best_l = l;
                    best_k = k;
                }
            }
        }
        CHECK(best_k == 0);
        CHECK(best_l == (m_sc == 16 ? 4 : 8));
    }
}

TEST_CASE("time variation requires a stream") {
    const auto grid = desk_grid();
    TdlChannel ch;
    ch.taps.push_back({0.0, 0.0, {1.0, 0.0}});
    ch.coherence_time_s = 0.1 * grid.symbols * grid.symbol_duration_s();
    CHECK_THROWS_AS(otfs::tdl_to_tf(ch, grid), std::invalid_argument);
}

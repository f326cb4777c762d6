#include "railsim/otfs/otfs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "railsim/channel/aging.hpp"

namespace railsim::otfs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
using cd = std::complex<double>;

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

cd expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

}  // namespace

namespace detail {

void fft_pow2(cd* data, int n, bool inverse) {
    // Bit-reversal permutation.
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const double angle = (inverse ? kTwoPi : -kTwoPi) / len;
        const cd wlen = expj(angle);
        for (int i = 0; i < n; i += len) {
            cd w{1.0, 0.0};
            for (int k = 0; k < len / 2; ++k) {
                const cd u = data[i + k];
                const cd v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

}  // namespace detail

void TfGrid::validate() const {
    if (!is_pow2(subcarriers) || subcarriers < 4)
        throw std::invalid_argument("subcarriers must be a power of two >= 4");
    if (!is_pow2(symbols) || symbols < 4)
        throw std::invalid_argument("symbols must be a power of two >= 4");
    if (!(subcarrier_spacing_hz > 0.0))
        throw std::invalid_argument("subcarrier spacing must be > 0");
}

TfResponse tdl_to_tf(const TdlChannel& channel, const TfGrid& grid,
                     core::RngStream* stream) {
    grid.validate();
    const int m_sc = grid.subcarriers;
    const int n_sym = grid.symbols;
    const double t_sym = grid.symbol_duration_s();
    const double df = grid.subcarrier_spacing_hz;
    const double guard = n_sym * t_sym;

    for (const auto& tap : channel.taps) {
        if (tap.delay_s < 0.0 || tap.delay_s >= guard)
            throw std::invalid_argument("tap delay outside [0, N*T) guard");
        if (!std::isfinite(tap.gain.real()) || !std::isfinite(tap.gain.imag()))
            throw std::invalid_argument("tap gain not finite");
    }

    const bool time_varying = channel.coherence_time_s < guard;
    if (time_varying && stream == nullptr)
        throw std::invalid_argument(
            "time-varying channel needs an RngStream for the aging draws");

    // Per-tap aging sequence a_i[n]; identically 1 for a static channel.
    std::vector<std::vector<cd>> tap_gain(channel.taps.size());
    for (size_t i = 0; i < channel.taps.size(); ++i) {
        tap_gain[i].assign(n_sym, cd{1.0, 0.0});
        if (time_varying) {
            const double fdts =
                0.5 / channel.coherence_time_s * t_sym;  // f_D = 1/(2*Tc)
            const double rho = channel::aging_rho(fdts);
            auto tap_stream = stream->substream("tap/" + std::to_string(i));
            std::vector<cd> a{cd{1.0, 0.0}};
            for (int n = 1; n < n_sym; ++n) {
                channel::age_step(a, rho, tap_stream);
                tap_gain[i][n] = a[0];
            }
        }
    }

    TfResponse h(static_cast<size_t>(n_sym) * m_sc, cd{});
    for (size_t i = 0; i < channel.taps.size(); ++i) {
        const Tap& tap = channel.taps[i];
        for (int n = 0; n < n_sym; ++n) {
            const cd time_part =
                tap.gain * tap_gain[i][n] *
                expj(kTwoPi * tap.doppler_hz * n * t_sym);
            for (int m = 0; m < m_sc; ++m) {
                h[static_cast<size_t>(n) * m_sc + m] +=
                    time_part * expj(-kTwoPi * tap.delay_s * m * df);
            }
        }
    }
    return h;
}

double DdSpreadingFunction::total_energy() const {
    double e = 0.0;
    for (const auto& v : grid) e += std::norm(v);
    return e;
}

DdSpreadingFunction sfft(const TfResponse& tf, const TfGrid& grid) {
    grid.validate();
    const int m_sc = grid.subcarriers;
    const int n_sym = grid.symbols;
    if (tf.size() != static_cast<size_t>(m_sc) * n_sym)
        throw std::invalid_argument("time-frequency response size mismatch");

    // Forward DFT along n (time -> Doppler).
    std::vector<cd> work(tf);
    std::vector<cd> column(n_sym);
    for (int m = 0; m < m_sc; ++m) {
        for (int n = 0; n < n_sym; ++n)
            column[n] = work[static_cast<size_t>(n) * m_sc + m];
        detail::fft_pow2(column.data(), n_sym, false);
        for (int n = 0; n < n_sym; ++n)
            work[static_cast<size_t>(n) * m_sc + m] = column[n];
    }

    // Inverse DFT along m (frequency -> delay), then unitary scaling.
    DdSpreadingFunction dd;
    dd.delay_bins = m_sc;
    dd.doppler_bins = n_sym;
    dd.delay_resolution_s = grid.delay_resolution_s();
    dd.doppler_resolution_hz = grid.doppler_resolution_hz();
    dd.grid.assign(static_cast<size_t>(m_sc) * n_sym, cd{});

    const double scale = 1.0 / std::sqrt(static_cast<double>(m_sc) * n_sym);
    std::vector<cd> row(m_sc);
    for (int k = 0; k < n_sym; ++k) {
        for (int m = 0; m < m_sc; ++m)
            row[m] = work[static_cast<size_t>(k) * m_sc + m];
        detail::fft_pow2(row.data(), m_sc, true);
        for (int l = 0; l < m_sc; ++l)
            dd.grid[static_cast<size_t>(l) * n_sym + k] = row[l] * scale;
    }
    return dd;
}

TfResponse isfft(const DdSpreadingFunction& dd, const TfGrid& grid) {
    grid.validate();
    const int m_sc = grid.subcarriers;
    const int n_sym = grid.symbols;
    if (dd.delay_bins != m_sc || dd.doppler_bins != n_sym)
        throw std::invalid_argument("spreading function size mismatch");

    // Forward DFT along delay (delay -> frequency).
    std::vector<cd> work(static_cast<size_t>(n_sym) * m_sc);
    std::vector<cd> row(m_sc);
    for (int k = 0; k < n_sym; ++k) {
        for (int l = 0; l < m_sc; ++l)
            row[l] = dd.grid[static_cast<size_t>(l) * n_sym + k];
        detail::fft_pow2(row.data(), m_sc, false);
        for (int m = 0; m < m_sc; ++m)
            work[static_cast<size_t>(k) * m_sc + m] = row[m];
    }

    // Inverse DFT along Doppler (Doppler -> time), unitary scaling.
    TfResponse tf(static_cast<size_t>(n_sym) * m_sc);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m_sc) * n_sym);
    std::vector<cd> column(n_sym);
    for (int m = 0; m < m_sc; ++m) {
        for (int k = 0; k < n_sym; ++k)
            column[k] = work[static_cast<size_t>(k) * m_sc + m];
        detail::fft_pow2(column.data(), n_sym, true);
        for (int n = 0; n < n_sym; ++n)
            tf[static_cast<size_t>(n) * m_sc + m] = column[n] * scale;
    }
    return tf;
}

LeakageMetrics leakage_metrics(const DdSpreadingFunction& dd,
                               const TdlChannel& truth, const TfGrid& grid) {
    grid.validate();
    if (dd.delay_bins != grid.subcarriers || dd.doppler_bins != grid.symbols)
        throw std::invalid_argument("spreading function was built on another grid");

    const double total = dd.total_energy();
    LeakageMetrics metrics;
    if (total <= 0.0) return metrics;

    std::vector<double> energy(dd.grid.size());
    for (size_t i = 0; i < dd.grid.size(); ++i) energy[i] = std::norm(dd.grid[i]);

    for (double e : energy) {
        if (e >= 0.01 * total) ++metrics.effective_path_count;
    }

    const size_t k_taps = truth.taps.size();
    std::vector<double> sorted(energy);
    std::partial_sort(sorted.begin(),
                      sorted.begin() + std::min(k_taps, sorted.size()),
                      sorted.end(), std::greater<double>());
    double strongest = 0.0;
    for (size_t i = 0; i < std::min(k_taps, sorted.size()); ++i)
        strongest += sorted[i];
    metrics.compactness = strongest / total;

    // Dominant bins: the K strongest.
    std::vector<size_t> order(energy.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(),
                      order.begin() + std::min(k_taps, order.size()),
                      order.end(),
                      [&](size_t a, size_t b) { return energy[a] > energy[b]; });

    auto torus_dist = [](double a, double b, int size) {
        double d = std::fabs(a - b);
        d = std::fmod(d, size);
        return std::min(d, size - d);
    };

    for (const auto& tap : truth.taps) {
        const double delay_pos = tap.delay_s / dd.delay_resolution_s;
        const double doppler_pos = tap.doppler_hz / dd.doppler_resolution_hz;
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < std::min(k_taps, order.size()); ++i) {
            const int l = static_cast<int>(order[i]) / dd.doppler_bins;
            const int k = static_cast<int>(order[i]) % dd.doppler_bins;
            const double dl = torus_dist(delay_pos, l, dd.delay_bins);
            const double dk = torus_dist(doppler_pos, k, dd.doppler_bins);
            best = std::min(best, std::hypot(dl, dk));
        }
        metrics.peak_offset.push_back(best);
    }
    return metrics;
}

}  // namespace railsim::otfs

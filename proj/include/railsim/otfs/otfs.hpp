#ifndef RAILSIM_OTFS_OTFS_HPP
#define RAILSIM_OTFS_OTFS_HPP

#include <complex>
#include <limits>
#include <vector>

#include "railsim/core/rng.hpp"

namespace railsim::otfs {

/// Critically sampled time-frequency grid: T * delta_f = 1.
struct TfGrid {
    int subcarriers = 16;                  // M, power of two >= 4
    int symbols = 16;                      // N, power of two >= 4
    double subcarrier_spacing_hz = 15e3;   // delta_f

    double symbol_duration_s() const { return 1.0 / subcarrier_spacing_hz; }
    double delay_resolution_s() const {
        return 1.0 / (subcarriers * subcarrier_spacing_hz);
    }
    double doppler_resolution_hz() const {
        return subcarrier_spacing_hz / symbols;
    }
    void validate() const;  // throws std::invalid_argument
};

struct Tap {
    double delay_s = 0.0;
    double doppler_hz = 0.0;
    std::complex<double> gain{1.0, 0.0};
};

struct TdlChannel {
    std::vector<Tap> taps;
    // Channel coherence time; taps become time-varying when it is shorter
    // than the frame duration N*T.
    double coherence_time_s = std::numeric_limits<double>::infinity();
};

/// Row-major N x M time-frequency response, entry [n*M + m].
using TfResponse = std::vector<std::complex<double>>;

/// H[n,m] = sum_i g_i * exp(j*2*pi*(nu_i*n*T - tau_i*m*delta_f)).
/// When coherence_time < N*T each tap is additionally multiplied by a
/// Gauss-Markov aging sequence (f_D = 1/(2*coherence_time)); `stream`
/// must then be non-null. Throws std::invalid_argument on taps outside
/// the [0, N*T) delay guard.
TfResponse tdl_to_tf(const TdlChannel& channel, const TfGrid& grid,
                     core::RngStream* stream = nullptr);

/// Discrete channel spreading function on the delay-Doppler grid.
struct DdSpreadingFunction {
    int delay_bins = 0;    // M
    int doppler_bins = 0;  // N
    double delay_resolution_s = 0.0;
    double doppler_resolution_hz = 0.0;
    std::vector<std::complex<double>> grid;  // [delay*doppler_bins + doppler]

    const std::complex<double>& at(int delay, int doppler) const {
        return grid[delay * doppler_bins + doppler];
    }
    double total_energy() const;
};

/// Symplectic finite Fourier transform, unitary (1/sqrt(MN)): forward DFT
/// along the time index, inverse DFT along the frequency index.
DdSpreadingFunction sfft(const TfResponse& tf, const TfGrid& grid);

/// Inverse of sfft; reconstructs the time-frequency response.
TfResponse isfft(const DdSpreadingFunction& dd, const TfGrid& grid);

struct LeakageMetrics {
    int effective_path_count = 0;  // bins holding >= 1% of total energy
    double compactness = 0.0;      // energy fraction in the K strongest bins
    std::vector<double> peak_offset;  // per true tap, torus bin distance
};

/// Sparsity/compactness diagnostics of a spreading function against the
/// tap set that generated it.
LeakageMetrics leakage_metrics(const DdSpreadingFunction& dd,
                               const TdlChannel& truth, const TfGrid& grid);

namespace detail {
/// In-place unscaled radix-2 FFT; n must be a power of two.
void fft_pow2(std::complex<double>* data, int n, bool inverse);
}  // namespace detail

}  // namespace railsim::otfs

#endif

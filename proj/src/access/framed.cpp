#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "railsim/access/access.hpp"

namespace railsim::access {

namespace {

using cd = std::complex<double>;

constexpr double kInvSqrt2 = 0.7071067811865475244;

cd qpsk_map(std::uint8_t b0, std::uint8_t b1) {
    // Gray mapping: bit 0 -> +, 1 -> -.
    return {b0 ? -kInvSqrt2 : kInvSqrt2, b1 ? -kInvSqrt2 : kInvSqrt2};
}

void qpsk_demap(cd symbol, std::uint8_t& b0, std::uint8_t& b1) {
    b0 = symbol.real() < 0.0 ? 1 : 0;
    b1 = symbol.imag() < 0.0 ? 1 : 0;
}

MatrixXcd columns(const MatrixXcd& m, const std::vector<int>& idx) {
    MatrixXcd out(m.rows(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out.col(i) = m.col(idx[i]);
    return out;
}

VectorXcd ls_on_support(const MatrixXcd& s, const VectorXcd& y,
                        const std::vector<int>& support) {
    VectorXcd full = VectorXcd::Zero(s.cols());
    if (support.empty()) return full;
    const MatrixXcd sub = columns(s, support);
    const VectorXcd coef = sub.colPivHouseholderQr().solve(y);
    for (size_t i = 0; i < support.size(); ++i) full(support[i]) = coef(i);
    return full;
}

std::vector<int> top_indices(const VectorXcd& v, int k,
                             const std::set<int>* exclude = nullptr) {
    std::vector<int> idx;
    for (int i = 0; i < v.size(); ++i) {
        if (exclude && exclude->count(i)) continue;
        idx.push_back(i);
    }
    const int take = std::min<int>(k, static_cast<int>(idx.size()));
    std::partial_sort(idx.begin(), idx.begin() + take, idx.end(),
                      [&](int a, int b) {
                          const double na = std::norm(v(a));
                          const double nb = std::norm(v(b));
                          if (na != nb) return na > nb;
                          return a < b;
                      });
    idx.resize(take);
    return idx;
}

/// OMP-style sparsity probe on one column: atoms are added until the
/// residual falls to the noise floor; the count is the estimate.
int column_sparsity(const MatrixXcd& s, const VectorXcd& y, double noise_var) {
    const int l = static_cast<int>(s.rows());
    const double floor_sq =
        std::max(1.5 * noise_var * l, 1e-12 * y.squaredNorm());
    if (y.squaredNorm() <= floor_sq) return 0;

    std::vector<int> support;
    std::set<int> chosen;
    VectorXcd residual = y;
    for (int it = 0; it < l; ++it) {
        const auto best = top_indices(s.adjoint() * residual, 1, &chosen);
        if (best.empty()) break;
        support.push_back(best[0]);
        chosen.insert(best[0]);
        const VectorXcd gains = ls_on_support(s, y, support);
        residual = y - s * gains;
        if (residual.squaredNorm() <= floor_sq) break;
    }
    return static_cast<int>(support.size());
}

/// Simultaneous OMP across columns: scores aggregate residual energy over
/// every column, the per-column residual is refit on the growing support.
std::vector<int> joint_detect(const FramedSignal& frame, int khat) {
    const MatrixXcd& s = frame.spreading;
    const int n = static_cast<int>(s.cols());
    const int j_cols = static_cast<int>(frame.received.cols());
    khat = std::min<int>(khat, static_cast<int>(s.rows()));

    std::vector<int> support;
    std::set<int> chosen;
    MatrixXcd residual = frame.received;
    for (int it = 0; it < khat; ++it) {
        Eigen::VectorXd energy = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < j_cols; ++j) {
            const VectorXcd proxy = s.adjoint() * residual.col(j);
            energy += proxy.cwiseAbs2();
        }
        int best = -1;
        double best_energy = -1.0;
        for (int k = 0; k < n; ++k) {
            if (chosen.count(k)) continue;
            if (energy(k) > best_energy) {
                best_energy = energy(k);
                best = k;
            }
        }
        if (best < 0) break;
        support.push_back(best);
        chosen.insert(best);
        for (int j = 0; j < j_cols; ++j) {
            const VectorXcd gains = ls_on_support(s, frame.received.col(j),
                                                  support);
            residual.col(j) = frame.received.col(j) - s * gains;
        }
    }
    std::sort(support.begin(), support.end());
    return support;
}

struct DecodeOutcome {
    VectorXcd gains;  // full-length channel estimate
    std::vector<std::vector<std::uint8_t>> bits;  // per user
    std::vector<int> est_lengths;                 // L_k estimate per user
};

/// Channel estimate from the pilot column, then per-column LS symbol
/// estimates on the support; a user's frame ends at the last column whose
/// normalized magnitude clears 0.5.
DecodeOutcome decode_on_support(const FramedSignal& frame,
                                const std::vector<int>& support,
                                const MatrixXcd* cleaned = nullptr) {
    const MatrixXcd& y = cleaned ? *cleaned : frame.received;
    const MatrixXcd& s = frame.spreading;
    const int n = static_cast<int>(s.cols());
    const int j_cols = static_cast<int>(y.cols());

    DecodeOutcome out;
    out.gains = ls_on_support(s, y.col(0), support);
    out.bits.assign(n, {});
    out.est_lengths.assign(n, 0);
    if (support.empty()) return out;

    MatrixXcd symbol_est = MatrixXcd::Zero(n, j_cols);
    for (int j = 1; j < j_cols; ++j) {
        const VectorXcd est = ls_on_support(s, y.col(j), support);
        symbol_est.col(j) = est;
    }

    for (int k : support) {
        const double href = std::abs(out.gains(k));
        if (href <= 0.0) continue;
        int last_active = 0;
        for (int j = 1; j < j_cols; ++j) {
            if (std::abs(symbol_est(k, j)) / href > 0.5) last_active = j;
        }
        out.est_lengths[k] = last_active + 1;
        std::vector<std::uint8_t> bits;
        for (int j = 1; j <= last_active; ++j) {
            const cd sym = symbol_est(k, j) / out.gains(k);
            std::uint8_t b0, b1;
            qpsk_demap(sym, b0, b1);
            bits.push_back(b0);
            bits.push_back(b1);
        }
        out.bits[k] = std::move(bits);
    }
    return out;
}

bool crc_ok(const std::vector<std::uint8_t>& bits, int check_bits) {
    if (static_cast<int>(bits.size()) <= check_bits) return false;
    std::vector<std::uint8_t> payload(bits.begin(), bits.end() - check_bits);
    const std::uint8_t expect = crc8(payload);
    std::uint8_t got = 0;
    for (int b = 0; b < check_bits; ++b) {
        got = static_cast<std::uint8_t>((got << 1) |
                                        bits[bits.size() - check_bits + b]);
    }
    return got == expect;
}

}  // namespace

std::uint8_t crc8(const std::vector<std::uint8_t>& bits) {
    std::uint8_t crc = 0;
    for (std::uint8_t bit : bits) {
        const std::uint8_t top = static_cast<std::uint8_t>((crc >> 7) & 1u);
        crc = static_cast<std::uint8_t>(crc << 1);
        if (top ^ (bit & 1u)) crc ^= 0x07;
    }
    return crc;
}

void FrameConfig::validate() const {
    access.validate();
    if (columns < 2) throw std::invalid_argument("frame needs >= 2 columns");
    if (check_bits != 8) throw std::invalid_argument("CRC length must be 8");
    for (int len : length_choices) {
        if (len < 2 || len > columns)
            throw std::invalid_argument("length choice outside [2, columns]");
        if (2 * (len - 1) <= check_bits)
            throw std::invalid_argument("length choice too short for the CRC");
    }
    if (length_choices.empty())
        throw std::invalid_argument("length_choices must be non-empty");
}

FramedSignal gen_framed(const FrameConfig& config, core::RngStream& stream) {
    config.validate();
    const AccessConfig& acc = config.access;
    const int n = acc.total_users();
    const int l = acc.pilot_len;
    const int j_cols = config.columns;

    FramedSignal frame;
    frame.check_bits = config.check_bits;
    frame.lengths.assign(n, 0);
    frame.payload_bits.assign(n, {});
    frame.gains = VectorXcd::Zero(n);

    const bool train = stream.bernoulli(acc.train_present_prob);
    for (int k = 0; k < n; ++k) {
        const bool onboard = k >= acc.rail_users;
        const bool can_be_active = !onboard || train;
        if (can_be_active && stream.bernoulli(acc.activity_prob)) {
            frame.truth_support.push_back(k);
            frame.gains(k) = stream.cnormal();
            frame.lengths[k] = config.length_choices[stream.uniform_int(
                config.length_choices.size())];
        }
    }

    frame.spreading.resize(l, n);
    const double col_scale = 1.0 / std::sqrt(static_cast<double>(l));
    for (int k = 0; k < n; ++k) {
        for (int i = 0; i < l; ++i)
            frame.spreading(i, k) = col_scale * stream.cnormal();
    }

    frame.symbols = MatrixXcd::Zero(n, j_cols);
    for (int k : frame.truth_support) {
        const int data_syms = frame.lengths[k] - 1;
        const int total_bits = 2 * data_syms;
        std::vector<std::uint8_t> info;
        for (int b = 0; b < total_bits - config.check_bits; ++b)
            info.push_back(stream.bernoulli(0.5) ? 1 : 0);
        const std::uint8_t crc = crc8(info);
        std::vector<std::uint8_t> bits = info;
        for (int b = config.check_bits - 1; b >= 0; --b)
            bits.push_back(static_cast<std::uint8_t>((crc >> b) & 1u));

        frame.symbols(k, 0) = frame.gains(k);  // pilot symbol v = 1
        for (int sym = 0; sym < data_syms; ++sym) {
            frame.symbols(k, sym + 1) =
                frame.gains(k) * qpsk_map(bits[2 * sym], bits[2 * sym + 1]);
        }
        frame.payload_bits[k] = std::move(bits);
    }

    frame.noise_var = std::max(acc.expected_active(), 1.0) / l *
                      std::pow(10.0, -acc.snr_db / 10.0);
    const double noise_amp = std::sqrt(frame.noise_var);
    MatrixXcd noise(l, j_cols);
    for (int j = 0; j < j_cols; ++j) {
        for (int i = 0; i < l; ++i) noise(i, j) = noise_amp * stream.cnormal();
    }
    frame.received = frame.spreading * frame.symbols + noise;
    return frame;
}

std::vector<int> backward_sparsity_estimate(const FramedSignal& frame) {
    const int j_cols = static_cast<int>(frame.received.cols());
    std::vector<int> estimate(j_cols, 0);
    int floor_count = 0;
    for (int j = j_cols - 1; j >= 0; --j) {
        const int own = column_sparsity(frame.spreading, frame.received.col(j),
                                        frame.noise_var);
        floor_count = std::max(own, floor_count);
        estimate[j] = floor_count;
    }
    return estimate;
}

double data_recovery_ratio(
    const FramedSignal& frame,
    const std::vector<std::vector<std::uint8_t>>& decoded) {
    const int k_active = static_cast<int>(frame.truth_support.size());
    if (k_active == 0) return 1.0;
    int correct = 0;
    for (int k : frame.truth_support) {
        if (static_cast<size_t>(k) < decoded.size() &&
            decoded[k] == frame.payload_bits[k])
            ++correct;
    }
    return static_cast<double>(correct) / k_active;
}

FrameRecovery solve_samp_frame(const FramedSignal& frame, int step) {
    // Pilot-column SAMP detection, single-pass decode.
    SparseProblem pilot_view;
    pilot_view.pilot = frame.spreading;
    pilot_view.received = frame.received.col(0);
    pilot_view.truth_gains = frame.gains;
    pilot_view.noise_var = frame.noise_var;
    SampOptions opts;
    opts.step = step;
    opts.residual_tol =
        std::sqrt(std::max(1.5 * frame.noise_var * frame.spreading.rows(),
                           1e-12)) /
        std::max(frame.received.col(0).norm(), 1e-30);
    const RecoveryResult detected = solve_samp(pilot_view, opts);

    const DecodeOutcome outcome = decode_on_support(frame, detected.est_support);
    FrameRecovery rec;
    rec.est_support = detected.est_support;
    rec.est_gains = outcome.gains;
    rec.decoded_bits = outcome.bits;
    rec.mu_data = data_recovery_ratio(frame, rec.decoded_bits);
    return rec;
}

FrameRecovery solve_bsamp_cp(const FramedSignal& frame,
                             const BsampOptions& options) {
    if (!options.checks_enabled) {
        return solve_samp_frame(frame, options.step);
    }

    const std::vector<int> kappa = backward_sparsity_estimate(frame);
    const int khat = kappa.empty() ? 0 : kappa[0];

    std::vector<int> support = joint_detect(frame, khat);
    DecodeOutcome outcome = decode_on_support(frame, support);

    std::set<int> verified;
    MatrixXcd cleaned = frame.received;
    for (int round = 0; round < options.max_rounds; ++round) {
        // Checking: CRC over each decoded user's bits.
        std::vector<int> fresh;
        for (int k : support) {
            if (verified.count(k)) continue;
            if (crc_ok(outcome.bits[k], frame.check_bits)) fresh.push_back(k);
        }
        if (fresh.empty()) break;
        for (int k : fresh) verified.insert(k);

        // Projecting: verified users' symbols become known exactly (pilot 1
        // followed by the QPSK points of the checked bits), which turns the
        // channel re-estimate into a scalar least squares across all of the
        // user's columns.
        cleaned = frame.received;
        for (int k : verified) {
            const int len = outcome.est_lengths[k];
            std::vector<cd> known(len, cd{0.0, 0.0});
            known[0] = {1.0, 0.0};
            for (int j = 1; j < len; ++j) {
                if (outcome.bits[k].size() < static_cast<size_t>(2 * j)) break;
                known[j] = qpsk_map(outcome.bits[k][2 * (j - 1)],
                                    outcome.bits[k][2 * (j - 1) + 1]);
            }
            const VectorXcd sk = frame.spreading.col(k);
            cd num{0.0, 0.0};
            double den = 0.0;
            for (int j = 0; j < len; ++j) {
                if (known[j] == cd{0.0, 0.0}) continue;
                num += std::conj(known[j]) * sk.dot(frame.received.col(j));
                den += std::norm(known[j]) * sk.squaredNorm();
            }
            if (den > 0.0) outcome.gains(k) = num / den;
            for (int j = 0; j < len; ++j) {
                cleaned.col(j) -= outcome.gains(k) * known[j] * sk;
            }
        }

        // Re-detect and re-decode the not-yet-verified users on the
        // cleaned observations.
        std::vector<int> rest;
        for (int k : support) {
            if (!verified.count(k)) rest.push_back(k);
        }
        DecodeOutcome redo = decode_on_support(frame, rest, &cleaned);
        for (int k : rest) {
            outcome.bits[k] = redo.bits[k];
            outcome.est_lengths[k] = redo.est_lengths[k];
            outcome.gains(k) = redo.gains(k);
        }
    }

    FrameRecovery rec;
    rec.est_support = support;
    rec.est_gains = outcome.gains;
    rec.decoded_bits = outcome.bits;
    rec.verified_users.assign(verified.begin(), verified.end());
    rec.mu_data = data_recovery_ratio(frame, rec.decoded_bits);
    return rec;
}

}  // namespace railsim::access

#ifndef RAILSIM_ACCESS_ACCESS_HPP
#define RAILSIM_ACCESS_ACCESS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "railsim/core/rng.hpp"

namespace railsim::access {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Grant-free access population: rail-side users are always present,
/// onboard users join only while a train passes, which makes the active
/// count bimodal.
struct AccessConfig {
    int rail_users = 40;            // N_r
    int onboard_users = 24;         // N_o
    int pilot_len = 32;             // l_p, < N
    double activity_prob = 0.1;     // p
    double train_present_prob = 0.5;
    double snr_db = 20.0;

    int total_users() const { return rail_users + onboard_users; }
    double expected_active() const {
        return activity_prob * (rail_users + train_present_prob * onboard_users);
    }
    void validate() const;  // throws std::invalid_argument
};

struct SparseProblem {
    MatrixXcd pilot;        // l_p x N, i.i.d. CN(0, 1/l_p)
    VectorXcd received;     // y = P h + n
    VectorXcd truth_gains;  // h, zero off support
    VectorXcd noise;
    std::vector<int> truth_support;
    bool train_present = false;
    double noise_var = 0.0;  // per-measurement
};

SparseProblem gen_problem(const AccessConfig& config, core::RngStream& stream);

/// ||truth - estimate||^2 / ||truth||^2. Returns 0 for a zero truth with a
/// zero estimate, +inf for a zero truth with a nonzero estimate.
double nmse(const VectorXcd& truth, const VectorXcd& estimate);

struct RecoveryResult {
    std::vector<int> est_support;  // sorted
    VectorXcd est_gains;           // exactly zero off est_support
    double nmse = 0.0;
    bool diverged = false;
    int iterations = 0;
    std::vector<double> noise_track;  // AMP per-iteration noise estimates
};

RecoveryResult solve_omp(const SparseProblem& problem, int sparsity);
RecoveryResult solve_sp(const SparseProblem& problem, int sparsity);
RecoveryResult solve_cosamp(const SparseProblem& problem, int sparsity);

struct IstaOptions {
    double lambda = -1.0;  // < 0: 0.01 * ||P^H y||_inf
    double step = -1.0;    // < 0: 0.9 / ||P||^2; rejected when > 1/||P||^2
    int iters = 500;
};
RecoveryResult solve_ista(const SparseProblem& problem,
                          const IstaOptions& options = {});

/// 0.5*||y - P h||^2 + lambda*||h||_1, the ISTA objective.
double lasso_objective(const SparseProblem& problem, const VectorXcd& h,
                       double lambda);

struct AmpOptions {
    int iters = 50;
    double damping = 0.1;
    double threshold_factor = 1.5;  // theta_t = factor * sigma_hat_t
};
RecoveryResult solve_amp(const SparseProblem& problem,
                         const AmpOptions& options = {});

struct SampOptions {
    int step = 1;               // stage size increment s >= 1
    double residual_tol = 1e-6; // relative halt threshold
    int max_stages = 64;
};
RecoveryResult solve_samp(const SparseProblem& problem,
                          const SampOptions& options = {});

// ---- data-length-diversity frames ------------------------------------

struct FrameConfig {
    AccessConfig access;
    int columns = 13;  // J: one pilot column + J-1 data columns
    std::vector<int> length_choices = {5, 9, 13};  // L_k incl. pilot column
    int check_bits = 8;  // CRC-8 appended to each user's payload
    void validate() const;
};

/// Y = S X + N with X = H V; user k occupies columns 0..L_k-1 (pilot in
/// column 0), so the column sparsity is non-increasing in the column index.
struct FramedSignal {
    MatrixXcd spreading;  // l x N
    MatrixXcd symbols;    // X: N x J
    MatrixXcd received;   // Y: l x J
    VectorXcd gains;      // h_k, zero for inactive users
    std::vector<int> lengths;     // L_k per user (0 = inactive)
    std::vector<std::vector<std::uint8_t>> payload_bits;  // per user, incl CRC
    std::vector<int> truth_support;
    int check_bits = 8;
    double noise_var = 0.0;
};

FramedSignal gen_framed(const FrameConfig& config, core::RngStream& stream);

/// Per-column sparsity estimates, computed back to front and propagated
/// forward as lower bounds. Non-increasing in the column index; never
/// below the true monotone envelope on noiseless instances.
std::vector<int> backward_sparsity_estimate(const FramedSignal& frame);

struct FrameRecovery {
    std::vector<int> est_support;
    VectorXcd est_gains;
    std::vector<std::vector<std::uint8_t>> decoded_bits;  // per user
    std::vector<int> verified_users;  // CRC-passed
    double mu_data = 0.0;             // card(V)/K against the ground truth
};

struct BsampOptions {
    bool checks_enabled = true;  // CRC check + constellation projection loop
    int step = 1;
    int max_rounds = 3;
};

/// Backward-sparsity joint detection, per-column decode, CRC check,
/// constellation projection, channel re-estimation loop. With checks
/// disabled this reduces to the plain SAMP pipeline.
FrameRecovery solve_bsamp_cp(const FramedSignal& frame,
                             const BsampOptions& options = {});

/// Comparator: SAMP support detection on the pilot column, then the same
/// per-column decode without checking or projecting.
FrameRecovery solve_samp_frame(const FramedSignal& frame, int step = 1);

/// card(V)/K with V recomputed by bit-exact comparison against the truth.
/// Returns 1 when no user is active.
double data_recovery_ratio(const FramedSignal& frame,
                           const std::vector<std::vector<std::uint8_t>>& decoded);

/// CRC-8 (poly 0x07) over a bit vector.
std::uint8_t crc8(const std::vector<std::uint8_t>& bits);

}  // namespace railsim::access

#endif

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "railsim/access/access.hpp"

namespace railsim::access {

namespace {

using cd = std::complex<double>;

cd soft_threshold(cd v, double theta) {
    const double mag = std::abs(v);
    if (mag <= theta) return {0.0, 0.0};
    return v * ((mag - theta) / mag);
}

/// Largest squared singular value of P via power iteration on P^H P.
double operator_norm_sq(const MatrixXcd& p) {
    VectorXcd v = VectorXcd::Ones(p.cols());
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        VectorXcd w = p.adjoint() * (p * v);
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

RecoveryResult pack_result(const SparseProblem& problem, const VectorXcd& gains,
                           int iterations, bool diverged,
                           std::vector<double> noise_track = {}) {
    RecoveryResult result;
    result.est_gains = gains;
    for (int i = 0; i < gains.size(); ++i) {
        if (gains(i) != cd{0.0, 0.0}) result.est_support.push_back(i);
    }
    result.iterations = iterations;
    result.diverged = diverged;
    result.noise_track = std::move(noise_track);
    result.nmse = nmse(problem.truth_gains, gains);
    return result;
}

}  // namespace

double lasso_objective(const SparseProblem& problem, const VectorXcd& h,
                       double lambda) {
    const double fit =
        0.5 * (problem.received - problem.pilot * h).squaredNorm();
    return fit + lambda * h.lpNorm<1>();
}

RecoveryResult solve_ista(const SparseProblem& problem,
                          const IstaOptions& options) {
    const MatrixXcd& p = problem.pilot;
    const double lip = operator_norm_sq(p);
    if (lip == 0.0) throw std::invalid_argument("zero pilot matrix");

    double lambda = options.lambda;
    if (lambda < 0.0)
        lambda = 0.01 * (p.adjoint() * problem.received)
                            .cwiseAbs()
                            .maxCoeff();
    if (!(lambda > 0.0)) lambda = 1e-12;

    double step = options.step;
    if (step < 0.0) {
        step = 0.9 / lip;
    } else if (step > 1.0 / lip) {
        throw std::invalid_argument("ISTA step exceeds 1/||P||^2");
    }

    VectorXcd h = VectorXcd::Zero(p.cols());
    for (int it = 0; it < options.iters; ++it) {
        const VectorXcd gradient_step =
            h + step * (p.adjoint() * (problem.received - p * h));
        for (int i = 0; i < h.size(); ++i)
            h(i) = soft_threshold(gradient_step(i), step * lambda);
    }
    return pack_result(problem, h, options.iters, false);
}

RecoveryResult solve_amp(const SparseProblem& problem,
                         const AmpOptions& options) {
    const MatrixXcd& p = problem.pilot;
    const int l = static_cast<int>(p.rows());
    const int n = static_cast<int>(p.cols());
    const double delta_inv = static_cast<double>(n) / l;

    VectorXcd h = VectorXcd::Zero(n);
    VectorXcd z = problem.received;
    std::vector<double> noise_track;

    VectorXcd best_h = h;
    double best_res = z.norm();
    int grow_streak = 0;
    double prev_res = best_res;
    bool diverged = false;

    int it = 0;
    for (; it < options.iters; ++it) {
        const VectorXcd pseudo = h + p.adjoint() * z;
        const double sigma_hat = z.norm() / std::sqrt(static_cast<double>(l));
        noise_track.push_back(sigma_hat);
        const double theta = options.threshold_factor * sigma_hat;

        VectorXcd h_new(n);
        double deriv_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            h_new(i) = soft_threshold(pseudo(i), theta);
            const double mag = std::abs(pseudo(i));
            if (mag > theta) deriv_sum += 1.0 - 0.5 * theta / mag;
        }
        if (options.damping > 0.0)
            h_new = (1.0 - options.damping) * h_new + options.damping * h;

        const double onsager = delta_inv * deriv_sum / n;
        VectorXcd z_new = problem.received - p * h_new + onsager * z;
        if (options.damping > 0.0)
            z_new = (1.0 - options.damping) * z_new + options.damping * z;

        if (!z_new.allFinite() || !h_new.allFinite()) {
            diverged = true;
            break;
        }
        h = h_new;
        z = z_new;

        const double res = (problem.received - p * h).norm();
        if (res < best_res) {
            best_res = res;
            best_h = h;
        }
        grow_streak = res > prev_res ? grow_streak + 1 : 0;
        prev_res = res;
        if (grow_streak >= 5) {
            diverged = true;
            break;
        }
    }
    return pack_result(problem, best_h, it, diverged, std::move(noise_track));
}

}  // namespace railsim::access

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "railsim/access/access.hpp"

namespace railsim::access {

namespace {

MatrixXcd columns(const MatrixXcd& m, const std::vector<int>& idx) {
    MatrixXcd out(m.rows(), idx.size());
    for (size_t i = 0; i < idx.size(); ++i) out.col(i) = m.col(idx[i]);
    return out;
}

/// Least squares on a support; returns the full-length coefficient vector
/// (zero off the support).
VectorXcd ls_on_support(const MatrixXcd& pilot, const VectorXcd& y,
                        const std::vector<int>& support) {
    VectorXcd full = VectorXcd::Zero(pilot.cols());
    if (support.empty()) return full;
    const MatrixXcd sub = columns(pilot, support);
    const VectorXcd coef = sub.colPivHouseholderQr().solve(y);
    for (size_t i = 0; i < support.size(); ++i) full(support[i]) = coef(i);
    return full;
}

std::vector<int> top_indices(const VectorXcd& v, int k,
                             const std::set<int>* exclude = nullptr) {
    std::vector<int> idx;
    idx.reserve(v.size());
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

RecoveryResult finish(const SparseProblem& problem, std::vector<int> support,
                      const VectorXcd& gains, int iterations) {
    RecoveryResult result;
    std::sort(support.begin(), support.end());
    result.est_support = std::move(support);
    result.est_gains = gains;
    result.iterations = iterations;
    result.nmse = nmse(problem.truth_gains, gains);
    return result;
}

void check_sparsity(const SparseProblem& problem, int sparsity) {
    if (sparsity < 1 || sparsity > problem.pilot.rows())
        throw std::invalid_argument("sparsity must satisfy 1 <= K <= l_p");
}

}  // namespace

RecoveryResult solve_omp(const SparseProblem& problem, int sparsity) {
    check_sparsity(problem, sparsity);
    const MatrixXcd& p = problem.pilot;
    VectorXcd residual = problem.received;
    std::vector<int> support;
    std::set<int> chosen;
    VectorXcd gains = VectorXcd::Zero(p.cols());

    for (int it = 0; it < sparsity; ++it) {
        const VectorXcd proxy = p.adjoint() * residual;
        const auto best = top_indices(proxy, 1, &chosen);
        if (best.empty()) break;
        support.push_back(best[0]);
        chosen.insert(best[0]);
        gains = ls_on_support(p, problem.received, support);
        residual = problem.received - p * gains;
    }
    return finish(problem, support, gains, sparsity);
}

RecoveryResult solve_sp(const SparseProblem& problem, int sparsity) {
    check_sparsity(problem, sparsity);
    const MatrixXcd& p = problem.pilot;

    std::vector<int> support = top_indices(p.adjoint() * problem.received,
                                           sparsity);
    VectorXcd gains = ls_on_support(p, problem.received, support);
    VectorXcd residual = problem.received - p * gains;
    double res_norm = residual.norm();

    int it = 0;
    for (; it < 32; ++it) {
        std::set<int> in_support(support.begin(), support.end());
        std::vector<int> candidate = support;
        for (int extra : top_indices(p.adjoint() * residual, sparsity,
                                     &in_support))
            candidate.push_back(extra);
        const VectorXcd wide = ls_on_support(p, problem.received, candidate);
        std::vector<int> pruned = top_indices(wide, sparsity);
        const VectorXcd new_gains = ls_on_support(p, problem.received, pruned);
        const VectorXcd new_residual = problem.received - p * new_gains;
        if (new_residual.norm() >= res_norm) break;
        support = std::move(pruned);
        gains = new_gains;
        residual = new_residual;
        res_norm = residual.norm();
    }
    return finish(problem, support, gains, it);
}

RecoveryResult solve_cosamp(const SparseProblem& problem, int sparsity) {
    check_sparsity(problem, sparsity);
    const MatrixXcd& p = problem.pilot;

    std::vector<int> support;
    VectorXcd gains = VectorXcd::Zero(p.cols());
    VectorXcd residual = problem.received;
    double res_norm = residual.norm();

    int it = 0;
    for (; it < 32; ++it) {
        std::set<int> in_support(support.begin(), support.end());
        std::vector<int> candidate = support;
        for (int extra : top_indices(p.adjoint() * residual, 2 * sparsity,
                                     &in_support))
            candidate.push_back(extra);
        const VectorXcd wide = ls_on_support(p, problem.received, candidate);
        std::vector<int> pruned = top_indices(wide, sparsity);
        const VectorXcd new_gains = ls_on_support(p, problem.received, pruned);
        const VectorXcd new_residual = problem.received - p * new_gains;
        if (new_residual.norm() >= res_norm) break;
        support = std::move(pruned);
        gains = new_gains;
        residual = new_residual;
        res_norm = residual.norm();
    }
    return finish(problem, support, gains, it);
}

RecoveryResult solve_samp(const SparseProblem& problem,
                          const SampOptions& options) {
    if (options.step < 1) throw std::invalid_argument("SAMP step must be >= 1");
    const MatrixXcd& p = problem.pilot;
    const int l = static_cast<int>(p.rows());
    const double y_norm = problem.received.norm();

    std::vector<int> support;
    VectorXcd gains = VectorXcd::Zero(p.cols());
    VectorXcd residual = problem.received;
    double res_norm = residual.norm();

    int stage_size = options.step;
    int it = 0;
    for (int stage = 0; stage < options.max_stages && stage_size <= l; ++stage) {
        bool advanced = true;
        for (int inner = 0; inner < 100 && advanced; ++inner) {
            ++it;
            std::set<int> in_support(support.begin(), support.end());
            std::vector<int> candidate = support;
            for (int extra : top_indices(p.adjoint() * residual, stage_size,
                                         &in_support))
                candidate.push_back(extra);
            const VectorXcd wide = ls_on_support(p, problem.received, candidate);
            std::vector<int> pruned = top_indices(wide, stage_size);
            const VectorXcd new_gains =
                ls_on_support(p, problem.received, pruned);
            const VectorXcd new_residual = problem.received - p * new_gains;
            const double new_norm = new_residual.norm();
            if (new_norm < res_norm) {
                support = std::move(pruned);
                gains = new_gains;
                residual = new_residual;
                res_norm = new_norm;
            } else {
                advanced = false;  // stage exhausted
            }
            if (res_norm <= options.residual_tol * y_norm) {
                return finish(problem, support, gains, it);
            }
        }
        stage_size += options.step;
    }
    return finish(problem, support, gains, it);
}

}  // namespace railsim::access

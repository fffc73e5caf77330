#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/graph.hpp"
#include "glag/matcher.hpp"
#include "glag/polytope.hpp"

namespace glag {

/// Parameters for the reference matchers.
struct BaselineConfig {
    int max_iter = 2000;
    double tol = 1e-8;        // relative objective-change stopping rule
    double step_safety = 0.45; // fraction of 1/L for the projected-gradient step
    double projection_tol = 1e-9;
    int projection_max_iter = 10000;
    bool validate_iterates = false;
};

/// Per-iteration record of a baseline solve.
struct BaselineTrace {
    std::vector<double> objective; // h(P) after each iteration
    std::vector<double> steps;     // line-search eta (faq only)
};

namespace detail {

inline double frobenius_mismatch(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                 const Eigen::MatrixXd& P) {
    return (A * P - P * B).squaredNorm();
}

inline MatchResult finish_baseline(const Graph& A, const Graph& B, Eigen::MatrixXd P,
                                   int iters, bool converged) {
    DoublyStochastic relaxed{std::move(P)};
    Permutation star = round_to_permutation(relaxed);
    const double obj = group_objective(A, B, relaxed.M);
    return MatchResult{std::move(relaxed), std::move(star), obj, iters, converged};
}

} // namespace detail

/// Convex Frobenius relaxation: projected gradient descent on
/// h(P) = ||AP - PB||_F^2 over the doubly stochastic matrices, barycenter
/// start, fixed step step_safety / L with L = 2(rho(A^T A) + rho(B^T B)).
inline MatchResult qcp_match(const Graph& A, const Graph& B, const BaselineConfig& cfg = {},
                             BaselineTrace* trace = nullptr) {
    if (A.p() != B.p()) throw parameter_error("graphs must have the same number of nodes");
    if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw parameter_error("invalid baseline configuration");
    if (!(cfg.step_safety > 0.0 && cfg.step_safety < 1.0)) throw parameter_error("step_safety must lie in (0,1)");
    const int p = A.p();
    const Eigen::MatrixXd& MA = A.W;
    const Eigen::MatrixXd& MB = B.W;

    const double L = 2.0 * (spectral_norm(MA.transpose() * MA, 1e-8) +
                            spectral_norm(MB.transpose() * MB, 1e-8));
    const double step = L > 0.0 ? cfg.step_safety / L : 1.0;

    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(p, p, 1.0 / p);
    double h_prev = detail::frobenius_mismatch(MA, MB, P);
    bool converged = false;
    int iters = 0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        iters = it;
        const Eigen::MatrixXd R = MA * P - P * MB;
        const Eigen::MatrixXd grad = 2.0 * (MA.transpose() * R - R * MB.transpose());
        P = project_doubly_stochastic(P - step * grad, cfg.projection_tol, cfg.projection_max_iter).M;
        if (cfg.validate_iterates && !is_doubly_stochastic(P))
            throw convergence_error("iterate left the doubly stochastic polytope", h_prev);
        const double h = detail::frobenius_mismatch(MA, MB, P);
        if (trace) trace->objective.push_back(h);
        if (std::abs(h_prev - h) <= cfg.tol * std::max(h_prev, 1e-300)) {
            h_prev = h;
            converged = true;
            break;
        }
        h_prev = h;
    }
    return detail::finish_baseline(A, B, std::move(P), iters, converged);
}

/// Frank-Wolfe on the same relaxation: the descent direction is the max-trace
/// assignment of the negated gradient, the step is the exact minimizer of the
/// quadratic along the segment (clamped to [0,1]).
inline MatchResult faq_match(const Graph& A, const Graph& B, const BaselineConfig& cfg = {},
                             BaselineTrace* trace = nullptr) {
    if (A.p() != B.p()) throw parameter_error("graphs must have the same number of nodes");
    if (cfg.max_iter < 1 || !(cfg.tol > 0.0)) throw parameter_error("invalid baseline configuration");
    const int p = A.p();
    const Eigen::MatrixXd& MA = A.W;
    const Eigen::MatrixXd& MB = B.W;

    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(p, p, 1.0 / p);
    double h_prev = detail::frobenius_mismatch(MA, MB, P);
    bool converged = false;
    int iters = 0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        iters = it;
        const Eigen::MatrixXd R = MA * P - P * MB;
        const Eigen::MatrixXd grad = 2.0 * (MA.transpose() * R - R * MB.transpose());
        const Eigen::MatrixXd Q = max_trace_assignment(-grad).matrix();
        const Eigen::MatrixXd D = Q - P;
        // h(P + eta D) = h(P) + 2 eta <R, AD - DB> + eta^2 ||AD - DB||^2
        const Eigen::MatrixXd ED = MA * D - D * MB;
        const double quad = ED.squaredNorm();
        const double lin = 2.0 * (R.array() * ED.array()).sum();
        double eta;
        if (quad <= 1e-300) {
            if (lin >= 0.0) { converged = true; break; } // no descent along D
            eta = 1.0;
        } else {
            eta = std::clamp(-lin / (2.0 * quad), 0.0, 1.0);
        }
        P += eta * D;
        if (cfg.validate_iterates && !is_doubly_stochastic(P))
            throw convergence_error("iterate left the doubly stochastic polytope", h_prev);
        const double h = detail::frobenius_mismatch(MA, MB, P);
        if (trace) {
            trace->objective.push_back(h);
            trace->steps.push_back(eta);
        }
        if (std::abs(h_prev - h) <= cfg.tol * std::max(h_prev, 1e-300)) {
            h_prev = h;
            converged = true;
            break;
        }
        h_prev = h;
    }
    return detail::finish_baseline(A, B, std::move(P), iters, converged);
}

} // namespace glag

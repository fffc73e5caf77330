#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/graph.hpp"
#include "glag/polytope.hpp"

namespace glag {

/// Solver parameters for glag_match.
struct GlagConfig {
    double c = 1.0;            // augmented-Lagrangian penalty
    double tau_safety = 0.9;   // fraction of the 1/rho(A^T A) step bound
    double eps_abs = 1e-6;
    double eps_rel = 1e-6;
    int max_iter = 2000;
    double projection_tol = 1e-9;
    int projection_max_iter = 10000;
    bool validate_iterates = false; // per-iteration feasibility checks (tests)
};

/// Iterates of the splitting scheme, exposed for inspection.
struct GlagState {
    Eigen::MatrixXd P, alpha, beta, U, V;
    int iter = 0;
    std::vector<double> primal_residuals; // max(||alpha - AP||_F, ||beta - PB||_F) per iteration
    std::vector<double> objective_trace;  // group objective at P per iteration
};

struct MatchResult {
    DoublyStochastic P_relaxed;
    Permutation P_star;
    double objective = 0.0; // group objective at P_relaxed
    int iterations = 0;
    bool converged = false;
};

/// Sum of the l2 norms of the per-entry groups ((AP)_ij, (PB)_ij).
inline double group_objective(const Graph& A, const Graph& B, const Eigen::MatrixXd& P) {
    if (A.p() != B.p() || P.rows() != A.p() || P.cols() != A.p())
        throw parameter_error("group objective requires equal dimensions");
    const Eigen::ArrayXXd AP = (A.W * P).array();
    const Eigen::ArrayXXd PB = (P * B.W).array();
    return (AP.square() + PB.square()).sqrt().sum();
}

/// Vector soft-thresholding on a 2-vector: [1 - threshold/||a||]_+ a.
inline Eigen::Vector2d group_prox(const Eigen::Vector2d& a, double threshold) {
    if (threshold < 0.0) throw parameter_error("prox threshold must be nonnegative");
    const double n = a.norm();
    if (n <= threshold) return Eigen::Vector2d::Zero();
    return (1.0 - threshold / n) * a;
}

/// Squared Frobenius distance ||A0 - P B0 P^T||_F^2 under the permutation's
/// matrix view, i.e. sum over (i,j) of (A0_ij - B0_{sigma(i),sigma(j)})^2.
inline double matching_error(const Graph& A0, const Graph& B0, const Permutation& perm) {
    const int p = A0.p();
    if (B0.p() != p || perm.size() != p) throw parameter_error("matching error requires equal dimensions");
    double err = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double d = A0.W(i, j) - B0.W(perm(i), perm(j));
            err += d * d;
        }
    return err;
}

/// Group-lasso graph matching: minimizes sum_ij ||((AP)_ij, (PB)_ij)||_2 over
/// the Birkhoff polytope by a linearized ADMM, then rounds to the nearest
/// permutation. Non-convergence is reported via `converged`, never thrown; the
/// final iterate is still rounded.
///
/// Each iteration performs p^2 vector thresholdings for the split variables,
/// one linearized step for P (a single projection onto the polytope), and the
/// scaled dual updates. The step size is tau_safety / max(rho(A^T A), rho(B^T B)).
inline MatchResult glag_match(const Graph& A, const Graph& B, const GlagConfig& cfg = {},
                              GlagState* state_out = nullptr) {
    if (A.p() != B.p()) throw parameter_error("graphs must have the same number of nodes");
    if (!(cfg.c > 0.0)) throw parameter_error("penalty c must be positive");
    if (!(cfg.tau_safety > 0.0 && cfg.tau_safety < 1.0)) throw parameter_error("tau_safety must lie in (0,1)");
    if (cfg.max_iter < 1) throw parameter_error("max_iter must be at least 1");

    const int p = A.p();
    const Eigen::MatrixXd& MA = A.W;
    const Eigen::MatrixXd& MB = B.W;

    const double rho_a = spectral_norm(MA.transpose() * MA, 1e-8);
    const double rho_b = spectral_norm(MB.transpose() * MB, 1e-8);
    const double rho_max = std::max(rho_a, rho_b);
    const double tau = rho_max > 0.0 ? cfg.tau_safety / rho_max : 1.0;
    const double threshold = 1.0 / cfg.c;

    Eigen::MatrixXd P = Eigen::MatrixXd::Constant(p, p, 1.0 / p);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd alpha(p, p), beta(p, p);
    Eigen::MatrixXd AP = MA * P;
    Eigen::MatrixXd PB = P * MB;

    std::vector<double> residual_trace, objective_trace;
    residual_trace.reserve(static_cast<std::size_t>(cfg.max_iter));
    objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter));

    bool converged = false;
    int iters = 0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        iters = it;

        // (alpha, beta): joint vector soft-thresholding of the p^2 groups
        const Eigen::ArrayXXd t1 = (AP - U).array();
        const Eigen::ArrayXXd t2 = (PB - V).array();
        const Eigen::ArrayXXd norms = (t1.square() + t2.square()).sqrt();
        const Eigen::ArrayXXd shrink = (1.0 - threshold / norms).max(0.0); // norms==0 gives -inf, clamped
        alpha = (shrink * t1).matrix();
        beta = (shrink * t2).matrix();

        // P: one linearized step, then projection of (C+D)/2 onto the polytope
        const Eigen::MatrixXd R1 = alpha + U - AP;
        const Eigen::MatrixXd R2 = beta + V - PB;
        const Eigen::MatrixXd target = P + 0.5 * tau * (MA.transpose() * R1 + R2 * MB.transpose());
        Eigen::MatrixXd P_new = project_doubly_stochastic(target, cfg.projection_tol, cfg.projection_max_iter).M;
        const double step = (P_new - P).norm();
        P.swap(P_new);

        AP.noalias() = MA * P;
        PB.noalias() = P * MB;

        // scaled dual ascent
        const Eigen::MatrixXd E1 = alpha - AP;
        const Eigen::MatrixXd E2 = beta - PB;
        U += E1;
        V += E2;

        const double r_primal = std::max(E1.norm(), E2.norm());
        residual_trace.push_back(r_primal);
        objective_trace.push_back(((AP.array().square() + PB.array().square()).sqrt()).sum());

        if (cfg.validate_iterates && !is_doubly_stochastic(P))
            throw convergence_error("iterate left the doubly stochastic polytope", r_primal);

        const double eps_pri = cfg.eps_abs * p + cfg.eps_rel * std::max(AP.norm(), PB.norm());
        if (r_primal <= eps_pri && step <= cfg.eps_abs * p) {
            converged = true;
            break;
        }
    }

    DoublyStochastic relaxed{P};
    Permutation star = round_to_permutation(relaxed);
    const double objective = ((AP.array().square() + PB.array().square()).sqrt()).sum();

    if (state_out) {
        state_out->P = P;
        state_out->alpha = std::move(alpha);
        state_out->beta = std::move(beta);
        state_out->U = std::move(U);
        state_out->V = std::move(V);
        state_out->iter = iters;
        state_out->primal_residuals = std::move(residual_trace);
        state_out->objective_trace = std::move(objective_trace);
    }
    return MatchResult{std::move(relaxed), std::move(star), objective, iters, converged};
}

} // namespace glag

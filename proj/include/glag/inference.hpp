#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "glag/error.hpp"
#include "glag/graph.hpp"
#include "glag/io.hpp"
#include "glag/matcher.hpp"
#include "glag/permutation.hpp"
#include "glag/rng.hpp"

namespace glag {

/// k observations of a p-dimensional variable, one sample per row.
struct DataMatrix {
    Eigen::MatrixXd X;
    Eigen::RowVectorXd mean;

    explicit DataMatrix(Eigen::MatrixXd samples) : X(std::move(samples)) {
        if (X.rows() < 2) throw parameter_error("data matrix needs at least two samples");
        if (!X.allFinite()) throw parameter_error("data matrix must be finite");
        mean = X.colwise().mean();
    }

    int samples() const noexcept { return static_cast<int>(X.rows()); }
    int variables() const noexcept { return static_cast<int>(X.cols()); }
};

struct CovarianceEstimate {
    Eigen::MatrixXd S;
    int sample_count = 0;
};

/// Symmetric positive-definite precision estimate and the regularization that
/// produced it.
struct PrecisionEstimate {
    Eigen::MatrixXd Theta;
    double lambda = 0.0;
};

struct PrecisionPair {
    PrecisionEstimate theta_a, theta_b;
    Permutation perm;
    int outer_rounds = 0;
};

/// S = (1/k) (X - mean)^T (X - mean); the maximum-likelihood normalization.
inline CovarianceEstimate empirical_covariance(const DataMatrix& data) {
    const Eigen::MatrixXd centered = data.X.rowwise() - data.mean;
    Eigen::MatrixXd S = (centered.transpose() * centered) / data.samples();
    S = 0.5 * (S + S.transpose()).eval();
    return CovarianceEstimate{std::move(S), data.samples()};
}

namespace detail {

/// argmin_Theta tr(S Theta) - logdet Theta + (rho/2)||Theta - G||_F^2, by
/// eigendecomposition of rho*G - S.
inline Eigen::MatrixXd logdet_prox(const Eigen::MatrixXd& S, const Eigen::MatrixXd& G, double rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho * G - S);
    const Eigen::VectorXd& ev = es.eigenvalues();
    Eigen::VectorXd phi(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        phi(i) = (ev(i) + std::sqrt(ev(i) * ev(i) + 4.0 * rho)) / (2.0 * rho);
    return es.eigenvectors() * phi.asDiagonal() * es.eigenvectors().transpose();
}

inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& A) {
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw convergence_error("matrix is not positive definite", 0.0);
    return llt.solve(Eigen::MatrixXd::Identity(A.rows(), A.cols()));
}

/// Max-norm KKT residual of the l1 problem at Theta:
/// active entries check S - Theta^{-1} + lambda*sign(Theta), inactive ones the
/// subgradient interval.
inline double glasso_kkt_residual(const Eigen::MatrixXd& S, const Eigen::MatrixXd& Theta, double lambda) {
    const Eigen::MatrixXd R = S - spd_inverse(Theta);
    double res = 0.0;
    const double zero_eps = 1e-10;
    for (int i = 0; i < R.rows(); ++i)
        for (int j = 0; j < R.cols(); ++j) {
            const double t = Theta(i, j);
            const double r = std::abs(t) > zero_eps
                                 ? std::abs(R(i, j) + lambda * (t > 0.0 ? 1.0 : -1.0))
                                 : std::max(0.0, std::abs(R(i, j)) - lambda);
            res = std::max(res, r);
        }
    return res;
}

/// Joint KKT residual with the 2-vector group subgradient.
inline double joint_kkt_residual(const Eigen::MatrixXd& Sa, const Eigen::MatrixXd& Sb,
                                 const Eigen::MatrixXd& Ta, const Eigen::MatrixXd& Tb, double lambda) {
    const Eigen::MatrixXd Ra = Sa - spd_inverse(Ta);
    const Eigen::MatrixXd Rb = Sb - spd_inverse(Tb);
    double res = 0.0;
    const double zero_eps = 1e-10;
    for (int i = 0; i < Ra.rows(); ++i)
        for (int j = 0; j < Ra.cols(); ++j) {
            const double na = Ta(i, j), nb = Tb(i, j);
            const double gn = std::hypot(na, nb);
            double r;
            if (gn > zero_eps) {
                r = std::hypot(Ra(i, j) + lambda * na / gn, Rb(i, j) + lambda * nb / gn);
            } else {
                r = std::max(0.0, std::hypot(Ra(i, j), Rb(i, j)) - lambda);
            }
            res = std::max(res, r);
        }
    return res;
}

} // namespace detail

/// l1-penalized Gaussian maximum likelihood: minimizes
/// tr(S Theta) - logdet Theta + lambda * sum_ij |Theta_ij| (diagonal included)
/// by operator splitting: closed-form quadratic+logdet step via
/// eigendecomposition, entrywise soft-threshold step, dual update. Runs until
/// the KKT residual is at most tol.
inline PrecisionEstimate graphical_lasso(const CovarianceEstimate& cov, double lambda,
                                         double tol = 1e-6, int max_iter = 20000) {
    if (lambda < 0.0) throw parameter_error("lambda must be nonnegative");
    if (!(tol > 0.0)) throw parameter_error("tolerance must be positive");
    const Eigen::MatrixXd& S = cov.S;
    if (S.rows() != S.cols() || S.rows() == 0) throw parameter_error("covariance must be square and nonempty");
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, S.cwiseAbs().maxCoeff()))
        throw parameter_error("covariance must be symmetric");

    const int p = static_cast<int>(S.rows());
    double rho = 1.0;
    Eigen::MatrixXd Z = Eigen::MatrixXd::Identity(p, p);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd Theta(p, p);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        Theta = detail::logdet_prox(S, Z - W, rho);
        const Eigen::MatrixXd Zprev = Z;
        const Eigen::MatrixXd T = Theta + W;
        const double thr = lambda / rho;
        Z = T.unaryExpr([thr](double v) { return v > thr ? v - thr : (v < -thr ? v + thr : 0.0); });
        W += Theta - Z;

        if (it % 10 == 0 || it == max_iter) {
            Theta = 0.5 * (Theta + Theta.transpose()).eval();
            res = detail::glasso_kkt_residual(S, Theta, lambda);
            if (res <= tol) return PrecisionEstimate{std::move(Theta), lambda};
            const double r_primal = (Theta - Z).norm();
            const double r_dual = rho * (Z - Zprev).norm();
            if (r_primal > 10.0 * r_dual && rho < 1e4) {
                rho *= 2.0;
                W *= 0.5;
            } else if (r_dual > 10.0 * r_primal && rho > 1e-4) {
                rho *= 0.5;
                W *= 2.0;
            }
        }
    }
    throw convergence_error("graphical lasso did not reach the KKT tolerance", res);
}

/// Joint estimation with a group penalty coupling Theta^A_{ij} with
/// Theta^B_{pairing(i),pairing(j)}: B's variables are relabeled by the pairing,
/// the aligned problem
///   tr(Sa Ta) - logdet Ta + tr(Sb Tb) - logdet Tb + lambda*sum||(Ta_ij,Tb_ij)||_2
/// is solved with the 2-vector soft-thresholding step, and the result is
/// mapped back.
inline std::pair<PrecisionEstimate, PrecisionEstimate> joint_graphical_lasso(
    const CovarianceEstimate& cov_a, const CovarianceEstimate& cov_b, double lambda,
    const Permutation& pairing, double tol = 1e-6, int max_iter = 20000) {
    if (lambda < 0.0) throw parameter_error("lambda must be nonnegative");
    if (!(tol > 0.0)) throw parameter_error("tolerance must be positive");
    const Eigen::MatrixXd& Sa = cov_a.S;
    if (Sa.rows() != Sa.cols() || cov_b.S.rows() != cov_b.S.cols() || Sa.rows() != cov_b.S.rows())
        throw parameter_error("covariances must be square with equal dimensions");
    if (pairing.size() != Sa.rows()) throw parameter_error("pairing size does not match");

    const int p = static_cast<int>(Sa.rows());
    // relabel B's variables: Sb_aligned(i,j) = Sb(pairing(i), pairing(j))
    Eigen::MatrixXd Sb(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) Sb(i, j) = cov_b.S(pairing(i), pairing(j));

    double rho = 1.0;
    Eigen::MatrixXd Za = Eigen::MatrixXd::Identity(p, p), Zb = Za;
    Eigen::MatrixXd Wa = Eigen::MatrixXd::Zero(p, p), Wb = Wa;
    Eigen::MatrixXd Ta(p, p), Tb(p, p);
    double res = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iter; ++it) {
        Ta = detail::logdet_prox(Sa, Za - Wa, rho);
        Tb = detail::logdet_prox(Sb, Zb - Wb, rho);
        const Eigen::MatrixXd Za_prev = Za, Zb_prev = Zb;
        const Eigen::ArrayXXd Ga = (Ta + Wa).array();
        const Eigen::ArrayXXd Gb = (Tb + Wb).array();
        const Eigen::ArrayXXd norms = (Ga.square() + Gb.square()).sqrt();
        const Eigen::ArrayXXd shrink = (1.0 - (lambda / rho) / norms).max(0.0);
        Za = (shrink * Ga).matrix();
        Zb = (shrink * Gb).matrix();
        Wa += Ta - Za;
        Wb += Tb - Zb;

        if (it % 10 == 0 || it == max_iter) {
            Ta = 0.5 * (Ta + Ta.transpose()).eval();
            Tb = 0.5 * (Tb + Tb.transpose()).eval();
            res = detail::joint_kkt_residual(Sa, Sb, Ta, Tb, lambda);
            if (res <= tol) break;
            const double r_primal = std::sqrt((Ta - Za).squaredNorm() + (Tb - Zb).squaredNorm());
            const double r_dual = rho * std::sqrt((Za - Za_prev).squaredNorm() + (Zb - Zb_prev).squaredNorm());
            if (r_primal > 10.0 * r_dual && rho < 1e4) {
                rho *= 2.0;
                Wa *= 0.5;
                Wb *= 0.5;
            } else if (r_dual > 10.0 * r_primal && rho > 1e-4) {
                rho *= 0.5;
                Wa *= 2.0;
                Wb *= 2.0;
            }
        }
        if (it == max_iter && res > tol)
            throw convergence_error("joint graphical lasso did not reach the KKT tolerance", res);
    }

    // map B back to its original labeling: Theta^B(pairing(i), pairing(j)) = Tb(i,j)
    Eigen::MatrixXd Tb_out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) Tb_out(pairing(i), pairing(j)) = Tb(i, j);
    return {PrecisionEstimate{std::move(Ta), lambda}, PrecisionEstimate{std::move(Tb_out), lambda}};
}

/// Weighted graph of off-diagonal precision magnitudes (the matching view of
/// an estimate).
inline Graph precision_magnitude_graph(const PrecisionEstimate& est) {
    const int p = static_cast<int>(est.Theta.rows());
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j) W(i, j) = 0.5 * (std::abs(est.Theta(i, j)) + std::abs(est.Theta(j, i)));
    return Graph{std::move(W)};
}

/// Alignment-free joint inference: block-coordinate descent alternating a
/// matching step on the current precision magnitudes with a joint group
/// graphical lasso under the rounded pairing. Stops early when the pairing
/// repeats.
inline PrecisionPair joint_infer_unaligned(const DataMatrix& data_a, const DataMatrix& data_b,
                                           double lambda, int rounds = 10,
                                           const GlagConfig& glag_cfg = {},
                                           double glasso_tol = 1e-6) {
    if (data_a.variables() != data_b.variables()) throw parameter_error("datasets must share the variable count");
    if (rounds < 1) throw parameter_error("at least one outer round required");

    const CovarianceEstimate Sa = empirical_covariance(data_a);
    const CovarianceEstimate Sb = empirical_covariance(data_b);
    PrecisionEstimate ta = graphical_lasso(Sa, lambda, glasso_tol);
    PrecisionEstimate tb = graphical_lasso(Sb, lambda, glasso_tol);

    std::optional<Permutation> prev;
    Permutation perm = Permutation::identity(data_a.variables());
    int done = 0;
    for (int r = 1; r <= rounds; ++r) {
        done = r;
        const Graph ga = precision_magnitude_graph(ta);
        const Graph gb = precision_magnitude_graph(tb);
        perm = glag_match(ga, gb, glag_cfg).P_star;
        std::tie(ta, tb) = joint_graphical_lasso(Sa, Sb, lambda, perm, glasso_tol);
        if (prev && *prev == perm) break;
        prev = perm;
    }
    return PrecisionPair{std::move(ta), std::move(tb), std::move(perm), done};
}

/// k iid samples from N(0, Theta^{-1}), via Cholesky of the covariance.
/// Deterministic given seed.
inline DataMatrix gen_gmrf_data(const PrecisionEstimate& theta_gt, int k, std::uint64_t seed) {
    if (k < 2) throw parameter_error("at least two samples required");
    const int p = static_cast<int>(theta_gt.Theta.rows());
    Eigen::LLT<Eigen::MatrixXd> llt_theta(theta_gt.Theta);
    if (llt_theta.info() != Eigen::Success) throw parameter_error("precision matrix must be positive definite");
    const Eigen::MatrixXd Sigma = llt_theta.solve(Eigen::MatrixXd::Identity(p, p));
    Eigen::LLT<Eigen::MatrixXd> llt_sigma(0.5 * (Sigma + Sigma.transpose()));
    if (llt_sigma.info() != Eigen::Success) throw parameter_error("covariance factorization failed");
    const Eigen::MatrixXd L = llt_sigma.matrixL();

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd X(k, p);
    Eigen::VectorXd z(p);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < p; ++j) z(j) = gauss(rng);
        X.row(i) = (L * z).transpose();
    }
    return DataMatrix(std::move(X));
}

/// Precision-matrix file: the graph coordinate layout for the off-diagonal
/// support (header "p e", e lines "i j v" with i<j) followed by p diagonal
/// lines "i i v".
inline void write_precision(const PrecisionEstimate& est, const std::string& path) {
    const int p = static_cast<int>(est.Theta.rows());
    auto out = detail::open_output(path);
    int e = 0;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (est.Theta(i, j) != 0.0) ++e;
    out << p << ' ' << e << '\n';
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (est.Theta(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << est.Theta(i, j) << '\n';
    for (int i = 0; i < p; ++i) out << i + 1 << ' ' << i + 1 << ' ' << est.Theta(i, i) << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline PrecisionEstimate read_precision(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw format_error("empty precision file '" + path + "'", 1);
    ++lineno;
    int p = 0, e = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> p >> e) || (hs >> extra)) throw format_error("expected header 'p e'", lineno);
        if (p < 1 || e < 0) throw format_error("header values out of range", lineno);
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p, p);
    int off = 0, diag = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double v = 0.0;
        std::string extra;
        if (!(ls >> i >> j >> v) || (ls >> extra)) throw format_error("expected 'i j v'", lineno);
        if (i < 1 || i > p || j < 1 || j > p) throw format_error("index out of range", lineno);
        if (!std::isfinite(v)) throw format_error("entry must be finite", lineno);
        if (i == j) {
            T(i - 1, i - 1) = v;
            ++diag;
        } else {
            if (i > j) throw format_error("off-diagonal entries must have i < j", lineno);
            T(i - 1, j - 1) = T(j - 1, i - 1) = v;
            ++off;
        }
    }
    if (off != e) throw format_error("off-diagonal entry count does not match header", lineno);
    if (diag != p) throw format_error("expected one diagonal entry per variable", lineno);
    Eigen::LLT<Eigen::MatrixXd> llt(T);
    if (llt.info() != Eigen::Success) throw format_error("precision matrix in file is not positive definite");
    return PrecisionEstimate{std::move(T), 0.0};
}

} // namespace glag

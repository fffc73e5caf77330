#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/permutation.hpp"

namespace glag {

// Feasibility tolerances of the DoublyStochastic type.
inline constexpr double ds_entry_tol = 1e-9;
inline constexpr double ds_sum_tol = 1e-8;

/// Element of the Birkhoff polytope: nonnegative square matrix whose rows and
/// columns each sum to 1 (within ds_sum_tol).
struct DoublyStochastic {
    Eigen::MatrixXd M;
    int size() const noexcept { return static_cast<int>(M.rows()); }
};

inline bool is_doubly_stochastic(const Eigen::MatrixXd& M,
                                 double entry_tol = ds_entry_tol,
                                 double sum_tol = ds_sum_tol) {
    if (M.rows() != M.cols() || M.rows() == 0 || !M.allFinite()) return false;
    if (M.minCoeff() < -entry_tol) return false;
    const auto rs = M.rowwise().sum();
    const auto cs = M.colwise().sum();
    return (rs.array() - 1.0).abs().maxCoeff() <= sum_tol &&
           (cs.array() - 1.0).abs().maxCoeff() <= sum_tol;
}

namespace detail {

/// Closed-form projection onto the affine set {M : M1 = 1, M^T1 = 1}.
/// The correction has the form a1^T + 1b^T with (a, b) solved from the 2p
/// constraint equations.
inline void project_sum_constraints(Eigen::MatrixXd& Z) {
    const int p = static_cast<int>(Z.rows());
    const Eigen::VectorXd r = Eigen::VectorXd::Ones(p) - Z.rowwise().sum();
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(p) - Z.colwise().sum().transpose();
    const double sigma = r.sum() / (2.0 * p);
    const Eigen::VectorXd a = (r.array() - sigma) / p;
    const Eigen::VectorXd b = (c.array() - sigma) / p;
    Z.colwise() += a;
    Z.rowwise() += b.transpose();
}

} // namespace detail

/// Euclidean (Frobenius) projection onto the doubly stochastic matrices, by
/// Dykstra's alternating projections between the row/column-sum affine set and
/// the nonnegative orthant. The returned matrix is exactly nonnegative with
/// row/column sums within tol of 1.
inline DoublyStochastic project_doubly_stochastic(const Eigen::MatrixXd& X,
                                                  double tol = 1e-9,
                                                  int max_iter = 10000) {
    if (X.rows() != X.cols() || X.rows() == 0) throw parameter_error("projection input must be square and nonempty");
    if (!X.allFinite()) throw parameter_error("projection input must be finite");
    if (!(tol > 0.0)) throw parameter_error("projection tolerance must be positive");

    const int p = static_cast<int>(X.rows());
    const double step_tol = 0.1 * tol * std::max(1.0, X.norm());

    Eigen::MatrixXd Z = X;
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(p, p); // Dykstra correction for the orthant step
    Eigen::MatrixXd prev(p, p);
    double feas = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        prev = Z;
        detail::project_sum_constraints(Z);
        Z += Q;
        Q = Z.cwiseMin(0.0);  // what the clamp removes
        Z -= Q;               // now Z >= 0 exactly
        const double step = (Z - prev).norm();
        feas = std::max((Z.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                        (Z.colwise().sum().array() - 1.0).abs().maxCoeff());
        if (feas <= tol && step <= step_tol) return DoublyStochastic{std::move(Z)};
    }
    throw convergence_error("projection onto doubly stochastic matrices did not converge", feas);
}

namespace detail {

/// Jonker-Volgenant style shortest augmenting path LAP (min cost, square).
/// Fills row_to_col and the dual potentials (u, v); on exit
/// cost(i,j) - u[i] - v[j] >= -eps for all (i,j) and = 0 on the assignment.
inline void solve_lap_min(const Eigen::MatrixXd& cost,
                          std::vector<int>& row_to_col,
                          std::vector<double>& u,
                          std::vector<double>& v) {
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    u.assign(static_cast<std::size_t>(n) + 1, 0.0);
    v.assign(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<int> col_to_row(static_cast<std::size_t>(n) + 1, 0);
    std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
    for (int i = 1; i <= n; ++i) {
        col_to_row[0] = i;
        int j0 = 0;
        std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
        std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
        do {
            used[static_cast<std::size_t>(j0)] = 1;
            const int i0 = col_to_row[static_cast<std::size_t>(j0)];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j)
                if (!used[static_cast<std::size_t>(j)]) {
                    const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
                    if (cur < minv[static_cast<std::size_t>(j)]) {
                        minv[static_cast<std::size_t>(j)] = cur;
                        way[static_cast<std::size_t>(j)] = j0;
                    }
                    if (minv[static_cast<std::size_t>(j)] < delta) {
                        delta = minv[static_cast<std::size_t>(j)];
                        j1 = j;
                    }
                }
            for (int j = 0; j <= n; ++j) {
                if (used[static_cast<std::size_t>(j)]) {
                    u[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(j)])] += delta;
                    v[static_cast<std::size_t>(j)] -= delta;
                } else {
                    minv[static_cast<std::size_t>(j)] -= delta;
                }
            }
            j0 = j1;
        } while (col_to_row[static_cast<std::size_t>(j0)] != 0);
        do {
            const int j1 = way[static_cast<std::size_t>(j0)];
            col_to_row[static_cast<std::size_t>(j0)] = col_to_row[static_cast<std::size_t>(j1)];
            j0 = j1;
        } while (j0);
    }
    row_to_col.assign(static_cast<std::size_t>(n), -1);
    for (int j = 1; j <= n; ++j)
        if (col_to_row[static_cast<std::size_t>(j)] > 0)
            row_to_col[static_cast<std::size_t>(col_to_row[static_cast<std::size_t>(j)]) - 1] = j - 1;
}

/// Kuhn augmenting search over an adjacency structure restricted to free columns.
inline bool try_augment(int row, const std::vector<std::vector<int>>& adj,
                        std::vector<char>& visited, std::vector<int>& col_owner) {
    for (int j : adj[static_cast<std::size_t>(row)]) {
        if (visited[static_cast<std::size_t>(j)]) continue;
        visited[static_cast<std::size_t>(j)] = 1;
        if (col_owner[static_cast<std::size_t>(j)] < 0 ||
            try_augment(col_owner[static_cast<std::size_t>(j)], adj, visited, col_owner)) {
            col_owner[static_cast<std::size_t>(j)] = row;
            return true;
        }
    }
    return false;
}

/// True if rows `first_row..n-1` can all be matched within adj, given columns
/// already consumed by fixed rows.
inline bool matchable(int first_row, int n, const std::vector<std::vector<int>>& adj,
                      const std::vector<char>& col_fixed) {
    std::vector<int> col_owner(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> free_adj(static_cast<std::size_t>(n));
    for (int i = first_row; i < n; ++i)
        for (int j : adj[static_cast<std::size_t>(i)])
            if (!col_fixed[static_cast<std::size_t>(j)]) free_adj[static_cast<std::size_t>(i)].push_back(j);
    std::vector<char> visited;
    for (int i = first_row; i < n; ++i) {
        visited.assign(static_cast<std::size_t>(n), 0);
        if (!try_augment(i, free_adj, visited, col_owner)) return false;
    }
    return true;
}

} // namespace detail

/// Exact linear assignment maximizing sum_i score(i, sigma(i)). Ties are broken
/// toward the lexicographically smallest sigma: an optimal assignment is found
/// first, then the admissible (zero reduced cost) bipartite graph is rematched
/// greedily in row order.
inline Permutation max_trace_assignment(const Eigen::MatrixXd& score) {
    if (score.rows() != score.cols() || score.rows() == 0) throw parameter_error("assignment matrix must be square and nonempty");
    if (!score.allFinite()) throw parameter_error("assignment matrix must be finite");
    const int n = static_cast<int>(score.rows());

    const Eigen::MatrixXd cost = -score;
    std::vector<int> row_to_col;
    std::vector<double> u, v;
    detail::solve_lap_min(cost, row_to_col, u, v);

    const double scale = std::max(1.0, score.cwiseAbs().maxCoeff());
    const double tie_eps = 1e-9 * scale;

    // Complementary slackness: the optimal assignments are exactly the perfect
    // matchings of the tight-edge graph for optimal duals.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (cost(i, j) - u[static_cast<std::size_t>(i) + 1] - v[static_cast<std::size_t>(j) + 1] <= tie_eps)
                adj[static_cast<std::size_t>(i)].push_back(j);
    for (int i = 0; i < n; ++i)
        adj[static_cast<std::size_t>(i)].push_back(row_to_col[static_cast<std::size_t>(i)]); // keep the found optimum reachable
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }

    std::vector<int> sigma(static_cast<std::size_t>(n), -1);
    std::vector<char> col_fixed(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        bool fixed = false;
        for (int j : adj[static_cast<std::size_t>(i)]) {
            if (col_fixed[static_cast<std::size_t>(j)]) continue;
            col_fixed[static_cast<std::size_t>(j)] = 1;
            if (detail::matchable(i + 1, n, adj, col_fixed)) {
                sigma[static_cast<std::size_t>(i)] = j;
                fixed = true;
                break;
            }
            col_fixed[static_cast<std::size_t>(j)] = 0;
        }
        if (!fixed) { // numerical fallback: keep the LAP optimum for this row
            const int j = row_to_col[static_cast<std::size_t>(i)];
            sigma[static_cast<std::size_t>(i)] = j;
            col_fixed[static_cast<std::size_t>(j)] = 1;
        }
    }
    return Permutation(std::move(sigma));
}

/// Nearest permutation matrix in Frobenius norm, i.e. the max-trace linear
/// assignment on M. Hungarian/augmenting-path, O(p^3), deterministic ties.
inline Permutation round_to_permutation(const DoublyStochastic& M) {
    return max_trace_assignment(M.M);
}

/// Largest singular value by power iteration on M^T M, deterministic
/// (normalized all-ones start, basis-vector restarts if the iterate collapses).
inline double spectral_norm(const Eigen::MatrixXd& M, double tol = 1e-9) {
    if (M.rows() == 0 || M.cols() == 0) throw parameter_error("spectral norm of an empty matrix");
    if (!M.allFinite()) throw parameter_error("spectral norm input must be finite");
    const Eigen::MatrixXd B = M.transpose() * M;
    const int p = static_cast<int>(B.rows());
    const double bmax = B.cwiseAbs().maxCoeff();
    if (bmax == 0.0) return 0.0;

    Eigen::VectorXd x = Eigen::VectorXd::Ones(p) / std::sqrt(static_cast<double>(p));
    double lambda = 0.0;
    int restart = 0;
    const int max_iter = 20000;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd y = B * x;
        const double ny = y.norm();
        if (ny <= 1e-14 * bmax) {
            // start vector fell in the kernel; restart from the next basis vector
            if (restart >= p) return 0.0;
            x = Eigen::VectorXd::Unit(p, restart++);
            lambda = 0.0;
            continue;
        }
        x = y / ny;
        const double next = x.dot(B * x);
        if (std::abs(next - lambda) <= 2.0 * tol * std::max(next, 1e-300)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

} // namespace glag

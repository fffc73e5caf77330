#pragma once

#include <cmath>
#include <utility>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/permutation.hpp"

namespace glag {

/// Undirected weighted graph stored as a dense symmetric adjacency matrix.
/// Zero diagonal, all weights >= 0, a zero entry means "no edge".
struct Graph {
    Eigen::MatrixXd W;

    int p() const noexcept { return static_cast<int>(W.rows()); }

    int edge_count() const {
        int e = 0;
        for (int j = 0; j < p(); ++j)
            for (int i = 0; i < j; ++i)
                if (W(i, j) != 0.0) ++e;
        return e;
    }

    static Graph empty(int p) {
        if (p <= 0) throw parameter_error("graph must have at least one node");
        return Graph{Eigen::MatrixXd::Zero(p, p)};
    }

    /// Builds a graph from an adjacency matrix, checking all invariants.
    static Graph from_weights(Eigen::MatrixXd W);

    /// 0/1 copy of the support (same edges, unit weights).
    Graph support() const {
        Graph g{(W.array() != 0.0).cast<double>().matrix()};
        return g;
    }
};

/// Throws parameter_error unless g satisfies every Graph invariant.
inline void validate_graph(const Graph& g) {
    const int p = g.p();
    if (p <= 0 || g.W.cols() != p) throw parameter_error("adjacency matrix must be square and nonempty");
    if (!g.W.allFinite()) throw parameter_error("adjacency matrix must be finite");
    for (int i = 0; i < p; ++i) {
        if (g.W(i, i) != 0.0) throw parameter_error("graph must have a zero diagonal (no self-loops)");
        for (int j = i + 1; j < p; ++j) {
            if (g.W(i, j) != g.W(j, i)) throw parameter_error("adjacency matrix must be symmetric");
            if (g.W(i, j) < 0.0) throw parameter_error("edge weights must be nonnegative");
        }
    }
}

inline Graph Graph::from_weights(Eigen::MatrixXd W) {
    Graph g{std::move(W)};
    validate_graph(g);
    return g;
}

/// Relabels nodes: node k of g becomes node perm(k). Equivalent to P^T W P
/// for the matrix view P of perm.
inline Graph permute_graph(const Graph& g, const Permutation& perm) {
    if (perm.size() != g.p()) throw parameter_error("permutation size does not match graph size");
    const int p = g.p();
    Eigen::MatrixXd out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            out(perm(i), perm(j)) = g.W(i, j);
    return Graph{std::move(out)};
}

} // namespace glag

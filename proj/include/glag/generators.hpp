#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "glag/error.hpp"
#include "glag/graph.hpp"
#include "glag/rng.hpp"

namespace glag {

/// Distribution of edge weights. Samples are strictly positive: Gaussian draws
/// are rejected and redrawn while nonpositive.
struct WeightModel {
    enum class Kind { constant, uniform, gaussian };

    Kind kind = Kind::constant;
    double a = 1.0; // constant value / uniform lo / gaussian mean
    double b = 0.0; // uniform hi / gaussian stddev

    static WeightModel constant(double value = 1.0) {
        if (!(value > 0.0)) throw parameter_error("constant weight must be positive");
        return {Kind::constant, value, 0.0};
    }
    static WeightModel uniform(double lo, double hi) {
        if (!(lo > 0.0) || !(hi >= lo)) throw parameter_error("uniform weight range must satisfy 0 < lo <= hi");
        return {Kind::uniform, lo, hi};
    }
    static WeightModel gaussian(double mean, double stddev) {
        if (!(stddev >= 0.0)) throw parameter_error("gaussian stddev must be nonnegative");
        if (!(mean > 0.0) && stddev == 0.0) throw parameter_error("degenerate gaussian weight model cannot be positive");
        return {Kind::gaussian, mean, stddev};
    }

    double sample(std::mt19937_64& rng) const {
        switch (kind) {
            case Kind::constant:
                return a;
            case Kind::uniform: {
                std::uniform_real_distribution<double> d(a, b);
                return d(rng);
            }
            case Kind::gaussian: {
                std::normal_distribution<double> d(a, b);
                for (int tries = 0; tries < 100000; ++tries) {
                    const double w = d(rng);
                    if (w > 0.0) return w;
                }
                throw parameter_error("gaussian weight model failed to produce a positive draw");
            }
        }
        throw parameter_error("unknown weight model");
    }
};

/// Spurious-edge corruption: N new edges with weights from weight_model.
struct NoiseSpec {
    int N = 0;
    WeightModel weight_model = WeightModel::constant(1.0);
};

namespace detail {

/// All unordered pairs (i<j) of 0..p-1 in lexicographic order.
inline std::vector<std::pair<int, int>> all_pairs(int p) {
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            pairs.emplace_back(i, j);
    return pairs;
}

/// Partial Fisher-Yates: leaves a uniform m-subset in the first m slots.
template <typename T>
void draw_prefix(std::vector<T>& items, int m, std::mt19937_64& rng) {
    const int n = static_cast<int>(items.size());
    for (int k = 0; k < m; ++k) {
        std::uniform_int_distribution<int> d(k, n - 1);
        std::swap(items[static_cast<std::size_t>(k)], items[static_cast<std::size_t>(d(rng))]);
    }
}

/// Target degrees for the BTER generator: iid draws from the geometric law
/// Prob(degree = t) proportional to exp(-mu*t), truncated to {1..p-1}.
inline std::vector<int> sample_geometric_degrees(int p, double mu, std::mt19937_64& rng) {
    const int tmax = p - 1;
    std::vector<double> cdf(static_cast<std::size_t>(tmax));
    double acc = 0.0;
    for (int t = 1; t <= tmax; ++t) {
        acc += std::exp(-mu * t);
        cdf[static_cast<std::size_t>(t - 1)] = acc;
    }
    std::uniform_real_distribution<double> unif(0.0, acc);
    std::vector<int> deg(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        const double u = unif(rng);
        int lo = 0, hi = tmax - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (cdf[static_cast<std::size_t>(mid)] < u) lo = mid + 1; else hi = mid;
        }
        deg[static_cast<std::size_t>(i)] = lo + 1;
    }
    return deg;
}

/// Mean of the truncated geometric law above, by direct summation.
inline double truncated_geometric_mean(int p, double mu) {
    double num = 0.0, den = 0.0;
    for (int t = 1; t <= p - 1; ++t) {
        const double w = std::exp(-mu * t);
        num += t * w;
        den += w;
    }
    return num / den;
}

} // namespace detail

/// G(n,m) Erdos-Renyi graph: exactly m unweighted edges chosen uniformly
/// among all p(p-1)/2 pairs. Deterministic given seed.
inline Graph gen_erdos_renyi(int p, int m, std::uint64_t seed) {
    if (p <= 0) throw parameter_error("node count must be positive");
    const long long max_edges = static_cast<long long>(p) * (p - 1) / 2;
    if (m < 0 || m > max_edges) throw parameter_error("edge count out of range for G(n,m)");
    auto rng = make_rng(seed);
    auto pairs = detail::all_pairs(p);
    detail::draw_prefix(pairs, m, rng);
    Graph g = Graph::empty(p);
    for (int k = 0; k < m; ++k) {
        const auto [i, j] = pairs[static_cast<std::size_t>(k)];
        g.W(i, j) = g.W(j, i) = 1.0;
    }
    return g;
}

/// Preferential attachment: clique on m_attach+1 seed nodes, then every new
/// node attaches to m_attach distinct existing nodes with probability
/// proportional to current degree.
inline Graph gen_barabasi_albert(int p, int m_attach, std::uint64_t seed) {
    if (p <= 0) throw parameter_error("node count must be positive");
    if (m_attach < 1 || m_attach >= p) throw parameter_error("edges per new node must satisfy 1 <= m_attach < p");
    auto rng = make_rng(seed);
    Graph g = Graph::empty(p);
    std::vector<int> urn; // one entry per edge endpoint, so draws are degree-proportional
    const int seed_nodes = m_attach + 1;
    for (int i = 0; i < seed_nodes; ++i)
        for (int j = i + 1; j < seed_nodes; ++j) {
            g.W(i, j) = g.W(j, i) = 1.0;
            urn.push_back(i);
            urn.push_back(j);
        }
    std::vector<char> taken(static_cast<std::size_t>(p), 0);
    for (int v = seed_nodes; v < p; ++v) {
        std::vector<int> targets;
        targets.reserve(static_cast<std::size_t>(m_attach));
        std::uniform_int_distribution<std::size_t> d(0, urn.size() - 1);
        while (static_cast<int>(targets.size()) < m_attach) {
            const int cand = urn[d(rng)];
            if (!taken[static_cast<std::size_t>(cand)]) {
                taken[static_cast<std::size_t>(cand)] = 1;
                targets.push_back(cand);
            }
        }
        for (int t : targets) {
            taken[static_cast<std::size_t>(t)] = 0;
            g.W(v, t) = g.W(t, v) = 1.0;
            urn.push_back(v);
            urn.push_back(t);
        }
    }
    return g;
}

/// Simplified two-phase BTER graph for a truncated geometric degree law:
/// clique blocks of similar-degree nodes, then a Chung-Lu pass on the
/// leftover (excess) degrees. Deterministic given seed.
inline Graph gen_bter_geometric(int p, double mu, std::uint64_t seed) {
    if (p <= 0) throw parameter_error("node count must be positive");
    if (!(mu > 0.0)) throw parameter_error("geometric rate mu must be positive");
    auto rng = make_rng(seed);
    Graph g = Graph::empty(p);
    if (p == 1) return g;

    const std::vector<int> target = detail::sample_geometric_degrees(p, mu, rng);
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return target[static_cast<std::size_t>(a)] < target[static_cast<std::size_t>(b)]; });

    // Phase 1: walk nodes in increasing target degree; a block led by a node of
    // degree d takes the next d+1 nodes and becomes a clique, which meets the
    // leader's degree exactly and never overshoots the others'.
    std::vector<int> excess(static_cast<std::size_t>(p), 0);
    std::size_t pos = 0;
    while (pos < order.size()) {
        const int d = target[static_cast<std::size_t>(order[pos])];
        const std::size_t bs = std::min<std::size_t>(static_cast<std::size_t>(d) + 1, order.size() - pos);
        for (std::size_t x = pos; x < pos + bs; ++x)
            for (std::size_t y = x + 1; y < pos + bs; ++y) {
                const int i = order[x], j = order[y];
                g.W(i, j) = g.W(j, i) = 1.0;
            }
        for (std::size_t x = pos; x < pos + bs; ++x) {
            const int i = order[x];
            excess[static_cast<std::size_t>(i)] = std::max(0, target[static_cast<std::size_t>(i)] - static_cast<int>(bs) + 1);
        }
        pos += bs;
    }

    // Phase 2: Chung-Lu on excess degrees; endpoints drawn proportionally to excess.
    long long total_excess = 0;
    std::vector<double> cum(static_cast<std::size_t>(p));
    double acc = 0.0;
    for (int i = 0; i < p; ++i) {
        total_excess += excess[static_cast<std::size_t>(i)];
        acc += excess[static_cast<std::size_t>(i)];
        cum[static_cast<std::size_t>(i)] = acc;
    }
    const long long want = total_excess / 2;
    if (want > 0 && acc > 0.0) {
        std::uniform_real_distribution<double> unif(0.0, acc);
        auto draw = [&]() {
            const double u = unif(rng);
            return static_cast<int>(std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
        };
        long long placed = 0, attempts = 0;
        const long long max_attempts = 50 * want + 100;
        while (placed < want && attempts < max_attempts) {
            ++attempts;
            const int i = draw(), j = draw();
            if (i == j || g.W(i, j) != 0.0) continue;
            g.W(i, j) = g.W(j, i) = 1.0;
            ++placed;
        }
    }
    return g;
}

/// Redraws the weight of every existing edge from `model` (support unchanged).
inline Graph assign_weights(const Graph& g, const WeightModel& model, std::uint64_t seed) {
    auto rng = make_rng(seed);
    Graph out = g;
    const int p = g.p();
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (out.W(i, j) != 0.0) {
                const double w = model.sample(rng);
                out.W(i, j) = out.W(j, i) = w;
            }
    return out;
}

/// Adds exactly spec.N new edges uniformly among absent pairs; existing
/// entries are untouched.
inline Graph add_noise(const Graph& g, const NoiseSpec& spec, std::uint64_t seed) {
    if (spec.N < 0) throw parameter_error("noise edge count must be nonnegative");
    auto rng = make_rng(seed);
    const int p = g.p();
    std::vector<std::pair<int, int>> absent;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (g.W(i, j) == 0.0) absent.emplace_back(i, j);
    if (spec.N > static_cast<int>(absent.size()))
        throw parameter_error("noise edge count exceeds the number of absent edges");
    detail::draw_prefix(absent, spec.N, rng);
    Graph out = g;
    for (int k = 0; k < spec.N; ++k) {
        const auto [i, j] = absent[static_cast<std::size_t>(k)];
        const double w = spec.weight_model.sample(rng);
        out.W(i, j) = out.W(j, i) = w;
    }
    return out;
}

} // namespace glag

#include <catch2/catch.hpp>

#include <cmath>
#include <set>

#include "glag/generators.hpp"

using namespace glag;

TEST_CASE("erdos-renyi edge counts") {
    REQUIRE(gen_erdos_renyi(100, 300, 7).edge_count() == 300);
    REQUIRE(gen_erdos_renyi(5, 10, 7).edge_count() == 10);  // K5, all edges forced
    REQUIRE(gen_erdos_renyi(4, 0, 7).edge_count() == 0);
    REQUIRE_THROWS_AS(gen_erdos_renyi(4, 7, 0), parameter_error);
    REQUIRE_THROWS_AS(gen_erdos_renyi(4, -1, 0), parameter_error);
}

TEST_CASE("generators are deterministic in the seed") {
    REQUIRE(gen_erdos_renyi(60, 150, 42).W == gen_erdos_renyi(60, 150, 42).W);
    REQUIRE(gen_barabasi_albert(60, 2, 42).W == gen_barabasi_albert(60, 2, 42).W);
    REQUIRE(gen_bter_geometric(60, 0.5, 42).W == gen_bter_geometric(60, 0.5, 42).W);
    REQUIRE(gen_erdos_renyi(60, 150, 42).W != gen_erdos_renyi(60, 150, 43).W);
}

TEST_CASE("generated graphs satisfy all invariants") {
    for (std::uint64_t s : {1, 2, 3}) {
        REQUIRE_NOTHROW(validate_graph(gen_erdos_renyi(50, 120, s)));
        REQUIRE_NOTHROW(validate_graph(gen_barabasi_albert(50, 3, s)));
        REQUIRE_NOTHROW(validate_graph(gen_bter_geometric(50, 0.4, s)));
        REQUIRE_NOTHROW(validate_graph(add_noise(gen_erdos_renyi(50, 120, s),
                                                 NoiseSpec{9, WeightModel::gaussian(1.0, 0.4)}, s)));
    }
}

TEST_CASE("barabasi-albert attachment arithmetic") {
    // clique on m+1 nodes plus m edges per later node
    REQUIRE(gen_barabasi_albert(100, 3, 5).edge_count() == 6 + 96 * 3);
    REQUIRE(gen_barabasi_albert(2, 1, 5).edge_count() == 1); // single edge
    REQUIRE(gen_barabasi_albert(50, 1, 5).edge_count() == 1 + 48);
    REQUIRE_THROWS_AS(gen_barabasi_albert(5, 0, 0), parameter_error);
    REQUIRE_THROWS_AS(gen_barabasi_albert(5, 5, 0), parameter_error);
}

TEST_CASE("bter approximates the truncated geometric degree law") {
    SECTION("mean degree within 20% of the analytic mean") {
        for (auto [p, mu] : std::vector<std::pair<int, double>>{{150, 0.3}, {100, 0.5}}) {
            const Graph g = gen_bter_geometric(p, mu, 77);
            const double mean_deg = 2.0 * g.edge_count() / p;
            const double target = detail::truncated_geometric_mean(p, mu);
            REQUIRE(mean_deg == Approx(target).margin(0.2 * target));
        }
    }
    SECTION("extreme rate collapses the distribution") {
        const Graph g = gen_bter_geometric(10, 10.0, 3);
        REQUIRE(g.edge_count() <= 10); // nearly all target degrees are 1
    }
    SECTION("degree histogram passes a chi-square sanity bound") {
        const int p = 100;
        const double mu = 0.5;
        const Graph g = gen_bter_geometric(p, mu, 9);
        // bins {1,2,3,4,5+} against the analytic law, loose sanity threshold
        double norm = 0.0;
        std::vector<double> prob(5, 0.0);
        for (int t = 1; t <= p - 1; ++t) norm += std::exp(-mu * t);
        for (int t = 1; t <= p - 1; ++t) prob[static_cast<std::size_t>(std::min(t, 5)) - 1] += std::exp(-mu * t) / norm;
        std::vector<double> observed(5, 0.0);
        for (int i = 0; i < p; ++i) {
            int d = 0;
            for (int j = 0; j < p; ++j)
                if (g.W(i, j) != 0.0) ++d;
            observed[static_cast<std::size_t>(std::clamp(d, 1, 5)) - 1] += 1.0;
        }
        double stat = 0.0;
        for (std::size_t b = 0; b < 5; ++b) {
            const double expect = p * prob[b];
            if (expect > 0.0) stat += (observed[b] - expect) * (observed[b] - expect) / expect;
        }
        REQUIRE(stat < 100.0);
    }
    REQUIRE_THROWS_AS(gen_bter_geometric(10, 0.0, 0), parameter_error);
    REQUIRE_THROWS_AS(gen_bter_geometric(10, -1.0, 0), parameter_error);
}

TEST_CASE("assign_weights keeps the support and follows the model") {
    const Graph k3 = gen_erdos_renyi(3, 3, 0);

    SECTION("constant model is the identity on unweighted graphs") {
        REQUIRE(assign_weights(k3, WeightModel::constant(1.0), 5).W == k3.W);
    }
    SECTION("gaussian weights are positive with sample mean near the target") {
        const Graph g = gen_erdos_renyi(60, 900, 1);
        const Graph w = assign_weights(g, WeightModel::gaussian(1.0, 0.4), 2);
        REQUIRE(w.support().W == g.support().W);
        double sum = 0.0;
        int count = 0;
        for (int i = 0; i < w.p(); ++i)
            for (int j = i + 1; j < w.p(); ++j)
                if (w.W(i, j) != 0.0) {
                    REQUIRE(w.W(i, j) > 0.0);
                    sum += w.W(i, j);
                    ++count;
                }
        REQUIRE(count == 900);
        REQUIRE(sum / count == Approx(1.0).margin(0.05));
    }
    SECTION("uniform weights stay in range") {
        const Graph w = assign_weights(gen_erdos_renyi(30, 100, 3), WeightModel::uniform(1.0, 2.0), 4);
        for (int i = 0; i < w.p(); ++i)
            for (int j = i + 1; j < w.p(); ++j)
                if (w.W(i, j) != 0.0) {
                    REQUIRE(w.W(i, j) >= 1.0);
                    REQUIRE(w.W(i, j) <= 2.0);
                }
    }
    SECTION("invalid models are rejected") {
        REQUIRE_THROWS_AS(WeightModel::constant(0.0), parameter_error);
        REQUIRE_THROWS_AS(WeightModel::uniform(0.0, 1.0), parameter_error);
        REQUIRE_THROWS_AS(WeightModel::uniform(2.0, 1.0), parameter_error);
        REQUIRE_THROWS_AS(WeightModel::gaussian(-1.0, 0.0), parameter_error);
    }
}

TEST_CASE("add_noise adds exactly N edges and keeps originals bit-identical") {
    const Graph g = assign_weights(gen_erdos_renyi(40, 150, 11), WeightModel::uniform(0.5, 1.5), 12);

    SECTION("zero noise is the identity") {
        REQUIRE(add_noise(g, NoiseSpec{0, WeightModel::constant(1.0)}, 13).W == g.W);
    }
    SECTION("N=10 grows the support by exactly 10, originals untouched") {
        const Graph noisy = add_noise(g, NoiseSpec{10, WeightModel::uniform(0.5, 1.5)}, 13);
        REQUIRE(noisy.edge_count() == 160);
        int added = 0;
        for (int i = 0; i < g.p(); ++i)
            for (int j = i + 1; j < g.p(); ++j) {
                if (g.W(i, j) != 0.0) REQUIRE(noisy.W(i, j) == g.W(i, j));
                else if (noisy.W(i, j) != 0.0) ++added;
            }
        REQUIRE(added == 10);
    }
    SECTION("complete graphs reject any noise") {
        const Graph k5 = gen_erdos_renyi(5, 10, 0);
        REQUIRE_THROWS_AS(add_noise(k5, NoiseSpec{1, WeightModel::constant(1.0)}, 1), parameter_error);
    }
}

// Acceptance suite: one checkable criterion per function, each printing a
// single PASS/FAIL line. Run with a list of criterion numbers (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "glag/baselines.hpp"
#include "glag/generators.hpp"
#include "glag/harness.hpp"
#include "glag/inference.hpp"
#include "glag/matcher.hpp"
#include "glag/polytope.hpp"

using namespace glag;

namespace {

Eigen::MatrixXd random_matrix(int p, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXd X(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) X(i, j) = d(rng);
    return X;
}

Eigen::MatrixXd birkhoff_probe(int p, std::uint64_t seed) {
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> d(0.1, 1.0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    double total = 0.0;
    for (int t = 0; t < 6; ++t) {
        const double w = d(rng);
        M += w * Permutation::random(p, mix_seed(seed, static_cast<std::uint64_t>(t) + 100)).matrix();
        total += w;
    }
    return M / total;
}

Permutation brute_nearest_permutation(const Eigen::MatrixXd& M) {
    const int p = static_cast<int>(M.rows());
    std::vector<int> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), 0);
    double best = -1e300;
    std::vector<int> best_idx;
    do {
        double trace = 0.0;
        for (int i = 0; i < p; ++i) trace += M(i, idx[static_cast<std::size_t>(i)]);
        if (trace > best + 1e-12) {
            best = trace;
            best_idx = idx;
        }
    } while (std::next_permutation(idx.begin(), idx.end()));
    return Permutation(best_idx);
}

double brute_group_min(const Graph& A, const Graph& B) {
    const int p = A.p();
    std::vector<int> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), 0);
    double best = 1e300;
    do {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(p, p);
        for (int i = 0; i < p; ++i) P(i, idx[static_cast<std::size_t>(i)]) = 1.0;
        best = std::min(best, group_objective(A, B, P));
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

// --------------------------------------------------------------------------

/// Relaxed optimum on isomorphic unweighted pairs: objective 2*sqrt(2)*e
/// within relative 1e-3 and ||A P - P B||_F <= 1e-3 ||A||_F.
bool criterion_1(std::string& detail) {
    int checked = 0;
    double worst_rel = 0.0, worst_gap = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int p = (k % 3 == 0) ? 10 : (k % 3 == 1 ? 20 : 30);
        const int e = 3 * p;
        const Graph A = gen_erdos_renyi(p, e, 500 + static_cast<std::uint64_t>(k));
        const Graph B = permute_graph(A, Permutation::random(p, 900 + static_cast<std::uint64_t>(k)));
        GlagConfig cfg;
        cfg.c = 0.25;
        cfg.max_iter = 20000;
        const MatchResult r = glag_match(A, B, cfg);
        const double target = 2.0 * std::sqrt(2.0) * e;
        const double rel = std::abs(r.objective - target) / target;
        const double gap = (A.W * r.P_relaxed.M - r.P_relaxed.M * B.W).norm() / A.W.norm();
        worst_rel = std::max(worst_rel, rel);
        worst_gap = std::max(worst_gap, gap);
        ++checked;
        if (rel > 1e-3 || gap > 1e-3) {
            detail = "instance " + std::to_string(k) + " rel=" + std::to_string(rel) +
                     " gap=" + std::to_string(gap);
            return false;
        }
    }
    std::ostringstream ss;
    ss << checked << " pairs, worst objective rel err " << worst_rel << ", worst |AP-PB|/|A| " << worst_gap;
    detail = ss.str();
    return true;
}

/// Exact recovery at zero noise for all three generators, p=50, 20 seeds.
bool criterion_2(std::string& detail) {
    int nonzero = 0;
    for (GeneratorKind gen : {GeneratorKind::erdos_renyi, GeneratorKind::barabasi_albert, GeneratorKind::bter}) {
        SweepSpec spec;
        spec.generator = gen;
        spec.p = 50;
        spec.er_edges = 150;
        spec.ba_attach = 3;
        spec.bter_mu = 0.5;
        spec.noise_levels = {0};
        spec.trials = 20;
        spec.matchers = {{MatcherKind::glag, {}}};
        spec.seed_base = 2024;
        spec.jobs = 2;
        const SweepResult r = run_noise_sweep(spec);
        for (const auto& row : r.rows)
            if (row.matching_error != 0.0) ++nonzero;
    }
    detail = nonzero == 0 ? "60/60 runs recovered exactly" : std::to_string(nonzero) + " runs missed";
    return nonzero == 0;
}

/// Exhaustive oracles at p <= 7: (a) rounding equals the brute-force nearest
/// permutation; (b) the relaxed objective never exceeds the permutation
/// minimum (up to 1e-8 relative float slack).
bool criterion_3(std::string& detail) {
    for (int k = 0; k < 50; ++k) {
        const int p = 4 + (k % 4);
        const Eigen::MatrixXd M = (k % 2 == 0)
                                      ? project_doubly_stochastic(random_matrix(p, 3000 + static_cast<std::uint64_t>(k))).M
                                      : birkhoff_probe(p, 3000 + static_cast<std::uint64_t>(k));
        if (!(round_to_permutation(DoublyStochastic{M}) == brute_nearest_permutation(M))) {
            detail = "rounding mismatch on instance " + std::to_string(k);
            return false;
        }
    }
    for (int k = 0; k < 50; ++k) {
        const int p = 4 + (k % 4);
        const int maxe = p * (p - 1) / 2;
        Graph A = gen_erdos_renyi(p, 1 + (k * 7) % maxe, 4000 + static_cast<std::uint64_t>(k));
        Graph B = gen_erdos_renyi(p, 1 + (k * 5) % maxe, 5000 + static_cast<std::uint64_t>(k));
        A = assign_weights(A, WeightModel::uniform(0.5, 1.5), 6000 + static_cast<std::uint64_t>(k));
        B = assign_weights(B, WeightModel::uniform(0.5, 1.5), 7000 + static_cast<std::uint64_t>(k));
        GlagConfig cfg;
        cfg.max_iter = 4000;
        const MatchResult r = glag_match(A, B, cfg);
        const double bound = brute_group_min(A, B);
        if (r.objective > bound * (1.0 + 1e-8)) {
            detail = "relaxation above the permutation minimum on instance " + std::to_string(k);
            return false;
        }
    }
    detail = "rounding matches 50/50; relaxation bound holds 50/50";
    return true;
}

/// Projection: feasibility within 1e-8 and the variational-inequality
/// certificate against 100 probes, plus the analytic 2x2 case.
bool criterion_4(std::string& detail) {
    const double tol = 1e-9;
    Eigen::MatrixXd X22(2, 2);
    X22 << 2.0, 0.0, 0.0, 2.0;
    if ((project_doubly_stochastic(X22, tol).M - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() > 1e-8) {
        detail = "2x2 analytic case failed";
        return false;
    }
    double worst_feas = 0.0, worst_vi = -1e300;
    int probes = 0;
    for (int k = 0; k < 20; ++k) {
        const int p = 4 + (k % 10);
        const Eigen::MatrixXd X = random_matrix(p, 8000 + static_cast<std::uint64_t>(k));
        const Eigen::MatrixXd M = project_doubly_stochastic(X, tol).M;
        const double feas = std::max(
            {(M.rowwise().sum().array() - 1.0).abs().maxCoeff(),
             (M.colwise().sum().array() - 1.0).abs().maxCoeff(), std::max(0.0, -M.minCoeff())});
        worst_feas = std::max(worst_feas, feas);
        if (feas > 1e-8) {
            detail = "feasibility " + std::to_string(feas);
            return false;
        }
        for (int q = 0; q < 5; ++q) {
            const Eigen::MatrixXd Q = birkhoff_probe(p, 9000 + 100 * static_cast<std::uint64_t>(k) + q);
            const double vi = ((X - M).array() * (Q - M).array()).sum();
            worst_vi = std::max(worst_vi, vi);
            ++probes;
            if (vi > 10.0 * tol * p) {
                detail = "variational inequality violated: " + std::to_string(vi);
                return false;
            }
        }
    }
    std::ostringstream ss;
    ss << probes << " probes, worst feasibility " << worst_feas << ", worst VI inner product " << worst_vi;
    detail = ss.str();
    return true;
}

/// Robustness ordering on ER p=50 e=150: glag <= qcp at every level and
/// glag <= faq at the two lowest levels (means over 20 trials).
bool criterion_5(std::string& detail) {
    SweepSpec spec;
    spec.generator = GeneratorKind::erdos_renyi;
    spec.p = 50;
    spec.er_edges = 150;
    spec.noise_levels = {5, 10, 15};
    spec.trials = 20;
    spec.matchers = {{MatcherKind::glag, {}}, {MatcherKind::qcp, {}}, {MatcherKind::faq, {}}};
    spec.seed_base = 0;
    spec.jobs = 2;
    const SweepResult r = run_noise_sweep(spec);

    std::ostringstream ss;
    bool ok = true;
    for (int n : spec.noise_levels) {
        const double g = r.aggregates.at({"glag", n}).mean_error;
        const double q = r.aggregates.at({"qcp", n}).mean_error;
        const double f = r.aggregates.at({"faq", n}).mean_error;
        ss << "N=" << n << " glag=" << g << " qcp=" << q << " faq=" << f << "; ";
        if (g > q) ok = false;
        if ((n == 5 || n == 10) && g > f) ok = false;
    }
    detail = ss.str();
    return ok;
}

/// Multimodal advantage with N(1,0.4) vs N(4,1) weights at the two lowest
/// nonzero noise levels: glag strictly below both baselines.
bool criterion_6(std::string& detail) {
    SweepSpec spec;
    spec.generator = GeneratorKind::erdos_renyi;
    spec.p = 50;
    spec.er_edges = 150;
    spec.weights_a = WeightModel::gaussian(1.0, 0.4);
    spec.weights_b = WeightModel::gaussian(4.0, 1.0);
    spec.noise_levels = {5, 10};
    spec.trials = 20;
    spec.matchers = {{MatcherKind::glag, {}}, {MatcherKind::qcp, {}}, {MatcherKind::faq, {}}};
    spec.seed_base = 0;
    spec.jobs = 2;
    const SweepResult r = run_multimodal_sweep(spec);

    std::ostringstream ss;
    bool ok = true;
    for (int n : spec.noise_levels) {
        const double g = r.aggregates.at({"glag", n}).mean_error;
        const double q = r.aggregates.at({"qcp", n}).mean_error;
        const double f = r.aggregates.at({"faq", n}).mean_error;
        ss << "N=" << n << " glag=" << g << " qcp=" << q << " faq=" << f << "; ";
        if (!(g < q && g < f)) ok = false;
    }
    detail = ss.str();
    return ok;
}

/// Graphical lasso on 20 random p=15 problems: KKT residual <= 1e-4 via an
/// independent inverse, plus the lambda=0 and large-lambda closed forms.
bool criterion_7(std::string& detail) {
    double worst_kkt = 0.0, worst_inv = 0.0, worst_diag = 0.0;
    for (int k = 0; k < 20; ++k) {
        const int p = 15;
        const PrecisionEstimate gt = make_sparse_precision(p, 0.2, 600 + static_cast<std::uint64_t>(k));
        const DataMatrix data = gen_gmrf_data(gt, 40 * p, 700 + static_cast<std::uint64_t>(k));
        const CovarianceEstimate cov = empirical_covariance(data);

        const double lambda = 0.08;
        const PrecisionEstimate est = graphical_lasso(cov, lambda, 1e-5);
        const Eigen::MatrixXd R = cov.S - est.Theta.inverse();
        double res = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                const double t = est.Theta(i, j);
                res = std::max(res, std::abs(t) > 1e-10
                                        ? std::abs(R(i, j) + lambda * (t > 0 ? 1.0 : -1.0))
                                        : std::max(0.0, std::abs(R(i, j)) - lambda));
            }
        worst_kkt = std::max(worst_kkt, res);
        if (res > 1e-4) {
            detail = "KKT residual " + std::to_string(res) + " on instance " + std::to_string(k);
            return false;
        }

        const PrecisionEstimate unpen = graphical_lasso(cov, 0.0, 1e-8);
        const Eigen::MatrixXd inv =
            Eigen::LLT<Eigen::MatrixXd>(cov.S).solve(Eigen::MatrixXd::Identity(p, p));
        const double inv_err = (unpen.Theta - inv).cwiseAbs().maxCoeff();
        worst_inv = std::max(worst_inv, inv_err);
        if (inv_err > 1e-6) {
            detail = "lambda=0 inverse error " + std::to_string(inv_err);
            return false;
        }

        double offmax = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                if (i != j) offmax = std::max(offmax, std::abs(cov.S(i, j)));
        const double big = 1.5 * offmax;
        const PrecisionEstimate diag_est = graphical_lasso(cov, big, 1e-9);
        double diag_err = 0.0;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                diag_err = std::max(diag_err, std::abs(diag_est.Theta(i, j) -
                                                       (i == j ? 1.0 / (cov.S(i, i) + big) : 0.0)));
        worst_diag = std::max(worst_diag, diag_err);
        if (diag_err > 1e-6) {
            detail = "large-lambda closed form error " + std::to_string(diag_err);
            return false;
        }
    }
    std::ostringstream ss;
    ss << "20 instances; worst KKT " << worst_kkt << ", worst inverse err " << worst_inv
       << ", worst diagonal err " << worst_diag;
    detail = ss.str();
    return true;
}

/// Synthetic test-retest: joint inference on half data beats the single-half
/// graphical lasso in support F1 on at least 80% of 20 seeds.
bool criterion_8(std::string& detail) {
    InferenceBenchSpec spec;
    spec.p = 20;
    spec.k = 4000;
    spec.sparsity = 0.15;
    spec.lambda = 0.10; // sparse enough for the matching step to lock on
    spec.trials = 20;
    spec.seed = 90;
    spec.jobs = 2;
    const InferenceBenchResult r = run_inference_bench(spec);

    std::vector<double> joint(20, 0.0), single(20, 0.0);
    for (const auto& row : r.rows) {
        if (row.method == "joint_half") joint[static_cast<std::size_t>(row.trial)] = row.support_f1;
        if (row.method == "single_half") single[static_cast<std::size_t>(row.trial)] = row.support_f1;
    }
    int wins = 0;
    double mean_joint = 0.0, mean_single = 0.0;
    for (int t = 0; t < 20; ++t) {
        if (joint[static_cast<std::size_t>(t)] >= single[static_cast<std::size_t>(t)]) ++wins;
        mean_joint += joint[static_cast<std::size_t>(t)] / 20.0;
        mean_single += single[static_cast<std::size_t>(t)] / 20.0;
    }
    std::ostringstream ss;
    ss << wins << "/20 seeds; mean joint F1 " << mean_joint << " vs single " << mean_single;
    detail = ss.str();
    return wins >= 16;
}

/// Byte-identical CSV on rerun with an identical spec, serial and parallel.
bool criterion_9(std::string& detail) {
    SweepSpec spec;
    spec.generator = GeneratorKind::erdos_renyi;
    spec.p = 20;
    spec.er_edges = 50;
    spec.noise_levels = {0, 3};
    spec.trials = 3;
    spec.matchers = {{MatcherKind::glag, {}}, {MatcherKind::faq, {}}};
    spec.seed_base = 77;

    const auto dir = std::filesystem::temp_directory_path() /
                     ("glag_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    write_sweep_csv(run_noise_sweep(spec), (dir / "a.csv").string());
    write_sweep_csv(run_noise_sweep(spec), (dir / "b.csv").string());
    SweepSpec par = spec;
    par.jobs = 2;
    write_sweep_csv(run_noise_sweep(par), (dir / "c.csv").string());
    const bool ok = slurp(dir / "a.csv") == slurp(dir / "b.csv") &&
                    slurp(dir / "a.csv") == slurp(dir / "c.csv");
    std::filesystem::remove_all(dir);
    detail = ok ? "serial rerun and jobs=2 rerun both byte-identical" : "reruns differ";
    return ok;
}

struct Criterion {
    int number;
    const char* name;
    bool (*fn)(std::string&);
};

const Criterion criteria[] = {
    {1, "relaxed optimum on isomorphic pairs", criterion_1},
    {2, "zero-noise exact recovery", criterion_2},
    {3, "brute-force oracle equivalence", criterion_3},
    {4, "polytope projection correctness", criterion_4},
    {5, "robustness ordering vs baselines", criterion_5},
    {6, "multimodal advantage", criterion_6},
    {7, "graphical lasso KKT and closed forms", criterion_7},
    {8, "alignment-free inference advantage", criterion_8},
    {9, "sweep determinism", criterion_9},
};

} // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    int failures = 0;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = c.fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s  criterion %d (%s): %s  [%.1fs]\n", ok ? "PASS" : "FAIL", c.number, c.name,
                    detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}

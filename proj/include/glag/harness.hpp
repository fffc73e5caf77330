#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <limits>
#include <map>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "glag/baselines.hpp"
#include "glag/error.hpp"
#include "glag/generators.hpp"
#include "glag/inference.hpp"
#include "glag/io.hpp"
#include "glag/matcher.hpp"

namespace glag {

enum class GeneratorKind { erdos_renyi, barabasi_albert, bter };
enum class MatcherKind { glag, qcp, faq, external };

/// One matcher in a sweep. External results are read from permutation files;
/// the path pattern may contain {noise} and {trial} placeholders.
struct MatcherChoice {
    MatcherKind kind = MatcherKind::glag;
    std::string external_pattern;

    std::string name() const {
        switch (kind) {
            case MatcherKind::glag: return "glag";
            case MatcherKind::qcp: return "qcp";
            case MatcherKind::faq: return "faq";
            case MatcherKind::external: return "external";
        }
        return "?";
    }
};

struct SweepSpec {
    GeneratorKind generator = GeneratorKind::erdos_renyi;
    int p = 50;
    int er_edges = 150;    // erdos_renyi
    int ba_attach = 3;     // barabasi_albert
    double bter_mu = 0.5;  // bter
    WeightModel weights_a = WeightModel::uniform(0.5, 1.5);
    WeightModel weights_b = WeightModel::uniform(0.5, 1.5);
    std::vector<int> noise_levels = {0, 5, 10};
    int trials = 20;
    std::vector<MatcherChoice> matchers = {{MatcherKind::glag, {}}};
    std::uint64_t seed_base = 0;
    int jobs = 1;
    GlagConfig glag_cfg;
    BaselineConfig baseline_cfg;
};

struct SweepRow {
    std::string matcher;
    int noise = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double matching_error = 0.0; // NaN marks a matcher failure
    double seconds = 0.0;
};

struct SweepCell {
    double mean_error = 0.0;
    double stddev_error = 0.0;
    double mean_seconds = 0.0;
    int trials = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows; // sorted by (matcher, noise, trial)
    std::map<std::pair<std::string, int>, SweepCell> aggregates;
};

namespace detail {

// Seed-stream tags for the stages of one trial. Noise stages get a distinct
// tag per noise level so levels are independent corruptions of one original.
inline constexpr std::uint64_t tag_generate = 1;
inline constexpr std::uint64_t tag_weights_a = 2;
inline constexpr std::uint64_t tag_perm = 3;
inline constexpr std::uint64_t tag_weights_b = 4;
inline std::uint64_t tag_noise_a(int level) { return 16 + 4ULL * static_cast<std::uint64_t>(level); }
inline std::uint64_t tag_noise_b(int level) { return 17 + 4ULL * static_cast<std::uint64_t>(level); }

inline void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.trials < 1) throw parameter_error("sweep needs at least one trial");
    if (spec.p < 2) throw parameter_error("sweep graphs need at least two nodes");
    if (spec.matchers.empty()) throw parameter_error("sweep needs at least one matcher");
    if (spec.jobs < 1) throw parameter_error("jobs must be positive");
    if (spec.noise_levels.empty()) throw parameter_error("sweep needs at least one noise level");
    int prev = -1;
    for (int n : spec.noise_levels) {
        if (n < 0) throw parameter_error("noise levels must be nonnegative");
        if (n <= prev) throw parameter_error("noise levels must be strictly increasing");
        prev = n;
    }
}

inline Graph generate_base(const SweepSpec& spec, std::uint64_t seed) {
    switch (spec.generator) {
        case GeneratorKind::erdos_renyi: return gen_erdos_renyi(spec.p, spec.er_edges, seed);
        case GeneratorKind::barabasi_albert: return gen_barabasi_albert(spec.p, spec.ba_attach, seed);
        case GeneratorKind::bter: return gen_bter_geometric(spec.p, spec.bter_mu, seed);
    }
    throw parameter_error("unknown generator");
}

inline std::string substitute(std::string pattern, const std::string& key, const std::string& value) {
    const std::string token = "{" + key + "}";
    for (std::size_t pos = pattern.find(token); pos != std::string::npos; pos = pattern.find(token))
        pattern.replace(pos, token.size(), value);
    return pattern;
}

/// Pairwise (cascade) summation; order-independent aggregation.
inline double pairwise_sum(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 0) return 0.0;
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

inline double pairwise_mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : pairwise_sum(v, 0, v.size()) / static_cast<double>(v.size());
}

/// Runs `total` independent jobs on up to `jobs` threads. Each job writes only
/// its own slot, so the result is identical to serial execution.
template <typename Fn>
void parallel_for_trials(int total, int jobs, Fn&& fn) {
    if (jobs <= 1 || total <= 1) {
        for (int i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) fn(i);
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min(jobs, total);
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

struct TrialTask {
    int trial;
    int noise;
};

inline void finalize_sweep(SweepResult& result) {
    std::sort(result.rows.begin(), result.rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return std::tie(a.matcher, a.noise, a.trial) < std::tie(b.matcher, b.noise, b.trial);
    });
    std::map<std::pair<std::string, int>, std::vector<const SweepRow*>> cells;
    for (const auto& row : result.rows) cells[{row.matcher, row.noise}].push_back(&row);
    for (const auto& [key, rows] : cells) {
        std::vector<double> errs, secs;
        for (const SweepRow* r : rows)
            if (std::isfinite(r->matching_error)) {
                errs.push_back(r->matching_error);
                secs.push_back(r->seconds);
            }
        SweepCell cell;
        cell.trials = static_cast<int>(errs.size());
        cell.mean_error = pairwise_mean(errs);
        cell.mean_seconds = pairwise_mean(secs);
        if (errs.size() > 1) {
            std::vector<double> sq(errs.size());
            for (std::size_t i = 0; i < errs.size(); ++i) {
                const double d = errs[i] - cell.mean_error;
                sq[i] = d * d;
            }
            cell.stddev_error = std::sqrt(pairwise_sum(sq, 0, sq.size()) / static_cast<double>(errs.size() - 1));
        }
        result.aggregates[key] = cell;
    }
}

/// Shared trial engine for the plain-noise and multimodal protocols.
inline SweepResult run_sweep_impl(const SweepSpec& spec, bool multimodal) {
    validate_sweep_spec(spec);
    std::vector<TrialTask> tasks;
    for (int n : spec.noise_levels)
        for (int t = 0; t < spec.trials; ++t) tasks.push_back({t, n});

    std::vector<std::vector<SweepRow>> slots(tasks.size());
    parallel_for_trials(static_cast<int>(tasks.size()), spec.jobs, [&](int idx) {
        const TrialTask task = tasks[static_cast<std::size_t>(idx)];
        const std::uint64_t seed = spec.seed_base + static_cast<std::uint64_t>(task.trial);

        Graph base = generate_base(spec, mix_seed(seed, tag_generate));
        const Permutation po = Permutation::random(spec.p, mix_seed(seed, tag_perm));

        Graph A0(Graph::empty(spec.p)), B0(Graph::empty(spec.p)), A(Graph::empty(spec.p)), B(Graph::empty(spec.p));
        if (multimodal) {
            // binary originals, modality-specific weights, per-modality noise;
            // the error is measured on the binary supports
            A0 = base;
            B0 = permute_graph(A0, po);
            A = assign_weights(A0, spec.weights_a, mix_seed(seed, tag_weights_a));
            B = assign_weights(B0, spec.weights_b, mix_seed(seed, tag_weights_b));
        } else {
            A0 = assign_weights(base, spec.weights_a, mix_seed(seed, tag_weights_a));
            B0 = permute_graph(A0, po);
            A = A0;
            B = B0;
        }
        A = add_noise(A, NoiseSpec{task.noise, spec.weights_a}, mix_seed(seed, tag_noise_a(task.noise)));
        B = add_noise(B, NoiseSpec{task.noise, spec.weights_b}, mix_seed(seed, tag_noise_b(task.noise)));

        auto& out = slots[static_cast<std::size_t>(idx)];
        for (const MatcherChoice& mc : spec.matchers) {
            SweepRow row;
            row.matcher = mc.name();
            row.noise = task.noise;
            row.trial = task.trial;
            row.seed = seed;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                Permutation found = Permutation::identity(spec.p);
                switch (mc.kind) {
                    case MatcherKind::glag: found = glag_match(A, B, spec.glag_cfg).P_star; break;
                    case MatcherKind::qcp: found = qcp_match(A, B, spec.baseline_cfg).P_star; break;
                    case MatcherKind::faq: found = faq_match(A, B, spec.baseline_cfg).P_star; break;
                    case MatcherKind::external: {
                        auto path = substitute(substitute(mc.external_pattern, "noise", std::to_string(task.noise)),
                                               "trial", std::to_string(task.trial));
                        found = read_permutation(path);
                        if (found.size() != spec.p) throw parameter_error("external permutation has wrong size");
                        break;
                    }
                }
                row.matching_error = matching_error(A0, B0, found);
            } catch (const std::exception&) {
                row.matching_error = std::numeric_limits<double>::quiet_NaN(); // failure marker
            }
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            out.push_back(std::move(row));
        }
    });

    SweepResult result;
    for (auto& slot : slots)
        for (auto& row : slot) result.rows.push_back(std::move(row));
    finalize_sweep(result);
    return result;
}

} // namespace detail

/// Noise-robustness sweep: weighted originals, a hidden permutation, N
/// spurious edges on each side, matching error against the originals.
inline SweepResult run_noise_sweep(const SweepSpec& spec) { return detail::run_sweep_impl(spec, false); }

/// Multimodal sweep: a binary original pair is weighted independently per
/// modality; noise follows each modality's own distribution and the error is
/// measured on the binary supports.
inline SweepResult run_multimodal_sweep(const SweepSpec& spec) { return detail::run_sweep_impl(spec, true); }

/// Deterministic result rows; wall-clock timings go to the sidecar written by
/// write_sweep_timing so reruns are byte-identical.
inline void write_sweep_csv(const SweepResult& result, const std::string& path) {
    auto out = detail::open_output(path);
    out << "matcher,noise,trial,seed,matching_error\n";
    for (const auto& row : result.rows) {
        out << row.matcher << ',' << row.noise << ',' << row.trial << ',' << row.seed << ',';
        if (std::isfinite(row.matching_error)) out << row.matching_error;
        else out << "nan";
        out << '\n';
    }
    if (!out) throw format_error("failed writing '" + path + "'");
}

/// Per-row wall-clock sidecar, prefixed with the run timestamp.
inline void write_sweep_timing(const SweepResult& result, const std::string& path) {
    auto out = detail::open_output(path);
    const std::time_t now = std::time(nullptr);
    char stamp[32] = {0};
    std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&now));
    out << "# run " << stamp << '\n';
    out << "matcher,noise,trial,seed,seconds\n";
    for (const auto& row : result.rows)
        out << row.matcher << ',' << row.noise << ',' << row.trial << ',' << row.seed << ','
            << row.seconds << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Joint-inference benchmark (synthetic test-retest protocol)
// ---------------------------------------------------------------------------

struct InferenceBenchSpec {
    int p = 20;
    int k = 4000;          // total sample budget; each dataset gets k/2
    double sparsity = 0.15; // off-diagonal density of the ground truth
    double lambda = 0.1;
    int trials = 20;
    std::uint64_t seed = 0;
    int rounds = 10;
    GlagConfig glag_cfg;
    double glasso_tol = 1e-5;
    double support_eps = 1e-4;
    int jobs = 1;
};

struct InferenceBenchRow {
    int trial = 0;
    std::string method; // joint_half | single_half | single_full
    std::uint64_t seed = 0;
    double frob_error = 0.0;
    double support_f1 = 0.0;
    double seconds = 0.0;
};

struct InferenceBenchResult {
    std::vector<InferenceBenchRow> rows; // sorted by (trial, method)
};

/// Random sparse SPD precision matrix: Bernoulli(density) off-diagonal support
/// with +-Uniform(0.25,0.6) values, diagonally dominant.
inline PrecisionEstimate make_sparse_precision(int p, double density, std::uint64_t seed) {
    if (p < 2) throw parameter_error("precision matrix needs at least two variables");
    if (!(density >= 0.0 && density <= 1.0)) throw parameter_error("density must lie in [0,1]");
    auto rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_real_distribution<double> mag(0.25, 0.6);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (unif(rng) < density) {
                const double v = (unif(rng) < 0.5 ? -1.0 : 1.0) * mag(rng);
                T(i, j) = T(j, i) = v;
            }
    for (int i = 0; i < p; ++i) T(i, i) = T.row(i).cwiseAbs().sum() - std::abs(T(i, i)) + 0.5 + 0.5 * unif(rng);
    return PrecisionEstimate{std::move(T), 0.0};
}

/// F1 of the thresholded off-diagonal support against the ground truth.
inline double support_f1(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth, double eps = 1e-4) {
    if (est.rows() != truth.rows() || est.cols() != truth.cols())
        throw parameter_error("support comparison requires equal dimensions");
    int tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < est.rows(); ++i)
        for (int j = i + 1; j < est.cols(); ++j) {
            const bool e = std::abs(est(i, j)) > eps;
            const bool t = truth(i, j) != 0.0;
            if (e && t) ++tp;
            else if (e && !t) ++fp;
            else if (!e && t) ++fn;
        }
    const double denom = 2.0 * tp + fp + fn;
    return denom == 0.0 ? 1.0 : 2.0 * tp / denom;
}

/// Synthetic stand-in for a test-retest study: two datasets from one sparse
/// ground truth, the second with permuted columns; joint inference on the
/// halves is compared with single-dataset estimation on half and full data.
inline InferenceBenchResult run_inference_bench(const InferenceBenchSpec& spec) {
    if (spec.trials < 1) throw parameter_error("bench needs at least one trial");
    if (spec.k < 8) throw parameter_error("bench needs a few samples");

    std::vector<std::vector<InferenceBenchRow>> slots(static_cast<std::size_t>(spec.trials));
    detail::parallel_for_trials(spec.trials, spec.jobs, [&](int t) {
        const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(t);
        const PrecisionEstimate gt = make_sparse_precision(spec.p, spec.sparsity, mix_seed(seed, 41));
        const int half = spec.k / 2;
        const DataMatrix xa = gen_gmrf_data(gt, half, mix_seed(seed, 42));
        const DataMatrix xb_raw = gen_gmrf_data(gt, half, mix_seed(seed, 43));
        const Permutation po = Permutation::random(spec.p, mix_seed(seed, 44));
        Eigen::MatrixXd xb_perm(half, spec.p);
        for (int j = 0; j < spec.p; ++j) xb_perm.col(po(j)) = xb_raw.X.col(j);

        auto& rows = slots[static_cast<std::size_t>(t)];
        auto push = [&](const char* method, double frob, double f1, double secs) {
            rows.push_back(InferenceBenchRow{t, method, seed, frob, f1, secs});
        };
        auto timed = [&](auto&& fn) {
            const auto t0 = std::chrono::steady_clock::now();
            Eigen::MatrixXd theta = fn();
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return std::make_pair(std::move(theta), secs);
        };

        {
            auto [theta, secs] = timed([&] {
                return joint_infer_unaligned(xa, DataMatrix(xb_perm), spec.lambda, spec.rounds,
                                             spec.glag_cfg, spec.glasso_tol)
                    .theta_a.Theta;
            });
            push("joint_half", (theta - gt.Theta).norm(), support_f1(theta, gt.Theta, spec.support_eps), secs);
        }
        {
            auto [theta, secs] = timed([&] {
                return graphical_lasso(empirical_covariance(xa), spec.lambda, spec.glasso_tol).Theta;
            });
            push("single_half", (theta - gt.Theta).norm(), support_f1(theta, gt.Theta, spec.support_eps), secs);
        }
        {
            auto [theta, secs] = timed([&] {
                Eigen::MatrixXd full(spec.k / 2 * 2, spec.p);
                full << xa.X, xb_raw.X;
                return graphical_lasso(empirical_covariance(DataMatrix(std::move(full))), spec.lambda,
                                       spec.glasso_tol)
                    .Theta;
            });
            push("single_full", (theta - gt.Theta).norm(), support_f1(theta, gt.Theta, spec.support_eps), secs);
        }
    });

    InferenceBenchResult result;
    for (auto& slot : slots)
        for (auto& row : slot) result.rows.push_back(std::move(row));
    std::sort(result.rows.begin(), result.rows.end(), [](const InferenceBenchRow& a, const InferenceBenchRow& b) {
        return std::tie(a.trial, a.method) < std::tie(b.trial, b.method);
    });
    return result;
}

inline void write_inference_csv(const InferenceBenchResult& result, const std::string& path) {
    auto out = detail::open_output(path);
    out << "trial,method,seed,frob_error,support_f1\n";
    for (const auto& row : result.rows)
        out << row.trial << ',' << row.method << ',' << row.seed << ',' << row.frob_error << ','
            << row.support_f1 << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline void write_inference_timing(const InferenceBenchResult& result, const std::string& path) {
    auto out = detail::open_output(path);
    const std::time_t now = std::time(nullptr);
    char stamp[32] = {0};
    std::strftime(stamp, sizeof stamp, "%FT%TZ", std::gmtime(&now));
    out << "# run " << stamp << '\n';
    out << "trial,method,seed,seconds\n";
    for (const auto& row : result.rows)
        out << row.trial << ',' << row.method << ',' << row.seed << ',' << row.seconds << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

} // namespace glag

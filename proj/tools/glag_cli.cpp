// Command-line frontend: single-pair matching, sweeps, joint inference,
// graph generation, and the polytope projection.

#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glag/baselines.hpp"
#include "glag/generators.hpp"
#include "glag/harness.hpp"
#include "glag/inference.hpp"
#include "glag/io.hpp"
#include "glag/matcher.hpp"

namespace {

using namespace glag;

WeightModel parse_weight_model(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto split2 = [&]() {
        const auto comma = args.find(',');
        if (comma == std::string::npos) throw parameter_error("weight model '" + spec + "' needs two parameters");
        return std::pair<double, double>{std::stod(args.substr(0, comma)), std::stod(args.substr(comma + 1))};
    };
    if (kind == "constant") return WeightModel::constant(args.empty() ? 1.0 : std::stod(args));
    if (kind == "uniform") {
        auto [lo, hi] = split2();
        return WeightModel::uniform(lo, hi);
    }
    if (kind == "gaussian") {
        auto [m, s] = split2();
        return WeightModel::gaussian(m, s);
    }
    throw parameter_error("unknown weight model '" + spec + "' (use constant:V, uniform:LO,HI or gaussian:MEAN,SD)");
}

std::vector<MatcherChoice> parse_matchers(const std::string& csv) {
    std::vector<MatcherChoice> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "glag") out.push_back({MatcherKind::glag, {}});
        else if (item == "qcp") out.push_back({MatcherKind::qcp, {}});
        else if (item == "faq") out.push_back({MatcherKind::faq, {}});
        else if (item.rfind("external:", 0) == 0) out.push_back({MatcherKind::external, item.substr(9)});
        else throw parameter_error("unknown matcher '" + item + "'");
    }
    if (out.empty()) throw parameter_error("matcher list is empty");
    return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> out;
    std::istringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    return out;
}

GeneratorKind parse_generator(const std::string& name) {
    if (name == "er") return GeneratorKind::erdos_renyi;
    if (name == "ba") return GeneratorKind::barabasi_albert;
    if (name == "bter") return GeneratorKind::bter;
    throw parameter_error("unknown generator '" + name + "' (use er, ba or bter)");
}

/// Flat key=value config file; '#' starts a comment line.
std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw format_error("expected key=value", lineno);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct SweepCliOptions {
    std::string config_path;
    std::string generator = "er";
    int p = 50;
    int m = 150;
    int m_attach = 3;
    double mu = 0.5;
    std::string weights_a = "uniform:0.5,1.5";
    std::string weights_b;
    std::string noise = "0,5,10";
    int trials = 20;
    std::string matchers = "glag";
    std::uint64_t seed = 0;
    int jobs = 1;
    double c = 1.0;
    int glag_max_iter = 2000;
    int baseline_max_iter = 2000;
    double baseline_tol = 1e-8;
    std::string out = "sweep.csv";
    std::string timing_out;
};

void apply_config_file(SweepCliOptions& o) {
    if (o.config_path.empty()) return;
    for (const auto& [key, value] : read_config_file(o.config_path)) {
        if (key == "generator") o.generator = value;
        else if (key == "p") o.p = std::stoi(value);
        else if (key == "m") o.m = std::stoi(value);
        else if (key == "m_attach") o.m_attach = std::stoi(value);
        else if (key == "mu") o.mu = std::stod(value);
        else if (key == "weights_a") o.weights_a = value;
        else if (key == "weights_b") o.weights_b = value;
        else if (key == "noise") o.noise = value;
        else if (key == "trials") o.trials = std::stoi(value);
        else if (key == "matchers") o.matchers = value;
        else if (key == "seed") o.seed = std::stoull(value);
        else if (key == "jobs") o.jobs = std::stoi(value);
        else if (key == "c") o.c = std::stod(value);
        else if (key == "glag_max_iter") o.glag_max_iter = std::stoi(value);
        else if (key == "baseline_max_iter") o.baseline_max_iter = std::stoi(value);
        else if (key == "baseline_tol") o.baseline_tol = std::stod(value);
        else if (key == "out") o.out = value;
        else throw parameter_error("unknown config key '" + key + "'");
    }
}

SweepSpec build_sweep_spec(const SweepCliOptions& o, bool multimodal) {
    SweepSpec spec;
    spec.generator = parse_generator(o.generator);
    spec.p = o.p;
    spec.er_edges = o.m;
    spec.ba_attach = o.m_attach;
    spec.bter_mu = o.mu;
    spec.weights_a = parse_weight_model(o.weights_a);
    spec.weights_b = o.weights_b.empty() ? spec.weights_a : parse_weight_model(o.weights_b);
    if (multimodal && o.weights_b.empty())
        throw parameter_error("multimodal sweep requires --weights-b");
    spec.noise_levels = parse_int_list(o.noise);
    spec.trials = o.trials;
    spec.matchers = parse_matchers(o.matchers);
    spec.seed_base = o.seed;
    spec.jobs = o.jobs;
    spec.glag_cfg.c = o.c;
    spec.glag_cfg.max_iter = o.glag_max_iter;
    spec.baseline_cfg.max_iter = o.baseline_max_iter;
    spec.baseline_cfg.tol = o.baseline_tol;
    return spec;
}

void add_sweep_flags(CLI::App* cmd, SweepCliOptions& o) {
    cmd->add_option("--config", o.config_path, "flat key=value config file (flags override it)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--generator", o.generator, "er | ba | bter");
    cmd->add_option("--p", o.p, "node count");
    cmd->add_option("--m", o.m, "edge count (er)");
    cmd->add_option("--m-attach", o.m_attach, "edges per new node (ba)");
    cmd->add_option("--mu", o.mu, "geometric degree rate (bter)");
    cmd->add_option("--weights-a", o.weights_a, "weight model for A (constant:V | uniform:LO,HI | gaussian:M,S)");
    cmd->add_option("--weights-b", o.weights_b, "weight model for B (defaults to A's)");
    cmd->add_option("--noise", o.noise, "comma-separated noise levels");
    cmd->add_option("--trials", o.trials, "trials per noise level");
    cmd->add_option("--matchers", o.matchers, "comma list: glag,qcp,faq,external:PATTERN");
    cmd->add_option("--seed", o.seed, "seed base (trial i uses seed+i)");
    cmd->add_option("--jobs", o.jobs, "parallel trials");
    cmd->add_option("--c", o.c, "glag penalty");
    cmd->add_option("--glag-max-iter", o.glag_max_iter, "glag iteration cap");
    cmd->add_option("--baseline-max-iter", o.baseline_max_iter, "baseline iteration cap");
    cmd->add_option("--baseline-tol", o.baseline_tol, "baseline relative-change tolerance");
    cmd->add_option("-o,--out", o.out, "output CSV path");
    cmd->add_option("--timing-out", o.timing_out, "timing sidecar path (default <out>.timing)");
}

int run_sweep_command(const SweepCliOptions& o, bool multimodal) {
    SweepSpec spec = build_sweep_spec(o, multimodal);
    const SweepResult result = multimodal ? run_multimodal_sweep(spec) : run_noise_sweep(spec);
    write_sweep_csv(result, o.out);
    write_sweep_timing(result, o.timing_out.empty() ? o.out + ".timing" : o.timing_out);
    for (const auto& [key, cell] : result.aggregates)
        std::printf("%s noise=%d: mean_error=%.6g stddev=%.6g mean_seconds=%.3g trials=%d\n",
                    key.first.c_str(), key.second, cell.mean_error, cell.stddev_error,
                    cell.mean_seconds, cell.trials);
    return 0;
}

int run_match(const std::string& path_a, const std::string& path_b, const std::string& method,
              const GlagConfig& gcfg, const BaselineConfig& bcfg, const std::string& out_perm,
              const std::string& out_report) {
    const Graph A = read_graph(path_a);
    const Graph B = read_graph(path_b);
    if (A.p() != B.p())
        throw parameter_error("graphs differ in size: " + std::to_string(A.p()) + " vs " +
                              std::to_string(B.p()) + " nodes");
    const auto t0 = std::chrono::steady_clock::now();
    MatchResult result = [&] {
        if (method == "glag") return glag_match(A, B, gcfg);
        if (method == "qcp") return qcp_match(A, B, bcfg);
        if (method == "faq") return faq_match(A, B, bcfg);
        throw parameter_error("unknown method '" + method + "'");
    }();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!out_perm.empty()) write_permutation(result.P_star, out_perm);
    const double err = matching_error(A, B, result.P_star);
    std::ostringstream report;
    report.precision(17);
    report << "method=" << method << '\n'
           << "p=" << A.p() << '\n'
           << "objective=" << result.objective << '\n'
           << "matching_error=" << err << '\n'
           << "iterations=" << result.iterations << '\n'
           << "converged=" << (result.converged ? "true" : "false") << '\n'
           << "seconds=" << seconds << '\n';
    if (!out_report.empty()) {
        std::ofstream out(out_report);
        if (!out) throw format_error("cannot open '" + out_report + "' for writing");
        out << report.str();
    }
    std::cout << report.str();
    return result.converged ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"group-lasso graph matching and joint network inference toolkit"};
    app.require_subcommand(1);

    // ---- match
    auto* match = app.add_subcommand("match", "match two graphs");
    std::string match_a, match_b, match_method = "glag", match_out_perm, match_out_report;
    GlagConfig gcfg;
    BaselineConfig bcfg;
    match->add_option("graph_a", match_a, "first graph file")->required()->check(CLI::ExistingFile);
    match->add_option("graph_b", match_b, "second graph file")->required()->check(CLI::ExistingFile);
    match->add_option("--method", match_method, "glag | qcp | faq");
    match->add_option("--c", gcfg.c, "glag penalty");
    match->add_option("--tau-safety", gcfg.tau_safety, "glag step-bound fraction");
    match->add_option("--eps-abs", gcfg.eps_abs, "glag absolute tolerance");
    match->add_option("--eps-rel", gcfg.eps_rel, "glag relative tolerance");
    match->add_option("--tol", bcfg.tol, "baseline relative-change tolerance");
    match->add_option("--step-safety", bcfg.step_safety, "qcp step fraction of 1/L");
    int match_max_iter = -1;
    match->add_option("--max-iter", match_max_iter, "iteration cap (all methods)");
    match->add_option("--out-perm", match_out_perm, "write the permutation here");
    match->add_option("--out-report", match_out_report, "write the report here");

    // ---- gen
    auto* gen = app.add_subcommand("gen", "generate a random graph");
    std::string gen_model = "er", gen_weights, gen_out = "graph.txt";
    int gen_p = 100, gen_m = 300, gen_attach = 3;
    double gen_mu = 0.5;
    std::uint64_t gen_seed = 0;
    gen->add_option("--model", gen_model, "er | ba | bter");
    gen->add_option("--p", gen_p, "node count");
    gen->add_option("--m", gen_m, "edge count (er)");
    gen->add_option("--m-attach", gen_attach, "edges per new node (ba)");
    gen->add_option("--mu", gen_mu, "geometric degree rate (bter)");
    gen->add_option("--weights", gen_weights, "weight model (default: unweighted)");
    gen->add_option("--seed", gen_seed, "seed");
    gen->add_option("-o,--out", gen_out, "output graph file")->required();

    // ---- project
    auto* project = app.add_subcommand("project", "project a square matrix onto the doubly stochastic polytope");
    std::string proj_in, proj_out;
    double proj_tol = 1e-9;
    int proj_max_iter = 10000;
    project->add_option("input", proj_in, "matrix in coordinate format")->required()->check(CLI::ExistingFile);
    project->add_option("output", proj_out, "projected matrix (coordinate format)")->required();
    project->add_option("--tol", proj_tol, "feasibility tolerance");
    project->add_option("--max-iter", proj_max_iter, "iteration cap");

    // ---- sweep / multimodal
    auto* sweep = app.add_subcommand("sweep", "noise-robustness sweep");
    SweepCliOptions sweep_opts;
    add_sweep_flags(sweep, sweep_opts);
    auto* multimodal = app.add_subcommand("multimodal", "multimodal sweep (distinct weight models)");
    SweepCliOptions mm_opts;
    mm_opts.weights_a = "gaussian:1,0.4";
    add_sweep_flags(multimodal, mm_opts);

    // ---- infer
    auto* infer = app.add_subcommand("infer", "joint network inference");
    InferenceBenchSpec bench;
    std::string infer_out = "inference.csv", infer_timing_out;
    std::string infer_xa, infer_xb, infer_out_perm, infer_theta_a, infer_theta_b;
    double infer_lambda = 0.1;
    int infer_rounds = 10;
    infer->add_option("--p", bench.p, "variables (bench mode)");
    infer->add_option("--k", bench.k, "total sample budget (bench mode)");
    infer->add_option("--sparsity", bench.sparsity, "ground-truth off-diagonal density");
    infer->add_option("--lambda", infer_lambda, "regularization");
    infer->add_option("--trials", bench.trials, "bench trials");
    infer->add_option("--seed", bench.seed, "seed base");
    infer->add_option("--rounds", infer_rounds, "outer rounds of the unaligned solver");
    infer->add_option("--jobs", bench.jobs, "parallel trials (bench mode)");
    infer->add_option("-o,--out", infer_out, "bench output CSV");
    infer->add_option("--timing-out", infer_timing_out, "timing sidecar path (default <out>.timing)");
    infer->add_option("--xa", infer_xa, "dataset A as CSV (joint mode)")->check(CLI::ExistingFile);
    infer->add_option("--xb", infer_xb, "dataset B as CSV (joint mode)")->check(CLI::ExistingFile);
    infer->add_option("--out-perm", infer_out_perm, "write the learned permutation (joint mode)");
    infer->add_option("--out-theta-a", infer_theta_a, "write precision estimate A (joint mode)");
    infer->add_option("--out-theta-b", infer_theta_b, "write precision estimate B (joint mode)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (match->parsed()) {
            if (match_max_iter > 0) {
                gcfg.max_iter = match_max_iter;
                bcfg.max_iter = match_max_iter;
            }
            return run_match(match_a, match_b, match_method, gcfg, bcfg, match_out_perm, match_out_report);
        }
        if (gen->parsed()) {
            Graph g = [&] {
                switch (parse_generator(gen_model)) {
                    case GeneratorKind::erdos_renyi: return gen_erdos_renyi(gen_p, gen_m, gen_seed);
                    case GeneratorKind::barabasi_albert: return gen_barabasi_albert(gen_p, gen_attach, gen_seed);
                    default: return gen_bter_geometric(gen_p, gen_mu, gen_seed);
                }
            }();
            if (!gen_weights.empty())
                g = assign_weights(g, parse_weight_model(gen_weights), mix_seed(gen_seed, 2));
            write_graph(g, gen_out);
            std::printf("wrote %s: p=%d e=%d\n", gen_out.c_str(), g.p(), g.edge_count());
            return 0;
        }
        if (project->parsed()) {
            const Eigen::MatrixXd X = read_matrix_coord(proj_in);
            const DoublyStochastic M = project_doubly_stochastic(X, proj_tol, proj_max_iter);
            write_matrix_coord(M.M, proj_out);
            return 0;
        }
        if (sweep->parsed() || multimodal->parsed()) {
            const bool mm = multimodal->parsed();
            SweepCliOptions& o = mm ? mm_opts : sweep_opts;
            // config file fills only options the user did not pass explicitly
            if (!o.config_path.empty()) {
                SweepCliOptions from_file = o;
                apply_config_file(from_file);
                CLI::App* cmd = mm ? multimodal : sweep;
                auto keep_if_given = [&](const char* flag, auto member) {
                    if (cmd->count(flag)) from_file.*member = o.*member;
                };
                keep_if_given("--generator", &SweepCliOptions::generator);
                keep_if_given("--p", &SweepCliOptions::p);
                keep_if_given("--m", &SweepCliOptions::m);
                keep_if_given("--m-attach", &SweepCliOptions::m_attach);
                keep_if_given("--mu", &SweepCliOptions::mu);
                keep_if_given("--weights-a", &SweepCliOptions::weights_a);
                keep_if_given("--weights-b", &SweepCliOptions::weights_b);
                keep_if_given("--noise", &SweepCliOptions::noise);
                keep_if_given("--trials", &SweepCliOptions::trials);
                keep_if_given("--matchers", &SweepCliOptions::matchers);
                keep_if_given("--seed", &SweepCliOptions::seed);
                keep_if_given("--jobs", &SweepCliOptions::jobs);
                keep_if_given("--c", &SweepCliOptions::c);
                keep_if_given("--glag-max-iter", &SweepCliOptions::glag_max_iter);
                keep_if_given("--baseline-max-iter", &SweepCliOptions::baseline_max_iter);
                keep_if_given("--baseline-tol", &SweepCliOptions::baseline_tol);
                keep_if_given("--out", &SweepCliOptions::out);
                o = from_file;
            }
            return run_sweep_command(o, mm);
        }
        if (infer->parsed()) {
            if (!infer_xa.empty() || !infer_xb.empty()) {
                if (infer_xa.empty() || infer_xb.empty())
                    throw parameter_error("joint mode needs both --xa and --xb");
                const DataMatrix xa(read_data_csv(infer_xa).first);
                const DataMatrix xb(read_data_csv(infer_xb).first);
                const PrecisionPair pair = joint_infer_unaligned(xa, xb, infer_lambda, infer_rounds);
                if (!infer_out_perm.empty()) write_permutation(pair.perm, infer_out_perm);
                if (!infer_theta_a.empty()) write_precision(pair.theta_a, infer_theta_a);
                if (!infer_theta_b.empty()) write_precision(pair.theta_b, infer_theta_b);
                std::printf("rounds=%d\n", pair.outer_rounds);
                return 0;
            }
            bench.lambda = infer_lambda;
            bench.rounds = infer_rounds;
            const InferenceBenchResult result = run_inference_bench(bench);
            write_inference_csv(result, infer_out);
            write_inference_timing(result, infer_timing_out.empty() ? infer_out + ".timing" : infer_timing_out);
            return 0;
        }
    } catch (const convergence_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/graph.hpp"
#include "glag/permutation.hpp"

namespace glag {

namespace detail {

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot open '" + path + "' for writing");
    out << std::setprecision(17);
    return out;
}

inline bool blank(const std::string& s) {
    return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

} // namespace detail

/// Graph file format: a header line "p e", then e lines "i j w" with 1-based
/// node indices. Writing lists each undirected edge once with i < j; reading
/// accepts either orientation and completes the symmetric entry.
inline void write_graph(const Graph& g, const std::string& path) {
    auto out = detail::open_output(path);
    out << g.p() << ' ' << g.edge_count() << '\n';
    for (int i = 0; i < g.p(); ++i)
        for (int j = i + 1; j < g.p(); ++j)
            if (g.W(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << g.W(i, j) << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline Graph read_graph(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    long lineno = 0;

    if (!std::getline(in, line)) throw format_error("empty graph file '" + path + "'", 1);
    ++lineno;
    int p = 0, e = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> p >> e) || (hs >> extra)) throw format_error("expected header 'p e'", lineno);
        if (p < 1 || e < 0) throw format_error("header values out of range", lineno);
    }
    Graph g = Graph::empty(p);
    std::set<std::pair<int, int>> seen;
    int edges_read = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double w = 0.0;
        std::string extra;
        if (!(ls >> i >> j >> w) || (ls >> extra)) throw format_error("expected 'i j w'", lineno);
        if (i < 1 || i > p || j < 1 || j > p) throw format_error("node index out of range", lineno);
        if (i == j) throw format_error("self-loop is not allowed", lineno);
        if (!(w > 0.0) || !std::isfinite(w)) throw format_error("edge weight must be positive and finite", lineno);
        const std::pair<int, int> key = std::minmax(i, j);
        if (!seen.insert(key).second) {
            if (g.W(i - 1, j - 1) != w) throw format_error("asymmetric entry for edge", lineno);
            throw format_error("duplicate edge", lineno);
        }
        g.W(i - 1, j - 1) = g.W(j - 1, i - 1) = w;
        if (++edges_read > e) throw format_error("more edges than declared in header", lineno);
    }
    if (edges_read != e) throw format_error("fewer edges than declared in header", lineno);
    return g;
}

/// Permutation file format: one line of p space-separated 1-based targets
/// sigma(1) ... sigma(p).
inline void write_permutation(const Permutation& perm, const std::string& path) {
    auto out = detail::open_output(path);
    for (int i = 0; i < perm.size(); ++i) out << (i ? " " : "") << perm(i) + 1;
    out << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline Permutation read_permutation(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw format_error("empty permutation file '" + path + "'", 1);
    std::istringstream ls(line);
    std::vector<int> sigma;
    int v = 0;
    while (ls >> v) sigma.push_back(v - 1);
    if (!ls.eof()) throw format_error("expected integers only", 1);
    while (std::getline(in, line))
        if (!detail::blank(line)) throw format_error("trailing content after permutation line", 2);
    try {
        return Permutation(std::move(sigma));
    } catch (const parameter_error& ex) {
        throw format_error(std::string("invalid permutation: ") + ex.what(), 1);
    }
}

/// Square-matrix coordinate format: header "p n", then n lines "i j v"
/// (1-based). Unlike the graph format, entries are taken literally: the
/// diagonal is allowed, nothing is symmetrized, omitted entries are zero.
inline void write_matrix_coord(const Eigen::MatrixXd& M, const std::string& path) {
    if (M.rows() != M.cols()) throw parameter_error("coordinate format requires a square matrix");
    auto out = detail::open_output(path);
    int nnz = 0;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (M(i, j) != 0.0) ++nnz;
    out << M.rows() << ' ' << nnz << '\n';
    for (int i = 0; i < M.rows(); ++i)
        for (int j = 0; j < M.cols(); ++j)
            if (M(i, j) != 0.0) out << i + 1 << ' ' << j + 1 << ' ' << M(i, j) << '\n';
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline Eigen::MatrixXd read_matrix_coord(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw format_error("empty matrix file '" + path + "'", 1);
    ++lineno;
    int p = 0, n = 0;
    {
        std::istringstream hs(line);
        std::string extra;
        if (!(hs >> p >> n) || (hs >> extra)) throw format_error("expected header 'p n'", lineno);
        if (p < 1 || n < 0) throw format_error("header values out of range", lineno);
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(p, p);
    std::set<std::pair<int, int>> seen;
    int entries = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ls(line);
        int i = 0, j = 0;
        double v = 0.0;
        std::string extra;
        if (!(ls >> i >> j >> v) || (ls >> extra)) throw format_error("expected 'i j v'", lineno);
        if (i < 1 || i > p || j < 1 || j > p) throw format_error("index out of range", lineno);
        if (!std::isfinite(v)) throw format_error("matrix entry must be finite", lineno);
        if (!seen.insert({i, j}).second) throw format_error("duplicate entry", lineno);
        M(i - 1, j - 1) = v;
        if (++entries > n) throw format_error("more entries than declared in header", lineno);
    }
    if (entries != n) throw format_error("fewer entries than declared in header", lineno);
    return M;
}

/// Data-matrix CSV: a header row of variable names, then one row per sample.
inline void write_data_csv(const Eigen::MatrixXd& X, const std::vector<std::string>& names,
                           const std::string& path) {
    if (static_cast<int>(names.size()) != X.cols()) throw parameter_error("one column name per variable required");
    auto out = detail::open_output(path);
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
    for (int i = 0; i < X.rows(); ++i) {
        for (int j = 0; j < X.cols(); ++j) out << (j ? "," : "") << X(i, j);
        out << '\n';
    }
    if (!out) throw format_error("failed writing '" + path + "'");
}

inline std::pair<Eigen::MatrixXd, std::vector<std::string>> read_data_csv(const std::string& path) {
    auto in = detail::open_input(path);
    std::string line;
    long lineno = 0;
    if (!std::getline(in, line)) throw format_error("empty CSV file '" + path + "'", 1);
    ++lineno;
    std::vector<std::string> names;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) names.push_back(cell);
    }
    if (names.empty()) throw format_error("missing header row", 1);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::blank(line)) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ls, cell, ',')) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(cell, &pos));
                if (pos != cell.size() && cell.find_first_not_of(" \t\r", pos) != std::string::npos)
                    throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw format_error("cannot parse numeric cell '" + cell + "'", lineno);
            }
        }
        if (row.size() != names.size()) throw format_error("row width does not match header", lineno);
        rows.push_back(std::move(row));
    }
    Eigen::MatrixXd X(static_cast<int>(rows.size()), static_cast<int>(names.size()));
    for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < X.cols(); ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return {std::move(X), std::move(names)};
}

} // namespace glag

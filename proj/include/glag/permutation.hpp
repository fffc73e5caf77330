#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "glag/error.hpp"
#include "glag/rng.hpp"

namespace glag {

/// Bijection sigma on node indices 0..p-1. The matrix view P has P(i, sigma(i)) = 1,
/// so exactly one 1 per row and per column.
class Permutation {
public:
    explicit Permutation(std::vector<int> sigma) : sigma_(std::move(sigma)) {
        const int p = static_cast<int>(sigma_.size());
        if (p == 0) throw parameter_error("permutation must be nonempty");
        std::vector<char> seen(p, 0);
        for (int v : sigma_) {
            if (v < 0 || v >= p || seen[v]) throw parameter_error("permutation indices must be a bijection on 0..p-1");
            seen[v] = 1;
        }
    }

    static Permutation identity(int p) {
        if (p <= 0) throw parameter_error("permutation size must be positive");
        std::vector<int> s(p);
        std::iota(s.begin(), s.end(), 0);
        return Permutation(std::move(s));
    }

    /// Uniformly random permutation (Fisher-Yates), deterministic given seed.
    static Permutation random(int p, std::uint64_t seed) {
        if (p <= 0) throw parameter_error("permutation size must be positive");
        std::vector<int> s(p);
        std::iota(s.begin(), s.end(), 0);
        auto rng = make_rng(seed);
        for (int i = p - 1; i > 0; --i) {
            std::uniform_int_distribution<int> d(0, i);
            std::swap(s[i], s[static_cast<std::size_t>(d(rng))]);
        }
        return Permutation(std::move(s));
    }

    int size() const noexcept { return static_cast<int>(sigma_.size()); }
    int operator()(int i) const { return sigma_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& indices() const noexcept { return sigma_; }

    Permutation inverse() const {
        std::vector<int> inv(sigma_.size());
        for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(sigma_[static_cast<std::size_t>(i)])] = i;
        return Permutation(std::move(inv));
    }

    /// Dense 0/1 matrix view with P(i, sigma(i)) = 1.
    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(size(), size());
        for (int i = 0; i < size(); ++i) P(i, sigma_[static_cast<std::size_t>(i)]) = 1.0;
        return P;
    }

    bool operator==(const Permutation& o) const noexcept { return sigma_ == o.sigma_; }
    bool operator!=(const Permutation& o) const noexcept { return !(*this == o); }

private:
    std::vector<int> sigma_;
};

} // namespace glag

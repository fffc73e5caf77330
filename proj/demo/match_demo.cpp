// Minimal usage example: generate a noisy permuted pair and compare the
// three matchers on it.

#include <cstdio>

#include "glag/baselines.hpp"
#include "glag/generators.hpp"
#include "glag/matcher.hpp"

int main() {
    using namespace glag;
    const int p = 40, e = 120, noise = 8;

    Graph original = gen_erdos_renyi(p, e, 1);
    original = assign_weights(original, WeightModel::uniform(0.5, 1.5), 2);
    const Permutation hidden = Permutation::random(p, 3);
    const Graph permuted = permute_graph(original, hidden);

    const WeightModel wm = WeightModel::uniform(0.5, 1.5);
    const Graph A = add_noise(original, NoiseSpec{noise, wm}, 4);
    const Graph B = add_noise(permuted, NoiseSpec{noise, wm}, 5);

    const MatchResult g = glag_match(A, B);
    const MatchResult q = qcp_match(A, B);
    const MatchResult f = faq_match(A, B);
    std::printf("glag: error=%.3f iterations=%d\n", matching_error(original, permuted, g.P_star), g.iterations);
    std::printf("qcp:  error=%.3f iterations=%d\n", matching_error(original, permuted, q.P_star), q.iterations);
    std::printf("faq:  error=%.3f iterations=%d\n", matching_error(original, permuted, f.P_star), f.iterations);
    return 0;
}

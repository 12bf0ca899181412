#include "acqfam/lhs.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace acqfam {

Eigen::MatrixXd latin_hypercube(int n, const Bounds& bounds, CounterRng& rng) {
    if (n < 1) throw std::invalid_argument("latin_hypercube: n must be >= 1");
    validate_bounds(bounds);
    const int d = static_cast<int>(bounds.size());

    Eigen::MatrixXd points(d, n);
    std::vector<int> strata(static_cast<std::size_t>(n));
    for (int k = 0; k < d; ++k) {
        std::iota(strata.begin(), strata.end(), 0);
        // Fisher-Yates with our own draws: std::shuffle's consumption pattern
        // is implementation-defined and would break cross-platform replay.
        for (int i = n - 1; i > 0; --i)
            std::swap(strata[static_cast<std::size_t>(i)],
                      strata[static_cast<std::size_t>(rng.next_below(i + 1))]);
        const Interval& iv = bounds[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i) {
            const double cell = (strata[static_cast<std::size_t>(i)] + rng.next_double()) / n;
            points(k, i) = iv.lo + cell * iv.width();
        }
    }
    return points;
}

Eigen::MatrixXd latin_hypercube(int n, const Bounds& bounds, std::uint64_t seed) {
    CounterRng rng(seed);
    return latin_hypercube(n, bounds, rng);
}

} // namespace acqfam

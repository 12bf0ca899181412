#pragma once

#include <stdexcept>
#include <vector>

namespace acqfam {

// Closed interval [lo, hi] with lo < hi; one per input dimension.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
    double clamp(double x) const noexcept { return x < lo ? lo : (x > hi ? hi : x); }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

using Bounds = std::vector<Interval>;

inline void validate_bounds(const Bounds& bounds) {
    if (bounds.empty()) throw std::invalid_argument("bounds: at least one dimension required");
    for (const auto& iv : bounds)
        if (!(iv.lo < iv.hi))
            throw std::invalid_argument("bounds: each interval needs lo < hi");
}

} // namespace acqfam

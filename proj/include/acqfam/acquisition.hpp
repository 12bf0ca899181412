#pragma once

#include "acqfam/predictive.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace acqfam {

// One member of the acquisition family
//
//     a(x) = E[I^w] / VI^u + beta * VI^v
//
// where I = max(0, f_min - Y) is the improvement and VI its variance.
// Classic criteria are corners of this cube: EI (u=0,w=1,beta=0),
// PEI (w=2), PI (w=0), SEI (u=1/2), VEI (v=1, beta<0), UEI (v=1/2, beta>0).
struct FamilyParams {
    double u = 0.0;
    double v = 0.0;
    int w = 1;
    double beta = 0.0;

    // u, v >= 0 and finite, w >= 0, beta finite.
    void validate() const;

    bool operator==(const FamilyParams&) const = default;
};

struct ImprovementStats {
    double ei = 0.0;       // E[I]
    double vi = 0.0;       // Var[I], clamped to be nonnegative
    double moment_w = 0.0; // E[I^w] for the w the stats were built with
};

// Closed-form improvement statistics under pred, with f_min the incumbent
// best observed value. pred.sd == 0 takes the deterministic limit:
// ei = max(0, f_min - mean), vi = 0, moment_w likewise degenerate.
ImprovementStats improvement_stats(const PredictiveDistribution& pred, double fmin, int w);

// Default relative floor for VI in the u > 0 ratio. SEI is deliberately
// allowed to spike near evaluated points (that is its documented failure
// mode); the floor only stops the spike short of infinity.
inline constexpr double kViFloorRel = 1e-12;

// Floor for a run whose incumbent has magnitude |fmin|; VI carries the
// squared units of the objective.
double vi_floor_for(double fmin);

// Evaluate the family at precomputed stats. Conventions: VI^0 == 1, the
// beta term is skipped entirely when beta == 0, and the ratio uses
// max(vi, vi_floor) when u > 0. NaN stats are rejected.
double family_value(const ImprovementStats& stats, const FamilyParams& params,
                    double vi_floor = kViFloorRel);

// The named special cases, in presentation order:
// EI, PEI, PI, SEI, VEI (beta = -1/2), UEI (beta = 2).
const std::vector<std::pair<std::string, FamilyParams>>& named_presets();

// Lookup by preset name; throws std::invalid_argument for unknown names.
FamilyParams preset_by_name(std::string_view name);

} // namespace acqfam

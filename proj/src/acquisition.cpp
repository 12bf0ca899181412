#include "acqfam/acquisition.hpp"

#include "acqfam/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace acqfam {
namespace {

// Var[I]/sigma^2 as a function of z alone. The direct E[I^2] - EI^2 form
// loses all digits for z >~ 5 (both terms approach z^2+1-ish magnitudes);
// regrouping through the upper tail Q = Phi(-z) keeps every summand small.
double vi_over_variance(double z) {
    if (z <= -kGapSaturation) return 0.0;
    if (z >= kGapSaturation) return 1.0; // improvement a.s.: Var[I] -> sigma^2
    const double phi = std_normal_pdf(z);
    double g;
    if (z <= 0.0) {
        const double cdf = std_normal_cdf(z);
        const double ei_n = z * cdf + phi;
        g = (z * z + 1.0) * cdf + z * phi - ei_n * ei_n;
    } else {
        const double q = std_normal_cdf(-z);
        g = 1.0 - z * phi - phi * phi + (z * z - 1.0) * q - z * z * q * q +
            2.0 * z * q * phi;
    }
    return g > 0.0 ? g : 0.0;
}

ImprovementStats deterministic_stats(double delta, int w) {
    ImprovementStats s;
    s.ei = delta > 0.0 ? delta : 0.0;
    s.vi = 0.0;
    if (w == 0)
        s.moment_w = delta > 0.0 ? 1.0 : 0.0;
    else
        s.moment_w = delta > 0.0 ? std::pow(delta, w) : 0.0;
    return s;
}

} // namespace

void FamilyParams::validate() const {
    if (!(u >= 0.0) || !std::isfinite(u))
        throw std::invalid_argument("FamilyParams: u must be finite and >= 0");
    if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("FamilyParams: v must be finite and >= 0");
    if (w < 0) throw std::invalid_argument("FamilyParams: w must be >= 0");
    if (!std::isfinite(beta)) throw std::invalid_argument("FamilyParams: beta must be finite");
}

ImprovementStats improvement_stats(const PredictiveDistribution& pred, double fmin, int w) {
    if (!std::isfinite(pred.mean) || !std::isfinite(pred.sd) || pred.sd < 0.0)
        throw std::invalid_argument("improvement_stats: invalid predictive distribution");
    if (!std::isfinite(fmin))
        throw std::invalid_argument("improvement_stats: non-finite fmin");
    if (w < 0) throw std::invalid_argument("improvement_stats: w must be >= 0");

    const double delta = fmin - pred.mean;
    // Saturated gaps (including sd == 0) collapse to the deterministic
    // limit before z is ever formed, so delta/sd cannot overflow.
    if (pred.sd == 0.0 || std::abs(delta) >= kGapSaturation * pred.sd) {
        if (delta >= kGapSaturation * pred.sd && pred.sd > 0.0) {
            ImprovementStats s;
            const StandardizedGap sat = StandardizedGap::from_value(kGapSaturation);
            s.ei = delta;
            s.vi = pred.sd * pred.sd;
            s.moment_w = improvement_moment(sat, pred.sd, delta, w);
            return s;
        }
        return deterministic_stats(delta, w);
    }

    const StandardizedGap gap(delta, pred.sd);
    ImprovementStats s;
    s.ei = improvement_moment(gap, pred.sd, delta, 1);
    s.vi = pred.sd * pred.sd * vi_over_variance(gap.value());
    s.moment_w = w == 1 ? s.ei : improvement_moment(gap, pred.sd, delta, w);
    return s;
}

double vi_floor_for(double fmin) {
    const double scale = std::max(1.0, std::abs(fmin));
    return kViFloorRel * scale * scale;
}

double family_value(const ImprovementStats& stats, const FamilyParams& params,
                    double vi_floor) {
    params.validate();
    if (std::isnan(stats.ei) || std::isnan(stats.vi) || std::isnan(stats.moment_w))
        throw std::invalid_argument("family_value: NaN statistics");
    if (!(vi_floor > 0.0) || !std::isfinite(vi_floor))
        throw std::invalid_argument("family_value: vi_floor must be positive and finite");

    double value = stats.moment_w;
    if (params.u > 0.0)
        value /= std::pow(std::max(stats.vi, vi_floor), params.u);
    if (params.beta != 0.0)
        value += params.beta * std::pow(stats.vi, params.v); // pow(0,0) == 1 == VI^0
    return value;
}

const std::vector<std::pair<std::string, FamilyParams>>& named_presets() {
    static const std::vector<std::pair<std::string, FamilyParams>> presets = {
        {"EI", FamilyParams{0.0, 0.0, 1, 0.0}},
        {"PEI", FamilyParams{0.0, 0.0, 2, 0.0}},
        {"PI", FamilyParams{0.0, 0.0, 0, 0.0}},
        {"SEI", FamilyParams{0.5, 0.0, 1, 0.0}},
        {"VEI", FamilyParams{0.0, 1.0, 1, -0.5}},
        {"UEI", FamilyParams{0.0, 0.5, 1, 2.0}},
    };
    return presets;
}

FamilyParams preset_by_name(std::string_view name) {
    for (const auto& [preset_name, params] : named_presets())
        if (preset_name == name) return params;
    throw std::invalid_argument("unknown acquisition preset: " + std::string(name));
}

} // namespace acqfam

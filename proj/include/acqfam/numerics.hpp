#pragma once

namespace acqfam {

// Standard normal density and distribution function. cdf is accurate to
// ~1e-16 absolute over the whole real line (erfc based, no series cutoff).
double std_normal_pdf(double t);
double std_normal_cdf(double t);

// Beyond this standardized distance the improvement law is numerically
// degenerate: below -kGapSaturation every moment underflows to zero, above
// it the normal mass right of f_min is negligible and closed forms in
// (delta, sigma) take over. Shared by numerics and acquisition code.
inline constexpr double kGapSaturation = 40.0;

// Standardized improvement gap z = (f_min - mu) / sigma. Construction
// validates finiteness once so downstream formulas can assume a usable z;
// the sigma == 0 limit is handled by callers before a gap exists.
class StandardizedGap {
public:
    StandardizedGap(double fmin_minus_mu, double sigma);

    static StandardizedGap from_value(double z);

    double value() const noexcept { return z_; }

private:
    struct Checked {};
    StandardizedGap(double z, Checked) noexcept : z_(z) {}

    double z_;
};

// E[max(0, f_min - Y)^w] for Y ~ N(mu, sigma^2), where gap carries
// z = fmin_minus_mu / sigma. w = 0 gives the improvement probability
// Phi(z). Exact for every non-negative integer w via the one-step recursion
// on the truncated normal moments T_k = integral_{-inf}^{z} s^k phi(s) ds.
double improvement_moment(StandardizedGap gap, double sigma, double fmin_minus_mu, int w);

} // namespace acqfam

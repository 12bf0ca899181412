#include "acqfam/numerics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace acqfam {
namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779; // 1/sqrt(2*pi)
constexpr double kInvSqrt2 = 0.7071067811865475244;   // 1/sqrt(2)

// E[(delta - sigma*S)^w] with S standard normal: the full (untruncated)
// moment, valid once the truncation at z > kGapSaturation removes nothing.
// Odd powers of S vanish; even ones contribute the double factorial.
double full_moment(double delta, double sigma, int w) {
    double total = 0.0;
    double binom = 1.0; // C(w, k)
    double sig_k = 1.0;
    double dfact = 1.0; // (k-1)!! for even k
    for (int k = 0; k <= w; ++k) {
        if (k % 2 == 0) {
            if (k > 0) dfact *= (k - 1);
            total += binom * dfact * sig_k * std::pow(delta, w - k);
        }
        binom = binom * (w - k) / (k + 1);
        sig_k *= sigma;
    }
    return total;
}

} // namespace

double std_normal_pdf(double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("std_normal_pdf: non-finite argument");
    return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double std_normal_cdf(double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("std_normal_cdf: non-finite argument");
    return 0.5 * std::erfc(-t * kInvSqrt2);
}

StandardizedGap::StandardizedGap(double fmin_minus_mu, double sigma) {
    if (!std::isfinite(fmin_minus_mu) || !std::isfinite(sigma) || sigma <= 0.0)
        throw std::invalid_argument("StandardizedGap: requires finite gap and sigma > 0");
    z_ = fmin_minus_mu / sigma;
    if (!std::isfinite(z_))
        throw std::invalid_argument("StandardizedGap: gap/sigma overflows");
}

StandardizedGap StandardizedGap::from_value(double z) {
    if (!std::isfinite(z))
        throw std::invalid_argument("StandardizedGap: non-finite value");
    return {z, Checked{}};
}

double improvement_moment(StandardizedGap gap, double sigma, double fmin_minus_mu, int w) {
    if (!std::isfinite(sigma) || sigma <= 0.0)
        throw std::invalid_argument("improvement_moment: sigma must be positive and finite");
    if (w < 0)
        throw std::invalid_argument("improvement_moment: w must be non-negative");
    if (!std::isfinite(fmin_minus_mu))
        throw std::invalid_argument("improvement_moment: non-finite gap");

    const double z = gap.value();
    if (z <= -kGapSaturation) return 0.0;
    if (z >= kGapSaturation) return full_moment(fmin_minus_mu, sigma, w);

    const double phi = std_normal_pdf(z);
    const double cdf = std_normal_cdf(z);
    if (w == 0) return cdf;

    // T_k = integral_{-inf}^{z} s^k phi(s) ds, by parts:
    // T_k = -z^{k-1} phi(z) + (k-1) T_{k-2},  T_0 = Phi(z),  T_1 = -phi(z).
    double t_prev2 = cdf;  // T_{k-2}
    double t_prev1 = -phi; // T_{k-1}
    double z_pow = 1.0;    // z^{k-1} maintained incrementally
    std::vector<double> trunc(static_cast<std::size_t>(w) + 1);
    trunc[0] = t_prev2;
    trunc[1] = t_prev1;
    for (int k = 2; k <= w; ++k) {
        z_pow *= z;
        const double t_k = -z_pow * phi + (k - 1) * t_prev2;
        trunc[static_cast<std::size_t>(k)] = t_k;
        t_prev2 = t_prev1;
        t_prev1 = t_k;
    }

    // E[I^w] = sigma^w * sum_k C(w,k) z^{w-k} (-1)^k T_k.
    double total = 0.0;
    double binom = 1.0;
    double sign = 1.0;
    for (int k = 0; k <= w; ++k) {
        total += binom * sign * std::pow(z, w - k) * trunc[static_cast<std::size_t>(k)];
        binom = binom * (w - k) / (k + 1);
        sign = -sign;
    }
    const double result = std::pow(sigma, w) * total;
    return result > 0.0 ? result : 0.0;
}

} // namespace acqfam

#pragma once

namespace acqfam {

// Predictive law N(mean, sd^2) of a surrogate at one query point. Kept in
// its own header so acquisition formulas do not pull in the surrogate (or
// Eigen) just to read two numbers.
struct PredictiveDistribution {
    double mean = 0.0;
    double sd = 0.0; // >= 0; exact 0 marks a deterministic prediction
};

} // namespace acqfam

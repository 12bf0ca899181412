#pragma once

#include "acqfam/dataset.hpp"
#include "acqfam/predictive.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace acqfam {

// Anisotropic squared-exponential kernel
//     k(x, x') = signal_variance * exp(-1/2 sum_k ((x_k - x'_k)/l_k)^2)
// plus an absolute diagonal jitter (`nugget`) that conditions the
// factorization; it is not a noise model, the objectives are deterministic.
struct Hyperparameters {
    Eigen::VectorXd lengthscales;
    double signal_variance = 1.0;
    double nugget = 1e-8;

    // Strict positivity of every field.
    void validate() const;

    // Positivity plus the lengthscale policy: within [1e-3, 1e3] times the
    // domain width of each dimension.
    void validate_against(const Eigen::VectorXd& widths) const;
};

struct FitConfig {
    int multistarts = 8; // space-filling starts (one replaced by warm start)
    int max_steps = 40;  // pattern-search sweeps per start
    std::uint64_t seed = 0;
    // Per-dimension domain widths used for the lengthscale search box;
    // empty means "use the data's own range".
    Eigen::VectorXd widths;
    // Previous iteration's maximizer; replaces one multistart when present.
    std::optional<Hyperparameters> warm_start;
};

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Immutable conditioned model: dataset, hyperparameters, and the cached
// Cholesky factor of K + nugget*I with its weight vector. All prediction
// paths are const and safe to share across threads.
class FittedSurrogate {
public:
    FittedSurrogate(Dataset data, Hyperparameters hp);

    const Dataset& data() const noexcept { return data_; }
    const Hyperparameters& hyperparameters() const noexcept { return hp_; }
    double output_mean() const noexcept { return output_mean_; }

    PredictiveDistribution predict(const Eigen::VectorXd& x) const;

    // Batched prediction for candidate pools: queries are columns of X.
    void predict_batch(const Eigen::MatrixXd& X, Eigen::VectorXd& means,
                       Eigen::VectorXd& sds) const;

private:
    Eigen::MatrixXd covariance_columns(const Eigen::MatrixXd& X) const;

    Dataset data_;
    Hyperparameters hp_;
    double output_mean_;
    Eigen::MatrixXd chol_lower_;  // L with L L^T = K + nugget*I
    Eigen::VectorXd weights_;     // (K + nugget*I)^{-1} (y - output_mean)
};

// Maximum-likelihood fit: multi-start derivative-free search over
// log-lengthscales with the signal variance profiled out analytically, then
// a final factorization at the maximizer. Deterministic given config.seed.
// Throws FitError for |data| < 2 or an unfactorizable kernel matrix even
// after jitter escalation.
FittedSurrogate fit(const Dataset& data, const FitConfig& config = {});

// Condition on data at fixed hyperparameters (no search). The nugget is
// escalated by decades up to 1e-4 * signal_variance if the factorization
// fails at the requested value.
FittedSurrogate refit(const Dataset& data, const Hyperparameters& hp);

// Exact log marginal likelihood of the mean-centered outputs under hp.
double log_marginal_likelihood(const Dataset& data, const Hyperparameters& hp);

} // namespace acqfam

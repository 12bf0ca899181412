#include "acqfam/gp.hpp"

#include "acqfam/lhs.hpp"
#include "acqfam/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>

namespace acqfam {
namespace {

constexpr double kJitterStart = 1e-8; // relative to signal variance
constexpr double kJitterLimit = 1e-4;

// Lengthscale search box relative to domain width: below 1e-2 widths the
// surrogate chases noise that deterministic objectives do not have, above
// 3 widths the kernel is flat across the whole box.
constexpr double kLenLo = 1e-2;
constexpr double kLenHi = 3.0;

constexpr double kLogStepTol = 1e-3; // pattern-search convergence, log units

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Correlation matrix R(inputs; lengthscales), unit diagonal.
MatrixXd correlation(const Eigen::Map<const MatrixXd>& X, const VectorXd& ls) {
    const int n = static_cast<int>(X.cols());
    const int d = static_cast<int>(X.rows());
    MatrixXd S = MatrixXd::Zero(n, n);
    for (int k = 0; k < d; ++k) {
        const double c = 0.5 / (ls[k] * ls[k]);
        const auto row = X.row(k).transpose().array();
        for (int j = 0; j < n; ++j)
            S.col(j) += c * (row - X(k, j)).square().matrix();
    }
    return (-S.array()).exp().matrix();
}

// Profiled (signal variance concentrated out) negative log likelihood over
// log-lengthscales. Shares the per-dimension squared-distance matrices
// across the whole search for one dataset.
class ProfileObjective {
public:
    ProfileObjective(const Dataset& data, VectorXd residuals)
        : r_(std::move(residuals)), n_(data.size()) {
        const auto X = data.inputs();
        const int d = data.dimension();
        dist_sq_.reserve(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
            MatrixXd D(n_, n_);
            const auto row = X.row(k).transpose().array();
            for (int j = 0; j < n_; ++j)
                D.col(j) = (row - X(k, j)).square().matrix();
            dist_sq_.push_back(std::move(D));
        }
        // Keeps the profiled variance bounded away from log(0) when the
        // residuals are (nearly) interpolated or identically zero.
        s_floor_ = std::max(1e-12 * std::max(1.0, r_.squaredNorm() / n_),
                            std::numeric_limits<double>::min());
    }

    struct Eval {
        bool ok = false;
        double value = std::numeric_limits<double>::infinity();
        double signal = 0.0;
        double jitter_factor = 0.0;
    };

    // value = n log s_hat + log|R + f I|, the part of -2 LML that depends
    // on the lengthscales once s_hat = r'(R+fI)^{-1}r / n is plugged in.
    Eval operator()(const VectorXd& log_ls) const {
        MatrixXd S = MatrixXd::Zero(n_, n_);
        for (std::size_t k = 0; k < dist_sq_.size(); ++k) {
            const double ls = std::exp(log_ls[static_cast<int>(k)]);
            S += (0.5 / (ls * ls)) * dist_sq_[k];
        }
        MatrixXd R = (-S.array()).exp().matrix();

        Eval out;
        for (double f = kJitterStart; f <= kJitterLimit * 1.0000001; f *= 10.0) {
            MatrixXd A = R;
            A.diagonal().array() += f;
            Eigen::LLT<MatrixXd> llt(A);
            if (llt.info() != Eigen::Success) continue;
            const VectorXd alpha = llt.solve(r_);
            const double s_hat = std::max(r_.dot(alpha) / n_, s_floor_);
            const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
            out.ok = true;
            out.value = n_ * std::log(s_hat) + log_det;
            out.signal = s_hat;
            out.jitter_factor = f;
            return out;
        }
        return out;
    }

    int size() const noexcept { return n_; }

private:
    std::vector<MatrixXd> dist_sq_;
    VectorXd r_;
    int n_;
    double s_floor_ = 0.0;
};

// Greedy coordinate pattern search: scan +/- moves per dimension, halve the
// step vector on a sweep with no improvement, stop when the step is below
// kLogStepTol or the sweep budget is spent.
void pattern_search(const ProfileObjective& objective, VectorXd& point,
                    ProfileObjective::Eval& best, const VectorXd& lo,
                    const VectorXd& hi, int max_steps) {
    const int d = static_cast<int>(point.size());
    VectorXd step = 0.25 * (hi - lo);
    for (int sweep = 0; sweep < max_steps; ++sweep) {
        bool improved = false;
        for (int k = 0; k < d; ++k) {
            for (double direction : {+1.0, -1.0}) {
                VectorXd trial = point;
                trial[k] = std::clamp(point[k] + direction * step[k], lo[k], hi[k]);
                if (trial[k] == point[k]) continue;
                const auto eval = objective(trial);
                if (eval.ok && eval.value < best.value) {
                    point = trial;
                    best = eval;
                    improved = true;
                }
            }
        }
        if (!improved) {
            step *= 0.5;
            if (step.maxCoeff() < kLogStepTol) break;
        }
    }
}

VectorXd domain_widths(const Dataset& data, const FitConfig& config) {
    const int d = data.dimension();
    if (config.widths.size() == d) {
        for (int k = 0; k < d; ++k)
            if (!(config.widths[k] > 0.0))
                throw std::invalid_argument("fit: widths must be positive");
        return config.widths;
    }
    if (config.widths.size() != 0)
        throw std::invalid_argument("fit: widths dimension mismatch");
    const auto X = data.inputs();
    VectorXd w(d);
    for (int k = 0; k < d; ++k) {
        const double range = X.row(k).maxCoeff() - X.row(k).minCoeff();
        w[k] = range > 0.0 ? range : 1.0;
    }
    return w;
}

} // namespace

void Hyperparameters::validate() const {
    if (lengthscales.size() == 0 || !(lengthscales.minCoeff() > 0.0) ||
        !lengthscales.allFinite())
        throw std::invalid_argument("Hyperparameters: lengthscales must be positive");
    if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
        throw std::invalid_argument("Hyperparameters: signal_variance must be positive");
    if (!(nugget > 0.0) || !std::isfinite(nugget))
        throw std::invalid_argument("Hyperparameters: nugget must be positive");
}

void Hyperparameters::validate_against(const Eigen::VectorXd& widths) const {
    validate();
    if (widths.size() != lengthscales.size())
        throw std::invalid_argument("Hyperparameters: widths dimension mismatch");
    for (int k = 0; k < lengthscales.size(); ++k)
        if (lengthscales[k] < 1e-3 * widths[k] || lengthscales[k] > 1e3 * widths[k])
            throw std::invalid_argument(
                "Hyperparameters: lengthscale outside [1e-3, 1e3] x width");
}

FittedSurrogate::FittedSurrogate(Dataset data, Hyperparameters hp)
    : data_(std::move(data)), hp_(std::move(hp)) {
    hp_.validate();
    if (hp_.lengthscales.size() != data_.dimension())
        throw std::invalid_argument("FittedSurrogate: lengthscale dimension mismatch");
    if (data_.size() < 1) throw FitError("FittedSurrogate: empty dataset");

    output_mean_ = data_.outputs().mean();
    const MatrixXd R = correlation(data_.inputs(), hp_.lengthscales);
    const double s = hp_.signal_variance;

    double nugget = hp_.nugget;
    const double limit = std::max(nugget, kJitterLimit * s);
    while (true) {
        MatrixXd K = s * R;
        K.diagonal().array() += nugget;
        Eigen::LLT<MatrixXd> llt(K);
        if (llt.info() == Eigen::Success) {
            chol_lower_ = llt.matrixL();
            weights_ = llt.solve((data_.outputs().array() - output_mean_).matrix());
            hp_.nugget = nugget;
            return;
        }
        if (nugget >= limit)
            throw FitError("kernel matrix not positive definite after nugget escalation");
        nugget = std::min(nugget * 10.0, limit);
    }
}

Eigen::MatrixXd FittedSurrogate::covariance_columns(const MatrixXd& X) const {
    const auto train = data_.inputs();
    const int n = data_.size();
    const int m = static_cast<int>(X.cols());
    MatrixXd S = MatrixXd::Zero(n, m);
    for (int k = 0; k < data_.dimension(); ++k) {
        const double c = 0.5 / (hp_.lengthscales[k] * hp_.lengthscales[k]);
        const auto row = train.row(k).transpose().array();
        for (int j = 0; j < m; ++j)
            S.col(j) += c * (row - X(k, j)).square().matrix();
    }
    return (hp_.signal_variance * (-S.array()).exp()).matrix();
}

PredictiveDistribution FittedSurrogate::predict(const Eigen::VectorXd& x) const {
    if (x.size() != data_.dimension())
        throw std::invalid_argument("predict: dimension mismatch");
    Eigen::VectorXd means(1), sds(1);
    predict_batch(x, means, sds);
    return {means[0], sds[0]};
}

void FittedSurrogate::predict_batch(const MatrixXd& X, VectorXd& means,
                                    VectorXd& sds) const {
    if (X.rows() != data_.dimension())
        throw std::invalid_argument("predict_batch: dimension mismatch");
    const MatrixXd cov = covariance_columns(X);
    const int m = static_cast<int>(X.cols());
    means = ((cov.transpose() * weights_).array() + output_mean_).matrix();
    const MatrixXd solved = chol_lower_.triangularView<Eigen::Lower>().solve(cov);
    sds.resize(m);
    const double s = hp_.signal_variance;
    for (int j = 0; j < m; ++j) {
        const double var = std::clamp(s - solved.col(j).squaredNorm(), 0.0, s);
        sds[j] = std::sqrt(var);
    }
}

FittedSurrogate fit(const Dataset& data, const FitConfig& config) {
    if (data.size() < 2) throw FitError("fit: need at least 2 observations");
    if (config.multistarts < 1) throw std::invalid_argument("fit: multistarts must be >= 1");

    const int d = data.dimension();
    const VectorXd widths = domain_widths(data, config);
    VectorXd lo(d), hi(d);
    for (int k = 0; k < d; ++k) {
        lo[k] = std::log(kLenLo * widths[k]);
        hi[k] = std::log(kLenHi * widths[k]);
    }

    const VectorXd residuals =
        (data.outputs().array() - data.outputs().mean()).matrix();
    const ProfileObjective objective(data, residuals);

    // Space-filling starts over the log box; a warm start replaces the
    // first so the previous optimum is always revisited.
    Bounds log_box(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) log_box[static_cast<std::size_t>(k)] = {lo[k], hi[k]};
    CounterRng rng(config.seed, /*stream=*/1);
    MatrixXd starts = latin_hypercube(config.multistarts, log_box, rng);
    if (config.warm_start) {
        const VectorXd& warm = config.warm_start->lengthscales;
        if (warm.size() != d)
            throw std::invalid_argument("fit: warm start dimension mismatch");
        for (int k = 0; k < d; ++k)
            starts(k, 0) = std::clamp(std::log(warm[k]), lo[k], hi[k]);
    }

    VectorXd best_point;
    ProfileObjective::Eval best;
    for (int i = 0; i < config.multistarts; ++i) {
        VectorXd point = starts.col(i);
        auto eval = objective(point);
        pattern_search(objective, point, eval, lo, hi, config.max_steps);
        if (eval.ok && eval.value < best.value) {
            best = eval;
            best_point = point;
        }
    }
    if (!best.ok) throw FitError("fit: kernel matrix not positive definite at any start");

    Hyperparameters hp;
    hp.lengthscales = best_point.array().exp().matrix();
    hp.signal_variance = best.signal;
    hp.nugget = best.jitter_factor * best.signal;
    return {data, hp};
}

FittedSurrogate refit(const Dataset& data, const Hyperparameters& hp) {
    return {data, hp};
}

double log_marginal_likelihood(const Dataset& data, const Hyperparameters& hp) {
    hp.validate();
    if (hp.lengthscales.size() != data.dimension())
        throw std::invalid_argument("log_marginal_likelihood: dimension mismatch");
    const int n = data.size();
    if (n < 1) throw std::invalid_argument("log_marginal_likelihood: empty dataset");

    const VectorXd r = (data.outputs().array() - data.outputs().mean()).matrix();
    const MatrixXd R = correlation(data.inputs(), hp.lengthscales);
    const double s = hp.signal_variance;

    double nugget = hp.nugget;
    const double limit = std::max(nugget, kJitterLimit * s);
    while (true) {
        MatrixXd K = s * R;
        K.diagonal().array() += nugget;
        Eigen::LLT<MatrixXd> llt(K);
        if (llt.info() == Eigen::Success) {
            const double quad = r.dot(llt.solve(r));
            const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
            return -0.5 * quad - 0.5 * log_det - 0.5 * n * std::log(2.0 * M_PI);
        }
        if (nugget >= limit)
            throw FitError("log_marginal_likelihood: matrix not positive definite");
        nugget = std::min(nugget * 10.0, limit);
    }
}

} // namespace acqfam

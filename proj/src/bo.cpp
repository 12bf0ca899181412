#include "acqfam/bo.hpp"

#include "acqfam/rng.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>

namespace acqfam {
namespace {

// Purpose tags for deriving per-iteration seeds from the run seed.
constexpr std::uint32_t kPurposeInit = 0;
constexpr std::uint32_t kPurposeFit = 1;
constexpr std::uint32_t kPurposeAcq = 2;

constexpr double kRefineStepRel = 0.05;  // initial pattern step, fraction of width
constexpr double kDuplicateRel = 1e-10;  // duplicate guard, fraction of width

struct Candidate {
    Eigen::VectorXd x;
    double value = 0.0;
    double mean = 0.0;
};

// Strict-weak order implementing "better acquisition first": higher value,
// then lower predictive mean, then lexicographically smaller input. The
// final clause makes pool argmax independent of evaluation order.
bool better(const Candidate& a, const Candidate& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.mean != b.mean) return a.mean < b.mean;
    return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(),
                                        b.x.data(), b.x.data() + b.x.size());
}

class AcquisitionSurface {
public:
    AcquisitionSurface(const FittedSurrogate& model, double fmin, const FamilyParams& params)
        : model_(model), fmin_(fmin), params_(params), floor_(vi_floor_for(fmin)) {}

    Candidate score(const Eigen::VectorXd& x) const {
        const PredictiveDistribution pred = model_.predict(x);
        const auto stats = improvement_stats(pred, fmin_, params_.w);
        return {x, family_value(stats, params_, floor_), pred.mean};
    }

    Candidate score_known(Eigen::VectorXd x, double mean, double sd) const {
        const auto stats = improvement_stats({mean, sd}, fmin_, params_.w);
        return {std::move(x), family_value(stats, params_, floor_), mean};
    }

private:
    const FittedSurrogate& model_;
    double fmin_;
    FamilyParams params_;
    double floor_;
};

// Coordinate pattern search maximizing the acquisition from one start.
Candidate refine(const AcquisitionSurface& surface, Candidate best, const Bounds& bounds,
                 int sweeps) {
    const int d = static_cast<int>(bounds.size());
    Eigen::VectorXd step(d);
    for (int k = 0; k < d; ++k) step[k] = kRefineStepRel * bounds[static_cast<std::size_t>(k)].width();

    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        for (int k = 0; k < d; ++k) {
            for (double direction : {+1.0, -1.0}) {
                Eigen::VectorXd trial = best.x;
                trial[k] = bounds[static_cast<std::size_t>(k)].clamp(best.x[k] + direction * step[k]);
                if (trial[k] == best.x[k]) continue;
                Candidate cand = surface.score(trial);
                if (better(cand, best)) {
                    best = std::move(cand);
                    improved = true;
                }
            }
        }
        if (!improved) step *= 0.5;
    }
    return best;
}

bool duplicates_training_input(const Eigen::VectorXd& x, const Dataset& data,
                               const Bounds& bounds) {
    const int d = data.dimension();
    const auto X = data.inputs();
    for (int i = 0; i < data.size(); ++i) {
        bool close = true;
        for (int k = 0; k < d; ++k) {
            if (std::abs(X(k, i) - x[k]) >
                kDuplicateRel * bounds[static_cast<std::size_t>(k)].width()) {
                close = false;
                break;
            }
        }
        if (close) return true;
    }
    return false;
}

} // namespace

Eigen::VectorXd maximize_acquisition(const FittedSurrogate& model, double fmin,
                                     const FamilyParams& params, const Bounds& bounds,
                                     std::uint64_t seed, const OptimizerControls& controls,
                                     AcquisitionAudit* audit) {
    params.validate();
    validate_bounds(bounds);
    const int d = static_cast<int>(bounds.size());
    if (model.data().dimension() != d)
        throw std::invalid_argument("maximize_acquisition: bounds/model dimension mismatch");
    if (controls.pool_per_dim < 1 || controls.refine_starts < 1 || controls.refine_steps < 0)
        throw std::invalid_argument("maximize_acquisition: invalid optimizer controls");

    const AcquisitionSurface surface(model, fmin, params);

    // (a) candidate pool, scored in one batched prediction
    CounterRng rng(seed, /*stream=*/2);
    const int pool_size = controls.pool_per_dim * d;
    const Eigen::MatrixXd pool = latin_hypercube(pool_size, bounds, rng);
    Eigen::VectorXd means, sds;
    model.predict_batch(pool, means, sds);

    const int keep = std::min(controls.refine_starts, pool_size);
    std::vector<Candidate> leaders; // best-first, at most `keep`
    leaders.reserve(static_cast<std::size_t>(keep) + 1);
    int widest = 0; // pool index with the largest predictive sd, for the guard
    for (int j = 0; j < pool_size; ++j) {
        if (sds[j] > sds[widest]) widest = j;
        Candidate cand = surface.score_known(pool.col(j), means[j], sds[j]);
        const bool full = static_cast<int>(leaders.size()) == keep;
        if (full && !better(cand, leaders.back())) continue;
        auto pos = std::upper_bound(leaders.begin(), leaders.end(), cand, better);
        leaders.insert(pos, std::move(cand));
        if (static_cast<int>(leaders.size()) > keep) leaders.pop_back();
    }
    const double pool_best_value = leaders.front().value;

    // midpoints between the incumbent's input and each pool leader
    const Eigen::VectorXd incumbent = model.data().best_input();
    std::vector<Candidate> starts = leaders;
    for (const auto& leader : leaders) {
        Eigen::VectorXd mid = 0.5 * (incumbent + leader.x);
        for (int k = 0; k < d; ++k) mid[k] = bounds[static_cast<std::size_t>(k)].clamp(mid[k]);
        starts.push_back(surface.score(mid));
    }
    std::sort(starts.begin(), starts.end(), better);
    starts.resize(static_cast<std::size_t>(std::min<int>(keep, static_cast<int>(starts.size()))));

    // (b) local refinement; the overall winner keeps the tie-break order
    Candidate best = starts.front();
    for (const auto& start : starts) {
        Candidate refined = refine(surface, start, bounds, controls.refine_steps);
        if (better(refined, best)) best = refined;
    }

    // Duplicate guard: nudge one pattern step toward the most uncertain pool
    // candidate; fall back to stepping toward the domain center. Re-proposing
    // a training input would otherwise break the next factorization.
    if (duplicates_training_input(best.x, model.data(), bounds)) {
        Eigen::VectorXd target = pool.col(widest);
        for (int attempt = 0; attempt < 2 && duplicates_training_input(best.x, model.data(), bounds);
             ++attempt) {
            Eigen::VectorXd moved = best.x;
            for (int k = 0; k < d; ++k) {
                const auto& iv = bounds[static_cast<std::size_t>(k)];
                const double dir = target[k] > moved[k] ? 1.0 : (target[k] < moved[k] ? -1.0 : 0.0);
                moved[k] = iv.clamp(moved[k] + dir * kRefineStepRel * iv.width());
            }
            best.x = moved;
            // second attempt aims at the center of the box
            for (int k = 0; k < d; ++k)
                target[k] = 0.5 * (bounds[static_cast<std::size_t>(k)].lo +
                                   bounds[static_cast<std::size_t>(k)].hi);
        }
        best = surface.score(best.x);
    }

    if (audit) {
        audit->pool_best_value = pool_best_value;
        audit->returned_value = best.value;
    }
    return best.x;
}

RunTrace run_bo(const RunConfig& config) {
    config.params.validate();
    if (config.n_init < 2) throw std::invalid_argument("run_bo: n_init must be >= 2");
    if (config.n_sequential < 0)
        throw std::invalid_argument("run_bo: n_sequential must be >= 0");
    if (config.refit_every < 1) throw std::invalid_argument("run_bo: refit_every must be >= 1");
    const TestProblem& problem = config.problem;
    if (problem.dimension != static_cast<int>(problem.bounds.size()))
        throw std::invalid_argument("run_bo: malformed problem bounds");
    const int d = problem.dimension;

    const auto t_start = std::chrono::steady_clock::now();
    RunTrace trace;
    trace.records.reserve(static_cast<std::size_t>(config.n_init + config.n_sequential));
    Dataset data(d);
    double best = std::numeric_limits<double>::infinity();

    const auto record = [&](const Eigen::VectorXd& x, double y) {
        best = std::min(best, y);
        trace.records.push_back(
            {static_cast<int>(trace.records.size()) + 1, x, y, best});
    };

    const Eigen::MatrixXd init = latin_hypercube(
        config.n_init, problem.bounds, derive_seed(config.seed, kPurposeInit, 0));
    for (int i = 0; i < config.n_init; ++i) {
        const Eigen::VectorXd x = init.col(i);
        const double y = problem.evaluate(x);
        try {
            data.add(x, y);
        } catch (const std::invalid_argument& e) {
            throw BoRunError(i + 1, e.what());
        }
        record(x, y);
    }

    Eigen::VectorXd widths(d);
    for (int k = 0; k < d; ++k) widths[k] = problem.bounds[static_cast<std::size_t>(k)].width();

    std::optional<Hyperparameters> current_hp;
    for (int t = 0; t < config.n_sequential; ++t) {
        const int iteration = config.n_init + t + 1;
        std::optional<FittedSurrogate> model;
        try {
            if (!current_hp || t % config.refit_every == 0) {
                FitConfig fc;
                fc.multistarts = config.fit_multistarts;
                fc.seed = derive_seed(config.seed, kPurposeFit, static_cast<std::uint32_t>(t));
                fc.widths = widths;
                if (current_hp) fc.warm_start = *current_hp;
                model.emplace(fit(data, fc));
                current_hp = model->hyperparameters();
            } else {
                model.emplace(refit(data, *current_hp));
                current_hp = model->hyperparameters(); // nugget may have escalated
            }
        } catch (const FitError& e) {
            throw BoRunError(iteration, e.what());
        }

        const Eigen::VectorXd x = maximize_acquisition(
            *model, data.min_output(), config.params, problem.bounds,
            derive_seed(config.seed, kPurposeAcq, static_cast<std::uint32_t>(t)),
            config.optimizer);
        const double y = problem.evaluate(x);
        try {
            data.add(x, y);
        } catch (const std::invalid_argument& e) {
            throw BoRunError(iteration, e.what());
        }
        record(x, y);
    }

    trace.final_solution = best;
    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return trace;
}

} // namespace acqfam

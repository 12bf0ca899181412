#pragma once

#include "acqfam/acquisition.hpp"
#include "acqfam/gp.hpp"
#include "acqfam/interval.hpp"
#include "acqfam/lhs.hpp"
#include "acqfam/testbed.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace acqfam {

// Inner-loop controls for maximize_acquisition. The defaults are the ones
// used by every benchmark in this repository.
struct OptimizerControls {
    int pool_per_dim = 2000; // LHS candidate pool size = pool_per_dim * d
    int refine_starts = 5;   // candidates taken into local refinement
    int refine_steps = 50;   // pattern-search sweeps per refinement start
};

// Optional per-call audit: the pool's best acquisition value versus the
// returned point's, for consistency checks (returned >= pool must hold).
struct AcquisitionAudit {
    double pool_best_value = 0.0;
    double returned_value = 0.0;
};

// One evaluation of the objective inside a run; iteration is 1-based over
// the whole budget (initialization included).
struct TraceRecord {
    int iteration = 0;
    Eigen::VectorXd input;
    double output = 0.0;
    double best_so_far = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    double final_solution = 0.0;
    double wall_seconds = 0.0;
};

struct RunConfig {
    TestProblem problem;
    FamilyParams params;
    int n_init = 10;
    int n_sequential = 490;
    std::uint64_t seed = 0;
    OptimizerControls optimizer;
    int fit_multistarts = 8;
    // Hyperparameters are re-estimated every refit_every iterations and the
    // factorization refreshed in between; 1 = re-estimate each step.
    int refit_every = 1;
};

// A surrogate fit failed mid-run; iteration() reports the 1-based
// evaluation index the run was about to perform.
class BoRunError : public std::runtime_error {
public:
    BoRunError(int iteration, const std::string& what)
        : std::runtime_error("iteration " + std::to_string(iteration) + ": " + what),
          iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

// Maximize the family acquisition over the box: score a fresh LHS pool plus
// the midpoints between the incumbent input and the pool leaders, then
// refine the top candidates with a coordinate pattern search. Ties are
// broken by lower predictive mean, then lexicographic input order. Always
// returns an in-bounds point that does not duplicate a training input.
Eigen::VectorXd maximize_acquisition(const FittedSurrogate& model, double fmin,
                                     const FamilyParams& params, const Bounds& bounds,
                                     std::uint64_t seed,
                                     const OptimizerControls& controls = {},
                                     AcquisitionAudit* audit = nullptr);

// The sequential loop: n_init Latin hypercube evaluations, then
// n_sequential rounds of fit / maximize / evaluate / append.
RunTrace run_bo(const RunConfig& config);

} // namespace acqfam

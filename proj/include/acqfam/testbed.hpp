#pragma once

#include "acqfam/interval.hpp"

#include <Eigen/Core>

#include <string>
#include <string_view>
#include <vector>

namespace acqfam {

// The six benchmark objectives. Each is an exact closed-form evaluator with
// its domain and the reference global minimum, so benchmark results can be
// read as regret without a separate answer key.
//   GRL  Gramacy-Lee,       d=1 on [0.5, 2.5]
//   ROS  Rosenbrock,        d=2 on [-2, 2]^2
//   MOT  modified Townsend, d=2 on [-2, 2]^2
//   ACY  Ackley,            d=2 on [-2, 2]^2
//   RAS  Rastrigin,         d=2 on [-2, 2]^2
//   HTN  Hartman,           d=6 on the open cube (0, 1)^6
struct TestProblem {
    std::string name;
    int dimension = 0;
    Bounds bounds;
    double global_minimum_value = 0.0;
    // Documented difficulty metadata (basin count); informational only.
    int local_minima = 0;

    // Exact formula value at x. HTN's open cube is handled by nudging
    // boundary coordinates to [1e-9, 1 - 1e-9]; anything farther outside
    // any problem's box than kClampTolerance is rejected.
    double evaluate(const Eigen::VectorXd& x) const;
};

// Absolute slack allowed outside the box before evaluate() rejects; inputs
// within it are clamped onto the boundary. Covers round-off from the
// acquisition optimizer's arithmetic at the walls.
inline constexpr double kClampTolerance = 1e-9;

// Reference "Global Solution" value for the problem (three-decimal data).
double reference_solution(const TestProblem& problem);

const std::vector<TestProblem>& all_problems();

// Lookup by name (GRL, ROS, MOT, ACY, RAS, HTN); throws on unknown names.
const TestProblem& problem_by_name(std::string_view name);

} // namespace acqfam

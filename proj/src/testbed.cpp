#include "acqfam/testbed.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace acqfam {
namespace {

constexpr double kPi = std::numbers::pi;

double gramacy_lee(const Eigen::VectorXd& x) {
    const double t = x[0];
    const double quart = (t - 1.0) * (t - 1.0);
    return std::sin(10.0 * kPi * t) / (2.0 * t) + quart * quart;
}

double rosenbrock(const Eigen::VectorXd& x) {
    const double a = x[1] - x[0] * x[0];
    const double b = x[0] - 1.0;
    return 100.0 * a * a + b * b;
}

double townsend(const Eigen::VectorXd& x) {
    const double c = std::cos((x[0] - 0.1) * x[1]);
    return -c * c - x[0] * std::sin(3.0 * x[0] + x[1]);
}

double ackley(const Eigen::VectorXd& x) {
    const double mean_sq = 0.5 * (x[0] * x[0] + x[1] * x[1]);
    const double mean_cos = 0.5 * (std::cos(2.0 * kPi * x[0]) + std::cos(2.0 * kPi * x[1]));
    return -20.0 * std::exp(-0.2 * std::sqrt(mean_sq)) - std::exp(mean_cos) + 20.0 +
           std::numbers::e;
}

double rastrigin(const Eigen::VectorXd& x) {
    double total = 20.0;
    for (int i = 0; i < 2; ++i)
        total += x[i] * x[i] - 10.0 * std::cos(2.0 * kPi * x[i]);
    return total;
}

// Hartman 6-d constants as printed (P entries carry the 1e-4 scale).
constexpr double kHtnAlpha[4] = {1.0, 1.2, 3.0, 3.2};
constexpr double kHtnA[4][6] = {
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
};
constexpr double kHtnP[4][6] = {
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
};

double hartman(const Eigen::VectorXd& x) {
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
        double expo = 0.0;
        for (int j = 0; j < 6; ++j) {
            const double d = x[j] - kHtnP[i][j];
            expo += kHtnA[i][j] * d * d;
        }
        total -= kHtnAlpha[i] * std::exp(-expo);
    }
    return total;
}

// HTN's cube is open; boundary queries are nudged inside by this margin.
constexpr double kOpenCubeMargin = 1e-9;

std::vector<TestProblem> build_problems() {
    const Bounds unit_square{{-2.0, 2.0}, {-2.0, 2.0}};
    std::vector<TestProblem> problems;
    problems.push_back({"GRL", 1, {{0.5, 2.5}}, -0.869, 10});
    problems.push_back({"ROS", 2, unit_square, 0.0, 1});
    problems.push_back({"MOT", 2, unit_square, -2.969, 6});
    problems.push_back({"ACY", 2, unit_square, 0.0, 25});
    problems.push_back({"RAS", 2, unit_square, 0.0, 25});
    problems.push_back({"HTN", 6,
                        Bounds(6, Interval{0.0, 1.0}), -3.322, 6});
    return problems;
}

} // namespace

double TestProblem::evaluate(const Eigen::VectorXd& x) const {
    if (x.size() != dimension)
        throw std::invalid_argument(name + ": expected " + std::to_string(dimension) +
                                    "-dimensional input");
    Eigen::VectorXd clamped(x.size());
    for (int k = 0; k < dimension; ++k) {
        const Interval& iv = bounds[static_cast<std::size_t>(k)];
        double c = x[k];
        if (!std::isfinite(c) || c < iv.lo - kClampTolerance || c > iv.hi + kClampTolerance)
            throw std::domain_error(name + ": coordinate " + std::to_string(k + 1) +
                                    " outside the domain");
        c = iv.clamp(c);
        if (name == "HTN") {
            // open cube: keep strictly inside
            if (c < kOpenCubeMargin) c = kOpenCubeMargin;
            if (c > 1.0 - kOpenCubeMargin) c = 1.0 - kOpenCubeMargin;
        }
        clamped[k] = c;
    }

    if (name == "GRL") return gramacy_lee(clamped);
    if (name == "ROS") return rosenbrock(clamped);
    if (name == "MOT") return townsend(clamped);
    if (name == "ACY") return ackley(clamped);
    if (name == "RAS") return rastrigin(clamped);
    if (name == "HTN") return hartman(clamped);
    throw std::invalid_argument("unknown problem: " + name);
}

double reference_solution(const TestProblem& problem) {
    return problem.global_minimum_value;
}

const std::vector<TestProblem>& all_problems() {
    static const std::vector<TestProblem> problems = build_problems();
    return problems;
}

const TestProblem& problem_by_name(std::string_view name) {
    for (const auto& p : all_problems())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown problem: " + std::string(name));
}

} // namespace acqfam

#pragma once

#include <Eigen/Core>

#include <vector>

namespace acqfam {

// Input-output pairs observed so far. Inputs are stored column-major
// (dimension x size) so kernel code can map them without copies.
class Dataset {
public:
    explicit Dataset(int dimension);

    // Appends one observation. Rejects dimension mismatches, non-finite
    // values, and inputs that duplicate an existing one to within
    // kDuplicateTolerance in every coordinate.
    void add(const Eigen::VectorXd& x, double y);

    int dimension() const noexcept { return dim_; }
    int size() const noexcept { return n_; }

    Eigen::Map<const Eigen::MatrixXd> inputs() const noexcept;
    Eigen::Map<const Eigen::VectorXd> outputs() const noexcept;

    Eigen::VectorXd input(int i) const;
    double output(int i) const;

    // Incumbent: smallest output, and the input that produced it (first one
    // on exact ties).
    double min_output() const;
    Eigen::VectorXd best_input() const;

    static constexpr double kDuplicateTolerance = 1e-12;

private:
    int dim_;
    int n_ = 0;
    std::vector<double> inputs_;  // column i at [i*dim_, (i+1)*dim_)
    std::vector<double> outputs_;
};

} // namespace acqfam

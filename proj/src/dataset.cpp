#include "acqfam/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace acqfam {

Dataset::Dataset(int dimension) : dim_(dimension) {
    if (dimension < 1) throw std::invalid_argument("Dataset: dimension must be >= 1");
}

void Dataset::add(const Eigen::VectorXd& x, double y) {
    if (x.size() != dim_) throw std::invalid_argument("Dataset::add: dimension mismatch");
    if (!x.allFinite() || !std::isfinite(y))
        throw std::invalid_argument("Dataset::add: non-finite observation");
    for (int i = 0; i < n_; ++i) {
        bool duplicate = true;
        for (int k = 0; k < dim_; ++k) {
            if (std::abs(inputs_[static_cast<std::size_t>(i) * dim_ + k] - x[k]) >
                kDuplicateTolerance) {
                duplicate = false;
                break;
            }
        }
        if (duplicate)
            throw std::invalid_argument("Dataset::add: duplicate input at index " +
                                        std::to_string(i));
    }
    inputs_.insert(inputs_.end(), x.data(), x.data() + dim_);
    outputs_.push_back(y);
    ++n_;
}

Eigen::Map<const Eigen::MatrixXd> Dataset::inputs() const noexcept {
    return {inputs_.data(), dim_, n_};
}

Eigen::Map<const Eigen::VectorXd> Dataset::outputs() const noexcept {
    return {outputs_.data(), n_};
}

Eigen::VectorXd Dataset::input(int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("Dataset::input: index out of range");
    return inputs().col(i);
}

double Dataset::output(int i) const {
    if (i < 0 || i >= n_) throw std::out_of_range("Dataset::output: index out of range");
    return outputs_[static_cast<std::size_t>(i)];
}

double Dataset::min_output() const {
    if (n_ == 0) throw std::logic_error("Dataset::min_output: empty dataset");
    return outputs().minCoeff();
}

Eigen::VectorXd Dataset::best_input() const {
    if (n_ == 0) throw std::logic_error("Dataset::best_input: empty dataset");
    int best = 0;
    for (int i = 1; i < n_; ++i)
        if (outputs_[static_cast<std::size_t>(i)] < outputs_[static_cast<std::size_t>(best)])
            best = i;
    return input(best);
}

} // namespace acqfam

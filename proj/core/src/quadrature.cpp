#include "multiflow/quadrature.hpp"

#include <string>

#include "multiflow/errors.hpp"

namespace multiflow {

QuadratureSet::QuadratureSet(std::vector<double> labels, std::vector<double> weights,
                             std::vector<double> masses)
    : labels_(std::move(labels)), weights_(std::move(weights)), masses_(std::move(masses)) {
    if (weights_.empty())
        throw StructuralError("QuadratureSet: at least one phase required");
    if (labels_.size() != weights_.size() || masses_.size() != weights_.size())
        throw StructuralError("QuadratureSet: labels/weights/masses sizes differ");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (weights_[i] <= 0.0)
            throw StructuralError("QuadratureSet: weight " + std::to_string(i) +
                                  " is not positive");
        if (masses_[i] <= 0.0)
            throw StructuralError("QuadratureSet: mass " + std::to_string(i) +
                                  " is not positive");
    }
}

QuadratureSet QuadratureSet::unit(std::vector<double> masses) {
    std::vector<double> labels(masses.size()), weights(masses.size(), 1.0);
    for (std::size_t i = 0; i < masses.size(); ++i) labels[i] = static_cast<double>(i);
    return QuadratureSet(std::move(labels), std::move(weights), std::move(masses));
}

QuadratureSet QuadratureSet::trapezoid(int m, std::vector<double> masses) {
    if (m < 2) throw StructuralError("QuadratureSet::trapezoid: need at least 2 nodes");
    if (static_cast<int>(masses.size()) != m)
        throw StructuralError("QuadratureSet::trapezoid: mass count does not match node count");
    const double dx = 1.0 / (m - 1);
    std::vector<double> labels(static_cast<std::size_t>(m)), weights(static_cast<std::size_t>(m), dx);
    for (int k = 0; k < m; ++k) labels[static_cast<std::size_t>(k)] = k * dx;
    weights.front() = 0.5 * dx;
    weights.back() = 0.5 * dx;
    return QuadratureSet(std::move(labels), std::move(weights), std::move(masses));
}

double QuadratureSet::weighted_mass_total() const {
    double s = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) s += weights_[i] * masses_[i];
    return s;
}

bool QuadratureSet::operator==(const QuadratureSet& o) const {
    return labels_ == o.labels_ && weights_ == o.weights_ && masses_ == o.masses_;
}

}  // namespace multiflow

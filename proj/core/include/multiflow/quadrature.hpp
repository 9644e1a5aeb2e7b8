#pragma once

#include <vector>

namespace multiflow {

// Discrete family of phases: labels a_i, positive quadrature weights w_i,
// prescribed masses c_i. Phase sums are always weighted by w_i, so the
// same code covers a finite phase set (unit weights) and a quadrature
// discretization of a continuous label interval. Consistency with the
// torus volume, sum w_i c_i = (2pi)^dim, is checked by validate() where
// the grid dimension is known.
class QuadratureSet {
  public:
    QuadratureSet(std::vector<double> labels, std::vector<double> weights,
                  std::vector<double> masses);

    // n phases with labels 0..n-1 and unit weights.
    static QuadratureSet unit(std::vector<double> masses);
    // m trapezoid nodes on the label interval [0,1].
    static QuadratureSet trapezoid(int m, std::vector<double> masses);

    int n() const { return static_cast<int>(weights_.size()); }
    const std::vector<double>& labels() const { return labels_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& masses() const { return masses_; }
    double weight(int i) const { return weights_[static_cast<std::size_t>(i)]; }
    double mass(int i) const { return masses_[static_cast<std::size_t>(i)]; }
    double weighted_mass_total() const;

    bool operator==(const QuadratureSet& o) const;

  private:
    std::vector<double> labels_;
    std::vector<double> weights_;
    std::vector<double> masses_;
};

}  // namespace multiflow

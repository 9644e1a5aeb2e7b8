#pragma once

#include <functional>
#include <vector>

#include "multiflow/grid.hpp"

namespace multiflow {

// Real scalar function sampled on the grid nodes.
class ScalarField {
  public:
    explicit ScalarField(const Grid& grid, double fill = 0.0);
    ScalarField(const Grid& grid, std::vector<double> values);

    // Samples f(x) in 1D, f(x,y) in 2D.
    static ScalarField sample(const Grid& grid,
                              const std::function<double(double, double)>& f);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(double c);

  private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
// Pointwise product, no dealiasing; callers that feed nonlinear terms
// back into spectral work dealias the result themselves.
ScalarField multiply(const ScalarField& a, const ScalarField& b);

double min_value(const ScalarField& f);
double max_abs(const ScalarField& f);
double mean(const ScalarField& f);

// Vector field with dim components, each a ScalarField on the same grid.
class VectorField {
  public:
    explicit VectorField(const Grid& grid, double fill = 0.0);
    VectorField(std::vector<ScalarField> components);

    static VectorField sample(const Grid& grid,
                              const std::function<double(double, double)>& fx,
                              const std::function<double(double, double)>& fy);

    const Grid& grid() const { return components_[0].grid(); }
    int dim() const { return static_cast<int>(components_.size()); }
    const ScalarField& operator[](int c) const { return components_[c]; }
    ScalarField& operator[](int c) { return components_[c]; }

    VectorField& operator+=(const VectorField& o);
    VectorField& operator-=(const VectorField& o);
    VectorField& operator*=(double c);

  private:
    std::vector<ScalarField> components_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double c, VectorField a);
// Pointwise u . v.
ScalarField dot(const VectorField& a, const VectorField& b);
// Pointwise rho * u per component.
VectorField multiply(const ScalarField& rho, const VectorField& u);
// Largest pointwise Euclidean magnitude.
double max_speed(const VectorField& u);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace multiflow

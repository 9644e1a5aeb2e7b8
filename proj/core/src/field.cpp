#include "multiflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "multiflow/errors.hpp"

namespace multiflow {

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (a != b)
        throw StructuralError(std::string(where) + ": grids differ (" +
                              std::to_string(a.dim()) + "D N=" + std::to_string(a.n()) +
                              " vs " + std::to_string(b.dim()) + "D N=" + std::to_string(b.n()) + ")");
}

ScalarField::ScalarField(const Grid& grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw StructuralError("ScalarField: value count " + std::to_string(values_.size()) +
                              " does not match grid size " + std::to_string(grid_.size()));
}

ScalarField ScalarField::sample(const Grid& grid,
                                const std::function<double(double, double)>& f) {
    ScalarField out(grid);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(grid.x(i), grid.y(i));
    return out;
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
    require_same_grid(grid_, o.grid_, "ScalarField::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "multiply");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

double min_value(const ScalarField& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double mean(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s / static_cast<double>(f.size());
}

VectorField::VectorField(const Grid& grid, double fill) {
    components_.reserve(grid.dim());
    for (int c = 0; c < grid.dim(); ++c) components_.emplace_back(grid, fill);
}

VectorField::VectorField(std::vector<ScalarField> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw StructuralError("VectorField: no components");
    const Grid& g = components_[0].grid();
    if (static_cast<int>(components_.size()) != g.dim())
        throw StructuralError("VectorField: component count " +
                              std::to_string(components_.size()) + " does not match dim " +
                              std::to_string(g.dim()));
    for (const auto& c : components_) require_same_grid(g, c.grid(), "VectorField");
}

VectorField VectorField::sample(const Grid& grid,
                                const std::function<double(double, double)>& fx,
                                const std::function<double(double, double)>& fy) {
    std::vector<ScalarField> comps;
    comps.push_back(ScalarField::sample(grid, fx));
    if (grid.dim() == 2) comps.push_back(ScalarField::sample(grid, fy));
    return VectorField(std::move(comps));
}

VectorField& VectorField::operator+=(const VectorField& o) {
    if (dim() != o.dim()) throw StructuralError("VectorField::operator+=: dim mismatch");
    for (int c = 0; c < dim(); ++c) components_[c] += o.components_[c];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
    if (dim() != o.dim()) throw StructuralError("VectorField::operator-=: dim mismatch");
    for (int c = 0; c < dim(); ++c) components_[c] -= o.components_[c];
    return *this;
}

VectorField& VectorField::operator*=(double c) {
    for (auto& comp : components_) comp *= c;
    return *this;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double c, VectorField a) { return a *= c; }

ScalarField dot(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "dot");
    ScalarField out(a.grid());
    for (int c = 0; c < a.dim(); ++c)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += a[c][i] * b[c][i];
    return out;
}

VectorField multiply(const ScalarField& rho, const VectorField& u) {
    require_same_grid(rho.grid(), u.grid(), "multiply");
    VectorField out(u.grid());
    for (int c = 0; c < u.dim(); ++c) out[c] = multiply(rho, u[c]);
    return out;
}

double max_speed(const VectorField& u) {
    double m2 = 0.0;
    for (std::size_t i = 0; i < u[0].size(); ++i) {
        double s2 = 0.0;
        for (int c = 0; c < u.dim(); ++c) s2 += u[c][i] * u[c][i];
        m2 = std::max(m2, s2);
    }
    return std::sqrt(m2);
}

}  // namespace multiflow

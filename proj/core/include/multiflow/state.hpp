#pragma once

#include <string>
#include <vector>

#include "multiflow/field.hpp"
#include "multiflow/quadrature.hpp"

namespace multiflow {

// Numerical invariant tolerances. Constructors only enforce structure
// (matching sizes and grids); these numbers are what validate() holds
// states to, and what the time stepper maintains.
namespace tol {
inline constexpr double quad_total = 1e-10;        // |sum w_i c_i - (2pi)^d|
inline constexpr double density_sum = 1e-10;       // ||sum w_i rho_i - 1||_inf
inline constexpr double mass = 1e-10;              // |integral rho_i - c_i|
inline constexpr double constraint_l2 = 1e-8;      // ||div sum w_i rho_i u_i||_2
inline constexpr double tangent_sum = 1e-10;       // ||sum w_i xi_i||_inf
inline constexpr double tangent_mean = 1e-10;      // |integral xi_i|
inline constexpr double coclosed_l2 = 1e-8;        // ||div sum w_i rho_i alpha_i||_2
inline constexpr double base_normal_form = 1e-12;  // last component / means of base tuple
}  // namespace tol

struct CheckResult {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool pass = true;

    void add(std::string name, double residual, double tolerance);
    // For checks that are not of residual-below-tolerance shape
    // (e.g. strict positivity); value is recorded in the residual slot.
    void add(std::string name, double value, double threshold, bool ok);
    std::string summary() const;
};

// Weighted density tuple: rho_i > 0, sum_i w_i rho_i = 1 pointwise,
// integral rho_i = c_i.
struct MultiDensity {
    MultiDensity(QuadratureSet quad, std::vector<ScalarField> rho);

    QuadratureSet quad;
    std::vector<ScalarField> rho;

    const Grid& grid() const { return rho[0].grid(); }
    int n() const { return quad.n(); }
};

// Velocity tuple over a density; lies in the constrained bundle when
// div(sum_i w_i rho_i u_i) = 0.
struct MultiVelocity {
    MultiVelocity(QuadratureSet quad, std::vector<VectorField> u);

    QuadratureSet quad;
    std::vector<VectorField> u;

    const Grid& grid() const { return u[0].grid(); }
    int n() const { return quad.n(); }
};

// Tangent vector to the space of density tuples: sum_i w_i xi_i = 0
// pointwise and each xi_i integrates to zero.
struct TangentDensity {
    TangentDensity(QuadratureSet quad, std::vector<ScalarField> xi);

    QuadratureSet quad;
    std::vector<ScalarField> xi;

    const Grid& grid() const { return xi[0].grid(); }
    int n() const { return quad.n(); }
};

// Momentum coset in its co-closed normal form: the one representative
// alpha of [alpha] with div(sum_i w_i rho_i alpha_i) = 0. Carries the
// density the normal form was taken against. Built by normalize_coset.
struct MomentumCoset {
    MomentumCoset(MultiDensity density, std::vector<VectorField> alpha);

    MultiDensity density;
    std::vector<VectorField> alpha;

    const Grid& grid() const { return alpha[0].grid(); }
    int n() const { return density.n(); }
    const QuadratureSet& quad() const { return density.quad; }
};

// Cotangent element (fiber velocity tuple, base function tuple). The
// base tuple is a coset of common functions; its normal form has the
// last component identically zero and every component mean-zero.
struct DualCotangent {
    DualCotangent(MultiVelocity fiber, std::vector<ScalarField> base);

    MultiVelocity fiber;
    std::vector<ScalarField> base;

    const Grid& grid() const { return fiber.grid(); }
    int n() const { return fiber.n(); }
};

// sum_i w_i f_i
ScalarField weighted_sum(const QuadratureSet& quad, const std::vector<ScalarField>& f);
// sum_i w_i rho_i v_i
VectorField weighted_momentum(const MultiDensity& rho, const std::vector<VectorField>& v);
// ||div(sum_i w_i rho_i v_i)||_2
double constraint_residual_l2(const MultiDensity& rho, const std::vector<VectorField>& v);

ValidationReport validate(const QuadratureSet& quad, int dim);
ValidationReport validate(const MultiDensity& rho);
ValidationReport validate(const MultiVelocity& u, const MultiDensity& rho);
ValidationReport validate(const TangentDensity& xi);
ValidationReport validate(const MomentumCoset& a);
ValidationReport validate(const DualCotangent& x, const MultiDensity& rho);

// Shifts every component by a common exact gradient so the weighted
// momentum of the result is divergence-free; the unique co-closed
// representative of the coset spanned by alpha_raw.
MomentumCoset normalize_coset(std::vector<VectorField> alpha_raw, const MultiDensity& rho);

// Normal form of a function coset: subtract the last component from
// all components, then subtract each component's mean.
std::vector<ScalarField> normalize_dual_cotangent(std::vector<ScalarField> f);

}  // namespace multiflow

#pragma once

#include <functional>
#include <vector>

#include "multiflow/state.hpp"

namespace multiflow {

// Anchor of the constrained velocity bundle: the induced motion of the
// density tuple, xi_i = -div(rho_i u_i).
TangentDensity anchor(const MultiVelocity& u, const MultiDensity& rho);

// Dual anchor on function cosets: [f] -> co-closed representative of
// the gradient tuple (df_1, ..., df_n).
MomentumCoset anchor_dual(const std::vector<ScalarField>& f, const MultiDensity& rho);

// Removes the common-gradient obstruction to the weighted-momentum
// constraint: solve lap f = div(sum w rho v), return u_i = v_i - grad f.
MultiVelocity project_constraint(const MultiVelocity& v, const MultiDensity& rho);

struct ExactProjection {
    MultiVelocity remainder;              // u_i - grad f_i
    std::vector<ScalarField> potentials;  // f_i, zero-mean
};
// Per-phase L2(rho_i)-orthogonal splitting u_i = (u_i - grad f_i) + grad f_i
// with div(rho_i grad f_i) = div(rho_i u_i), so div(rho_i remainder_i) = 0.
ExactProjection project_exact(const MultiVelocity& u, const MultiDensity& rho);

// Inertia of the kinetic energy: u -> [u^flat]. The flat map is the
// component identity here, so this is the co-closed normal form of u.
MomentumCoset inertia(const MultiVelocity& u, const MultiDensity& rho);
// Sharp of the co-closed representative; lands back in the constrained
// bundle, and round-trips with inertia on constrained velocities.
MultiVelocity inertia_inverse(const MomentumCoset& a);

// sum_i w_i integral (alpha_i . v_i) rho_i vol. Well-defined on cosets
// when v is constrained; pairing_raw accepts any representative.
double pairing(const MomentumCoset& a, const MultiVelocity& v);
double pairing_raw(const QuadratureSet& quad, const std::vector<VectorField>& alpha,
                   const MultiVelocity& v, const MultiDensity& rho);

// Canonical Poisson tensor at (a, rho) on covectors x=(u,[f]), y=(v,[g]):
// sum_i w_i integral (-d alpha_i(u_i,v_i) + u_i.grad g_i - v_i.grad f_i) rho_i vol.
double poisson_tensor(const MomentumCoset& a, const DualCotangent& x, const DualCotangent& y);
// Equivalent Lie-Poisson-shaped expression
// sum_i w_i integral (alpha_i.[u_i,v_i] + v_i.grad(u_i.alpha_i - f_i)
//                     - u_i.grad(v_i.alpha_i - g_i)) rho_i vol,
// kept as an independent evaluation route.
double poisson_tensor_lie_form(const MomentumCoset& a, const DualCotangent& x,
                               const DualCotangent& y);

struct HamiltonianVector {
    MomentumCoset da;
    TangentDensity dmu;
};
// Raising of the tensor: x=(u,[f]) -> ( -[i_u d alpha + df], -L_u mu ),
// both parts in normal form.
HamiltonianVector hamiltonian_operator(const MomentumCoset& a, const DualCotangent& x);

// <(v,[g]), (da, dmu)> = pairing(da, v) + sum_i w_i integral g_i dmu_i vol.
double tangent_cotangent_pairing(const DualCotangent& y, const HamiltonianVector& t);

struct EnergyDifferential {
    double H;
    DualCotangent dH;  // fiber: alpha sharp; base: [ (alpha,alpha)/2 ]
};
// Kinetic energy H = 1/2 sum_i w_i integral |alpha_i|^2 rho_i vol and its
// differential on the dual bundle.
EnergyDifferential energy_and_dH(const MomentumCoset& a);

// Section of the constrained bundle as a map of the density tuple.
// fd_step is the centered-difference step for derivatives of this
// section along anchor directions.
struct Section {
    std::function<MultiVelocity(const MultiDensity&)> eval;
    double fd_step = 1e-4;
};

// V(rho) = project_constraint(raw, rho).
Section make_projected_constant_section(std::vector<VectorField> raw, double fd_step = 1e-4);
// V(rho) = project_constraint(gradient tuple of potentials, rho).
Section make_potential_section(std::vector<ScalarField> potentials, double fd_step = 1e-4);

using DensityFunctional = std::function<double(const MultiDensity&)>;

// (F V)(rho) = F(rho) V(rho).
Section scale_section(DensityFunctional F, Section V);

// Centered-difference derivative of F along the anchor of U at rho.
double derivative_along_anchor(const DensityFunctional& F, const Section& U,
                               const MultiDensity& rho, double h);

struct BracketResult {
    MultiVelocity value;
    double constraint_residual;  // ||div sum w rho value||_2
};
// Bracket of sections: pointwise vector-field commutator of the values
// plus the exchange of base-directional derivatives along the anchors.
// Derivatives of V use V.fd_step, of U use U.fd_step; a step that
// pushes the density out of the positive cone throws PositivityError.
BracketResult bracket_sections(const Section& U, const Section& V, const MultiDensity& rho);

// (u . grad) w, one phase; no truncation applied.
VectorField advect(const VectorField& u, const VectorField& w);

}  // namespace multiflow

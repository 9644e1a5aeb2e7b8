#pragma once

#include <vector>

#include "multiflow/algebroid.hpp"
#include "multiflow/state.hpp"

namespace multiflow {

// Time-marching state of the system: per-phase velocities and densities
// sharing one grid and quadrature, plus the pressure from the most
// recent RHS evaluation (zero until the first step).
struct FlowState {
    FlowState(MultiVelocity u_, MultiDensity rho_, double t_ = 0.0);

    MultiVelocity u;
    MultiDensity rho;
    double t;
    ScalarField pressure;

    const Grid& grid() const { return rho.grid(); }
    int n() const { return rho.n(); }
};

// The common pressure enforcing the weighted-momentum constraint:
// lap p = -div sum_j w_j (rho_j (u_j.grad)u_j + div(rho_j u_j) u_j),
// zero-mean gauge. With one phase of unit density this collapses to
// lap p = -div((u.grad)u).
ScalarField pressure_solve(const MultiVelocity& u, const MultiDensity& rho);

struct VelocityRhs {
    std::vector<VectorField> du;    // -(u_j.grad)u_j - grad p
    std::vector<ScalarField> drho;  // -div(rho_j u_j)
    ScalarField pressure;
};
VelocityRhs rhs_velocity(const MultiVelocity& u, const MultiDensity& rho);

// The same dynamics on momentum cosets:
// da/dt = -[ i_u d alpha + d (alpha,alpha)/2 ], dmu/dt = -div(rho_j u_j),
// assembled from the energy differential and the Hamiltonian operator.
HamiltonianVector rhs_coset(const MomentumCoset& a);

// Max over phases of ||.||_2 distance between rhs_coset applied to
// inertia(u, rho) and the flattened, normalized velocity-form tendency.
// Small on constrained states; the two routes differ by an exact form.
double rhs_consistency_residual(const MultiVelocity& u, const MultiDensity& rho);

struct StepOptions {
    double cfl_max = 0.5;  // bound on dt max|u| N / (2pi)
    bool renormalize = true;
    bool reproject = true;
};

struct StepReport {
    double constraint_drift_inf;  // ||sum w rho - 1||_inf before renormalization
    double divergence_l2;         // ||div sum w rho u||_2 after reprojection
    double min_density;           // after the step
};

// One classical RK4 step of the velocity-form dynamics. Afterwards the
// densities are divided by their pointwise weighted sum, each mass is
// restored exactly by a constant shift (the weighted mass identity
// makes the shifts sum to zero pointwise), and the velocities are
// reprojected onto the constraint. Positivity is monitored, never
// enforced; losing it throws PositivityError. A CFL violation throws.
StepReport step_rk4(FlowState& s, double dt, const StepOptions& opt = {});

// Same step co-evolving per-phase vorticity 2-form coefficients by
// d/dt w_i + div(w_i u_i) = 0 through identical RK4 stages. 2D only.
StepReport step_rk4_with_kelvin(FlowState& s, std::vector<ScalarField>& w, double dt,
                                const StepOptions& opt = {});

// One RK4 step reporting each stage velocity to hook(stage, u) in
// Butcher order (1..4), so node-sampled quantities can be integrated
// through the very same stages.
StepReport step_rk4_staged(FlowState& s, double dt, const StepOptions& opt,
                           const std::function<void(int, const MultiVelocity&)>& hook);

struct KelvinReport {
    std::vector<double> transport_error;  // ||w_i(T)-curl u_i(T)||_2 over ||curl u_i(0)||_2
                                          // (absolute when the initial curl vanishes)
    std::vector<double> initial_curl_l2;
    std::vector<double> final_curl_l2;
};
// Circulation transport check: marches to T with co-evolved vorticity
// coefficients and compares them against curl of the evolved velocity.
// The curl of the common-gradient force vanishes spectrally, so the two
// fields obey the same discrete transport and the reported defect sits
// at the roundoff floor for any dt; the integrator's fourth-order error
// is visible only against a refined-march reference, never here.
KelvinReport kelvin_check(FlowState s, double T, double dt, const StepOptions& opt = {});

struct MetricResult {
    double value;
    std::vector<ScalarField> potentials;  // zero-mean f_i
};
// Squared length of a density-tangent in the induced metric: solve
// div(rho_i grad f_i) = -xi_i phase by phase, then
// value = sum_i w_i integral |grad f_i|^2 rho_i vol.
MetricResult mdens_metric(const TangentDensity& xi, const MultiDensity& rho);

struct PushforwardReport {
    std::vector<double> max_mismatch;  // per phase, max-norm against the PDE density
    double min_jacobian;               // min over phases and nodes of dphi/dx at T
};
// 1D cross-check of the two transport readings: integrates each phase
// flow map (and its Jacobian) through the same RK4 stages as the PDE,
// then compares rho_i(0, phi^-1(y)) / phi'(phi^-1(y)) with the
// PDE-evolved rho_i(T). The sampled maps are inverted by monotone cubic
// interpolation on the circle; losing monotonicity throws FoldError.
PushforwardReport pushforward_check_1d(FlowState s, double T, double dt,
                                       const StepOptions& opt = {});

}  // namespace multiflow

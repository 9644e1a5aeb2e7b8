#pragma once

// Independent single-phase incompressible Euler integrator in
// vorticity-stream form, used as a reduction oracle. It shares only the
// low-level spectral primitives with the production solver; the
// formulation (vorticity transport + stream function reconstruction)
// and the time loop are separate code paths with no pressure solve and
// no projection.

#include "multiflow/field.hpp"
#include "multiflow/spectral.hpp"

namespace refsolve {

using multiflow::ScalarField;
using multiflow::VectorField;

// u = (d psi/dy, -d psi/dx) with lap psi = -omega, mean-zero gauge.
inline VectorField velocity_from_vorticity(const ScalarField& omega) {
    ScalarField rhs = omega;
    rhs *= -1.0;
    ScalarField psi = multiflow::solve_poisson(rhs);
    VectorField gpsi = multiflow::gradient(psi);
    std::vector<ScalarField> comps;
    comps.push_back(gpsi[1]);
    ScalarField minus_dx = gpsi[0];
    minus_dx *= -1.0;
    comps.push_back(std::move(minus_dx));
    return VectorField(std::move(comps));
}

inline ScalarField vorticity_rhs(const ScalarField& omega) {
    VectorField u = velocity_from_vorticity(omega);
    ScalarField adv = multiflow::dealias(multiflow::dot(u, multiflow::gradient(omega)));
    adv *= -1.0;
    return adv;
}

// Classical RK4 on the scalar vorticity equation d omega/dt = -u.grad omega.
inline ScalarField march_vorticity(ScalarField omega, double dt, long steps) {
    for (long s = 0; s < steps; ++s) {
        ScalarField k1 = vorticity_rhs(omega);
        ScalarField y2 = omega;
        {
            ScalarField t = k1;
            t *= 0.5 * dt;
            y2 += t;
        }
        ScalarField k2 = vorticity_rhs(y2);
        ScalarField y3 = omega;
        {
            ScalarField t = k2;
            t *= 0.5 * dt;
            y3 += t;
        }
        ScalarField k3 = vorticity_rhs(y3);
        ScalarField y4 = omega;
        {
            ScalarField t = k3;
            t *= dt;
            y4 += t;
        }
        ScalarField k4 = vorticity_rhs(y4);
        for (std::size_t j = 0; j < omega.size(); ++j)
            omega[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
    }
    return omega;
}

}  // namespace refsolve

#include "multiflow/algebroid.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {
namespace {

void require_phases(int a, int b, const char* where) {
    if (a != b)
        throw StructuralError(std::string(where) + ": phase counts differ (" +
                              std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// Interior product i_u d(alpha) for a single phase. In 2D, with
// c = curl alpha the 2-form coefficient, the resulting 1-form has
// components (-c u_y, c u_x); in 1D every 1-form is closed.
VectorField interior_exterior(const VectorField& u, const VectorField& alpha) {
    const Grid& g = u.grid();
    if (g.dim() == 1) return VectorField(g);
    ScalarField c = curl2d(alpha);
    VectorField out(g);
    for (std::size_t j = 0; j < c.size(); ++j) {
        out[0][j] = -c[j] * u[1][j];
        out[1][j] = c[j] * u[0][j];
    }
    return out;
}

// d alpha(u, v): c (u_x v_y - u_y v_x) in 2D, identically zero in 1D.
ScalarField exterior_pairing(const VectorField& alpha, const VectorField& u,
                             const VectorField& v) {
    const Grid& g = alpha.grid();
    if (g.dim() == 1) return ScalarField(g);
    ScalarField c = curl2d(alpha);
    ScalarField out(g);
    for (std::size_t j = 0; j < c.size(); ++j)
        out[j] = c[j] * (u[0][j] * v[1][j] - u[1][j] * v[0][j]);
    return out;
}

MultiDensity perturb_density(const MultiDensity& rho, const TangentDensity& xi, double t) {
    std::vector<ScalarField> out;
    out.reserve(rho.rho.size());
    for (std::size_t i = 0; i < rho.rho.size(); ++i) {
        ScalarField r = rho.rho[i];
        const ScalarField& x = xi.xi[i];
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += t * x[j];
        if (min_value(r) <= 0.0)
            throw PositivityError(
                "bracket_sections: finite-difference step left the positive density cone "
                "(phase " + std::to_string(i) + "); reduce fd_step");
        out.push_back(std::move(r));
    }
    return MultiDensity(rho.quad, std::move(out));
}

}  // namespace

VectorField advect(const VectorField& u, const VectorField& w) {
    require_same_grid(u.grid(), w.grid(), "advect");
    VectorField out(u.grid());
    for (int d = 0; d < w.dim(); ++d) {
        VectorField gw = gradient(w[d]);
        out[d] = dot(u, gw);
    }
    return out;
}

TangentDensity anchor(const MultiVelocity& u, const MultiDensity& rho) {
    require_phases(u.n(), rho.n(), "anchor");
    require_same_grid(u.grid(), rho.grid(), "anchor");
    std::vector<ScalarField> xi;
    xi.reserve(rho.rho.size());
    for (std::size_t i = 0; i < rho.rho.size(); ++i) {
        ScalarField d = divergence(dealias(multiply(rho.rho[i], u.u[i])));
        d *= -1.0;
        xi.push_back(std::move(d));
    }
    return TangentDensity(rho.quad, std::move(xi));
}

MomentumCoset anchor_dual(const std::vector<ScalarField>& f, const MultiDensity& rho) {
    std::vector<VectorField> alpha;
    alpha.reserve(f.size());
    for (const auto& fi : f) alpha.push_back(gradient(fi));
    return normalize_coset(std::move(alpha), rho);
}

MultiVelocity project_constraint(const MultiVelocity& v, const MultiDensity& rho) {
    require_phases(v.n(), rho.n(), "project_constraint");
    require_same_grid(v.grid(), rho.grid(), "project_constraint");
    ScalarField rhs = divergence(weighted_momentum(rho, v.u));
    VectorField df = gradient(solve_poisson(rhs));
    std::vector<VectorField> out = v.u;
    for (auto& ui : out) ui -= df;
    return MultiVelocity(v.quad, std::move(out));
}

ExactProjection project_exact(const MultiVelocity& u, const MultiDensity& rho) {
    require_phases(u.n(), rho.n(), "project_exact");
    require_same_grid(u.grid(), rho.grid(), "project_exact");
    std::vector<VectorField> rem = u.u;
    std::vector<ScalarField> pots;
    pots.reserve(u.u.size());
    for (std::size_t i = 0; i < u.u.size(); ++i) {
        ScalarField g = divergence(multiply(rho.rho[i], u.u[i]));
        ScalarField f = solve_weighted_poisson(rho.rho[i], g).f;
        rem[i] -= gradient(f);
        pots.push_back(std::move(f));
    }
    return {MultiVelocity(u.quad, std::move(rem)), std::move(pots)};
}

MomentumCoset inertia(const MultiVelocity& u, const MultiDensity& rho) {
    require_phases(u.n(), rho.n(), "inertia");
    return normalize_coset(u.u, rho);
}

MultiVelocity inertia_inverse(const MomentumCoset& a) {
    return MultiVelocity(a.quad(), a.alpha);
}

double pairing_raw(const QuadratureSet& quad, const std::vector<VectorField>& alpha,
                   const MultiVelocity& v, const MultiDensity& rho) {
    require_phases(static_cast<int>(alpha.size()), v.n(), "pairing");
    require_phases(v.n(), rho.n(), "pairing");
    double s = 0.0;
    for (int i = 0; i < v.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        s += quad.weight(i) *
             inner_l2(dot(alpha[idx], v.u[idx]), rho.rho[idx]);
    }
    return s;
}

double pairing(const MomentumCoset& a, const MultiVelocity& v) {
    return pairing_raw(a.quad(), a.alpha, v, a.density);
}

double poisson_tensor(const MomentumCoset& a, const DualCotangent& x, const DualCotangent& y) {
    const MultiDensity& rho = a.density;
    require_phases(x.n(), a.n(), "poisson_tensor");
    require_phases(y.n(), a.n(), "poisson_tensor");
    double s = 0.0;
    for (int i = 0; i < a.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const VectorField& u = x.fiber.u[idx];
        const VectorField& v = y.fiber.u[idx];
        ScalarField integrand = exterior_pairing(a.alpha[idx], u, v);
        integrand *= -1.0;
        integrand += dot(u, gradient(y.base[idx]));
        integrand -= dot(v, gradient(x.base[idx]));
        s += rho.quad.weight(i) * inner_l2(integrand, rho.rho[idx]);
    }
    return s;
}

double poisson_tensor_lie_form(const MomentumCoset& a, const DualCotangent& x,
                               const DualCotangent& y) {
    const MultiDensity& rho = a.density;
    require_phases(x.n(), a.n(), "poisson_tensor_lie_form");
    require_phases(y.n(), a.n(), "poisson_tensor_lie_form");
    double s = 0.0;
    for (int i = 0; i < a.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const VectorField& u = x.fiber.u[idx];
        const VectorField& v = y.fiber.u[idx];
        const VectorField& al = a.alpha[idx];
        VectorField comm = advect(u, v);
        comm -= advect(v, u);
        ScalarField integrand = dot(al, comm);
        ScalarField iua_f = dot(u, al);
        iua_f -= x.base[idx];
        ScalarField iva_g = dot(v, al);
        iva_g -= y.base[idx];
        integrand += dot(v, gradient(iua_f));
        integrand -= dot(u, gradient(iva_g));
        s += rho.quad.weight(i) * inner_l2(integrand, rho.rho[idx]);
    }
    return s;
}

HamiltonianVector hamiltonian_operator(const MomentumCoset& a, const DualCotangent& x) {
    const MultiDensity& rho = a.density;
    require_phases(x.n(), a.n(), "hamiltonian_operator");
    std::vector<VectorField> da;
    da.reserve(a.alpha.size());
    for (int i = 0; i < a.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        VectorField t = dealias(interior_exterior(x.fiber.u[idx], a.alpha[idx]));
        t += gradient(x.base[idx]);
        t *= -1.0;
        da.push_back(std::move(t));
    }
    return {normalize_coset(std::move(da), rho), anchor(x.fiber, rho)};
}

double tangent_cotangent_pairing(const DualCotangent& y, const HamiltonianVector& t) {
    double s = pairing(t.da, y.fiber);
    const QuadratureSet& quad = t.dmu.quad;
    for (int i = 0; i < t.dmu.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        s += quad.weight(i) * inner_l2(y.base[idx], t.dmu.xi[idx]);
    }
    return s;
}

EnergyDifferential energy_and_dH(const MomentumCoset& a) {
    double H = 0.0;
    std::vector<ScalarField> base;
    base.reserve(a.alpha.size());
    for (int i = 0; i < a.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        ScalarField sq = dot(a.alpha[idx], a.alpha[idx]);
        sq *= 0.5;
        H += a.quad().weight(i) * inner_l2(sq, a.density.rho[idx]);
        base.push_back(std::move(sq));
    }
    DualCotangent dH(inertia_inverse(a), normalize_dual_cotangent(std::move(base)));
    return {H, std::move(dH)};
}

Section make_projected_constant_section(std::vector<VectorField> raw, double fd_step) {
    return {[raw = std::move(raw)](const MultiDensity& rho) {
                return project_constraint(MultiVelocity(rho.quad, raw), rho);
            },
            fd_step};
}

Section make_potential_section(std::vector<ScalarField> potentials, double fd_step) {
    std::vector<VectorField> raw;
    raw.reserve(potentials.size());
    for (const auto& p : potentials) raw.push_back(gradient(p));
    return make_projected_constant_section(std::move(raw), fd_step);
}

Section scale_section(DensityFunctional F, Section V) {
    return {[F = std::move(F), ev = V.eval](const MultiDensity& rho) {
                MultiVelocity v = ev(rho);
                const double c = F(rho);
                for (auto& ui : v.u) ui *= c;
                return v;
            },
            V.fd_step};
}

double derivative_along_anchor(const DensityFunctional& F, const Section& U,
                               const MultiDensity& rho, double h) {
    TangentDensity xi = anchor(U.eval(rho), rho);
    const double fp = F(perturb_density(rho, xi, 0.5 * h));
    const double fm = F(perturb_density(rho, xi, -0.5 * h));
    return (fp - fm) / h;
}

BracketResult bracket_sections(const Section& U, const Section& V, const MultiDensity& rho) {
    MultiVelocity u = U.eval(rho);
    MultiVelocity v = V.eval(rho);
    require_phases(u.n(), rho.n(), "bracket_sections");
    require_phases(v.n(), rho.n(), "bracket_sections");
    TangentDensity xi_u = anchor(u, rho);
    TangentDensity xi_v = anchor(v, rho);

    // Centered difference of V along the anchor of U, step V.fd_step.
    MultiVelocity v_plus = V.eval(perturb_density(rho, xi_u, 0.5 * V.fd_step));
    MultiVelocity v_minus = V.eval(perturb_density(rho, xi_u, -0.5 * V.fd_step));
    // And of U along the anchor of V, step U.fd_step.
    MultiVelocity u_plus = U.eval(perturb_density(rho, xi_v, 0.5 * U.fd_step));
    MultiVelocity u_minus = U.eval(perturb_density(rho, xi_v, -0.5 * U.fd_step));

    std::vector<VectorField> out;
    out.reserve(u.u.size());
    for (std::size_t i = 0; i < u.u.size(); ++i) {
        VectorField b = advect(u.u[i], v.u[i]);
        b -= advect(v.u[i], u.u[i]);
        VectorField dv = v_plus.u[i];
        dv -= v_minus.u[i];
        dv *= 1.0 / V.fd_step;
        VectorField du = u_plus.u[i];
        du -= u_minus.u[i];
        du *= 1.0 / U.fd_step;
        b += dv;
        b -= du;
        out.push_back(std::move(b));
    }
    MultiVelocity value(rho.quad, std::move(out));
    double res = constraint_residual_l2(rho, value.u);
    return {std::move(value), res};
}

}  // namespace multiflow

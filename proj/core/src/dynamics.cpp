#include "multiflow/dynamics.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>

#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {
namespace {

int thread_cap() {
    static const int cap = [] {
        const char* env = std::getenv("MULTIFLOW_THREADS");
        if (!env) return 1;
        int v = std::atoi(env);
        return v < 1 ? 1 : std::min(v, 64);
    }();
    return cap;
}

// Runs fn(0..n-1) with up to MULTIFLOW_THREADS workers. Each index
// writes only its own output slots and reductions stay serial, so
// results are identical at any cap.
void for_each_phase(int n, const std::function<void(int)>& fn) {
    const int width = std::min(thread_cap(), n);
    if (width <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(width));
    for (int t = 0; t < width; ++t)
        pool.emplace_back([&] {
            for (;;) {
                int i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

// Every nonlinear product that feeds back into spectral work is
// truncated by the 2/3 rule right where it is formed.
VectorField advect_truncated(const VectorField& u, const VectorField& w) {
    return dealias(advect(u, w));
}

struct PhaseTendency {
    std::vector<VectorField> du;
    std::vector<ScalarField> drho;
    std::vector<ScalarField> dw;  // kelvin coefficients; empty unless tracked
    ScalarField pressure;
};

PhaseTendency tendency(const MultiVelocity& u, const MultiDensity& rho,
                       const std::vector<ScalarField>* w) {
    const Grid& g = rho.grid();
    const int n = rho.n();
    std::vector<VectorField> adv(static_cast<std::size_t>(n), VectorField(g));
    std::vector<ScalarField> mdiv(static_cast<std::size_t>(n), ScalarField(g));
    std::vector<VectorField> contrib(static_cast<std::size_t>(n), VectorField(g));
    for_each_phase(n, [&](int i) {
        const auto idx = static_cast<std::size_t>(i);
        adv[idx] = advect_truncated(u.u[idx], u.u[idx]);
        mdiv[idx] = divergence(dealias(multiply(rho.rho[idx], u.u[idx])));
        VectorField c = dealias(multiply(rho.rho[idx], adv[idx]));
        c += dealias(multiply(mdiv[idx], u.u[idx]));
        c *= rho.quad.weight(i);
        contrib[idx] = std::move(c);
    });
    VectorField S(g);
    for (int i = 0; i < n; ++i) S += contrib[static_cast<std::size_t>(i)];
    ScalarField rhs = divergence(S);
    rhs *= -1.0;
    ScalarField p = solve_poisson(rhs);
    VectorField gp = gradient(p);

    PhaseTendency out{{}, {}, {}, std::move(p)};
    out.du.reserve(n);
    out.drho.reserve(n);
    for (int i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        VectorField d = adv[idx];
        d += gp;
        d *= -1.0;
        out.du.push_back(std::move(d));
        ScalarField dr = mdiv[idx];
        dr *= -1.0;
        out.drho.push_back(std::move(dr));
    }
    if (w) {
        out.dw.assign(static_cast<std::size_t>(n), ScalarField(g));
        for_each_phase(n, [&](int i) {
            const auto idx = static_cast<std::size_t>(i);
            ScalarField dwi = divergence(dealias(multiply((*w)[idx], u.u[idx])));
            dwi *= -1.0;
            out.dw[idx] = std::move(dwi);
        });
    }
    return out;
}

// y + c * dy for the stage combinations.
MultiVelocity stage_u(const MultiVelocity& u, const std::vector<VectorField>& du, double c) {
    std::vector<VectorField> out = u.u;
    for (std::size_t i = 0; i < out.size(); ++i) {
        VectorField t = du[i];
        t *= c;
        out[i] += t;
    }
    return MultiVelocity(u.quad, std::move(out));
}

MultiDensity stage_rho(const MultiDensity& r, const std::vector<ScalarField>& dr, double c) {
    std::vector<ScalarField> out = r.rho;
    for (std::size_t i = 0; i < out.size(); ++i) {
        ScalarField t = dr[i];
        t *= c;
        out[i] += t;
    }
    return MultiDensity(r.quad, std::move(out));
}

std::vector<ScalarField> stage_w(const std::vector<ScalarField>& w,
                                 const std::vector<ScalarField>& dw, double c) {
    std::vector<ScalarField> out = w;
    for (std::size_t i = 0; i < out.size(); ++i) {
        ScalarField t = dw[i];
        t *= c;
        out[i] += t;
    }
    return out;
}

void check_cfl(const FlowState& s, double dt, double cfl_max) {
    double vmax = 0.0;
    for (const auto& ui : s.u.u) vmax = std::max(vmax, max_speed(ui));
    const double cfl = dt * vmax * s.grid().n() / kTwoPi;
    if (cfl > cfl_max)
        throw CflError("step_rk4: advective CFL " + std::to_string(cfl) + " exceeds " +
                       std::to_string(cfl_max) + " (dt " + std::to_string(dt) + ", max speed " +
                       std::to_string(vmax) + ")");
}

using StageHook = std::function<void(int, const MultiVelocity&)>;

StepReport step_impl(FlowState& s, std::vector<ScalarField>* w, double dt,
                     const StepOptions& opt, const StageHook* hook) {
    check_cfl(s, dt, opt.cfl_max);

    int stage_idx = 1;
    auto stage = [&](const PhaseTendency& k, double c) {
        MultiVelocity us = stage_u(s.u, k.du, c);
        if (hook) (*hook)(++stage_idx, us);
        MultiDensity rs = stage_rho(s.rho, k.drho, c);
        if (!w) return tendency(us, rs, nullptr);
        std::vector<ScalarField> ws = stage_w(*w, k.dw, c);
        return tendency(us, rs, &ws);
    };

    if (hook) (*hook)(1, s.u);
    PhaseTendency k1 = tendency(s.u, s.rho, w);
    {
        PhaseTendency k2 = stage(k1, 0.5 * dt);
        PhaseTendency k3 = stage(k2, 0.5 * dt);
        PhaseTendency k4 = stage(k3, dt);
        s.pressure = k4.pressure;

        const double c = dt / 6.0;
        for (std::size_t i = 0; i < s.u.u.size(); ++i) {
            for (int d = 0; d < s.grid().dim(); ++d) {
                auto& uv = s.u.u[i][d].values();
                const auto& a1 = k1.du[i][d].values();
                const auto& a2 = k2.du[i][d].values();
                const auto& a3 = k3.du[i][d].values();
                const auto& a4 = k4.du[i][d].values();
                for (std::size_t j = 0; j < uv.size(); ++j)
                    uv[j] += c * (a1[j] + 2.0 * a2[j] + 2.0 * a3[j] + a4[j]);
            }
            auto& rv = s.rho.rho[i].values();
            const auto& b1 = k1.drho[i].values();
            const auto& b2 = k2.drho[i].values();
            const auto& b3 = k3.drho[i].values();
            const auto& b4 = k4.drho[i].values();
            for (std::size_t j = 0; j < rv.size(); ++j)
                rv[j] += c * (b1[j] + 2.0 * b2[j] + 2.0 * b3[j] + b4[j]);
            if (w) {
                auto& wv = (*w)[i].values();
                const auto& c1 = k1.dw[i].values();
                const auto& c2 = k2.dw[i].values();
                const auto& c3 = k3.dw[i].values();
                const auto& c4 = k4.dw[i].values();
                for (std::size_t j = 0; j < wv.size(); ++j)
                    wv[j] += c * (c1[j] + 2.0 * c2[j] + 2.0 * c3[j] + c4[j]);
            }
        }
    }
    s.t += dt;

    StepReport rep{0.0, 0.0, 0.0};
    ScalarField sum = weighted_sum(s.rho.quad, s.rho.rho);
    {
        ScalarField dev = sum;
        for (auto& v : dev.values()) v -= 1.0;
        rep.constraint_drift_inf = max_abs(dev);
    }
    if (opt.renormalize) {
        for (auto& r : s.rho.rho)
            for (std::size_t j = 0; j < r.size(); ++j) r[j] /= sum[j];
        // The division preserves the pointwise sum exactly but bends each
        // mass by O(drift); constant shifts restore the masses and cancel
        // pointwise because the weighted mass defects now sum to zero.
        const double vol = s.grid().volume();
        for (int i = 0; i < s.n(); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            const double defect = integrate(s.rho.rho[idx]) - s.rho.quad.mass(i);
            const double shift = defect / vol;
            for (auto& v : s.rho.rho[idx].values()) v -= shift;
        }
    }
    double min_rho = min_value(s.rho.rho[0]);
    for (const auto& r : s.rho.rho) min_rho = std::min(min_rho, min_value(r));
    rep.min_density = min_rho;
    if (min_rho <= 0.0)
        throw PositivityError("step_rk4: density positivity lost at t = " + std::to_string(s.t) +
                              " (min " + std::to_string(min_rho) + ")");
    if (opt.reproject) s.u = project_constraint(s.u, s.rho);
    rep.divergence_l2 = constraint_residual_l2(s.rho, s.u.u);
    return rep;
}

}  // namespace

FlowState::FlowState(MultiVelocity u_, MultiDensity rho_, double t_)
    : u(std::move(u_)), rho(std::move(rho_)), t(t_), pressure(rho.grid()) {
    if (u.n() != rho.n())
        throw StructuralError("FlowState: velocity and density phase counts differ");
    require_same_grid(u.grid(), rho.grid(), "FlowState");
}

ScalarField pressure_solve(const MultiVelocity& u, const MultiDensity& rho) {
    return tendency(u, rho, nullptr).pressure;
}

VelocityRhs rhs_velocity(const MultiVelocity& u, const MultiDensity& rho) {
    PhaseTendency t = tendency(u, rho, nullptr);
    return {std::move(t.du), std::move(t.drho), std::move(t.pressure)};
}

HamiltonianVector rhs_coset(const MomentumCoset& a) {
    EnergyDifferential e = energy_and_dH(a);
    return hamiltonian_operator(a, e.dH);
}

double rhs_consistency_residual(const MultiVelocity& u, const MultiDensity& rho) {
    MomentumCoset a = inertia(u, rho);
    HamiltonianVector hv = rhs_coset(a);
    // The flat of the velocity tendency is the same coset up to the
    // exact form carrying the pressure; normal forms must agree.
    VelocityRhs vr = rhs_velocity(inertia_inverse(a), rho);
    MomentumCoset from_velocity = normalize_coset(std::move(vr.du), rho);
    double res = 0.0;
    for (std::size_t i = 0; i < hv.da.alpha.size(); ++i) {
        VectorField d = hv.da.alpha[i];
        d -= from_velocity.alpha[i];
        res = std::max(res, norm_l2(d));
    }
    return res;
}

StepReport step_rk4(FlowState& s, double dt, const StepOptions& opt) {
    return step_impl(s, nullptr, dt, opt, nullptr);
}

StepReport step_rk4_with_kelvin(FlowState& s, std::vector<ScalarField>& w, double dt,
                                const StepOptions& opt) {
    if (s.grid().dim() != 2)
        throw StructuralError("step_rk4_with_kelvin: vorticity transport is 2D only");
    if (static_cast<int>(w.size()) != s.n())
        throw StructuralError("step_rk4_with_kelvin: coefficient count does not match phases");
    return step_impl(s, &w, dt, opt, nullptr);
}

StepReport step_rk4_staged(FlowState& s, double dt, const StepOptions& opt,
                           const std::function<void(int, const MultiVelocity&)>& hook) {
    return step_impl(s, nullptr, dt, opt, &hook);
}

KelvinReport kelvin_check(FlowState s, double T, double dt, const StepOptions& opt) {
    if (s.grid().dim() != 2)
        throw StructuralError("kelvin_check: vorticity transport is 2D only");
    std::vector<ScalarField> w;
    KelvinReport rep;
    for (const auto& ui : s.u.u) {
        w.push_back(curl2d(ui));
        rep.initial_curl_l2.push_back(norm_l2(w.back()));
    }
    const long steps = std::lround(T / dt);
    for (long k = 0; k < steps; ++k) step_rk4_with_kelvin(s, w, dt, opt);
    for (std::size_t i = 0; i < w.size(); ++i) {
        ScalarField cu = curl2d(s.u.u[i]);
        rep.final_curl_l2.push_back(norm_l2(cu));
        ScalarField diff = w[i];
        diff -= cu;
        const double den = rep.initial_curl_l2[i] > 0.0 ? rep.initial_curl_l2[i] : 1.0;
        rep.transport_error.push_back(norm_l2(diff) / den);
    }
    return rep;
}

MetricResult mdens_metric(const TangentDensity& xi, const MultiDensity& rho) {
    if (xi.n() != rho.n())
        throw StructuralError("mdens_metric: tangent and density phase counts differ");
    require_same_grid(xi.grid(), rho.grid(), "mdens_metric");
    ValidationReport shape = validate(xi);
    if (!shape.pass)
        throw StructuralError("mdens_metric: not a density-tangent:\n" + shape.summary());
    MetricResult out{0.0, {}};
    out.potentials.reserve(xi.xi.size());
    for (int i = 0; i < xi.n(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        ScalarField g = xi.xi[idx];
        g *= -1.0;
        ScalarField f = solve_weighted_poisson(rho.rho[idx], g, {1e-13, 500}).f;
        VectorField gf = gradient(f);
        out.value += rho.quad.weight(i) * inner_l2(dot(gf, gf), rho.rho[idx]);
        out.potentials.push_back(std::move(f));
    }
    return out;
}

}  // namespace multiflow

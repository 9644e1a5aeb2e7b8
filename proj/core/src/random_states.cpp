#include "multiflow/random_states.hpp"

#include <cmath>
#include <vector>

#include "multiflow/algebroid.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {

double uniform_double(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

ScalarField random_scalar(const Grid& g, std::mt19937_64& rng, const BandLimitedOptions& opt) {
    ScalarField f(g);
    const int K = opt.kmax;
    // Half-spectrum loop: ky > 0, or ky == 0 with kx > 0.
    for (int kx = (g.dim() == 1 ? 1 : -K); kx <= K; ++kx) {
        for (int ky = (g.dim() == 1 ? 0 : 0); ky <= (g.dim() == 1 ? 0 : K); ++ky) {
            if (ky == 0 && kx <= 0) continue;
            const double a = uniform_double(rng, -1.0, 1.0);
            const double b = uniform_double(rng, -1.0, 1.0);
            for (std::size_t j = 0; j < f.size(); ++j) {
                const double ph = kx * g.x(j) + ky * g.y(j);
                f[j] += a * std::cos(ph) + b * std::sin(ph);
            }
        }
    }
    const double m = max_abs(f);
    if (m > 0.0) f *= opt.amplitude / m;
    return f;
}

VectorField random_vector(const Grid& g, std::mt19937_64& rng, const BandLimitedOptions& opt) {
    VectorField v(g);
    for (int c = 0; c < g.dim(); ++c) v[c] = random_scalar(g, rng, opt);
    return v;
}

QuadratureSet random_unit_quadrature(int n, int dim, std::mt19937_64& rng) {
    std::vector<double> p(static_cast<std::size_t>(n));
    double s = 0.0;
    for (auto& v : p) {
        v = uniform_double(rng, 0.5, 1.5);
        s += v;
    }
    const double vol = std::pow(kTwoPi, dim);
    for (auto& v : p) v *= vol / s;
    return QuadratureSet::unit(std::move(p));
}

QuadratureSet trapezoid_quadrature_uniform_mass(int m, int dim) {
    const double vol = std::pow(kTwoPi, dim);
    return QuadratureSet::trapezoid(m, std::vector<double>(static_cast<std::size_t>(m), vol));
}

MultiDensity random_density(const Grid& g, const QuadratureSet& quad, std::mt19937_64& rng,
                            double strength, const BandLimitedOptions& opt) {
    const int n = quad.n();
    const double vol = g.volume();
    std::vector<ScalarField> eta;
    eta.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        BandLimitedOptions o = opt;
        o.amplitude = strength * quad.mass(i) / vol;
        eta.push_back(random_scalar(g, rng, o));
    }
    // Remove the weighted sum so the pointwise constraint is exact:
    // eta_i -= (sum_j w_j eta_j) w_i / (sum_j w_j^2). Means stay zero.
    ScalarField wsum = weighted_sum(quad, eta);
    double w2 = 0.0;
    for (int i = 0; i < n; ++i) w2 += quad.weight(i) * quad.weight(i);
    for (int i = 0; i < n; ++i) {
        const double c = quad.weight(i) / w2;
        auto& e = eta[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < e.size(); ++j) e[j] -= c * wsum[j];
    }
    // Scale the perturbation into the positive cone with margin.
    double tau = 1.0;
    for (int i = 0; i < n; ++i) {
        const double base = quad.mass(i) / vol;
        const double m = max_abs(eta[static_cast<std::size_t>(i)]);
        if (m > 0.0) tau = std::min(tau, 0.8 * base / m);
    }
    std::vector<ScalarField> rho;
    rho.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double base = quad.mass(i) / vol;
        ScalarField r = eta[static_cast<std::size_t>(i)];
        r *= tau;
        for (auto& v : r.values()) v += base;
        rho.push_back(std::move(r));
    }
    return MultiDensity(quad, std::move(rho));
}

MultiVelocity random_velocity(const MultiDensity& rho, std::mt19937_64& rng,
                              const BandLimitedOptions& opt) {
    std::vector<VectorField> v;
    v.reserve(rho.rho.size());
    for (int i = 0; i < rho.n(); ++i) v.push_back(random_vector(rho.grid(), rng, opt));
    return project_constraint(MultiVelocity(rho.quad, std::move(v)), rho);
}

MomentumCoset random_coset(const MultiDensity& rho, std::mt19937_64& rng,
                           const BandLimitedOptions& opt) {
    std::vector<VectorField> a;
    a.reserve(rho.rho.size());
    for (int i = 0; i < rho.n(); ++i) a.push_back(random_vector(rho.grid(), rng, opt));
    return normalize_coset(std::move(a), rho);
}

DualCotangent random_cotangent(const MultiDensity& rho, std::mt19937_64& rng,
                               const BandLimitedOptions& opt) {
    MultiVelocity fiber = random_velocity(rho, rng, opt);
    std::vector<ScalarField> base;
    base.reserve(rho.rho.size());
    for (int i = 0; i < rho.n(); ++i) base.push_back(random_scalar(rho.grid(), rng, opt));
    return DualCotangent(std::move(fiber), normalize_dual_cotangent(std::move(base)));
}

TangentDensity random_tangent(const MultiDensity& rho, std::mt19937_64& rng,
                              const BandLimitedOptions& opt) {
    return anchor(random_velocity(rho, rng, opt), rho);
}

}  // namespace multiflow

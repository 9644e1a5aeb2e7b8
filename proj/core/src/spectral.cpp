#include "multiflow/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "multiflow/errors.hpp"

namespace multiflow {
namespace {

// FFTW's planner is not thread-safe; executing distinct plans on their
// own buffers is. Every thread keeps its own workspace per grid.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftWorkspace {
    Grid grid;
    std::size_t n_cplx;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;

    explicit FftWorkspace(const Grid& g) : grid(g) {
        const int n = g.n();
        n_cplx = (g.dim() == 1)
                     ? static_cast<std::size_t>(n / 2 + 1)
                     : static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
        real = fftw_alloc_real(g.size());
        cplx = fftw_alloc_complex(n_cplx);
        std::lock_guard<std::mutex> lock(planner_mutex());
        // FFTW_ESTIMATE keeps plan selection independent of runtime timing,
        // which keeps outputs bit-reproducible across runs.
        if (g.dim() == 1) {
            r2c = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
            c2r = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
        } else {
            r2c = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
            c2r = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
        }
    }

    ~FftWorkspace() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
        fftw_free(real);
        fftw_free(cplx);
    }

    FftWorkspace(const FftWorkspace&) = delete;
    FftWorkspace& operator=(const FftWorkspace&) = delete;
};

FftWorkspace& workspace_for(const Grid& g) {
    thread_local std::unordered_map<int, std::unique_ptr<FftWorkspace>> cache;
    int key = g.dim() * 1000000 + g.n();
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<FftWorkspace>(g)).first;
    return *it->second;
}

// Signed wavenumber of row index ix in a full N-point axis.
inline int signed_k(int ix, int n) { return (ix <= n / 2) ? ix : ix - n; }

// Applies op(kx, ky, c) to every stored coefficient.
template <typename Op>
void for_each_mode(const Grid& g, std::vector<std::complex<double>>& c, Op op) {
    const int n = g.n();
    if (g.dim() == 1) {
        for (int k = 0; k <= n / 2; ++k) op(k, 0, c[static_cast<std::size_t>(k)]);
    } else {
        const int nc = n / 2 + 1;
        for (int ix = 0; ix < n; ++ix) {
            const int kx = signed_k(ix, n);
            for (int ky = 0; ky < nc; ++ky)
                op(kx, ky, c[static_cast<std::size_t>(ix) * nc + ky]);
        }
    }
}

std::vector<std::complex<double>> forward(const ScalarField& f) {
    FftWorkspace& ws = workspace_for(f.grid());
    std::memcpy(ws.real, f.values().data(), f.size() * sizeof(double));
    fftw_execute(ws.r2c);
    std::vector<std::complex<double>> out(ws.n_cplx);
    const double scale = 1.0 / static_cast<double>(f.grid().size());
    for (std::size_t i = 0; i < ws.n_cplx; ++i)
        out[i] = std::complex<double>(ws.cplx[i][0] * scale, ws.cplx[i][1] * scale);
    return out;
}

ScalarField inverse(const Grid& g, const std::vector<std::complex<double>>& coeffs) {
    FftWorkspace& ws = workspace_for(g);
    if (coeffs.size() != ws.n_cplx)
        throw StructuralError("Spectrum: coefficient count does not match grid");
    for (std::size_t i = 0; i < ws.n_cplx; ++i) {
        ws.cplx[i][0] = coeffs[i].real();
        ws.cplx[i][1] = coeffs[i].imag();
    }
    fftw_execute(ws.c2r);
    ScalarField out(g);
    std::memcpy(out.values().data(), ws.real, g.size() * sizeof(double));
    return out;
}

const std::complex<double> kI(0.0, 1.0);

}  // namespace

Spectrum::Spectrum(const Grid& grid, std::vector<std::complex<double>> coeffs)
    : grid_(grid), coeffs_(std::move(coeffs)) {
    const std::size_t want =
        (grid.dim() == 1)
            ? static_cast<std::size_t>(grid.n() / 2 + 1)
            : static_cast<std::size_t>(grid.n()) * static_cast<std::size_t>(grid.n() / 2 + 1);
    if (coeffs_.size() != want)
        throw StructuralError("Spectrum: expected " + std::to_string(want) +
                              " coefficients, got " + std::to_string(coeffs_.size()));
}

std::complex<double> Spectrum::mode(int kx, int ky) const {
    const int n = grid_.n();
    const int half = n / 2;
    if (grid_.dim() == 1) {
        if (ky != 0) throw StructuralError("Spectrum::mode: ky on a 1D spectrum");
        if (kx < -half || kx > half) throw StructuralError("Spectrum::mode: kx out of range");
        if (kx >= 0) return coeffs_[static_cast<std::size_t>(kx)];
        return std::conj(coeffs_[static_cast<std::size_t>(-kx)]);
    }
    if (kx < -half || kx > half || ky < -half || ky > half)
        throw StructuralError("Spectrum::mode: wavenumber out of range");
    bool conj = ky < 0 || (ky == 0 && kx < 0);
    if (conj) {
        kx = -kx;
        ky = -ky;
    }
    int ix = (kx >= 0) ? kx : kx + n;
    std::complex<double> c = coeffs_[static_cast<std::size_t>(ix) * (half + 1) + ky];
    return conj ? std::conj(c) : c;
}

Spectrum analyze(const ScalarField& f) { return Spectrum(f.grid(), forward(f)); }

ScalarField synthesize(const Spectrum& s) { return inverse(s.grid(), s.coeffs()); }

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid();
    const int half = g.n() / 2;
    auto base = forward(f);
    VectorField out(g);
    {
        auto cx = base;
        // d/dx: multiply by i*kx; the Nyquist plane has no well-defined
        // odd derivative for real data and is zeroed.
        for_each_mode(g, cx, [&](int kx, int, std::complex<double>& c) {
            c *= (std::abs(kx) == half) ? 0.0 : kI * static_cast<double>(kx);
        });
        out[0] = inverse(g, cx);
    }
    if (g.dim() == 2) {
        auto cy = std::move(base);
        for_each_mode(g, cy, [&](int, int ky, std::complex<double>& c) {
            c *= (ky == half) ? 0.0 : kI * static_cast<double>(ky);
        });
        out[1] = inverse(g, cy);
    }
    return out;
}

ScalarField divergence(const VectorField& u) {
    const Grid& g = u.grid();
    const int half = g.n() / 2;
    auto cx = forward(u[0]);
    for_each_mode(g, cx, [&](int kx, int, std::complex<double>& c) {
        c *= (std::abs(kx) == half) ? 0.0 : kI * static_cast<double>(kx);
    });
    if (g.dim() == 1) return inverse(g, cx);
    auto cy = forward(u[1]);
    for_each_mode(g, cy, [&](int, int ky, std::complex<double>& c) {
        c *= (ky == half) ? 0.0 : kI * static_cast<double>(ky);
    });
    for (std::size_t i = 0; i < cx.size(); ++i) cx[i] += cy[i];
    return inverse(g, cx);
}

ScalarField curl2d(const VectorField& u) {
    const Grid& g = u.grid();
    if (g.dim() != 2) throw StructuralError("curl2d: requires a 2D vector field");
    const int half = g.n() / 2;
    // curl u = d(u_y)/dx - d(u_x)/dy, the scalar vorticity.
    auto cy = forward(u[1]);
    for_each_mode(g, cy, [&](int kx, int, std::complex<double>& c) {
        c *= (std::abs(kx) == half) ? 0.0 : kI * static_cast<double>(kx);
    });
    auto cx = forward(u[0]);
    for_each_mode(g, cx, [&](int, int ky, std::complex<double>& c) {
        c *= (ky == half) ? 0.0 : kI * static_cast<double>(ky);
    });
    for (std::size_t i = 0; i < cy.size(); ++i) cy[i] -= cx[i];
    return inverse(g, cy);
}

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    auto c = forward(f);
    for_each_mode(g, c, [](int kx, int ky, std::complex<double>& v) {
        v *= -static_cast<double>(kx * kx + ky * ky);
    });
    return inverse(g, c);
}

VectorField laplacian(const VectorField& u) {
    VectorField out(u.grid());
    for (int c = 0; c < u.dim(); ++c) out[c] = laplacian(u[c]);
    return out;
}

FieldVariant spectral_derivative(const FieldVariant& f, DerivKind kind) {
    if (std::holds_alternative<ScalarField>(f)) {
        const auto& s = std::get<ScalarField>(f);
        switch (kind) {
            case DerivKind::grad: return gradient(s);
            case DerivKind::lap: return laplacian(s);
            case DerivKind::div: throw StructuralError("spectral_derivative: div needs a vector field");
            case DerivKind::curl: throw StructuralError("spectral_derivative: curl needs a 2D vector field");
        }
    }
    const auto& v = std::get<VectorField>(f);
    switch (kind) {
        case DerivKind::div: return divergence(v);
        case DerivKind::curl: return curl2d(v);
        case DerivKind::lap: return laplacian(v);
        case DerivKind::grad: throw StructuralError("spectral_derivative: grad needs a scalar field");
    }
    throw StructuralError("spectral_derivative: unknown kind");
}

namespace {

// Spectral inverse of the composed div(grad .) operator, kernel modes
// discarded. The odd derivatives zero their axis Nyquist plane, so on
// the plane kx = +-N/2 the composition acts as -ky^2 (and vice versa);
// inverting with the plain -|k|^2 symbol there would leave
// grad(solve(div .)) short of a projection. Divergences of stored
// fields vanish identically on the kernel modes, so nothing is lost.
// No solvability check: any mean in g is simply projected out, which
// is what projections and the preconditioner below need.
ScalarField poisson_inverse_raw(const ScalarField& g) {
    const int half = g.grid().n() / 2;
    auto c = forward(g);
    for_each_mode(g.grid(), c, [half](int kx, int ky, std::complex<double>& v) {
        const int ex = (std::abs(kx) == half) ? 0 : kx;
        const int ey = (ky == half) ? 0 : ky;
        const int k2 = ex * ex + ey * ey;
        v = (k2 == 0) ? 0.0 : v / static_cast<double>(-k2);
    });
    return inverse(g.grid(), c);
}

}  // namespace

ScalarField solve_poisson(const ScalarField& g) {
    const double nrm = norm_l2(g);
    const double total = integrate(g);
    if (nrm == 0.0) return ScalarField(g.grid());
    if (std::abs(total) > 1e-10 * nrm)
        throw SolvabilityError("solve_poisson: right-hand side has nonzero mean (integral " +
                               std::to_string(total) + ", l2 norm " + std::to_string(nrm) + ")");
    return poisson_inverse_raw(g);
}

namespace {

// -div(rho grad x): symmetric positive semidefinite on the grid since
// the spectral div/grad pair are exact discrete adjoints.
ScalarField weighted_operator(const ScalarField& rho, const ScalarField& x) {
    VectorField gx = gradient(x);
    ScalarField out = divergence(multiply(rho, gx));
    out *= -1.0;
    return out;
}

double dot_values(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

WeightedPoissonResult solve_weighted_poisson(const ScalarField& rho, const ScalarField& g,
                                             const WeightedPoissonOptions& opt) {
    require_same_grid(rho.grid(), g.grid(), "solve_weighted_poisson");
    if (min_value(rho) <= 0.0)
        throw PositivityError("solve_weighted_poisson: rho must be strictly positive (min " +
                              std::to_string(min_value(rho)) + ")");
    const double g_nrm = norm_l2(g);
    if (g_nrm == 0.0) return {ScalarField(g.grid()), 0, 0.0};
    if (std::abs(integrate(g)) > 1e-10 * g_nrm)
        throw SolvabilityError("solve_weighted_poisson: right-hand side has nonzero mean");

    // Solve B x = b with B = -div(rho grad .), b = -g, PCG with exact
    // inverse-Laplacian preconditioner. All iterates stay mean-zero.
    ScalarField b = -1.0 * g;
    ScalarField x(g.grid());
    ScalarField r = b;
    ScalarField z = -1.0 * poisson_inverse_raw(r);
    ScalarField p = z;
    double rz = dot_values(r, z);
    const double b_nrm = norm_l2(b);
    int it = 0;
    double rel = norm_l2(r) / b_nrm;
    while (rel > opt.rel_tol) {
        if (it >= opt.max_iter)
            throw ConvergenceError("solve_weighted_poisson: no convergence in " +
                                   std::to_string(opt.max_iter) +
                                   " iterations (relative residual " + std::to_string(rel) + ")");
        ScalarField Bp = weighted_operator(rho, p);
        const double alpha = rz / dot_values(p, Bp);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += alpha * p[i];
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= alpha * Bp[i];
        z = -1.0 * poisson_inverse_raw(r);
        const double rz_new = dot_values(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = z[i] + beta * p[i];
        ++it;
        rel = norm_l2(r) / b_nrm;
    }
    x = subtract_mean(std::move(x));
    return {std::move(x), it, rel};
}

double integrate(const ScalarField& f) {
    double s = 0.0;
    for (double v : f.values()) s += v;
    return s * f.grid().cell_volume();
}

double inner_l2(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "inner_l2");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * a.grid().cell_volume();
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner_l2(f, f)); }

double norm_l2(const VectorField& u) {
    double s = 0.0;
    for (int c = 0; c < u.dim(); ++c) {
        double n = norm_l2(u[c]);
        s += n * n;
    }
    return std::sqrt(s);
}

ScalarField dealias(ScalarField f) {
    const Grid& g = f.grid();
    const int n = g.n();
    auto c = forward(f);
    for_each_mode(g, c, [&](int kx, int ky, std::complex<double>& v) {
        if (3 * std::abs(kx) > n || 3 * std::abs(ky) > n) v = 0.0;
    });
    return inverse(g, c);
}

VectorField dealias(VectorField u) {
    for (int c = 0; c < u.dim(); ++c) u[c] = dealias(std::move(u[c]));
    return u;
}

ScalarField subtract_mean(ScalarField f) {
    const double m = mean(f);
    for (double& v : f.values()) v -= m;
    return f;
}

FourierInterpolant1D::FourierInterpolant1D(const ScalarField& f) : n_(f.grid().n()) {
    if (f.grid().dim() != 1)
        throw StructuralError("FourierInterpolant1D: requires a 1D field");
    coeffs_ = forward(f);
}

double FourierInterpolant1D::operator()(double x) const {
    // Real evaluation of the half-spectrum; interior modes count twice,
    // the Nyquist mode once (it is real for real input).
    double s = coeffs_[0].real();
    const int half = n_ / 2;
    for (int k = 1; k < half; ++k) {
        const double c = std::cos(k * x), sn = std::sin(k * x);
        s += 2.0 * (coeffs_[static_cast<std::size_t>(k)].real() * c -
                    coeffs_[static_cast<std::size_t>(k)].imag() * sn);
    }
    s += coeffs_[static_cast<std::size_t>(half)].real() * std::cos(half * x);
    return s;
}

}  // namespace multiflow

#include "multiflow/state.hpp"

#include <cmath>
#include <sstream>

#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {
namespace {

template <typename FieldT>
void check_tuple(const QuadratureSet& quad, const std::vector<FieldT>& fields,
                 const char* what) {
    if (fields.empty()) throw StructuralError(std::string(what) + ": empty field tuple");
    if (static_cast<int>(fields.size()) != quad.n())
        throw StructuralError(std::string(what) + ": " + std::to_string(fields.size()) +
                              " fields for " + std::to_string(quad.n()) + " phases");
    for (const auto& f : fields)
        require_same_grid(fields[0].grid(), f.grid(), what);
}

}  // namespace

void ValidationReport::add(std::string name, double residual, double tolerance) {
    bool ok = residual <= tolerance;
    checks.push_back({std::move(name), residual, tolerance, ok});
    pass = pass && ok;
}

void ValidationReport::add(std::string name, double value, double threshold, bool ok) {
    checks.push_back({std::move(name), value, threshold, ok});
    pass = pass && ok;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os.precision(3);
        os << (c.pass ? "  ok   " : "  FAIL ") << c.name << "  residual " << std::scientific
           << c.residual << "  tol " << c.tolerance << "\n";
    }
    return os.str();
}

MultiDensity::MultiDensity(QuadratureSet q, std::vector<ScalarField> r)
    : quad(std::move(q)), rho(std::move(r)) {
    check_tuple(quad, rho, "MultiDensity");
}

MultiVelocity::MultiVelocity(QuadratureSet q, std::vector<VectorField> v)
    : quad(std::move(q)), u(std::move(v)) {
    check_tuple(quad, u, "MultiVelocity");
}

TangentDensity::TangentDensity(QuadratureSet q, std::vector<ScalarField> x)
    : quad(std::move(q)), xi(std::move(x)) {
    check_tuple(quad, xi, "TangentDensity");
}

MomentumCoset::MomentumCoset(MultiDensity d, std::vector<VectorField> a)
    : density(std::move(d)), alpha(std::move(a)) {
    check_tuple(density.quad, alpha, "MomentumCoset");
    require_same_grid(density.grid(), alpha[0].grid(), "MomentumCoset");
}

DualCotangent::DualCotangent(MultiVelocity v, std::vector<ScalarField> b)
    : fiber(std::move(v)), base(std::move(b)) {
    check_tuple(fiber.quad, base, "DualCotangent");
    require_same_grid(fiber.grid(), base[0].grid(), "DualCotangent");
}

ScalarField weighted_sum(const QuadratureSet& quad, const std::vector<ScalarField>& f) {
    check_tuple(quad, f, "weighted_sum");
    ScalarField out(f[0].grid());
    for (int i = 0; i < quad.n(); ++i) {
        const double w = quad.weight(i);
        const auto& fi = f[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * fi[j];
    }
    return out;
}

VectorField weighted_momentum(const MultiDensity& rho, const std::vector<VectorField>& v) {
    check_tuple(rho.quad, v, "weighted_momentum");
    require_same_grid(rho.grid(), v[0].grid(), "weighted_momentum");
    VectorField out(rho.grid());
    for (int i = 0; i < rho.n(); ++i) {
        const double w = rho.quad.weight(i);
        const auto& ri = rho.rho[static_cast<std::size_t>(i)];
        const auto& vi = v[static_cast<std::size_t>(i)];
        for (int c = 0; c < out.dim(); ++c)
            for (std::size_t j = 0; j < ri.size(); ++j) out[c][j] += w * ri[j] * vi[c][j];
    }
    // The constraint lives in the truncated space, like every quadratic
    // term in the dynamics. Masking the product keeps the projection
    // potential inside it; a raw product would leak aliased content into
    // the corrected velocities, and the leak shows up as a spurious
    // dt-independent floor in the vorticity transport defect.
    return dealias(out);
}

double constraint_residual_l2(const MultiDensity& rho, const std::vector<VectorField>& v) {
    return norm_l2(divergence(weighted_momentum(rho, v)));
}

ValidationReport validate(const QuadratureSet& quad, int dim) {
    ValidationReport rep;
    const double want = std::pow(kTwoPi, dim);
    rep.add("quadrature weighted mass total", std::abs(quad.weighted_mass_total() - want),
            tol::quad_total);
    return rep;
}

ValidationReport validate(const MultiDensity& rho) {
    ValidationReport rep = validate(rho.quad, rho.grid().dim());
    double min_rho = min_value(rho.rho[0]);
    for (const auto& r : rho.rho) min_rho = std::min(min_rho, min_value(r));
    // Strict positivity; the recorded value is the pointwise minimum.
    rep.add("density positivity (min value)", min_rho, 0.0, min_rho > 0.0);
    ScalarField s = weighted_sum(rho.quad, rho.rho);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] -= 1.0;
    rep.add("pointwise weighted density sum", max_abs(s), tol::density_sum);
    for (int i = 0; i < rho.n(); ++i)
        rep.add("mass of phase " + std::to_string(i),
                std::abs(integrate(rho.rho[static_cast<std::size_t>(i)]) - rho.quad.mass(i)),
                tol::mass);
    return rep;
}

ValidationReport validate(const MultiVelocity& u, const MultiDensity& rho) {
    if (u.quad.n() != rho.quad.n())
        throw StructuralError("validate: velocity and density phase counts differ");
    require_same_grid(u.grid(), rho.grid(), "validate");
    ValidationReport rep;
    rep.add("constrained-bundle divergence", constraint_residual_l2(rho, u.u),
            tol::constraint_l2);
    return rep;
}

ValidationReport validate(const TangentDensity& xi) {
    ValidationReport rep;
    rep.add("pointwise weighted tangent sum", max_abs(weighted_sum(xi.quad, xi.xi)),
            tol::tangent_sum);
    for (int i = 0; i < xi.n(); ++i)
        rep.add("tangent mean of phase " + std::to_string(i),
                std::abs(integrate(xi.xi[static_cast<std::size_t>(i)])), tol::tangent_mean);
    return rep;
}

ValidationReport validate(const MomentumCoset& a) {
    ValidationReport rep;
    rep.add("co-closed representative", constraint_residual_l2(a.density, a.alpha),
            tol::coclosed_l2);
    return rep;
}

ValidationReport validate(const DualCotangent& x, const MultiDensity& rho) {
    ValidationReport rep = validate(x.fiber, rho);
    rep.add("base normal form: last component", max_abs(x.base.back()),
            tol::base_normal_form);
    for (int i = 0; i < x.n(); ++i)
        rep.add("base normal form: mean of component " + std::to_string(i),
                std::abs(mean(x.base[static_cast<std::size_t>(i)])), tol::base_normal_form);
    return rep;
}

MomentumCoset normalize_coset(std::vector<VectorField> alpha_raw, const MultiDensity& rho) {
    check_tuple(rho.quad, alpha_raw, "normalize_coset");
    require_same_grid(rho.grid(), alpha_raw[0].grid(), "normalize_coset");
    // Since sum w_i rho_i = 1, adding a common df moves the weighted
    // momentum A by grad f; lap f = -div A makes the result co-closed.
    ScalarField neg_div = divergence(weighted_momentum(rho, alpha_raw));
    neg_div *= -1.0;
    VectorField df = gradient(solve_poisson(neg_div));
    for (auto& a : alpha_raw) a += df;
    return MomentumCoset(rho, std::move(alpha_raw));
}

std::vector<ScalarField> normalize_dual_cotangent(std::vector<ScalarField> f) {
    if (f.empty()) throw StructuralError("normalize_dual_cotangent: empty tuple");
    for (const auto& fi : f) require_same_grid(f[0].grid(), fi.grid(), "normalize_dual_cotangent");
    const ScalarField last = f.back();
    for (auto& fi : f) fi -= last;
    for (auto& fi : f) fi = subtract_mean(std::move(fi));
    return f;
}

}  // namespace multiflow

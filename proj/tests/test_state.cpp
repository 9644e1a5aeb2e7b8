#include <doctest.h>

#include <cmath>
#include <random>

#include "multiflow/algebroid.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/random_states.hpp"
#include "multiflow/spectral.hpp"
#include "multiflow/state.hpp"

using namespace multiflow;

namespace {

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    ScalarField d = a;
    d -= b;
    return max_abs(d);
}

double max_abs_diff(const std::vector<VectorField>& a, const std::vector<VectorField>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (int c = 0; c < a[i].dim(); ++c) m = std::max(m, max_abs_diff(a[i][c], b[i][c]));
    return m;
}

}  // namespace

TEST_CASE("quadrature sets enforce positivity and matching sizes") {
    QuadratureSet q = QuadratureSet::unit({kTwoPi / 2.0, kTwoPi / 2.0});
    CHECK(q.n() == 2);
    CHECK(q.weight(0) == 1.0);
    CHECK(q.weighted_mass_total() == doctest::Approx(kTwoPi).epsilon(1e-14));

    CHECK_THROWS_AS(QuadratureSet({0.0}, {1.0}, {-1.0}), StructuralError);
    CHECK_THROWS_AS(QuadratureSet({0.0}, {0.0}, {1.0}), StructuralError);
    CHECK_THROWS_AS(QuadratureSet({0.0, 1.0}, {1.0}, {1.0, 1.0}), StructuralError);
    CHECK_THROWS_AS(QuadratureSet::unit({}), StructuralError);
    CHECK_THROWS_AS(QuadratureSet::trapezoid(1, {kTwoPi}), StructuralError);
    CHECK_THROWS_AS(QuadratureSet::trapezoid(3, {1.0, 1.0}), StructuralError);

    // Trapezoid weights on [0,1]: half weight at the ends, uniform
    // spacing inside, total m-1 intervals of width 1/(m-1).
    QuadratureSet t = QuadratureSet::trapezoid(5, {kTwoPi, kTwoPi, kTwoPi, kTwoPi, kTwoPi});
    CHECK(t.n() == 5);
    CHECK(t.labels()[0] == doctest::Approx(0.0));
    CHECK(t.labels()[4] == doctest::Approx(1.0));
    CHECK(t.weight(0) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(t.weight(2) == doctest::Approx(0.25).epsilon(1e-14));
    double wsum = 0.0;
    for (int i = 0; i < t.n(); ++i) wsum += t.weight(i);
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));

    ValidationReport rep = validate(t, 1);
    CHECK(rep.pass);
}

TEST_CASE("density validation accepts exact states and reports violations") {
    Grid g(1, 64);
    QuadratureSet q = QuadratureSet::unit({kTwoPi / 2.0, kTwoPi / 2.0});

    SUBCASE("uniform two-phase split passes") {
        std::vector<ScalarField> rho{ScalarField(g, 0.5), ScalarField(g, 0.5)};
        MultiDensity d(q, std::move(rho));
        ValidationReport rep = validate(d);
        CHECK(rep.pass);
    }

    SUBCASE("sinusoidal exchange with matching masses passes") {
        QuadratureSet q2 = QuadratureSet::unit({1.2 * kTwoPi / 2.0, 0.8 * kTwoPi / 2.0});
        std::vector<ScalarField> rho;
        rho.push_back(ScalarField::sample(
            g, [](double x, double) { return 0.6 + 0.2 * std::sin(x); }));
        rho.push_back(ScalarField::sample(
            g, [](double x, double) { return 0.4 - 0.2 * std::sin(x); }));
        MultiDensity d(q2, std::move(rho));
        ValidationReport rep = validate(d);
        CHECK(rep.pass);
    }

    SUBCASE("negative node is reported, not thrown") {
        std::vector<ScalarField> rho;
        rho.push_back(ScalarField::sample(
            g, [](double x, double) { return 0.5 + 0.7 * std::sin(x); }));
        rho.push_back(ScalarField::sample(
            g, [](double x, double) { return 0.5 - 0.7 * std::sin(x); }));
        MultiDensity d(q, std::move(rho));
        ValidationReport rep = validate(d);
        CHECK(!rep.pass);
        bool positivity_failed = false;
        for (const auto& c : rep.checks)
            if (!c.pass && c.name.find("positiv") != std::string::npos) positivity_failed = true;
        CHECK(positivity_failed);
    }

    SUBCASE("broken pointwise sum is reported") {
        std::vector<ScalarField> rho{ScalarField(g, 0.5), ScalarField(g, 0.6)};
        MultiDensity d(q, std::move(rho));
        CHECK(!validate(d).pass);
    }

    SUBCASE("mass drift against the recorded constants is reported") {
        QuadratureSet q2 = QuadratureSet::unit({kTwoPi, kTwoPi / 4.0});
        std::vector<ScalarField> rho{ScalarField(g, 0.5), ScalarField(g, 0.5)};
        MultiDensity d(q2, std::move(rho));
        CHECK(!validate(d).pass);
    }

    SUBCASE("phase count mismatch throws at construction") {
        std::vector<ScalarField> rho{ScalarField(g, 1.0)};
        CHECK_THROWS_AS(MultiDensity(q, std::move(rho)), StructuralError);
    }
}

TEST_CASE("velocity validation checks the divergence constraint") {
    Grid g(1, 64);
    QuadratureSet q = QuadratureSet::unit({kTwoPi / 2.0, kTwoPi / 2.0});
    MultiDensity d(q, {ScalarField(g, 0.5), ScalarField(g, 0.5)});

    auto zero2 = [](double, double) { return 0.0; };

    // Equal and opposite phase velocities cancel in the weighted
    // momentum, so any profile is admissible.
    std::vector<VectorField> u;
    u.push_back(VectorField::sample(g, [](double x, double) { return std::sin(x); }, zero2));
    u.push_back(VectorField::sample(g, [](double x, double) { return -std::sin(x); }, zero2));
    MultiVelocity v(q, std::move(u));
    CHECK(validate(v, d).pass);

    std::vector<VectorField> ub;
    ub.push_back(VectorField::sample(g, [](double x, double) { return std::sin(x); }, zero2));
    ub.push_back(VectorField::sample(g, [](double x, double) { return std::sin(x); }, zero2));
    MultiVelocity vb(q, std::move(ub));
    CHECK(!validate(vb, d).pass);
}

TEST_CASE("normalize_coset removes exactly the common gradient part") {
    Grid g(2, 32);
    std::mt19937_64 rng(321);
    QuadratureSet q = random_unit_quadrature(3, 2, rng);
    MultiDensity rho = random_density(g, q, rng);

    SUBCASE("a pure common gradient tuple collapses to zero") {
        ScalarField f = random_scalar(g, rng);
        VectorField df = gradient(f);
        std::vector<VectorField> alpha(3, df);
        MomentumCoset c = normalize_coset(std::move(alpha), rho);
        for (int i = 0; i < 3; ++i) CHECK(max_abs(c.alpha[i][0]) + max_abs(c.alpha[i][1]) <= 1e-10);
    }

    SUBCASE("normal form is co-closed and idempotent") {
        std::vector<VectorField> alpha;
        for (int i = 0; i < 3; ++i) alpha.push_back(random_vector(g, rng));
        MomentumCoset c = normalize_coset(alpha, rho);
        CHECK(constraint_residual_l2(rho, c.alpha) <= 1e-8);
        CHECK(validate(c).pass);
        MomentumCoset c2 = normalize_coset(c.alpha, rho);
        CHECK(max_abs_diff(c2.alpha, c.alpha) <= 1e-12);
    }

    SUBCASE("normalization only shifts by a common gradient") {
        std::vector<VectorField> alpha;
        for (int i = 0; i < 3; ++i) alpha.push_back(random_vector(g, rng));
        MomentumCoset c = normalize_coset(alpha, rho);
        // alpha - normal form must be a gradient, common to all phases.
        VectorField shift0 = alpha[0] - c.alpha[0];
        for (int i = 1; i < 3; ++i) {
            VectorField shift = alpha[i] - c.alpha[i];
            shift -= shift0;
            CHECK(max_abs(shift[0]) + max_abs(shift[1]) <= 1e-11);
        }
        CHECK(max_abs(curl2d(shift0)) <= 1e-9);
    }
}

TEST_CASE("normalize_dual_cotangent pins the function coset") {
    Grid g(1, 64);
    ScalarField h = ScalarField::sample(g, [](double x, double) { return std::sin(2.0 * x); });

    SUBCASE("a common tuple collapses to zero") {
        std::vector<ScalarField> f{h, h};
        auto nf = normalize_dual_cotangent(std::move(f));
        CHECK(max_abs(nf[0]) <= 1e-14);
        CHECK(max_abs(nf[1]) <= 1e-14);
    }

    SUBCASE("constants collapse to zero") {
        std::vector<ScalarField> f{ScalarField(g, 3.0), ScalarField(g, -1.0)};
        auto nf = normalize_dual_cotangent(std::move(f));
        CHECK(max_abs(nf[0]) <= 1e-14);
        CHECK(max_abs(nf[1]) <= 1e-14);
    }

    SUBCASE("two-phase example") {
        ScalarField s = ScalarField::sample(g, [](double x, double) { return std::sin(x); });
        ScalarField c = ScalarField::sample(g, [](double x, double) { return std::cos(x); });
        auto nf = normalize_dual_cotangent({s, c});
        ScalarField want = s - c;
        CHECK(max_abs_diff(nf[0], want) <= 1e-13);
        CHECK(max_abs(nf[1]) <= 1e-14);
    }

    SUBCASE("idempotent and representative independent") {
        std::mt19937_64 rng(55);
        std::vector<ScalarField> f;
        for (int i = 0; i < 4; ++i) f.push_back(random_scalar(g, rng));
        auto nf = normalize_dual_cotangent(f);
        auto nf2 = normalize_dual_cotangent(nf);
        for (int i = 0; i < 4; ++i) CHECK(max_abs_diff(nf[i], nf2[i]) <= 1e-13);

        // Adding a common function and constants does not change the
        // normal form.
        ScalarField common = random_scalar(g, rng);
        std::vector<ScalarField> shifted;
        for (int i = 0; i < 4; ++i) {
            ScalarField fi = f[i];
            fi += common;
            ScalarField cst(g, 0.7 * static_cast<double>(i + 1));
            fi += cst;
            shifted.push_back(std::move(fi));
        }
        auto nfs = normalize_dual_cotangent(shifted);
        for (int i = 0; i < 4; ++i) CHECK(max_abs_diff(nfs[i], nf[i]) <= 1e-12);
    }
}

TEST_CASE("tangent validation enforces the zero-sum and zero-mean laws") {
    Grid g(1, 64);
    QuadratureSet q = QuadratureSet::unit({kTwoPi / 2.0, kTwoPi / 2.0});
    ScalarField s = ScalarField::sample(g, [](double x, double) { return std::sin(x); });
    ScalarField ms = s;
    ms *= -1.0;

    TangentDensity ok(q, {s, ms});
    CHECK(validate(ok).pass);

    TangentDensity bad_sum(q, {s, s});
    CHECK(!validate(bad_sum).pass);

    ScalarField c(g, 0.5);
    ScalarField mc(g, -0.5);
    TangentDensity bad_mean(q, {c, mc});
    CHECK(!validate(bad_mean).pass);
}

TEST_CASE("random state generators satisfy their own invariants") {
    std::mt19937_64 rng(918273);
    for (int dim : {1, 2}) {
        Grid g(dim, 32);
        QuadratureSet q = random_unit_quadrature(3, dim, rng);
        CHECK(validate(q, dim).pass);
        MultiDensity rho = random_density(g, q, rng);
        CHECK(validate(rho).pass);
        MultiVelocity u = random_velocity(rho, rng);
        CHECK(validate(u, rho).pass);
        MomentumCoset a = random_coset(rho, rng);
        CHECK(validate(a).pass);
        DualCotangent x = random_cotangent(rho, rng);
        CHECK(validate(x, rho).pass);
        TangentDensity xi = random_tangent(rho, rng);
        CHECK(validate(xi).pass);
    }

    QuadratureSet t = trapezoid_quadrature_uniform_mass(8, 2);
    CHECK(validate(t, 2).pass);
    Grid g2(2, 32);
    MultiDensity rho8 = random_density(g2, t, rng);
    CHECK(validate(rho8).pass);
}

TEST_CASE("seeded uniform doubles are deterministic across runs") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        double xa = uniform_double(a, -1.5, 2.5);
        double xb = uniform_double(b, -1.5, 2.5);
        CHECK(xa == xb);
        CHECK(xa >= -1.5);
        CHECK(xa < 2.5);
    }
}

TEST_CASE("pairing vanishes on pure common-gradient cosets") {
    Grid g(2, 32);
    std::mt19937_64 rng(654);
    QuadratureSet q = random_unit_quadrature(2, 2, rng);
    MultiDensity rho = random_density(g, q, rng);

    ScalarField f = random_scalar(g, rng);
    VectorField df = gradient(f);
    std::vector<VectorField> alpha(2, df);

    for (int rep = 0; rep < 5; ++rep) {
        MultiVelocity u = random_velocity(rho, rng);
        double p = pairing_raw(q, alpha, u, rho);
        CHECK(std::abs(p) <= 1e-10 * (1.0 + max_abs(f)));
    }
}

#pragma once

#include <complex>
#include <variant>
#include <vector>

#include "multiflow/field.hpp"

namespace multiflow {

// Fourier coefficients of a real field in r2c (half-spectrum) layout.
// Normalized so f(x) = sum_k c_k exp(i k.x); the stored half is
// ky >= 0 (2D) or k >= 0 (1D), the rest follows by conjugate symmetry.
class Spectrum {
  public:
    Spectrum(const Grid& grid, std::vector<std::complex<double>> coeffs);

    const Grid& grid() const { return grid_; }
    const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
    std::vector<std::complex<double>>& coeffs() { return coeffs_; }

    // Coefficient of exp(i(kx x + ky y)); any integer kx, ky in range,
    // conjugate symmetry applied for ky < 0 (or kx < 0 in 1D).
    std::complex<double> mode(int kx, int ky = 0) const;

  private:
    Grid grid_;
    std::vector<std::complex<double>> coeffs_;
};

Spectrum analyze(const ScalarField& f);
ScalarField synthesize(const Spectrum& s);

// Exact spectral derivatives on the 2pi-periodic grid. Odd-order
// derivatives zero the Nyquist mode; fields kept under the dealias
// cutoff never populate it.
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
ScalarField curl2d(const VectorField& u);  // dim 2 only
ScalarField laplacian(const ScalarField& f);
VectorField laplacian(const VectorField& u);

// Rank-checked dispatcher over the four derivative kinds.
enum class DerivKind { grad, div, curl, lap };
using FieldVariant = std::variant<ScalarField, VectorField>;
FieldVariant spectral_derivative(const FieldVariant& f, DerivKind kind);

// Solves div(grad f) = g, zero-mean f. Rejects g whose mean is not
// zero relative to ||g||_2 (tolerance 1e-10). The inversion uses the
// symbol of the composed div/grad pair, so grad(solve_poisson(div v))
// is an exact projection even on the axis Nyquist planes, where the
// composition differs from the pointwise -|k|^2 Laplacian.
ScalarField solve_poisson(const ScalarField& g);

struct WeightedPoissonOptions {
    double rel_tol = 1e-12;  // on ||div(rho grad f) - g||_2 / ||g||_2
    int max_iter = 500;
};
struct WeightedPoissonResult {
    ScalarField f;
    int iterations;
    double rel_residual;
};
// Solves div(rho grad f) = g, zero-mean f, for strictly positive rho.
// Conjugate gradients preconditioned by the constant-coefficient inverse
// Laplacian; throws ConvergenceError at the iteration cap.
WeightedPoissonResult solve_weighted_poisson(const ScalarField& rho, const ScalarField& g,
                                             const WeightedPoissonOptions& opt = {});

// Quadrature of f against the volume form, exact for trigonometric
// polynomials under the Nyquist limit.
double integrate(const ScalarField& f);
double inner_l2(const ScalarField& a, const ScalarField& b);
double norm_l2(const ScalarField& f);
double norm_l2(const VectorField& u);

// 2/3-rule truncation: zeroes every mode with any axis wavenumber
// satisfying 3|k| > N.
ScalarField dealias(ScalarField f);
VectorField dealias(VectorField u);

ScalarField subtract_mean(ScalarField f);

// Trigonometric point evaluation of a 1D field, exact at the nodes.
class FourierInterpolant1D {
  public:
    explicit FourierInterpolant1D(const ScalarField& f);
    double operator()(double x) const;

  private:
    int n_;
    std::vector<std::complex<double>> coeffs_;
};

}  // namespace multiflow

#pragma once

#include <random>

#include "multiflow/state.hpp"

namespace multiflow {

// Uniform double in [lo, hi) from the top 53 bits of the engine. The
// standard distributions are implementation-defined; this mapping keeps
// seeded streams identical across compilers.
double uniform_double(std::mt19937_64& rng, double lo, double hi);

struct BandLimitedOptions {
    int kmax = 3;          // largest axis wavenumber populated
    double amplitude = 1.0;  // approximate max-norm after scaling
};

// Zero-mean real trigonometric polynomial with modes up to kmax.
ScalarField random_scalar(const Grid& g, std::mt19937_64& rng,
                          const BandLimitedOptions& opt = {});
VectorField random_vector(const Grid& g, std::mt19937_64& rng,
                          const BandLimitedOptions& opt = {});

// Unit weights, masses positive with sum w_i c_i = (2pi)^dim.
QuadratureSet random_unit_quadrature(int n, int dim, std::mt19937_64& rng);
// Trapezoid nodes on [0,1], every mass equal to the torus volume.
QuadratureSet trapezoid_quadrature_uniform_mass(int m, int dim);

// Strictly positive tuple with exact pointwise weighted sum 1 and exact
// masses; strength scales the deviation from the uniform background.
MultiDensity random_density(const Grid& g, const QuadratureSet& quad, std::mt19937_64& rng,
                            double strength = 0.3, const BandLimitedOptions& opt = {});

// Constrained velocity tuple (random fields, then projection).
MultiVelocity random_velocity(const MultiDensity& rho, std::mt19937_64& rng,
                              const BandLimitedOptions& opt = {});

// Co-closed momentum coset over rho.
MomentumCoset random_coset(const MultiDensity& rho, std::mt19937_64& rng,
                           const BandLimitedOptions& opt = {});

// Cotangent with constrained fiber and normalized base tuple.
DualCotangent random_cotangent(const MultiDensity& rho, std::mt19937_64& rng,
                               const BandLimitedOptions& opt = {});

// Density-tangent realized as the anchor of a constrained velocity.
TangentDensity random_tangent(const MultiDensity& rho, std::mt19937_64& rng,
                              const BandLimitedOptions& opt = {});

}  // namespace multiflow

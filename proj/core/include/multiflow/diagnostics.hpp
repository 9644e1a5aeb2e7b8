#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "multiflow/dynamics.hpp"

namespace multiflow {

// One diagnostics record. kelvin entries are the relative circulation
// transport errors when vorticity coefficients are co-evolved, zero
// otherwise (and always in 1D, where enstrophy is zero as well).
struct DiagnosticsRow {
    double t = 0.0;
    double energy = 0.0;
    std::vector<double> mass;
    double constraint_inf = 0.0;
    double div_l2 = 0.0;
    std::vector<double> kelvin;
    std::vector<double> enstrophy;
};

// energy = 1/2 sum_i w_i integral |u_i|^2 rho_i vol.
double kinetic_energy(const MultiVelocity& u, const MultiDensity& rho);

// Fills t, energy, mass, constraint_inf (||sum w rho - 1||_inf of the
// current state), div_l2 and enstrophy; kelvin entries are zeroed and
// belong to the caller that tracks transported vorticity.
DiagnosticsRow compute_diagnostics(const FlowState& s);

// %.17g, the shortest round-trippable decimal form used in all emitted
// data files.
std::string format_double(double v);

// CSV with the fixed header
// t,H,mass_1..n,constraint_inf,div_l2,kelvin_1..n,enstrophy_1..n.
class DiagnosticsWriter {
  public:
    DiagnosticsWriter(const std::string& path, int n_phases);

    void write(const DiagnosticsRow& row);

  private:
    std::ofstream out_;
    int n_;
};

}  // namespace multiflow

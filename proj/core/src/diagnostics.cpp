#include <charconv>
#include <cstdio>

#include "multiflow/diagnostics.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {

double kinetic_energy(const MultiVelocity& u, const MultiDensity& rho) {
    double h = 0.0;
    for (int i = 0; i < u.n(); ++i)
        h += 0.5 * u.quad.weight(i) * integrate(multiply(rho.rho[i], dot(u.u[i], u.u[i])));
    return h;
}

DiagnosticsRow compute_diagnostics(const FlowState& s) {
    DiagnosticsRow row;
    row.t = s.t;
    row.energy = kinetic_energy(s.u, s.rho);
    for (int i = 0; i < s.n(); ++i) row.mass.push_back(integrate(s.rho.rho[i]));

    ScalarField sum = weighted_sum(s.rho.quad, s.rho.rho);
    for (std::size_t j = 0; j < sum.size(); ++j) sum[j] -= 1.0;
    row.constraint_inf = max_abs(sum);
    row.div_l2 = constraint_residual_l2(s.rho, s.u.u);

    row.kelvin.assign(static_cast<std::size_t>(s.n()), 0.0);
    for (int i = 0; i < s.n(); ++i) {
        double ens = 0.0;
        if (s.grid().dim() == 2) {
            double c = norm_l2(curl2d(s.u.u[i]));
            ens = 0.5 * c * c;
        }
        row.enstrophy.push_back(ens);
    }
    return row;
}

std::string format_double(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;  // shortest round-trip form always fits
    return std::string(buf, end);
}

DiagnosticsWriter::DiagnosticsWriter(const std::string& path, int n_phases)
    : out_(path, std::ios::trunc), n_(n_phases) {
    if (!out_) throw Error("cannot open diagnostics file '" + path + "'");
    out_ << "t,H";
    for (int i = 1; i <= n_; ++i) out_ << ",mass_" << i;
    out_ << ",constraint_inf,div_l2";
    for (int i = 1; i <= n_; ++i) out_ << ",kelvin_" << i;
    for (int i = 1; i <= n_; ++i) out_ << ",enstrophy_" << i;
    out_ << "\n";
}

void DiagnosticsWriter::write(const DiagnosticsRow& row) {
    if (static_cast<int>(row.mass.size()) != n_ ||
        static_cast<int>(row.kelvin.size()) != n_ ||
        static_cast<int>(row.enstrophy.size()) != n_)
        throw StructuralError("diagnostics row phase count does not match the file header");
    out_ << format_double(row.t) << ',' << format_double(row.energy);
    for (double m : row.mass) out_ << ',' << format_double(m);
    out_ << ',' << format_double(row.constraint_inf) << ',' << format_double(row.div_l2);
    for (double k : row.kelvin) out_ << ',' << format_double(k);
    for (double e : row.enstrophy) out_ << ',' << format_double(e);
    out_ << "\n";
    out_.flush();
}

}  // namespace multiflow

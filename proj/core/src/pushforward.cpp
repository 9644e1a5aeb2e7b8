#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "multiflow/dynamics.hpp"
#include "multiflow/errors.hpp"
#include "multiflow/spectral.hpp"

namespace multiflow {
namespace {

// Fritsch-Carlson shape-preserving cubic on strictly increasing
// abscissae; evaluation by Hermite form on the bracketing interval.
class Pchip {
  public:
    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), d_(x_.size()) {
        const std::size_t m = x_.size();
        std::vector<double> h(m - 1), sec(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            h[k] = x_[k + 1] - x_[k];
            sec[k] = (y_[k + 1] - y_[k]) / h[k];
        }
        d_[0] = sec[0];
        d_[m - 1] = sec[m - 2];
        for (std::size_t k = 1; k + 1 < m; ++k) {
            if (sec[k - 1] * sec[k] <= 0.0) {
                d_[k] = 0.0;
            } else {
                const double w1 = 2.0 * h[k] + h[k - 1];
                const double w2 = h[k] + 2.0 * h[k - 1];
                d_[k] = (w1 + w2) / (w1 / sec[k - 1] + w2 / sec[k]);
            }
        }
    }

    double operator()(double x) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t k = (it == x_.begin()) ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
        k = std::min(k, x_.size() - 2);
        const double h = x_[k + 1] - x_[k];
        const double t = (x - x_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * y_[k] + (t3 - 2 * t2 + t) * h * d_[k] +
               (-2 * t3 + 3 * t2) * y_[k + 1] + (t3 - t2) * h * d_[k + 1];
    }

  private:
    std::vector<double> x_, y_, d_;
};

// Periodic extension: one sample on each side so every target interval
// has interior-quality slopes.
Pchip periodic_pchip(const std::vector<double>& x, const std::vector<double>& y,
                     double x_period, double y_period) {
    const std::size_t m = x.size();
    std::vector<double> xe, ye;
    xe.reserve(m + 3);
    ye.reserve(m + 3);
    xe.push_back(x[m - 1] - x_period);
    ye.push_back(y[m - 1] - y_period);
    xe.insert(xe.end(), x.begin(), x.end());
    ye.insert(ye.end(), y.begin(), y.end());
    xe.push_back(x[0] + x_period);
    ye.push_back(y[0] + y_period);
    xe.push_back(x[1] + x_period);
    ye.push_back(y[1] + y_period);
    return Pchip(std::move(xe), std::move(ye));
}

}  // namespace

PushforwardReport pushforward_check_1d(FlowState s, double T, double dt,
                                       const StepOptions& opt) {
    if (s.grid().dim() != 1)
        throw StructuralError("pushforward_check_1d: flow maps are tracked in 1D only");
    const Grid& g = s.grid();
    const std::size_t N = g.size();
    const int n = s.n();

    std::vector<ScalarField> rho0 = s.rho.rho;

    // Lifted flow maps: phi strictly increasing with phi(x+2pi)=phi(x)+2pi,
    // J = dphi/dx by the variational equation dJ/dt = u'(phi) J.
    std::vector<std::vector<double>> phi(static_cast<std::size_t>(n),
                                         std::vector<double>(N));
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(n),
                                         std::vector<double>(N, 1.0));
    for (auto& p : phi)
        for (std::size_t k = 0; k < N; ++k) p[k] = g.x(k);

    const long steps = std::lround(T / dt);
    for (long step = 0; step < steps; ++step) {
        // Stage increments per phase, flattened [phase][node].
        std::vector<std::vector<std::vector<double>>> kp(
            4, std::vector<std::vector<double>>(static_cast<std::size_t>(n)));
        auto kj = kp;

        auto hook = [&](int stage, const MultiVelocity& us) {
            const int sidx = stage - 1;
            const double c = (stage == 2 || stage == 3) ? 0.5 * dt : (stage == 4 ? dt : 0.0);
            for (int i = 0; i < n; ++i) {
                const auto pi = static_cast<std::size_t>(i);
                FourierInterpolant1D uval(us.u[pi][0]);
                FourierInterpolant1D uder(gradient(us.u[pi][0])[0]);
                auto& kps = kp[static_cast<std::size_t>(sidx)][pi];
                auto& kjs = kj[static_cast<std::size_t>(sidx)][pi];
                kps.resize(N);
                kjs.resize(N);
                for (std::size_t m = 0; m < N; ++m) {
                    double pos = phi[pi][m];
                    double jval = jac[pi][m];
                    if (stage > 1) {
                        pos += c * kp[static_cast<std::size_t>(sidx - 1)][pi][m];
                        jval += c * kj[static_cast<std::size_t>(sidx - 1)][pi][m];
                    }
                    kps[m] = uval(pos);
                    kjs[m] = uder(pos) * jval;
                }
            }
        };
        step_rk4_staged(s, dt, opt, hook);

        for (int i = 0; i < n; ++i) {
            const auto pi = static_cast<std::size_t>(i);
            for (std::size_t m = 0; m < N; ++m) {
                phi[pi][m] += dt / 6.0 *
                              (kp[0][pi][m] + 2 * kp[1][pi][m] + 2 * kp[2][pi][m] + kp[3][pi][m]);
                jac[pi][m] += dt / 6.0 *
                              (kj[0][pi][m] + 2 * kj[1][pi][m] + 2 * kj[2][pi][m] + kj[3][pi][m]);
            }
            // Fold monitor: the lifted map must stay strictly increasing
            // and the Jacobian positive.
            for (std::size_t m = 0; m < N; ++m) {
                const double next = (m + 1 < N) ? phi[pi][m + 1] : phi[pi][0] + kTwoPi;
                if (next <= phi[pi][m])
                    throw FoldError("pushforward_check_1d: flow map of phase " +
                                    std::to_string(i) + " folded at t = " + std::to_string(s.t));
                if (jac[pi][m] <= 0.0)
                    throw FoldError("pushforward_check_1d: Jacobian of phase " +
                                    std::to_string(i) + " lost positivity at t = " +
                                    std::to_string(s.t));
            }
        }
    }

    PushforwardReport rep;
    rep.min_jacobian = jac[0][0];
    std::vector<double> nodes(N);
    for (std::size_t k = 0; k < N; ++k) nodes[k] = g.x(k);

    for (int i = 0; i < n; ++i) {
        const auto pi = static_cast<std::size_t>(i);
        for (double jv : jac[pi]) rep.min_jacobian = std::min(rep.min_jacobian, jv);

        // Inverse map by monotone interpolation of (phi -> x) on the circle.
        Pchip inv = periodic_pchip(phi[pi], nodes, kTwoPi, kTwoPi);
        Pchip jmap = periodic_pchip(nodes, jac[pi], kTwoPi, 0.0);
        FourierInterpolant1D r0(rho0[pi]);

        const double lo = phi[pi][0];
        double mismatch = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            double y = nodes[k];
            y -= kTwoPi * std::floor((y - lo) / kTwoPi);
            const double xs = inv(y);
            const double pushed = r0(xs) / jmap(xs);
            mismatch = std::max(mismatch, std::abs(pushed - s.rho.rho[pi][k]));
        }
        rep.max_mismatch.push_back(mismatch);
    }
    return rep;
}

}  // namespace multiflow

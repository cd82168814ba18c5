#ifndef OSGOODLAB_WEIGHTS_HPP
#define OSGOODLAB_WEIGHTS_HPP

// Weight functions phi for the energy estimates.
//
// Both weight equations involve only phi' and phi''. With psi = phi' they are
// solved as first-order problems, phi being carried along as the quadrature
// of psi:
//
//   log-Lipschitz weight:  y psi' = -lambda psi (1 + |log psi|)
//   Osgood weight:         y psi' = -lambda psi^2 omega(k_A / psi)
//
// The normalization point is explicit: (psi0, phi0) are prescribed at the left
// end y0, or at the right end y1 when WeightSolveOptions::anchor_at_end is set.

#include "osgoodlab/errors.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace osgoodlab {

enum class WeightKind { loglip_ode, osgood_ode };

inline std::string to_string(WeightKind k) {
    return k == WeightKind::loglip_ode ? "loglip_ode" : "osgood_ode";
}

struct WeightNode {
    double y;
    double psi;
    double phi;
    double dpsi; // psi'(y) from the equation
};

class WeightFunction {
public:
    double lambda = 0.0;
    WeightKind kind = WeightKind::loglip_ode;
    double k_A = 0.0;
    std::optional<Modulus> omega;
    double y0 = 0.0;          // left end of the domain (may be truncated)
    double psi0 = 0.0;        // prescribed psi at the anchor
    double phi0 = 0.0;        // prescribed phi at the anchor
    bool anchored_at_end = false;
    double y_end = 0.0;       // requested end of the domain opposite the anchor
    double y1 = 0.0;          // right end of the domain (may be truncated)
    bool truncated = false;
    std::string warning;
    std::vector<WeightNode> nodes;

    bool contains(double y) const { return y >= y0 && y <= y1; }

    /// Right-hand side psi'(y) of the first-order equation.
    /// Trial states with psi <= 0 or non-finite psi (rejected steps) give NaN.
    double rhs(double y, double psi) const {
        if (!(psi > 0.0) || !std::isfinite(psi)) return std::numeric_limits<double>::quiet_NaN();
        if (kind == WeightKind::loglip_ode)
            return -lambda * psi * (1.0 + std::abs(std::log(psi))) / y;
        const double arg = std::min(k_A / psi, 1.0);
        return -lambda * psi * (psi * (*omega)(arg)) / y;
    }

    /// (phi(y), psi(y)) by monotone cubic Hermite interpolation of the table.
    std::pair<double, double> evaluate(double y) const {
        if (!contains(y)) {
            std::ostringstream msg;
            msg << "evaluate_weight: y=" << y << " outside [" << y0 << ", " << y1 << "]";
            throw RangeError(msg.str());
        }
        auto it = std::upper_bound(nodes.begin(), nodes.end(), y,
                                   [](double v, const WeightNode& n) { return v < n.y; });
        if (it == nodes.end()) return {nodes.back().phi, nodes.back().psi};
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double h = hi.y - lo.y;
        const double s = (y - lo.y) / h;

        // psi: Hermite with the equation's slopes, limited (Fritsch-Carlson) so
        // the interpolant stays monotone.
        double m0 = lo.dpsi, m1 = hi.dpsi;
        const double secant = (hi.psi - lo.psi) / h;
        if (secant == 0.0) {
            m0 = m1 = 0.0;
        } else {
            const double a = m0 / secant, b = m1 / secant;
            if (a < 0.0) m0 = 0.0;
            if (b < 0.0) m1 = 0.0;
            const double r = a * a + b * b;
            if (r > 9.0) {
                const double t = 3.0 / std::sqrt(r);
                m0 = t * a * secant;
                m1 = t * b * secant;
            }
        }
        const double s2 = s * s, s3 = s2 * s;
        const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s, h01 = -2 * s3 + 3 * s2,
                     h11 = s3 - s2;
        const double psi = h00 * lo.psi + h10 * h * m0 + h01 * hi.psi + h11 * h * m1;
        const double phi = h00 * lo.phi + h10 * h * lo.psi + h01 * hi.phi + h11 * h * hi.psi;
        return {phi, psi};
    }

    /// phi(y + dy) - phi(y) without cancellation when both points share a
    /// table interval (the Hermite basis differences are factored by ds).
    double phi_increment(double y, double dy) const {
        if (!contains(y) || !contains(y + dy)) {
            std::ostringstream msg;
            msg << "evaluate_weight: increment [" << y << ", " << y + dy << "] outside [" << y0 << ", " << y1 << "]";
            throw RangeError(msg.str());
        }
        if (dy == 0.0) return 0.0;
        auto it = std::upper_bound(nodes.begin(), nodes.end(), y,
                                   [](double v, const WeightNode& n) { return v < n.y; });
        if (it == nodes.end() || y + dy > it->y || dy < 0.0) return phi(y + dy) - phi(y);
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double h = hi.y - lo.y;
        const double s0 = (y - lo.y) / h, ds = dy / h, s1 = s0 + ds;
        const double sum = s0 + s1, q = s1 * s1 + s1 * s0 + s0 * s0;
        const double d01 = 3.0 * sum - 2.0 * q, d10 = q - 2.0 * sum + 1.0, d11 = q - sum;
        return ds * ((hi.phi - lo.phi) * d01 + h * (lo.psi * d10 + hi.psi * d11));
    }

    double phi(double y) const { return evaluate(y).first; }
    double psi(double y) const { return evaluate(y).second; }

    /// |y psi'(y) - y·rhs| / (1 + |y·rhs|), psi' by central differences of the interpolant.
    double residual(double y, double step) const {
        const double dpsi = (psi(y + step) - psi(y - step)) / (2.0 * step);
        const double target = y * rhs(y, psi(y));
        return std::abs(y * dpsi - target) / (1.0 + std::abs(target));
    }
};

struct WeightSolveOptions {
    double rel_tol = 1e-12;
    /// Largest step as a fraction of the requested domain length.
    double max_step_fraction = 1.0 / 256.0;
    double underflow = 1e-300;
    double overflow = 1e300;
    /// Prescribe (psi0, phi0) at y1 and integrate towards y0.
    bool anchor_at_end = false;
};

namespace detail {

inline WeightFunction solve_weight(WeightFunction w, const WeightSolveOptions& opt) {
    if (!(w.y0 > 0.0 && w.y1 > w.y0)) throw ParameterError("weight: need 0 < y0 < y1");
    if (!(w.psi0 > 0.0)) throw ParameterError("weight: psi0 must be positive");
    if (!(w.lambda >= 0.0)) throw ParameterError("weight: lambda must be nonnegative");
    w.anchored_at_end = opt.anchor_at_end;
    w.y_end = w.anchored_at_end ? w.y0 : w.y1;

    // Integration variable x = y (left anchor) or x = -y (right anchor).
    const double dir = w.anchored_at_end ? -1.0 : 1.0;
    auto f = [&w, dir](double x, const ode::State<2>& s) -> ode::State<2> {
        return {dir * w.rhs(dir * x, s[0]), dir * s[0]};
    };
    ode::StepControl ctl;
    ctl.rel_tol = opt.rel_tol;
    ctl.abs_tol = {opt.underflow, 1e-14, 0.0, 0.0};
    ctl.max_step = (w.y1 - w.y0) * opt.max_step_fraction;

    std::vector<ode::Event<2>> events;
    events.push_back({[u = opt.underflow](double, const ode::State<2>& s) { return s[0] - u; }, true,
                      "psi underflow", nullptr});
    events.push_back({[o = opt.overflow](double, const ode::State<2>& s) { return o - s[0]; }, true,
                      "psi overflow", nullptr});
    if (w.kind == WeightKind::loglip_ode) {
        events.push_back({[](double, const ode::State<2>& s) { return s[0] - 1.0; }, false,
                          "psi crosses 1", [](ode::State<2>& s) { s[0] = 1.0; }});
    } else {
        const double limit = w.k_A / w.omega->valid_upper;
        events.push_back({[limit](double, const ode::State<2>& s) { return s[0] - limit; }, true,
                          "k_A/psi reached the end of omega's closed-form range",
                          [limit](ode::State<2>& s) { s[0] = limit; }});
    }

    const double x0 = w.anchored_at_end ? -w.y1 : w.y0;
    const double x1 = w.anchored_at_end ? -w.y0 : w.y1;
    const auto sol = ode::integrate<2>(f, x0, {w.psi0, w.phi0}, x1, ctl, events);
    w.nodes.clear();
    w.nodes.reserve(sol.samples.size());
    for (const auto& s : sol.samples) w.nodes.push_back({dir * s.x, s.y[0], s.y[1], dir * s.dy[0]});
    if (w.anchored_at_end) {
        std::reverse(w.nodes.begin(), w.nodes.end());
        w.y0 = w.nodes.front().y;
    } else {
        w.y1 = w.nodes.back().y;
    }
    w.truncated = sol.stopped_early;
    if (w.truncated) {
        std::ostringstream msg;
        msg << "weight domain truncated to [" << w.y0 << ", " << w.y1 << "]: " << sol.stop_reason;
        w.warning = msg.str();
    }
    return w;
}

} // namespace detail

/// Solves y psi' = -lambda psi (1 + |log psi|), psi(y0) = psi0, phi = phi0 + ∫ psi
/// (anchor at y1 instead when opt.anchor_at_end). For trajectories with psi >= 1
/// the exact solution is 1 + log psi(y) = (1 + log psi0) (y0 / y)^lambda.
inline WeightFunction solve_loglip_weight(double lambda, double y0, double psi0, double phi0, double y1,
                                          const WeightSolveOptions& opt = {}) {
    WeightFunction w;
    w.kind = WeightKind::loglip_ode;
    w.lambda = lambda;
    w.y0 = y0;
    w.psi0 = psi0;
    w.phi0 = phi0;
    w.y1 = y1;
    return detail::solve_weight(std::move(w), opt);
}

/// Solves y psi' = -lambda psi^2 omega(k_A / psi), psi = psi0 > k_A at the anchor.
inline WeightFunction solve_osgood_weight(double lambda, double k_A, const Modulus& omega, double y0,
                                          double psi0, double phi0, double y1,
                                          const WeightSolveOptions& opt = {}) {
    if (!(k_A > 0.0)) throw ParameterError("solve_osgood_weight: k_A must be positive");
    if (!(psi0 > k_A)) throw ParameterError("solve_osgood_weight: need psi0 > k_A");
    if (!(k_A / psi0 < omega.valid_upper))
        throw ParameterError("solve_osgood_weight: k_A/psi0 outside omega's closed-form range");
    WeightFunction w;
    w.kind = WeightKind::osgood_ode;
    w.lambda = lambda;
    w.k_A = k_A;
    w.omega = omega;
    w.y0 = y0;
    w.psi0 = psi0;
    w.phi0 = phi0;
    w.y1 = y1;
    return detail::solve_weight(std::move(w), opt);
}

/// (phi(y), psi(y)).
inline std::pair<double, double> evaluate_weight(const WeightFunction& w, double y) {
    return w.evaluate(y);
}

/// Closed forms used as oracles.
namespace closed_form {

/// Log-Lipschitz weight, psi on either side of 1 (psi does not cross 1 between y0 and y):
///   psi >= 1: 1 + log psi = (1 + log psi0)(y0/y)^lambda
///   psi <= 1: 1 - log psi = (1 - log psi0)(y/y0)^lambda
inline double loglip_psi(double lambda, double y0, double psi0, double y) {
    if (psi0 >= 1.0) {
        const double v = (1.0 + std::log(psi0)) * std::pow(y0 / y, lambda) - 1.0;
        if (v >= 0.0) return std::exp(v);
        // crossed 1 at y_c where (1 + log psi0)(y0/y_c)^lambda = 1
        const double yc = y0 * std::pow(1.0 + std::log(psi0), 1.0 / lambda);
        return std::exp(1.0 - std::pow(y / yc, lambda));
    }
    return std::exp(1.0 - (1.0 - std::log(psi0)) * std::pow(y / y0, lambda));
}

/// Osgood weight with omega(s) = s: psi = psi0 (y0/y)^(lambda k_A).
inline double osgood_lipschitz_psi(double lambda, double k_A, double y0, double psi0, double y) {
    return psi0 * std::pow(y0 / y, lambda * k_A);
}

} // namespace closed_form

} // namespace osgoodlab

#endif // OSGOODLAB_WEIGHTS_HPP

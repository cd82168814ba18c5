#ifndef OSGOODLAB_ODE_HPP
#define OSGOODLAB_ODE_HPP

// Dormand-Prince 5(4) integrator for small autonomous-in-form systems
// y' = f(x, y), with event location on the cubic Hermite interpolant.

#include "osgoodlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab::ode {

template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct Sample {
    double x;
    State<N> y;
    State<N> dy;
};

struct StepControl {
    double rel_tol = 1e-10;
    std::array<double, 4> abs_tol{1e-300, 1e-14, 1e-14, 1e-14};
    double max_step = 0.0; // 0: unlimited
    double first_step = 0.0;
    std::size_t max_steps = 2'000'000;
};

/// Event g(x, y) = 0. Terminal events stop integration at the root, others split
/// the step there (used to step exactly onto a kink of the right-hand side).
template <std::size_t N>
struct Event {
    std::function<double(double, const State<N>&)> g;
    bool terminal = false;
    std::string name;
    /// Optional projection applied to the state at the root.
    std::function<void(State<N>&)> on_hit;
};

template <std::size_t N>
struct Solution {
    std::vector<Sample<N>> samples;
    bool stopped_early = false;
    std::string stop_reason;
};

namespace detail {

// Butcher tableau of Dormand & Prince (1980).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <std::size_t N, class F>
double dopri_step(F& f, double x, const State<N>& y, const State<N>& k1, double h, State<N>& y_new,
                  State<N>& k7, const StepControl& ctl) {
    State<N> tmp, k2, k3, k4, k5, k6;
    auto combo = [&](auto&&... terms) {
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (terms[i] + ...);
        return tmp;
    };
    auto scaled = [](double c, const State<N>& k) {
        State<N> r;
        for (std::size_t i = 0; i < N; ++i) r[i] = c * k[i];
        return r;
    };
    k2 = f(x + c2 * h, combo(scaled(a21, k1)));
    k3 = f(x + c3 * h, combo(scaled(a31, k1), scaled(a32, k2)));
    k4 = f(x + c4 * h, combo(scaled(a41, k1), scaled(a42, k2), scaled(a43, k3)));
    k5 = f(x + c5 * h, combo(scaled(a51, k1), scaled(a52, k2), scaled(a53, k3), scaled(a54, k4)));
    k6 = f(x + h, combo(scaled(a61, k1), scaled(a62, k2), scaled(a63, k3), scaled(a64, k4),
                        scaled(a65, k5)));
    y_new = combo(scaled(b1, k1), scaled(b3, k3), scaled(b4, k4), scaled(b5, k5), scaled(b6, k6));
    k7 = f(x + h, y_new);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double e =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double scale =
            ctl.abs_tol[std::min<std::size_t>(i, 3)] + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = std::abs(e) / scale;
        if (!std::isfinite(r) || !std::isfinite(y_new[i])) return std::numeric_limits<double>::quiet_NaN();
        err = std::max(err, r);
    }
    return err;
}

} // namespace detail

/// Cubic Hermite interpolation between two samples, component i.
template <std::size_t N>
double hermite(const Sample<N>& lo, const Sample<N>& hi, std::size_t i, double x) {
    const double h = hi.x - lo.x;
    const double s = (x - lo.x) / h;
    const double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * lo.y[i] + (s3 - 2 * s2 + s) * h * lo.dy[i] +
           (-2 * s3 + 3 * s2) * hi.y[i] + (s3 - s2) * h * hi.dy[i];
}

/// Integrate from x0 to x1 (> x0). Returns every accepted step.
template <std::size_t N, class F>
Solution<N> integrate(F&& f, double x0, State<N> y0, double x1, const StepControl& ctl,
                      const std::vector<Event<N>>& events = {}) {
    if (!(x1 > x0)) throw ParameterError("ode::integrate: need x1 > x0");
    Solution<N> sol;
    State<N> k1 = f(x0, y0);
    sol.samples.push_back({x0, y0, k1});

    const double span = x1 - x0;
    double h = ctl.first_step > 0.0 ? ctl.first_step : span * 1e-3;
    if (ctl.max_step > 0.0) h = std::min(h, ctl.max_step);

    std::vector<double> last_sign(events.size(), 0.0);
    for (std::size_t e = 0; e < events.size(); ++e) {
        const double g = events[e].g(x0, y0);
        last_sign[e] = g > 0 ? 1.0 : (g < 0 ? -1.0 : 0.0);
    }

    double x = x0;
    State<N> y = y0;
    std::size_t steps = 0;
    while (x < x1) {
        if (++steps > ctl.max_steps) {
            std::ostringstream msg;
            msg << "ode::integrate: step budget exhausted at x=" << x;
            throw NumericalError(msg.str());
        }
        h = std::min(h, x1 - x);
        State<N> y_new, k7;
        const double err = detail::dopri_step(f, x, y, k1, h, y_new, k7, ctl);
        if (!std::isfinite(err) || err > 1.0) {
            const double factor = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
            h *= factor;
            if (h < 1e-14 * std::max(1.0, std::abs(x))) {
                std::ostringstream msg;
                msg << "ode::integrate: step size underflow at x=" << x;
                throw NumericalError(msg.str());
            }
            continue;
        }

        double x_new = (x1 - x - h <= 1e-14 * span) ? x1 : x + h;
        Sample<N> lo{x, y, k1};
        Sample<N> hi{x_new, y_new, k7};

        // Earliest event with a sign change inside the step.
        std::size_t hit = events.size();
        double x_hit = x_new;
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g_new = events[e].g(x_new, y_new);
            const double sgn = g_new > 0 ? 1.0 : (g_new < 0 ? -1.0 : 0.0);
            if (last_sign[e] == 0.0 || sgn == 0.0 || sgn == last_sign[e]) continue;
            double a = x, b = x_new;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
                const double m = 0.5 * (a + b);
                State<N> ym;
                for (std::size_t i = 0; i < N; ++i) ym[i] = hermite(lo, hi, i, m);
                const double gm = events[e].g(m, ym);
                const double sm = gm > 0 ? 1.0 : (gm < 0 ? -1.0 : 0.0);
                if (sm == last_sign[e]) a = m;
                else b = m;
            }
            if (b < x_hit) {
                x_hit = b;
                hit = e;
            }
        }
        if (hit < events.size() && x_hit < x_new) {
            // Redo the step so that it ends on the root.
            const double h_hit = x_hit - x;
            if (h_hit > 1e-15 * std::max(1.0, std::abs(x))) {
                detail::dopri_step(f, x, y, k1, h_hit, y_new, k7, ctl);
            } else {
                y_new = y;
            }
            x_new = x_hit;
        }
        if (hit < events.size() && events[hit].on_hit) {
            events[hit].on_hit(y_new);
            k7 = f(x_new, y_new);
        }

        x = x_new;
        y = y_new;
        k1 = k7;
        sol.samples.push_back({x, y, k1});
        for (std::size_t e = 0; e < events.size(); ++e) {
            const double g = events[e].g(x, y);
            const double sgn = g > 0 ? 1.0 : (g < 0 ? -1.0 : 0.0);
            if (e == hit) last_sign[e] = -last_sign[e];
            else if (sgn != 0.0) last_sign[e] = sgn;
        }
        if (hit < events.size() && events[hit].terminal) {
            sol.stopped_early = true;
            sol.stop_reason = events[hit].name;
            return sol;
        }

        const double factor = err > 0.0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2))) : 5.0;
        h *= factor;
        if (ctl.max_step > 0.0) h = std::min(h, ctl.max_step);
    }
    return sol;
}

} // namespace osgoodlab::ode

#endif // OSGOODLAB_ODE_HPP

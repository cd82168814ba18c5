#ifndef OSGOODLAB_QUADRATURE_HPP
#define OSGOODLAB_QUADRATURE_HPP

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
//
// The interval with the largest error estimate is bisected until the summed
// estimate satisfies  err <= max(abs_tol, rel_tol * |I|).  The error of a panel
// is taken as |K15 - G7|, which over-estimates the K15 error, so the reported
// tolerance is conservative.

#include "osgoodlab/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab::quadrature {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    std::size_t max_panels = 20000;
    /// Throw NumericalError instead of returning an unconverged result.
    bool throw_on_failure = true;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t evaluations = 0;
    std::size_t panels = 0;
    bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for kronrod_nodes[1], [3], [5], [7].
inline constexpr std::array<double, 4> gauss_weights{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

template <class F>
Panel gauss_kronrod_15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(centre);
    double kronrod = fc * kronrod_weights[7];
    double gauss = fc * gauss_weights[3];
    for (std::size_t j = 0; j < 7; ++j) {
        const double dx = half * kronrod_nodes[j];
        const double sum = f(centre - dx) + f(centre + dx);
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
    }
    return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

} // namespace detail

/// Integrate f over [a, b]. Supports a > b (sign flips) and a == b (returns 0).
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    if (!(std::isfinite(a) && std::isfinite(b)))
        throw ParameterError("quadrature: non-finite integration limits");
    const double sign = b > a ? 1.0 : -1.0;
    if (b < a) std::swap(a, b);

    std::priority_queue<detail::Panel> heap;
    auto first = detail::gauss_kronrod_15(f, a, b);
    out.evaluations = 15;
    double total = first.value;
    double total_err = first.error;
    heap.push(first);

    auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    while (total_err > tolerance() && heap.size() < opt.max_panels) {
        const auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break; // panel at machine resolution
        heap.pop();
        auto left = detail::gauss_kronrod_15(f, worst.a, mid);
        auto right = detail::gauss_kronrod_15(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in a fixed order for a less drift-prone total.
    std::vector<detail::Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::Panel& l, const detail::Panel& r) { return l.a < r.a; });
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : panels) {
        total += p.value;
        total_err += p.error;
    }

    out.value = sign * total;
    out.error = total_err;
    out.panels = panels.size();
    out.converged = std::isfinite(total) && total_err <= tolerance();
    if (!out.converged && opt.throw_on_failure) {
        std::ostringstream msg;
        msg << "quadrature did not converge on [" << a << ", " << b << "]: value=" << total
            << " error_estimate=" << total_err << " panels=" << out.panels
            << " evaluations=" << out.evaluations;
        throw NumericalError(msg.str());
    }
    return out;
}

/// Integrate over [a, b] ⊂ (0, ∞) after the substitution s = e^u. Suited to
/// integrands with a singular or rapidly varying behaviour near s = 0.
template <class F>
Result integrate_log_scale(F&& f, double a, double b, const Options& opt = {}) {
    if (!(a > 0.0 && b > 0.0))
        throw ParameterError("integrate_log_scale: limits must be positive");
    auto g = [&f](double u) {
        const double s = std::exp(u);
        return f(s) * s;
    };
    return integrate(g, std::log(a), std::log(b), opt);
}

/// Integrate over consecutive panels given by sorted breakpoints, summing results.
template <class F>
Result integrate_panels(F&& f, const std::vector<double>& breakpoints, const Options& opt = {}) {
    Result out;
    out.converged = true;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        auto r = integrate(f, breakpoints[i], breakpoints[i + 1], opt);
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        out.panels += r.panels;
        out.converged = out.converged && r.converged;
    }
    return out;
}

} // namespace osgoodlab::quadrature

#endif // OSGOODLAB_QUADRATURE_HPP

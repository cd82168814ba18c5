#ifndef OSGOODLAB_MODULI_HPP
#define OSGOODLAB_MODULI_HPP

// Moduli of continuity: canonical families, sampled axiom checks, the Osgood
// integral  I(eps) = ∫_eps^1 ds / mu(s)  and sampled C^mu seminorms.

#include "osgoodlab/errors.hpp"
#include "osgoodlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

enum class ModulusTag { lipschitz, hoelder, loglip, iterated_log, custom };

inline std::string to_string(ModulusTag tag) {
    switch (tag) {
    case ModulusTag::lipschitz: return "lipschitz";
    case ModulusTag::hoelder: return "hoelder";
    case ModulusTag::loglip: return "loglip";
    case ModulusTag::iterated_log: return "iterated_log";
    case ModulusTag::custom: return "custom";
    }
    return "custom";
}

inline ModulusTag modulus_tag_from_string(const std::string& s) {
    if (s == "lipschitz") return ModulusTag::lipschitz;
    if (s == "hoelder") return ModulusTag::hoelder;
    if (s == "loglip") return ModulusTag::loglip;
    if (s == "iterated_log") return ModulusTag::iterated_log;
    if (s == "custom") return ModulusTag::custom;
    throw ParameterError("unknown modulus tag '" + s + "'");
}

/// A modulus of continuity on [0, 1].
///
/// `valid_upper` is the end of the interval where the closed form is used
/// as written; above it the modulus is continued linearly (only iterated_log
/// needs this).
struct Modulus {
    std::function<double(double)> evaluator;
    ModulusTag tag = ModulusTag::custom;
    double tau = 0.0; // hoelder exponent, 0 otherwise
    double valid_upper = 1.0;
    std::string label = "custom";

    double operator()(double s) const {
        if (s == 0.0) return 0.0;
        if (!(s > 0.0 && s <= 1.0)) {
            std::ostringstream msg;
            msg << label << ": argument " << s << " outside [0, 1]";
            throw DomainError(msg.str());
        }
        return evaluator(s);
    }

    /// True when the closed form is not used on the whole of (0, 1].
    bool truncated() const { return valid_upper < 1.0; }
};

namespace detail {

// s log(1+1/s) log(log(1+1/s)), meaningful while log(1+1/s) > 1.
inline double iterated_log_raw(double s) {
    const double l = std::log1p(1.0 / s);
    return s * l * std::log(l);
}

inline double iterated_log_slope(double s) {
    const double l = std::log1p(1.0 / s);
    const double ll = std::log(l);
    return l * ll - (ll + 1.0) / (s + 1.0);
}

// The closed form peaks at s0 ≈ 0.14387 and decreases afterwards (it is 0 at
// 1/(e-1)). Truncate at the peak, where the derivative vanishes.
inline double iterated_log_peak() {
    double lo = 0.05, hi = 0.5;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (iterated_log_slope(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return lo;
}

} // namespace detail

/// Canonical moduli: s, s^tau, s log(1+1/s), and the iterated-log modulus
/// s log(1+1/s) log(log(1+1/s)) continued past its peak.
inline Modulus make_canonical(ModulusTag tag, std::optional<double> tau = std::nullopt) {
    if ((tag == ModulusTag::hoelder) != tau.has_value())
        throw ParameterError("make_canonical: tau must be given iff tag is hoelder");
    Modulus m;
    m.tag = tag;
    switch (tag) {
    case ModulusTag::lipschitz:
        m.evaluator = [](double s) { return s; };
        m.label = "lipschitz";
        break;
    case ModulusTag::hoelder: {
        const double t = *tau;
        if (!(t > 0.0 && t < 1.0))
            throw ParameterError("make_canonical: hoelder exponent must lie in (0, 1)");
        m.tau = t;
        m.evaluator = [t](double s) { return std::pow(s, t); };
        std::ostringstream name;
        name << "hoelder(" << t << ")";
        m.label = name.str();
        break;
    }
    case ModulusTag::loglip:
        m.evaluator = [](double s) { return s * std::log1p(1.0 / s); };
        m.label = "loglip";
        break;
    case ModulusTag::iterated_log: {
        const double s0 = detail::iterated_log_peak();
        const double w0 = detail::iterated_log_raw(s0);
        const double slope = std::max(0.0, detail::iterated_log_slope(s0));
        m.valid_upper = s0;
        m.evaluator = [s0, w0, slope](double s) {
            return s <= s0 ? detail::iterated_log_raw(s) : w0 + slope * (s - s0);
        };
        m.label = "iterated_log";
        break;
    }
    case ModulusTag::custom:
        throw ParameterError("make_canonical: custom moduli need an evaluator");
    }
    return m;
}

inline Modulus make_custom(std::function<double(double)> evaluator, std::string label = "custom") {
    if (!evaluator) throw ParameterError("make_custom: empty evaluator");
    Modulus m;
    m.evaluator = std::move(evaluator);
    m.label = std::move(label);
    return m;
}

struct AxiomReport {
    bool increasing = false;
    bool concave = false;
    bool vanishes_at_zero = false;
    bool all() const { return increasing && concave && vanishes_at_zero; }
};

/// Sampled checks of monotonicity, midpoint concavity over all grid pairs,
/// and mu(s) < 1e-6 for some s in {1e-12, 1e-24, ..., 1e-300}.
inline AxiomReport check_axioms(const Modulus& mu, std::span<const double> grid, double tol) {
    if (grid.empty()) throw ParameterError("check_axioms: empty grid");
    if (grid.size() < 3) throw ParameterError("check_axioms: need at least 3 grid points");
    if (!std::is_sorted(grid.begin(), grid.end()))
        throw ParameterError("check_axioms: grid must be sorted");
    if (!(grid.front() > 0.0 && grid.back() <= 1.0))
        throw ParameterError("check_axioms: grid must lie in (0, 1]");

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) values[i] = mu(grid[i]);

    AxiomReport report;
    report.increasing = values.front() > 0.0;
    for (std::size_t i = 0; i + 1 < values.size() && report.increasing; ++i)
        report.increasing = values[i + 1] >= values[i] - tol;

    report.concave = true;
    for (std::size_t i = 0; i < grid.size() && report.concave; ++i) {
        for (std::size_t j = i + 2; j < grid.size(); ++j) {
            const double mid = mu(0.5 * (grid[i] + grid[j]));
            if (mid < 0.5 * (values[i] + values[j]) - tol) {
                report.concave = false;
                break;
            }
        }
    }

    report.vanishes_at_zero = false;
    for (int e = 12; e <= 300 && !report.vanishes_at_zero; e += 12)
        report.vanishes_at_zero = mu(std::pow(10.0, -e)) < 1e-6;
    return report;
}

enum class OsgoodClass { diverges, converges, inconclusive };

inline std::string to_string(OsgoodClass c) {
    switch (c) {
    case OsgoodClass::diverges: return "diverges";
    case OsgoodClass::converges: return "converges";
    case OsgoodClass::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

struct OsgoodResult {
    std::vector<double> epsilons;
    std::vector<double> integrals;       // I(eps_k)
    std::vector<double> increment_ratios; // (I_{k+1}-I_k) / (I_k-I_{k-1})
    OsgoodClass classification = OsgoodClass::inconclusive;
    double extrapolated_limit = std::numeric_limits<double>::infinity();
};

/// Thresholds of the increment-ratio heuristic used by osgood_indicator.
struct OsgoodHeuristic {
    std::size_t window = 5;          // increments inspected
    double ratio_threshold = 0.99;   // ratio >= this: increments do not decay
    double ratio_trend = 1e-6;       // ratios rising by more than this: sub-geometric decay
    double cauchy_tol = 1e-6;        // relative agreement of extrapolated limits
    double quad_rel_tol = 1e-12;
};

/// Osgood indicator.
///
/// I(eps) is accumulated panel by panel: I(eps_{k+1}) = I(eps_k) + ∫_{eps_{k+1}}^{eps_k}.
/// Over the last `window` increments:
///   - diverges if some increment ratio reaches `ratio_threshold`, or the ratios
///     rise strictly (increments decay slower than any geometric sequence);
///   - converges if the ratios are constant to `ratio_trend` and the geometric
///     tail extrapolations I_k + Δ_k r/(1-r) of the last two steps agree to
///     `cauchy_tol` (or the raw increments are already below it);
///   - inconclusive otherwise.
inline OsgoodResult osgood_indicator(const Modulus& mu, std::span<const double> eps_list,
                                     const OsgoodHeuristic& h = {}) {
    if (eps_list.empty()) throw ParameterError("osgood_indicator: empty epsilon list");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] >= 1e-14 && eps_list[i] < 1.0))
            throw ParameterError("osgood_indicator: epsilons must lie in [1e-14, 1)");
        if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
            throw ParameterError("osgood_indicator: epsilons must be strictly decreasing");
    }

    auto integrand = [&mu](double s) {
        const double v = mu(s);
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "osgood_indicator: " << mu.label << "(" << s << ") = " << v << " is not positive";
            throw DomainError(msg.str());
        }
        return 1.0 / v;
    };
    quadrature::Options opt;
    opt.rel_tol = h.quad_rel_tol;

    OsgoodResult out;
    out.epsilons.assign(eps_list.begin(), eps_list.end());
    double upper = 1.0;
    double running = 0.0;
    for (double eps : eps_list) {
        running += quadrature::integrate_log_scale(integrand, eps, upper, opt).value;
        out.integrals.push_back(running);
        upper = eps;
    }

    std::vector<double> increments;
    for (std::size_t k = 1; k < out.integrals.size(); ++k)
        increments.push_back(out.integrals[k] - out.integrals[k - 1]);
    for (std::size_t k = 1; k < increments.size(); ++k)
        out.increment_ratios.push_back(increments[k] / increments[k - 1]);

    if (increments.size() < h.window || h.window < 3) return out;

    const std::span<const double> ratios(out.increment_ratios.end() - (h.window - 1),
                                         out.increment_ratios.end());
    const bool non_decaying =
        std::any_of(ratios.begin(), ratios.end(), [&](double r) { return r >= h.ratio_threshold; });
    bool rising = true;
    bool flat = true;
    for (std::size_t j = 1; j < ratios.size(); ++j) {
        rising = rising && ratios[j] - ratios[j - 1] > h.ratio_trend;
        flat = flat && std::abs(ratios[j] - ratios.front()) <= h.ratio_trend;
    }
    if (non_decaying || rising) {
        out.classification = OsgoodClass::diverges;
        return out;
    }

    const std::size_t last = out.integrals.size() - 1;
    if (std::abs(increments.back()) <= h.cauchy_tol * std::abs(out.integrals[last])) {
        out.classification = OsgoodClass::converges;
        out.extrapolated_limit = out.integrals[last];
        return out;
    }
    if (flat) {
        auto tail_limit = [&](std::size_t k) {
            const double r = out.increment_ratios[k - 2];
            return out.integrals[k] + increments[k - 1] * r / (1.0 - r);
        };
        const double l1 = tail_limit(last);
        const double l0 = tail_limit(last - 1);
        if (std::abs(l1 - l0) <= h.cauchy_tol * std::abs(l1)) {
            out.classification = OsgoodClass::converges;
            out.extrapolated_limit = l1;
        }
    }
    return out;
}

/// Largest |f_i - f_j| / mu(|t_i - t_j|) over pairs with 0 < |t_i - t_j| < 1.
inline double seminorm(std::span<const double> t, std::span<const double> f, const Modulus& mu) {
    if (t.size() != f.size()) throw ParameterError("seminorm: sample arrays differ in length");
    if (t.size() < 2) throw ParameterError("seminorm: need at least 2 samples");
    double best = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        for (std::size_t j = i + 1; j < t.size(); ++j) {
            const double gap = std::abs(t[i] - t[j]);
            if (!(gap > 0.0 && gap < 1.0)) continue;
            best = std::max(best, std::abs(f[i] - f[j]) / mu(gap));
        }
    }
    return best;
}

/// Uniform grid with n points on [a, b].
inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = a;
        return g;
    }
    for (std::size_t i = 0; i < n; ++i)
        g[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.back() = b;
    return g;
}

/// n points from a to b, equally spaced in log (a, b > 0).
inline std::vector<double> logspace(double a, double b, std::size_t n) {
    auto g = linspace(std::log10(a), std::log10(b), n);
    for (auto& v : g) v = std::pow(10.0, v);
    if (n > 0) {
        g.front() = a;
        g.back() = b;
    }
    return g;
}

} // namespace osgoodlab

#endif // OSGOODLAB_MODULI_HPP

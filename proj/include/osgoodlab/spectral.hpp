#ifndef OSGOODLAB_SPECTRAL_HPP
#define OSGOODLAB_SPECTRAL_HPP

// Fourier-mode representation of solutions of Lu = 0 with t-only
// coefficients, exact mode evolution, and the L², H^s and H^d_{a,omega} norms.
//
// Convention: no 2π factors. ‖u‖² = Σ w_xi |û(xi)|², the weights w_xi being
// the quadrature weights of the frequency grid.

#include "osgoodlab/coefficients.hpp"
#include "osgoodlab/errors.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

struct Mode {
    std::vector<double> xi;
    std::complex<double> amp;
    double weight = 1.0;

    double xi_squared() const {
        double s = 0.0;
        for (double v : xi) s += v * v;
        return s;
    }
};

struct SpectralField {
    std::size_t dim = 1;
    std::vector<Mode> modes;
    double time = 0.0;

    void validate() const {
        if (dim == 0) throw ParameterError("SpectralField: dim must be positive");
        for (const auto& m : modes) {
            if (m.xi.size() != dim) throw ParameterError("SpectralField: frequency of wrong dimension");
            if (!(m.weight > 0.0)) throw ParameterError("SpectralField: quadrature weights must be positive");
        }
        std::vector<std::vector<double>> xs;
        xs.reserve(modes.size());
        for (const auto& m : modes) xs.push_back(m.xi);
        std::sort(xs.begin(), xs.end());
        if (std::adjacent_find(xs.begin(), xs.end()) != xs.end())
            throw ParameterError("SpectralField: frequencies must be distinct");
    }

    /// Mode indices sorted by |xi|, ties broken lexicographically. All norm
    /// reductions run in this order.
    std::vector<std::size_t> summation_order() const {
        std::vector<std::size_t> idx(modes.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::vector<double> r2(modes.size());
        for (std::size_t i = 0; i < modes.size(); ++i) r2[i] = modes[i].xi_squared();
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (r2[a] != r2[b]) return r2[a] < r2[b];
            return modes[a].xi < modes[b].xi;
        });
        return idx;
    }

    SpectralField scaled(std::complex<double> factor) const {
        SpectralField out = *this;
        for (auto& m : out.modes) m.amp *= factor;
        return out;
    }
};

/// Single mode with weight 1.
inline SpectralField single_mode(std::vector<double> xi, std::complex<double> amp, double time = 0.0) {
    SpectralField f;
    f.dim = xi.size();
    f.modes.push_back({std::move(xi), amp, 1.0});
    f.time = time;
    return f;
}

/// exp(z) with a diagnostic OverflowAbort instead of an infinite result.
inline std::complex<double> checked_growth(std::complex<double> amp, std::complex<double> dG,
                                           const std::vector<double>& xi, double t0, double t1) {
    if (amp == 0.0) return 0.0;
    constexpr double log_max = 709.0;
    if (std::log(std::abs(amp)) + dG.real() > log_max) {
        std::ostringstream msg;
        msg << "evolve: mode xi=(";
        for (std::size_t i = 0; i < xi.size(); ++i) msg << (i ? "," : "") << xi[i];
        msg << ") saturates between t=" << t0 << " and t=" << t1 << ": log|amp|=" << std::log(std::abs(amp))
            << " + Re G increment=" << dG.real() << " exceeds " << log_max;
        throw OverflowAbort(msg.str());
    }
    return amp * std::exp(dG);
}

/// Evolves every mode from field.time to t_target: amp <- amp·exp(G(t_target) - G(time)).
inline SpectralField evolve(const SpectralField& field, const CoefficientSet& cs, double t_target,
                            std::size_t threads = 1) {
    if (!(field.time >= 0.0 && field.time <= t_target && t_target <= cs.T))
        throw ParameterError("evolve: need 0 <= field.time <= t_target <= T");
    if (field.dim != cs.dim) throw ParameterError("evolve: field and coefficients differ in dimension");
    SpectralField out = field;
    out.time = t_target;
    if (t_target == field.time) return out;
    parallel_for(out.modes.size(), threads, [&](std::size_t i) {
        auto& m = out.modes[i];
        const auto dG = symbol_increment(cs, m.xi, field.time, t_target);
        m.amp = checked_growth(m.amp, dG, m.xi, field.time, t_target);
    });
    return out;
}

struct WeightedNormSpec {
    double d = 0.0;
    double a = 0.0;
    Modulus omega = make_canonical(ModulusTag::lipschitz);
};

namespace detail {

template <class Factor>
double weighted_sum(const SpectralField& f, Factor&& factor) {
    double sum = 0.0;
    for (std::size_t i : f.summation_order()) {
        const auto& m = f.modes[i];
        sum += m.weight * factor(m.xi_squared()) * std::norm(m.amp);
    }
    if (!std::isfinite(sum)) throw OverflowAbort("norm: squared norm is not finite");
    return sum;
}

// sqrt of the weighted sum, rescaled by the largest term so that norms of
// fields with tiny or huge amplitudes neither underflow nor overflow.
template <class Factor>
double weighted_root(const SpectralField& f, Factor&& factor) {
    const auto order = f.summation_order();
    std::vector<double> terms(order.size());
    double scale = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const auto& m = f.modes[order[k]];
        terms[k] = std::sqrt(m.weight * factor(m.xi_squared())) * std::abs(m.amp);
        scale = std::max(scale, terms[k]);
    }
    if (scale == 0.0) return 0.0;
    if (!std::isfinite(scale)) throw OverflowAbort("norm: norm is not finite");
    double sum = 0.0;
    for (double t : terms) sum += (t / scale) * (t / scale);
    return scale * std::sqrt(sum);
}

} // namespace detail

inline double l2_norm_squared(const SpectralField& f) {
    return detail::weighted_sum(f, [](double) { return 1.0; });
}

/// Σ w (1+|xi|²)^s |amp|².
inline double sobolev_norm_squared(const SpectralField& f, double s) {
    return detail::weighted_sum(f, [s](double r2) { return std::pow(1.0 + r2, s); });
}

/// Weight factor (1+|xi|²)^d exp(a |xi|² omega(1/(|xi|²+1))).
inline double weighted_norm_factor(const WeightedNormSpec& spec, double r2) {
    return std::pow(1.0 + r2, spec.d) * std::exp(spec.a * r2 * spec.omega(1.0 / (r2 + 1.0)));
}

inline double weighted_norm_squared(const SpectralField& f, const WeightedNormSpec& spec) {
    if (spec.a < 0.0) throw ParameterError("weighted_norm: a must be nonnegative");
    return detail::weighted_sum(f, [&spec](double r2) { return weighted_norm_factor(spec, r2); });
}

inline double l2_norm(const SpectralField& f) {
    return detail::weighted_root(f, [](double) { return 1.0; });
}
inline double sobolev_norm(const SpectralField& f, double s) {
    return detail::weighted_root(f, [s](double r2) { return std::pow(1.0 + r2, s); });
}
inline double weighted_norm(const SpectralField& f, const WeightedNormSpec& spec) {
    if (spec.a < 0.0) throw ParameterError("weighted_norm: a must be nonnegative");
    return detail::weighted_root(f, [&spec](double r2) { return weighted_norm_factor(spec, r2); });
}

/// Symmetric frequency grid: 0, geometric refinement r·2^-j (j = levels..1)
/// below r = refine_below, then linear spacing `step` up to xi_max.
/// Weights are those of the trapezoidal rule on the (nonuniform) node set;
/// dim = 2 uses the tensor product.
struct FrequencyGridSpec {
    std::size_t dim = 1;
    double xi_max = 32.0;
    double step = 0.25;
    double refine_below = 1.0;
    int geometric_levels = 6;

    bool operator==(const FrequencyGridSpec&) const = default;
};

inline std::vector<double> frequency_nodes_1d(const FrequencyGridSpec& g) {
    if (!(g.xi_max > 0.0 && g.step > 0.0)) throw ParameterError("frequency grid: xi_max and step must be positive");
    if (g.geometric_levels < 0) throw ParameterError("frequency grid: geometric_levels must be nonnegative");
    std::vector<double> pos{0.0};
    const double r = std::min(g.refine_below, g.xi_max);
    if (r > 0.0) {
        for (int j = g.geometric_levels; j >= 1; --j) pos.push_back(std::ldexp(r, -j));
        const auto count = static_cast<std::size_t>(std::ceil((g.xi_max - r) / g.step - 1e-9));
        for (std::size_t i = 0; i <= count; ++i)
            pos.push_back(std::min(g.xi_max, r + static_cast<double>(i) * g.step));
    } else {
        const auto count = static_cast<std::size_t>(std::ceil(g.xi_max / g.step - 1e-9));
        for (std::size_t i = 1; i <= count; ++i)
            pos.push_back(std::min(g.xi_max, static_cast<double>(i) * g.step));
    }
    pos.erase(std::unique(pos.begin(), pos.end()), pos.end());
    std::vector<double> nodes;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it)
        if (*it > 0.0) nodes.push_back(-*it);
    nodes.insert(nodes.end(), pos.begin(), pos.end());
    return nodes;
}

inline std::vector<double> trapezoid_weights(const std::vector<double>& x) {
    std::vector<double> w(x.size(), 0.0);
    if (x.size() < 2) {
        if (!x.empty()) w[0] = 1.0;
        return w;
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double left = i > 0 ? x[i] - x[i - 1] : 0.0;
        const double right = i + 1 < x.size() ? x[i + 1] - x[i] : 0.0;
        w[i] = 0.5 * (left + right);
    }
    return w;
}

/// Field with amp(xi) = amp_fn(xi) on the grid.
template <class AmpFn>
SpectralField field_on_grid(const FrequencyGridSpec& g, AmpFn&& amp_fn) {
    if (g.dim != 1 && g.dim != 2) throw ParameterError("frequency grid: dim must be 1 or 2");
    const auto nodes = frequency_nodes_1d(g);
    const auto w = trapezoid_weights(nodes);
    SpectralField f;
    f.dim = g.dim;
    if (g.dim == 1) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            std::vector<double> xi{nodes[i]};
            f.modes.push_back({xi, amp_fn(xi), w[i]});
        }
    } else {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (std::size_t j = 0; j < nodes.size(); ++j) {
                std::vector<double> xi{nodes[i], nodes[j]};
                f.modes.push_back({xi, amp_fn(xi), w[i] * w[j]});
            }
    }
    return f;
}

/// amp(xi) = eps·exp(-K |xi|²). Continuum squared L² norm: eps² (π/(2K))^(n/2).
inline SpectralField gaussian_data(std::size_t n, double eps, double K, FrequencyGridSpec grid) {
    if (!(K > 0.0)) throw ParameterError("gaussian_data: K must be positive");
    grid.dim = n;
    return field_on_grid(grid, [eps, K](const std::vector<double>& xi) {
        double r2 = 0.0;
        for (double v : xi) r2 += v * v;
        return std::complex<double>(eps * std::exp(-K * r2), 0.0);
    });
}

inline double gaussian_l2_norm_squared_continuum(std::size_t n, double eps, double K) {
    return eps * eps * std::pow(std::numbers::pi / (2.0 * K), 0.5 * static_cast<double>(n));
}

/// A solution of Lu = 0 given by its data at `initial.time`.
struct Trajectory {
    SpectralField initial;
    CoefficientSet cs;
    std::size_t threads = 1;

    SpectralField at(double t) const { return evolve(initial, cs, t, threads); }
};

} // namespace osgoodlab

#endif // OSGOODLAB_SPECTRAL_HPP

#ifndef OSGOODLAB_COEFFICIENTS_HPP
#define OSGOODLAB_COEFFICIENTS_HPP

// Time-only coefficients of  Lu = ∂_t u + Σ a_ij(t) ∂_i∂_j u + Σ b_j(t) ∂_j u + c(t) u.
//
// With t-only coefficients the divergence form Σ ∂_i(a_ij ∂_j u) coincides
// with the form above, and each Fourier mode evolves by the symbol
//     G(t, xi) = ∫_0^t ( A(s)xi·xi - i b(s)·xi - c(s) ) ds.

#include "osgoodlab/errors.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

/// A scalar function of time, optionally with its antiderivative F (F(0) = 0).
struct ScalarFunction {
    std::function<double(double)> value;
    std::function<double(double)> antiderivative;

    double operator()(double t) const { return value(t); }
    bool has_antiderivative() const { return static_cast<bool>(antiderivative); }

    static ScalarFunction constant(double v) {
        return {[v](double) { return v; }, [v](double t) { return v * t; }};
    }
    /// base + slope * t
    static ScalarFunction affine(double base, double slope) {
        return {[=](double t) { return base + slope * t; },
                [=](double t) { return base * t + 0.5 * slope * t * t; }};
    }
};

/// Row-major square matrix.
struct Matrix {
    std::size_t n = 0;
    std::vector<double> a;

    explicit Matrix(std::size_t dim = 0) : n(dim), a(dim * dim, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

    double quadratic_form(std::span<const double> x) const {
        double q = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) q += x[i] * (*this)(i, j) * x[j];
        return q;
    }
    bool symmetric() const {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }
};

struct CoefficientSet {
    std::size_t dim = 1;
    std::vector<ScalarFunction> diffusion; // dim*dim entries, row-major
    std::vector<ScalarFunction> drift;     // dim entries
    ScalarFunction potential = ScalarFunction::constant(0.0);
    double k_A = 0.5;
    double T = 1.0;

    Matrix A(double t) const {
        Matrix m(dim);
        for (std::size_t i = 0; i < dim * dim; ++i) m.a[i] = diffusion[i](t);
        return m;
    }

    bool has_closed_form_symbol() const {
        auto ok = [](const ScalarFunction& f) { return f.has_antiderivative(); };
        return std::all_of(diffusion.begin(), diffusion.end(), ok) &&
               std::all_of(drift.begin(), drift.end(), ok) && potential.has_antiderivative();
    }

    void validate() const {
        if (dim == 0) throw ParameterError("CoefficientSet: dim must be positive");
        if (diffusion.size() != dim * dim || drift.size() != dim)
            throw ParameterError("CoefficientSet: coefficient arrays do not match dim");
        if (!(k_A > 0.0 && k_A < 1.0)) throw ParameterError("CoefficientSet: k_A must lie in (0, 1)");
        if (!(T > 0.0)) throw ParameterError("CoefficientSet: T must be positive");
    }

    /// A(t) = a(t)·I, no drift, constant potential.
    static CoefficientSet isotropic(std::size_t dim, ScalarFunction a, double k_A, double T,
                                    double potential = 0.0) {
        CoefficientSet cs;
        cs.dim = dim;
        cs.k_A = k_A;
        cs.T = T;
        cs.diffusion.assign(dim * dim, ScalarFunction::constant(0.0));
        for (std::size_t i = 0; i < dim; ++i) cs.diffusion[i * dim + i] = a;
        cs.drift.assign(dim, ScalarFunction::constant(0.0));
        cs.potential = ScalarFunction::constant(potential);
        cs.validate();
        return cs;
    }
};

struct EllipticityReport {
    double k_low = 0.0;
    double k_high = 0.0;
    bool pass = false;
};

/// Unit directions used for sampled Rayleigh quotients: coordinate axes, then
/// evenly spread angles (n = 2) or pairwise diagonals and a deterministic
/// low-discrepancy set (n >= 3).
inline std::vector<std::vector<double>> sample_directions(std::size_t n, std::size_t count) {
    std::vector<std::vector<double>> dirs;
    if (n == 1) {
        dirs.push_back({1.0});
        return dirs;
    }
    if (n == 2) {
        for (std::size_t k = 0; k < count; ++k) {
            const double th = std::numbers::pi * static_cast<double>(k) / static_cast<double>(count);
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> e(n, 0.0);
        e[i] = 1.0;
        dirs.push_back(e);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (double sgn : {1.0, -1.0}) {
                std::vector<double> e(n, 0.0);
                e[i] = std::numbers::sqrt2 / 2;
                e[j] = sgn * std::numbers::sqrt2 / 2;
                dirs.push_back(e);
            }
    for (std::size_t k = 0; dirs.size() < count; ++k) {
        std::vector<double> e(n);
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double phase = std::fmod((k + 1) * std::sqrt(2.0 + static_cast<double>(i)), 1.0);
            e[i] = std::cos(2.0 * std::numbers::pi * phase);
            norm += e[i] * e[i];
        }
        if (norm < 1e-12) continue;
        for (auto& v : e) v /= std::sqrt(norm);
        dirs.push_back(e);
    }
    return dirs;
}

inline EllipticityReport check_ellipticity(const CoefficientSet& cs, std::span<const double> t_grid,
                                           std::size_t n_directions) {
    cs.validate();
    if (t_grid.empty()) throw ParameterError("check_ellipticity: empty time grid");
    if (n_directions < 2 * cs.dim)
        throw ParameterError("check_ellipticity: need at least 2n directions");
    const auto dirs = sample_directions(cs.dim, n_directions);
    EllipticityReport r;
    r.k_low = std::numeric_limits<double>::infinity();
    r.k_high = -std::numeric_limits<double>::infinity();
    for (double t : t_grid) {
        if (t < 0.0 || t > cs.T) throw ParameterError("check_ellipticity: time outside [0, T]");
        const Matrix a = cs.A(t);
        if (!a.symmetric()) {
            std::ostringstream msg;
            msg << "check_ellipticity: A(" << t << ") is not symmetric";
            throw StructuralError(msg.str());
        }
        for (const auto& d : dirs) {
            const double q = a.quadratic_form(d);
            r.k_low = std::min(r.k_low, q);
            r.k_high = std::max(r.k_high, q);
        }
    }
    r.pass = cs.k_A <= r.k_low && r.k_high <= 1.0 / cs.k_A;
    return r;
}

/// a(t) = base + amplitude·mu(h)·sin(2πt/h), with closed-form antiderivative.
/// Its C^mu seminorm is at most (2π + 2)·amplitude.
inline ScalarFunction synthesize_scalar(const Modulus& mu, double amplitude, double h, double base) {
    if (!(h > 0.0 && h < 1.0)) throw ParameterError("synthesize_scalar: scale h must lie in (0, 1)");
    if (amplitude < 0.0) throw ParameterError("synthesize_scalar: amplitude must be nonnegative");
    const double osc = amplitude * mu(h);
    if (!(base - osc > 0.0))
        throw ParameterError("synthesize_scalar: base - amplitude*mu(h) must be positive");
    const double freq = 2.0 * std::numbers::pi / h;
    return {[=](double t) { return base + osc * std::sin(freq * t); },
            [=](double t) { return base * t + osc * (1.0 - std::cos(freq * t)) / freq; }};
}

/// Upper bound on the C^mu seminorm guaranteed by synthesize_scalar.
inline double synthesized_seminorm_bound(double amplitude) {
    return (2.0 * std::numbers::pi + 2.0) * amplitude;
}

namespace detail {

inline double integrate_scalar(const ScalarFunction& f, double t0, double t1, double rel_tol) {
    if (f.has_antiderivative()) return f.antiderivative(t1) - f.antiderivative(t0);
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    return quadrature::integrate(f.value, t0, t1, opt).value;
}

} // namespace detail

/// G(t1, xi) - G(t0, xi) evaluated by direct adaptive quadrature of the symbol,
/// ignoring any antiderivatives.
inline std::complex<double> symbol_increment_quadrature(const CoefficientSet& cs,
                                                        std::span<const double> xi, double t0,
                                                        double t1, double rel_tol = 1e-12) {
    quadrature::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = 1e-300;
    auto re = [&](double s) { return cs.A(s).quadratic_form(xi) - cs.potential(s); };
    auto im = [&](double s) {
        double v = 0.0;
        for (std::size_t j = 0; j < cs.dim; ++j) v -= cs.drift[j](s) * xi[j];
        return v;
    };
    const double re_part = quadrature::integrate(re, t0, t1, opt).value;
    const double im_part = quadrature::integrate(im, t0, t1, opt).value;
    return {re_part, im_part};
}

/// G(t1, xi) - G(t0, xi). Closed form when every coefficient carries an
/// antiderivative, adaptive quadrature (relative tolerance 1e-12) otherwise.
inline std::complex<double> symbol_increment(const CoefficientSet& cs, std::span<const double> xi,
                                             double t0, double t1) {
    if (xi.size() != cs.dim) throw ParameterError("integrate_symbol: xi has wrong dimension");
    if (!cs.has_closed_form_symbol()) return symbol_increment_quadrature(cs, xi, t0, t1);
    double re = -detail::integrate_scalar(cs.potential, t0, t1, 1e-12);
    double im = 0.0;
    for (std::size_t i = 0; i < cs.dim; ++i) {
        if (xi[i] == 0.0) continue;
        for (std::size_t j = 0; j < cs.dim; ++j) {
            if (xi[j] == 0.0) continue;
            re += xi[i] * xi[j] * detail::integrate_scalar(cs.diffusion[i * cs.dim + j], t0, t1, 1e-12);
        }
        im -= xi[i] * detail::integrate_scalar(cs.drift[i], t0, t1, 1e-12);
    }
    return {re, im};
}

/// G(t, xi) = ∫_0^t ( A(s)xi·xi - i b(s)·xi - c(s) ) ds.
inline std::complex<double> integrate_symbol(const CoefficientSet& cs, std::span<const double> xi,
                                             double t) {
    if (t < 0.0 || t > cs.T * (1.0 + 1e-15))
        throw ParameterError("integrate_symbol: t outside [0, T]");
    return symbol_increment(cs, xi, 0.0, t);
}

/// Sampled sup norms of A entries, b and c over a grid.
struct CoefficientSupNorms {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
};

inline CoefficientSupNorms sup_norms(const CoefficientSet& cs, std::span<const double> t_grid) {
    CoefficientSupNorms s;
    for (double t : t_grid) {
        for (const auto& f : cs.diffusion) s.a = std::max(s.a, std::abs(f(t)));
        for (const auto& f : cs.drift) s.b = std::max(s.b, std::abs(f(t)));
        s.c = std::max(s.c, std::abs(cs.potential(t)));
    }
    return s;
}

} // namespace osgoodlab

#endif // OSGOODLAB_COEFFICIENTS_HPP

#ifndef OSGOODLAB_ESTIMATES_HPP
#define OSGOODLAB_ESTIMATES_HPP

// Energy inequalities evaluated on spectral solutions, the empirical
// conditional-stability modulus S(eps), and fits of the three bound shapes
//   hoelder:    S <= M eps^delta
//   loglip:     S <= M exp(-N |log eps|^beta)
//   osgood_psi: S <= Psi(eps), Psi increasing with Psi(0+) = 0.

#include "osgoodlab/coefficients.hpp"
#include "osgoodlab/errors.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/parallel.hpp"
#include "osgoodlab/quadrature.hpp"
#include "osgoodlab/spectral.hpp"
#include "osgoodlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

struct EnergyEstimateParams {
    double gamma = 1.0;
    double beta = 1.0;
    double tau = 0.1;
    double alpha = 0.0;
    double sigma = 0.1;
    double sigma_bar = 0.1;
    double lambda = 1.0;
    WeightFunction weight;
    Modulus omega = make_canonical(ModulusTag::loglip);
    double k_A = 0.5;

    /// Throws ParameterError unless the weight is defined on [tau/beta, (upper+tau)/beta].
    void require_weight_domain(double upper) const {
        if (!(beta > 0.0 && tau > 0.0)) throw ParameterError("energy estimate: beta and tau must be positive");
        const double lo = tau / beta, hi = (upper + tau) / beta;
        if (!(weight.contains(lo) && weight.contains(hi))) {
            std::ostringstream msg;
            msg << "energy estimate: weight domain [" << weight.y0 << ", " << weight.y1
                << "] does not cover [" << lo << ", " << hi << "]";
            throw ParameterError(msg.str());
        }
    }
};

struct EnergyCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = true;
    double margin = 0.0;
    double log_lhs = -std::numeric_limits<double>::infinity();
    double log_rhs = -std::numeric_limits<double>::infinity();

    /// lhs/rhs, computed from the logarithms.
    double ratio() const {
        if (log_lhs == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp(log_lhs - log_rhs);
    }
};

inline EnergyCheck make_check(double lhs, double rhs) {
    return {lhs, rhs, lhs <= rhs, rhs - lhs, std::log(lhs), std::log(rhs)};
}

inline EnergyCheck make_log_check(double log_lhs, double log_rhs) {
    const double lhs = std::exp(log_lhs), rhs = std::exp(log_rhs);
    return {lhs, rhs, log_lhs <= log_rhs, rhs - lhs, log_lhs, log_rhs};
}

namespace detail {

inline double checked_exp(double exponent, const char* what) {
    if (exponent > 709.0) {
        std::ostringstream msg;
        msg << what << ": exponent " << exponent << " overflows";
        throw OverflowAbort(msg.str());
    }
    return std::exp(exponent);
}

// Panels are integrated to 1e-10 where attainable; the accuracy actually
// enforced is 1e-8 relative to the total, since tiny panels may stall on the
// rounding noise of the interpolated weight.
template <class F>
double integrate_energy(F&& f, const std::vector<double>& breaks, const char* what) {
    quadrature::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-300;
    opt.max_panels = 2000;
    opt.throw_on_failure = false;
    const auto r = quadrature::integrate_panels(f, breaks, opt);
    if (!(r.error <= 1e-8 * std::abs(r.value)) && r.error > 1e-300) {
        std::ostringstream msg;
        msg << what << ": quadrature error estimate " << r.error << " exceeds 1e-8 relative to " << r.value;
        throw NumericalError(msg.str());
    }
    return r.value;
}

// Panel boundaries: a, b, the interior points of `grid`, and geometric
// refinements a + L·2^-j, b - L·2^-j (j = 1..50) that resolve boundary layers
// of the steep exponential weights.
inline std::vector<double> panel_breaks(std::vector<double> grid, double a, double b) {
    const double len = b - a;
    for (int j = 1; j <= 50; ++j) {
        grid.push_back(a + std::ldexp(len, -j));
        grid.push_back(b - std::ldexp(len, -j));
    }
    std::sort(grid.begin(), grid.end());
    std::vector<double> out{a};
    for (double t : grid)
        if (t > out.back() && t < b) out.push_back(t);
    out.push_back(b);
    return out;
}

} // namespace detail

/// Per-frequency energy inequality with the Osgood weight:
///
///  (1/4)(k_A|xi|²+gamma) ∫_0^sigma e^{(1-alpha t)|xi|² omega(1/(|xi|²+1))} e^{2 gamma t}
///        e^{-2 beta phi((t+tau)/beta)} |û(t)|² dt
///   <= phi'(tau/beta) tau e^{|xi|² omega(·)} e^{-2 beta phi(tau/beta)} |û(0)|²
///    + (sigma+tau)(gamma + |xi|²/k_A) e^{2 gamma sigma} e^{-2 beta phi((sigma+tau)/beta)} |û(sigma)|².
///
/// Both sides are assembled from their logarithms and `holds` compares the
/// logarithms, so the verdict survives under- or overflow of either side.
/// `t_breaks` are extra quadrature panel boundaries inside (0, sigma).
inline EnergyCheck check_mode_energy(const CoefficientSet& cs, const std::vector<double>& xi,
                                     std::complex<double> amp0, const EnergyEstimateParams& p,
                                     const std::vector<double>& t_breaks = {}) {
    if (!(p.sigma > 0.0 && p.sigma <= cs.T)) throw ParameterError("check_mode_energy: sigma must lie in (0, T]");
    p.require_weight_domain(p.sigma);
    if (amp0 == 0.0) return make_check(0.0, 0.0);

    double r2 = 0.0;
    for (double v : xi) r2 += v * v;
    const double w_xi = r2 * p.omega(1.0 / (r2 + 1.0));
    const double log_amp2 = 2.0 * std::log(std::abs(amp0));
    // The weight enters through phi((t+tau)/beta) - phi(tau/beta), which keeps
    // the boundary layer at t = 0 resolved when phi' is huge there.
    const double y_lo = p.tau / p.beta;
    const auto [phi0, psi0] = p.weight.evaluate(y_lo);
    auto exponent = [&](double t) {
        return (1.0 - p.alpha * t) * w_xi + 2.0 * p.gamma * t - 2.0 * p.beta * p.weight.phi_increment(y_lo, t / p.beta) +
               2.0 * symbol_increment(cs, xi, 0.0, t).real();
    };

    // Shift by the largest exponent seen on a sampling grid before integrating.
    const auto breaks = detail::panel_breaks(t_breaks, 0.0, p.sigma);
    double shift = -std::numeric_limits<double>::infinity();
    for (double t : linspace(0.0, p.sigma, 257)) shift = std::max(shift, exponent(t));
    for (double t : breaks) shift = std::max(shift, exponent(t));
    if (!std::isfinite(shift)) throw OverflowAbort("check_mode_energy: integrand exponent is not finite");
    const double integral = detail::integrate_energy([&](double t) { return std::exp(exponent(t) - shift); },
                                                     breaks, "check_mode_energy");
    const double pre = 0.25 * (p.k_A * r2 + p.gamma);
    const double log_lhs = (pre > 0.0 && integral > 0.0)
                               ? std::log(pre) + std::log(integral) + shift + log_amp2 - 2.0 * p.beta * phi0
                               : -std::numeric_limits<double>::infinity();

    const double e1 = std::log(psi0 * p.tau) + w_xi - 2.0 * p.beta * phi0;
    const double e2 = std::log((p.sigma + p.tau) * (p.gamma + r2 / p.k_A)) + 2.0 * p.gamma * p.sigma -
                      2.0 * p.beta * p.weight.phi((p.sigma + p.tau) / p.beta) +
                      2.0 * symbol_increment(cs, xi, 0.0, p.sigma).real();
    const double top = std::max(e1, e2);
    const double log_rhs = top + std::log(std::exp(e1 - top) + std::exp(e2 - top)) + log_amp2;
    return make_log_check(log_lhs, log_rhs);
}

/// Energy inequality of the log-Lipschitz theory, implemented as printed
/// (note the + sign in e^{+2 beta phi((s+tau)/beta)} of the first right-hand term):
///
///  ∫_0^s e^{2 gamma t} e^{-2 beta phi((t+tau)/beta)} ‖u(t)‖²_{H^{1-alpha t}} dt
///   <= M ( (s+tau) e^{2 gamma s} e^{2 beta phi((s+tau)/beta)} ‖u(s)‖²_{H^{1-alpha s}}
///        + tau phi'(tau/beta) e^{-2 beta phi(tau/beta)} ‖u(0)‖²_{L²} ).
inline EnergyCheck check_loglip_energy(const Trajectory& u, const EnergyEstimateParams& p, double M,
                                       double s, const std::vector<double>& t_breaks = {}) {
    if (!(s > 0.0 && s <= u.cs.T)) throw ParameterError("check_loglip_energy: s must lie in (0, T]");
    if (u.initial.time != 0.0) throw ParameterError("check_loglip_energy: trajectory must start at t = 0");
    p.require_weight_domain(s);

    auto integrand = [&](double t) {
        const double norm2 = sobolev_norm_squared(u.at(t), 1.0 - p.alpha * t);
        if (norm2 == 0.0) return 0.0;
        const double e = 2.0 * p.gamma * t - 2.0 * p.beta * p.weight.phi((t + p.tau) / p.beta);
        return detail::checked_exp(e + std::log(norm2), "check_loglip_energy");
    };
    const double lhs = detail::integrate_energy(integrand, detail::panel_breaks(t_breaks, 0.0, s), "check_loglip_energy");

    const double norm_s = sobolev_norm_squared(u.at(s), 1.0 - p.alpha * s);
    const double norm_0 = l2_norm_squared(u.initial);
    const auto [phi0, psi0] = p.weight.evaluate(p.tau / p.beta);
    const double phi_s = p.weight.phi((s + p.tau) / p.beta);
    const double first =
        norm_s == 0.0 ? 0.0
                      : (s + p.tau) * detail::checked_exp(2.0 * p.gamma * s + 2.0 * p.beta * phi_s + std::log(norm_s),
                                                          "check_loglip_energy");
    const double second = p.tau * psi0 * std::exp(-2.0 * p.beta * phi0) * norm_0;
    return make_check(lhs, M * (first + second));
}

/// Estimate obtained by integrating the per-frequency inequality in xi:
///
///  sup_{z in [0, sigma_bar]} ‖u(z)‖²_{H^1_{1/2,omega}}
///   <= C e^{-sigma phi'((sigma+tau)/beta)} [ phi'(tau/beta) e^{-2 beta phi(tau/beta)} ‖u(0)‖²_{H^0_{1,omega}}
///                                            + ‖u(sigma)‖_{H^1} ].
///
/// The sup is taken over `z_points` equally spaced times in [0, sigma_bar].
inline EnergyCheck check_stima_prima(const Trajectory& u, const EnergyEstimateParams& p, double C,
                                     std::size_t z_points = 33) {
    if (!(p.sigma > 0.0 && p.sigma <= u.cs.T)) throw ParameterError("check_stima_prima: sigma must lie in (0, T]");
    if (!(p.sigma_bar >= 0.0 && p.sigma_bar <= p.sigma))
        throw ParameterError("check_stima_prima: need 0 <= sigma_bar <= sigma");
    if (u.initial.time != 0.0) throw ParameterError("check_stima_prima: trajectory must start at t = 0");
    p.require_weight_domain(p.sigma);

    const WeightedNormSpec lhs_spec{1.0, 0.5, p.omega};
    const WeightedNormSpec data_spec{0.0, 1.0, p.omega};
    double lhs = 0.0;
    const auto zs = p.sigma_bar == 0.0 ? std::vector<double>{0.0} : linspace(0.0, p.sigma_bar, std::max<std::size_t>(z_points, 2));
    for (double z : zs) lhs = std::max(lhs, weighted_norm_squared(u.at(z), lhs_spec));

    const auto [phi0, psi0] = p.weight.evaluate(p.tau / p.beta);
    const double psi_sigma = p.weight.psi((p.sigma + p.tau) / p.beta);
    const double bracket = psi0 * std::exp(-2.0 * p.beta * phi0) * weighted_norm_squared(u.initial, data_spec) +
                           sobolev_norm(u.at(p.sigma), 1.0);
    const double rhs = C * std::exp(-p.sigma * psi_sigma) * bracket;
    return make_check(lhs, rhs);
}

/// First value in `values` (assumed increasing) for which check(value) holds.
template <class Check>
std::optional<double> sweep_minimal(const std::vector<double>& values, Check&& check) {
    for (double v : values)
        if (check(v)) return v;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// lambda sweep for the per-frequency estimate

struct LambdaSweepSetup {
    CoefficientSet cs;
    std::vector<std::vector<double>> frequencies;
    std::vector<double> sigmas; // check times
    double gamma = 1.0;
    double beta = 1.0;
    double tau = 0.1;
    double alpha = 0.0;
    double k_A = 0.5;
    Modulus omega = make_canonical(ModulusTag::iterated_log);
    double psi0 = 100.0;
    double phi0 = 0.0;
    /// Anchor (psi0, phi0) at y_anchor >= (max sigma + tau)/beta instead of at tau/beta.
    bool anchor_at_end = false;
    double y_anchor = 1.0;
    std::size_t threads = 1;
};

struct LambdaSweepEntry {
    double lambda = 0.0;
    bool holds = false;
    bool weight_truncated = false;
    double worst_margin_ratio = 0.0; // max over checks of lhs/rhs
    std::vector<double> worst_xi;
    double worst_sigma = 0.0;
};

struct LambdaSweepResult {
    std::vector<LambdaSweepEntry> entries;
    std::optional<double> lambda_star;
};

inline LambdaSweepEntry check_lambda(const LambdaSweepSetup& s, double lambda) {
    LambdaSweepEntry e;
    e.lambda = lambda;
    const double sigma_max = *std::max_element(s.sigmas.begin(), s.sigmas.end());
    EnergyEstimateParams p;
    p.gamma = s.gamma;
    p.beta = s.beta;
    p.tau = s.tau;
    p.alpha = s.alpha;
    p.lambda = lambda;
    p.omega = s.omega;
    p.k_A = s.k_A;
    WeightSolveOptions wopt;
    wopt.anchor_at_end = s.anchor_at_end;
    const double y_lo = s.tau / s.beta, y_hi = (sigma_max + s.tau) / s.beta;
    if (s.anchor_at_end && !(s.y_anchor >= y_hi))
        throw ParameterError("sweep_lambda: y_anchor must not lie inside the weight domain");
    p.weight = solve_osgood_weight(lambda, s.k_A, s.omega, y_lo, s.psi0, s.phi0,
                                   s.anchor_at_end ? s.y_anchor : y_hi, wopt);
    if (p.weight.truncated) {
        e.weight_truncated = true;
        e.worst_margin_ratio = std::numeric_limits<double>::infinity();
        return e;
    }
    const std::size_t n_checks = s.frequencies.size() * s.sigmas.size();
    std::vector<double> ratio(n_checks, 0.0);
    parallel_for(n_checks, s.threads, [&](std::size_t idx) {
        auto q = p;
        q.sigma = s.sigmas[idx % s.sigmas.size()];
        const auto& xi = s.frequencies[idx / s.sigmas.size()];
        ratio[idx] = check_mode_energy(s.cs, xi, 1.0, q).ratio();
    });
    std::size_t worst = 0;
    for (std::size_t i = 1; i < n_checks; ++i)
        if (ratio[i] > ratio[worst]) worst = i;
    e.worst_margin_ratio = ratio[worst];
    e.worst_xi = s.frequencies[worst / s.sigmas.size()];
    e.worst_sigma = s.sigmas[worst % s.sigmas.size()];
    e.holds = e.worst_margin_ratio <= 1.0;
    return e;
}

/// Checks the lambdas in `lambdas` (increasing); lambda* is the first for which
/// the inequality holds for all frequencies and check times. With
/// `stop_at_first` the sweep ends at lambda*.
inline LambdaSweepResult sweep_lambda(const LambdaSweepSetup& s, const std::vector<double>& lambdas,
                                      bool stop_at_first = false) {
    if (s.frequencies.empty() || s.sigmas.empty()) throw ParameterError("sweep_lambda: empty check set");
    LambdaSweepResult r;
    for (double lambda : lambdas) {
        r.entries.push_back(check_lambda(s, lambda));
        if (r.entries.back().holds && !r.lambda_star) {
            r.lambda_star = lambda;
            if (stop_at_first) break;
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Empirical stability modulus

struct StabilityModulusInput {
    CoefficientSet cs;
    double D = 1.0;
    double T = 1.0;
    double T_prime = 0.5;
    std::vector<double> epsilons;
    std::vector<std::vector<double>> frequencies;
    std::vector<double> t_grid;
    std::size_t threads = 1;
};

struct StabilityRow {
    double epsilon = 0.0;
    double S = 0.0;
    double t_star = 0.0;
    std::vector<double> xi_a; // support of the optimal superposition
    std::vector<double> xi_b;
};

struct StabilityTable {
    std::vector<StabilityRow> rows;
    std::size_t distinct_modes = 0;
    std::vector<double> objective_times;
    std::vector<double> constraint_times;
};

namespace detail {

// max o·v  s.t.  rows·v <= rhs, v >= 0, for two variables, via the dual
//   min rhs·y  s.t.  Σ y_r a_r >= o, y >= 0,
// whose vertices have at most two nonzero components.
inline double two_mode_lp(double oi, double oj, const std::vector<double>& ai, const std::vector<double>& aj,
                          const std::vector<double>& rhs) {
    const double inf = std::numeric_limits<double>::infinity();
    double best = inf;
    const std::size_t m = rhs.size();
    for (std::size_t p = 0; p < m; ++p) {
        const double yi = oi > 0.0 ? (ai[p] > 0.0 ? oi / ai[p] : inf) : 0.0;
        const double yj = oj > 0.0 ? (aj[p] > 0.0 ? oj / aj[p] : inf) : 0.0;
        const double y = std::max(yi, yj);
        if (y < inf) best = std::min(best, rhs[p] * y);
    }
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = p + 1; q < m; ++q) {
            const double det = ai[p] * aj[q] - ai[q] * aj[p];
            if (det == 0.0) continue;
            const double yp = (oi * aj[q] - oj * ai[q]) / det;
            const double yq = (ai[p] * oj - aj[p] * oi) / det;
            if (yp < 0.0 || yq < 0.0) continue;
            best = std::min(best, rhs[p] * yp + rhs[q] * yq);
        }
    }
    return best;
}

} // namespace detail

/// S(eps) = max over w >= 0 of max_{t in objective grid} sqrt(Σ w_xi g_xi(t))
/// subject to Σ w_xi <= eps² and Σ w_xi g_xi(t') <= D² on the constraint grid,
/// with g_xi(t) = exp(2 Re G(t, xi)). Supports of at most two modes are
/// enumerated; each two-mode LP is solved exactly.
///
/// Objective grid: t_grid ∩ [0, T'] plus T'. Constraint grid: t_grid ∩ [0, T]
/// plus T and the objective grid.
inline StabilityTable stability_modulus(const StabilityModulusInput& in) {
    if (!(in.T_prime > 0.0 && in.T_prime < in.T)) throw ParameterError("stability_modulus: need 0 < T' < T");
    if (!(in.T <= in.cs.T * (1.0 + 1e-15))) throw ParameterError("stability_modulus: T exceeds coefficient horizon");
    if (!(in.D > 0.0)) throw ParameterError("stability_modulus: D must be positive");
    if (in.frequencies.empty()) throw ParameterError("stability_modulus: empty frequency set");
    for (double e : in.epsilons)
        if (!(e >= 0.0)) throw ParameterError("stability_modulus: epsilons must be nonnegative");

    StabilityTable table;
    std::vector<double> obj;
    for (double t : in.t_grid)
        if (t >= 0.0 && t <= in.T_prime) obj.push_back(t);
    obj.push_back(in.T_prime);
    std::sort(obj.begin(), obj.end());
    obj.erase(std::unique(obj.begin(), obj.end()), obj.end());
    std::vector<double> con = obj;
    for (double t : in.t_grid)
        if (t >= 0.0 && t <= in.T) con.push_back(t);
    con.push_back(in.T);
    std::sort(con.begin(), con.end());
    con.erase(std::unique(con.begin(), con.end()), con.end());
    table.objective_times = obj;
    table.constraint_times = con;

    // log g at every constraint time; objective times are a subset.
    const std::size_t nf = in.frequencies.size();
    std::vector<std::vector<double>> log_g(nf, std::vector<double>(con.size()));
    parallel_for(nf, in.threads, [&](std::size_t i) {
        for (std::size_t c = 0; c < con.size(); ++c)
            log_g[i][c] = 2.0 * symbol_increment(in.cs, in.frequencies[i], 0.0, con[c]).real();
    });

    // Modes with identical growth profiles are interchangeable.
    std::vector<std::size_t> keep;
    {
        std::vector<std::size_t> idx(nf);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return log_g[a] < log_g[b]; });
        for (std::size_t k = 0; k < idx.size(); ++k)
            if (k == 0 || log_g[idx[k]] != log_g[idx[k - 1]]) keep.push_back(idx[k]);
        std::sort(keep.begin(), keep.end());
    }
    table.distinct_modes = keep.size();
    const std::size_t n = keep.size();

    // Scaled variables v_i = w_i exp(M_i), M_i = max_c log g_i(c): the D-rows
    // then have coefficients in (0, 1] and the eps-row has exp(-M_i).
    std::vector<double> eps_coef(n);
    std::vector<std::vector<double>> d_coef(n, std::vector<double>(con.size()));
    for (std::size_t a = 0; a < n; ++a) {
        const auto& lg = log_g[keep[a]];
        const double mx = *std::max_element(lg.begin(), lg.end());
        eps_coef[a] = std::exp(-mx);
        if (!std::isfinite(eps_coef[a])) throw OverflowAbort("stability_modulus: mode decays beyond double range");
        for (std::size_t c = 0; c < con.size(); ++c) d_coef[a][c] = std::exp(lg[c] - mx);
    }
    std::vector<std::size_t> obj_index;
    for (double t : obj)
        obj_index.push_back(static_cast<std::size_t>(std::lower_bound(con.begin(), con.end(), t) - con.begin()));

    const double D2 = in.D * in.D;
    const std::size_t jobs = in.epsilons.size() * obj.size();
    struct Best {
        double value = 0.0;
        std::size_t a = 0, b = 0;
    };
    std::vector<Best> best(jobs);
    parallel_for(jobs, in.threads, [&](std::size_t job) {
        const double eps = in.epsilons[job / obj.size()];
        const std::size_t oc = obj_index[job % obj.size()];
        Best out;
        if (eps == 0.0) {
            best[job] = out;
            return;
        }
        std::vector<double> rhs(con.size() + 1, D2);
        rhs[0] = eps * eps;
        std::vector<double> ai(con.size() + 1), aj(con.size() + 1);
        for (std::size_t a = 0; a < n; ++a) {
            ai[0] = eps_coef[a];
            std::copy(d_coef[a].begin(), d_coef[a].end(), ai.begin() + 1);
            const double oa = d_coef[a][oc];
            for (std::size_t b = a; b < n; ++b) {
                const double ob = d_coef[b][oc];
                double v;
                if (b == a) {
                    v = oa * std::min(D2, rhs[0] / eps_coef[a]);
                } else {
                    aj[0] = eps_coef[b];
                    std::copy(d_coef[b].begin(), d_coef[b].end(), aj.begin() + 1);
                    v = detail::two_mode_lp(oa, ob, ai, aj, rhs);
                }
                if (v > out.value) out = {v, a, b};
            }
        }
        best[job] = out;
    });

    for (std::size_t e = 0; e < in.epsilons.size(); ++e) {
        StabilityRow row;
        row.epsilon = in.epsilons[e];
        Best top;
        std::size_t top_t = 0;
        for (std::size_t k = 0; k < obj.size(); ++k) {
            const auto& b = best[e * obj.size() + k];
            if (b.value > top.value) {
                top = b;
                top_t = k;
            }
        }
        row.S = std::min(in.D, std::sqrt(top.value));
        row.t_star = obj[top_t];
        if (top.value > 0.0) {
            row.xi_a = in.frequencies[keep[top.a]];
            row.xi_b = in.frequencies[keep[top.b]];
        }
        table.rows.push_back(row);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Bound fitting

enum class BoundKind { hoelder, loglip, osgood_psi };

inline std::string to_string(BoundKind k) {
    switch (k) {
    case BoundKind::hoelder: return "hoelder";
    case BoundKind::loglip: return "loglip";
    case BoundKind::osgood_psi: return "osgood_psi";
    }
    return "hoelder";
}

inline BoundKind bound_kind_from_string(const std::string& s) {
    if (s == "hoelder") return BoundKind::hoelder;
    if (s == "loglip") return BoundKind::loglip;
    if (s == "osgood_psi") return BoundKind::osgood_psi;
    throw ParameterError("unknown bound kind '" + s + "'");
}

struct StabilityBound {
    BoundKind kind = BoundKind::hoelder;
    double M = 0.0;
    double delta = 0.0; // hoelder exponent
    double N = 0.0;
    double beta = 0.0;  // loglip exponent
    double residual = 0.0; // RMS of the fit in log S
    std::vector<double> eps;
    std::vector<double> psi; // osgood_psi: tabulated Psi
    bool strictly_increasing = false;
    double max_upward_jump = 0.0;
    double rho = 0.0;
    double D = 0.0;
    double T = 0.0;
    double T_prime = 0.0;

    double operator()(double e) const {
        switch (kind) {
        case BoundKind::hoelder: return M * std::pow(e, delta);
        case BoundKind::loglip: return M * std::exp(-N * std::pow(std::abs(std::log(e)), beta));
        case BoundKind::osgood_psi: {
            if (e <= eps.front()) return psi.front();
            auto it = std::lower_bound(eps.begin(), eps.end(), e);
            if (it == eps.end()) return psi.back();
            const std::size_t k = static_cast<std::size_t>(it - eps.begin());
            const double s = (e - eps[k - 1]) / (eps[k] - eps[k - 1]);
            return psi[k - 1] + s * (psi[k] - psi[k - 1]);
        }
        }
        return 0.0;
    }
};

namespace detail {

struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double sse = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.sse += r * r;
    }
    return f;
}

} // namespace detail

/// Fits the requested bound shape to rows (eps, S). Rows with eps <= 0 or S <= 0
/// are ignored by the log fits.
inline StabilityBound fit_bound(const std::vector<double>& eps_in, const std::vector<double>& S_in, BoundKind kind) {
    if (eps_in.size() != S_in.size()) throw ParameterError("fit_bound: table columns differ in length");
    std::vector<std::size_t> order(eps_in.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return eps_in[a] < eps_in[b]; });
    std::vector<double> eps, S;
    for (std::size_t i : order)
        if (eps_in[i] > 0.0) {
            eps.push_back(eps_in[i]);
            S.push_back(S_in[i]);
        }
    if (eps.size() < 5) throw ParameterError("fit_bound: need at least 5 rows with eps > 0");
    if (eps.back() / eps.front() < 1e3 * (1.0 - 1e-12))
        throw ParameterError("fit_bound: table must span at least 3 decades of eps");
    if (*std::max_element(S.begin(), S.end()) == *std::min_element(S.begin(), S.end()))
        throw NumericalError("fit_bound: degenerate table (constant S)");

    StabilityBound b;
    b.kind = kind;
    b.eps = eps;
    b.psi = S;
    b.rho = eps.back();
    b.strictly_increasing = true;
    for (std::size_t i = 1; i < S.size(); ++i) {
        b.strictly_increasing = b.strictly_increasing && S[i] > S[i - 1];
        b.max_upward_jump = std::max(b.max_upward_jump, S[i] - S[i - 1]);
    }
    if (kind == BoundKind::osgood_psi) return b;

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (S[i] > 0.0) {
            lx.push_back(std::log(eps[i]));
            ly.push_back(std::log(S[i]));
        }
    if (lx.size() < 5) throw NumericalError("fit_bound: fewer than 5 rows with S > 0");

    if (kind == BoundKind::hoelder) {
        const auto f = detail::least_squares(lx, ly);
        b.delta = f.slope;
        b.M = std::exp(f.intercept);
        b.residual = std::sqrt(f.sse / static_cast<double>(lx.size()));
        return b;
    }

    // loglip: log S = log M - N |log eps|^beta; profile least squares in beta.
    auto fit_at = [&](double beta) {
        std::vector<double> x(lx.size());
        for (std::size_t i = 0; i < lx.size(); ++i) x[i] = std::pow(std::abs(lx[i]), beta);
        return detail::least_squares(x, ly);
    };
    double best_beta = 0.005;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        const double beta = 0.005 * k;
        const double sse = fit_at(beta).sse;
        if (sse < best_sse) {
            best_sse = sse;
            best_beta = beta;
        }
    }
    double lo = std::max(1e-6, best_beta - 0.005), hi = std::min(1.0 - 1e-6, best_beta + 0.005);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = fit_at(x1).sse, f2 = fit_at(x2).sse;
    for (int it = 0; it < 100; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = fit_at(x1).sse;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = fit_at(x2).sse;
        }
    }
    b.beta = 0.5 * (lo + hi);
    const auto f = fit_at(b.beta);
    b.N = -f.slope;
    b.M = std::exp(f.intercept);
    b.residual = std::sqrt(f.sse / static_cast<double>(lx.size()));
    return b;
}

inline StabilityBound fit_bound(const StabilityTable& table, BoundKind kind) {
    std::vector<double> eps, S;
    for (const auto& r : table.rows) {
        eps.push_back(r.epsilon);
        S.push_back(r.S);
    }
    return fit_bound(eps, S, kind);
}

} // namespace osgoodlab

#endif // OSGOODLAB_ESTIMATES_HPP

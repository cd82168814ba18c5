#ifndef OSGOODLAB_DIVERGENCE_HPP
#define OSGOODLAB_DIVERGENCE_HPP

// Surrogate counterexample families: single-mode solutions u_k with oscillating
// scalar coefficients a_k(t) = base + amp·mu(h_k)·sin(2πt/h_k), frequencies
// xi_k = c·2^{k/2} and scales h_k = 2^{-k}. Data are normalised so that
// ‖u_k(T)‖ = D.

#include "osgoodlab/coefficients.hpp"
#include "osgoodlab/errors.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

struct DivergenceTuning {
    double amplitude = 0.1;
    double base = 1.0;
    double xi_scale = 1.0 / 256.0; // c in xi_k = c·2^{k/2}
    double D = 1.0;
    double T = 1.0;
    double T_prime = 0.5;
    double k_A = 0.5;
    double t_window_decay = 1.0;   // t_k searched in (0, T'·k^{-p}]
    std::size_t t_grid_points = 64;
    std::size_t seminorm_points = 800;
    double amp_scale = 1.0;        // multiplies every initial amplitude
    bool fixed_frequency = false;  // xi_k = c for all k (negative control)
    std::optional<double> hoelder_tau;
};

struct FamilyMember {
    int k = 0;
    double h = 0.0;
    double xi = 0.0;
    double t_k = 0.0;
    CoefficientSet cs;
    SpectralField initial;
    double norm0 = 0.0;
    double norm_tk = 0.0;
    double seminorm = 0.0;
    bool ellipticity = false;
};

struct DivergenceFamily {
    ModulusTag target = ModulusTag::loglip;
    Modulus mu = make_canonical(ModulusTag::loglip);
    DivergenceTuning tuning;
    double seminorm_bound = 0.0; // B
    std::vector<FamilyMember> members;
    bool truncated = false;
    std::string warning;

    double max_seminorm() const {
        double m = 0.0;
        for (const auto& f : members) m = std::max(m, f.seminorm);
        return m;
    }
};

namespace detail {

// Samples on a coarse grid over [0, T] merged with a fine grid over the first
// few periods, where the difference quotients at scale h are resolved.
inline double sampled_seminorm(const ScalarFunction& a, const Modulus& mu, double h, double T, std::size_t n) {
    auto t = linspace(0.0, T, n);
    const auto fine = linspace(0.0, std::min(T, 4.0 * h), n);
    t.insert(t.end(), fine.begin(), fine.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end()), t.end());
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) f[i] = a(t[i]);
    return seminorm(t, f, mu);
}

} // namespace detail

inline DivergenceFamily build_family(ModulusTag target, int k_max, const DivergenceTuning& tuning = {}) {
    if (k_max < 1 || k_max > 40) throw ParameterError("build_family: k_max must lie in [1, 40]");
    if (!(tuning.T_prime > 0.0 && tuning.T_prime < tuning.T))
        throw ParameterError("build_family: need 0 < T' < T");
    if (!(tuning.D > 0.0 && tuning.xi_scale > 0.0)) throw ParameterError("build_family: D and c must be positive");
    if (tuning.t_grid_points < 1) throw ParameterError("build_family: t grid must be nonempty");
    if (target == ModulusTag::custom) throw ParameterError("build_family: target must be a canonical modulus");

    DivergenceFamily fam;
    fam.target = target;
    fam.mu = make_canonical(target, target == ModulusTag::hoelder ? tuning.hoelder_tau : std::nullopt);
    fam.tuning = tuning;
    fam.seminorm_bound = synthesized_seminorm_bound(tuning.amplitude);

    for (int k = 1; k <= k_max; ++k) {
        FamilyMember m;
        m.k = k;
        m.h = std::ldexp(1.0, -k);
        m.xi = tuning.fixed_frequency ? tuning.xi_scale : tuning.xi_scale * std::pow(2.0, 0.5 * k);
        m.cs = CoefficientSet::isotropic(1, synthesize_scalar(fam.mu, tuning.amplitude, m.h, tuning.base),
                                         tuning.k_A, tuning.T);
        const std::vector<double> xi{m.xi};
        const double log_scale = -integrate_symbol(m.cs, xi, tuning.T).real();
        if (log_scale < std::log(std::numeric_limits<double>::min()) - std::log(tuning.D)) {
            std::ostringstream msg;
            msg << "family truncated at k=" << k - 1 << ": initial amplitude exp(" << log_scale
                << ") underflows";
            fam.truncated = true;
            fam.warning = msg.str();
            break;
        }
        m.initial = single_mode(xi, tuning.amp_scale * tuning.D * std::exp(log_scale));
        m.norm0 = l2_norm(m.initial);

        // t_k: first maximiser of the growth ‖u(t)‖/‖u(0)‖ on the search grid.
        const double t_max = tuning.T_prime * std::pow(static_cast<double>(k), -tuning.t_window_decay);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 1; j <= tuning.t_grid_points; ++j) {
            const double t = t_max * static_cast<double>(j) / static_cast<double>(tuning.t_grid_points);
            const double g = integrate_symbol(m.cs, xi, t).real();
            if (g > best) {
                best = g;
                m.t_k = t;
            }
        }
        m.norm_tk = l2_norm(evolve(m.initial, m.cs, m.t_k));

        m.seminorm = detail::sampled_seminorm(m.cs.diffusion[0], fam.mu, m.h, tuning.T, tuning.seminorm_points);
        const auto t_check = linspace(0.0, tuning.T, 4 * tuning.seminorm_points);
        m.ellipticity = check_ellipticity(m.cs, t_check, 2).pass;
        fam.members.push_back(std::move(m));
    }
    return fam;
}

struct RatioEntry {
    int k = 0;
    double ratio = 0.0;
    bool excluded = false; // zero denominator
};

namespace detail {

template <class Denominator>
std::vector<RatioEntry> ratios(const DivergenceFamily& fam, Denominator&& denom) {
    if (fam.members.empty()) throw ParameterError("ratio: empty family");
    std::vector<RatioEntry> out;
    for (const auto& m : fam.members) {
        RatioEntry r;
        r.k = m.k;
        const double d = m.norm0 > 0.0 ? denom(m.norm0) : 0.0;
        if (d == 0.0) {
            r.excluded = true;
            r.ratio = 0.0;
        } else {
            r.ratio = m.norm_tk / d;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace detail

/// R_k = ‖u_k(t_k)‖ / ‖u_k(0)‖^delta.
inline std::vector<RatioEntry> hoelder_ratio(const DivergenceFamily& fam, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("hoelder_ratio: delta must lie in (0, 1)");
    return detail::ratios(fam, [delta](double n0) { return std::pow(n0, delta); });
}

/// R_k = ‖u_k(t_k)‖ / exp(-N |log ‖u_k(0)‖|^delta).
inline std::vector<RatioEntry> loglip_ratio(const DivergenceFamily& fam, double N, double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ParameterError("loglip_ratio: delta must lie in (0, 1)");
    if (!(N > 0.0)) throw ParameterError("loglip_ratio: N must be positive");
    return detail::ratios(fam, [N, delta](double n0) { return std::exp(-N * std::pow(std::abs(std::log(n0)), delta)); });
}

} // namespace osgoodlab

#endif // OSGOODLAB_DIVERGENCE_HPP

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "osgoodlab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace osgoodlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::size_t worker_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

std::vector<double> decades(int from, int to) {
    std::vector<double> e;
    for (int k = from; k <= to; ++k) e.push_back(std::pow(10.0, -k));
    return e;
}

CoefficientSet scalar(ScalarFunction a) { return CoefficientSet::isotropic(1, std::move(a), 0.5, 1.0); }

// Hölder fit of the constant-coefficient stability modulus, shared by 5 and 6.
struct HoelderFit {
    StabilityBound bound;
    double seconds = 0.0;
};

HoelderFit hoelder_fit() {
    static const HoelderFit fit = [] {
        const auto t0 = std::chrono::steady_clock::now();
        StabilityModulusInput in;
        in.cs = scalar(ScalarFunction::constant(1.0));
        in.epsilons = logspace(1e-6, 1e-2, 9);
        in.frequencies = detail::frequency_list(FrequencyGridSpec{});
        in.t_grid = linspace(0.0, 1.0, 11);
        in.threads = worker_threads();
        HoelderFit f;
        f.bound = fit_bound(stability_modulus(in), BoundKind::hoelder);
        f.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return f;
    }();
    return fit;
}

Outcome mode_evolution() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    worst = std::max(worst, rel_err(evolve(single_mode({1.0}, 1.0), scalar(ScalarFunction::constant(1.0)), 1.0).modes[0].amp.real(),
                                    std::numbers::e));
    const auto f = single_mode({3.0}, {0.2, -0.7}, 0.4);
    const auto same = evolve(f, scalar(ScalarFunction::constant(1.0)), 0.4);
    worst = std::max(worst, std::abs(same.modes[0].amp - f.modes[0].amp) / std::abs(f.modes[0].amp));
    worst = std::max(worst, rel_err(evolve(single_mode({1.0}, 1.0), scalar(ScalarFunction::affine(1.0, 0.5)), 1.0).modes[0].amp.real(),
                                    std::exp(1.25)));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream d;
    d << "max rel err " << worst << ", " << secs << " s";
    return {worst <= 1e-10 && secs < 1.0, d.str()};
}

Outcome osgood_classification() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto eps = decades(1, 14);
    bool ok = true;
    double worst = 0.0;
    std::ostringstream d;
    for (auto tag : {ModulusTag::lipschitz, ModulusTag::loglip, ModulusTag::iterated_log}) {
        const auto r = osgood_indicator(make_canonical(tag), eps);
        if (r.classification != OsgoodClass::diverges) {
            ok = false;
            d << to_string(tag) << " not divergent; ";
        }
        if (tag == ModulusTag::lipschitz)
            for (std::size_t i = 0; i < eps.size(); ++i) worst = std::max(worst, rel_err(r.integrals[i], -std::log(eps[i])));
    }
    for (double tau : {0.3, 0.5, 0.9}) {
        const auto r = osgood_indicator(make_canonical(ModulusTag::hoelder, tau), eps);
        if (r.classification != OsgoodClass::converges) {
            ok = false;
            d << "hoelder " << tau << " not convergent; ";
        }
        for (std::size_t i = 0; i < eps.size(); ++i)
            worst = std::max(worst, rel_err(r.integrals[i], (1.0 - std::pow(eps[i], 1.0 - tau)) / (1.0 - tau)));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    d << "max rel err of I " << worst << ", " << secs << " s";
    return {ok && worst <= 1e-6 && secs < 10.0, d.str()};
}

bool weight_shape(const WeightFunction& w) {
    for (std::size_t i = 1; i < w.nodes.size(); ++i)
        if (!(w.nodes[i].psi < w.nodes[i - 1].psi)) return false;
    const auto y = linspace(w.y0, w.y1, 200);
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (w.phi(y[i - 1]) - 2.0 * w.phi(y[i]) + w.phi(y[i + 1]) > 1e-12) return false;
    return true;
}

Outcome weight_oracles() {
    double worst = 0.0;
    bool shape = true;
    {
        const auto w = solve_loglip_weight(1.7, 0.2, 40.0, 0.3, 1.0);
        for (double y : linspace(0.2, 1.0, 100)) worst = std::max(worst, rel_err(w.psi(y), closed_form::loglip_psi(1.7, 0.2, 40.0, y)));
        shape = shape && weight_shape(w);
    }
    {
        const auto w = solve_osgood_weight(2.0, 0.5, make_canonical(ModulusTag::lipschitz), 1.0, 4.0, 0.0, 2.0);
        for (double y : linspace(1.0, 2.0, 100))
            worst = std::max(worst, rel_err(w.psi(y), closed_form::osgood_lipschitz_psi(2.0, 0.5, 1.0, 4.0, y)));
        shape = shape && weight_shape(w);
    }
    std::ostringstream d;
    d << "max rel err " << worst << ", psi decreasing and phi concave: " << (shape ? "yes" : "no");
    return {worst <= 1e-8 && shape, d.str()};
}

Outcome energy_realizability() {
    const auto omega = make_canonical(ModulusTag::iterated_log);
    std::vector<std::vector<double>> xi;
    for (double x : linspace(0.0, 32.0, 65)) xi.push_back({x});
    const auto lambdas = logspace(0.1, 1000.0, 161);
    std::vector<double> stars;
    bool found = true;
    std::ostringstream d;
    for (double amp : {0.4, 0.2, 0.0}) {
        LambdaSweepSetup s;
        s.cs = scalar(synthesize_scalar(omega, amp, 1.0 / 16.0, 1.0));
        s.frequencies = xi;
        s.sigmas = {0.025, 0.05, 0.1};
        s.omega = omega;
        s.psi0 = 4.0;
        s.anchor_at_end = true;
        s.y_anchor = 0.2;
        s.threads = worker_threads();
        const auto r = sweep_lambda(s, lambdas, true);
        d << "amp " << amp << ": lambda* ";
        if (r.lambda_star) {
            d << *r.lambda_star << "; ";
            stars.push_back(*r.lambda_star);
        } else {
            d << "none; ";
            found = false;
        }
    }
    bool monotone = found;
    for (std::size_t i = 1; monotone && i < stars.size(); ++i) monotone = stars[i] <= stars[i - 1];
    d << "nonincreasing as amplitude decreases: " << (monotone ? "yes" : "no");
    return {found && monotone && stars.front() <= 1e3, d.str()};
}

Outcome hoelder_reproduction() {
    const auto f = hoelder_fit();
    std::ostringstream d;
    d << "delta " << f.bound.delta << ", M " << f.bound.M << ", " << f.seconds << " s";
    const bool ok = f.bound.delta >= 0.45 && f.bound.delta <= 0.55 && f.bound.M >= 0.5 && f.bound.M <= 2.0 && f.seconds < 30.0;
    return {ok, d.str()};
}

Outcome bound_shape_separation() {
    const auto fam = build_family(ModulusTag::loglip, 25);
    bool exceeds = true, increasing = true;
    std::ostringstream d;
    for (double delta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const auto r = hoelder_ratio(fam, delta);
        double peak = 0.0;
        bool inc = true;
        for (std::size_t i = 0; i < r.size(); ++i) {
            peak = std::max(peak, r[i].ratio);
            if (r[i].k > 5 && !(r[i].ratio > r[i - 1].ratio)) inc = false;
        }
        exceeds = exceeds && peak > 1e3;
        increasing = increasing && inc;
        d << "delta " << delta << ": max R " << peak << ", R_25 " << r.back().ratio << "; ";
    }

    // Negative control: Lipschitz family against the constant-coefficient
    // Hölder fit, on data inside the fitted epsilon range.
    const auto fit = hoelder_fit().bound;
    const double eps_hi = *std::max_element(fit.eps.begin(), fit.eps.end());
    const auto lip = build_family(ModulusTag::lipschitz, 25);
    std::size_t in_range = 0, below = 0, below_all = 0;
    for (const auto& m : lip.members) {
        const bool ok = m.norm_tk <= fit.M * std::pow(m.norm0, fit.delta);
        below_all += ok;
        if (m.norm0 <= eps_hi) {
            ++in_range;
            below += ok;
        }
    }
    const bool control = in_range > 0 && below == in_range;
    d << "exceeds 1e3: " << (exceeds ? "yes" : "no") << ", increasing for k>=5: " << (increasing ? "yes" : "no")
      << "; lipschitz control " << below << "/" << in_range << " below bound for norm0 <= " << eps_hi << " ("
      << below_all << "/" << lip.members.size() << " over all k)";
    return {exceeds && increasing && control, d.str()};
}

Outcome osgood_psi() {
    StabilityModulusInput in;
    in.cs = scalar(synthesize_scalar(make_canonical(ModulusTag::iterated_log), 0.5, 0.07, 1.0));
    in.epsilons = logspace(1e-8, 1e-1, 15);
    in.frequencies = detail::frequency_list(FrequencyGridSpec{});
    in.t_grid = linspace(0.0, 1.0, 17);
    in.threads = worker_threads();
    const auto b = fit_bound(stability_modulus(in), BoundKind::osgood_psi);
    const double at_min = b.psi.front();
    std::ostringstream d;
    d << "strictly increasing: " << (b.strictly_increasing ? "yes" : "no") << ", Psi(" << b.eps.front() << ") = " << at_min;
    return {b.strictly_increasing && b.eps.front() == in.epsilons.front() && at_min < 1e-2, d.str()};
}

SpectralField random_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> xi(-20.0, 20.0), amp(-1.0, 1.0), w(0.01, 1.0);
    SpectralField f;
    f.dim = 1;
    for (std::size_t i = 0; i < n; ++i) f.modes.push_back({{xi(rng)}, {amp(rng), amp(rng)}, w(rng)});
    f.validate();
    return f;
}

Outcome norm_identities() {
    const auto f = random_field(500, 20240601);
    bool ok = sobolev_norm_squared(f, 0.0) == l2_norm_squared(f);
    for (double s : {-1.0, 0.5, 1.0})
        ok = ok && weighted_norm_squared(f, {s, 0.0, make_canonical(ModulusTag::loglip)}) == sobolev_norm_squared(f, s);
    double worst = 0.0;
    const auto lip = make_canonical(ModulusTag::lipschitz);
    for (double a : {0.1, 1.0, 3.0}) {
        const double ratio = weighted_norm_squared(f, {1.0, a, lip}) / sobolev_norm_squared(f, 1.0);
        worst = std::max(worst, ratio / std::exp(a));
        ok = ok && ratio >= 1.0 && ratio <= std::exp(a);
    }
    std::ostringstream d;
    d << "exact identities and max ratio/e^a " << worst;
    return {ok, d.str()};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OSGOODLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome determinism() {
    const fs::path root = fs::temp_directory_path() / "osgoodlab_acceptance";
    fs::remove_all(root);
    std::vector<fs::path> configs;
    for (const auto& e : fs::directory_iterator(fs::path(OSGOODLAB_SOURCE_DIR) / "configs")) configs.push_back(e.path());
    std::sort(configs.begin(), configs.end());
    std::size_t same = 0;
    std::ostringstream d;
    for (const auto& cfg : configs) {
        const auto c = parse_config(io::read_file(cfg));
        bool ok = true;
        for (const char* th : {"1", "8"}) {
            const auto out = root / th / cfg.stem();
            ok = ok && run_cli(c.kind + " --config " + cfg.string() + " --out " + out.string() + " --threads " + th) == 0;
        }
        ok = ok && io::read_file(root / "1" / cfg.stem() / c.output.csv) == io::read_file(root / "8" / cfg.stem() / c.output.csv);
        if (ok) ++same;
        else d << cfg.filename().string() << " differs; ";
    }
    d << same << "/" << configs.size() << " configs byte-identical";
    return {!configs.empty() && same == configs.size(), d.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"mode evolution exactness", mode_evolution},
        {"osgood classification", osgood_classification},
        {"weight ODE oracles", weight_oracles},
        {"energy inequality realizability", energy_realizability},
        {"hoelder stability reproduction", hoelder_reproduction},
        {"bound shape separation", bound_shape_separation},
        {"osgood psi empirics", osgood_psi},
        {"norm identities", norm_identities},
        {"thread determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] criterion %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}

#ifndef OSGOODLAB_CONFIG_HPP
#define OSGOODLAB_CONFIG_HPP

// Experiment configuration: JSON with snake_case keys. Unknown keys are
// rejected so that typos surface as validation errors.

#include "osgoodlab/coefficients.hpp"
#include "osgoodlab/errors.hpp"
#include "osgoodlab/estimates.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace osgoodlab {

using json = nlohmann::ordered_json;

/// Validation failure tied to a field path such as "params.T_prime".
class ValidationError : public ParameterError {
public:
    ValidationError(std::string field, const std::string& what)
        : ParameterError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

inline const std::array<std::string, 6>& experiment_kinds() {
    static const std::array<std::string, 6> kinds{"moduli-check", "weights-solve", "evolve",
                                                  "energy-check", "stability-modulus", "divergence"};
    return kinds;
}

struct GridSpec {
    std::string spacing = "linear"; // linear | log | explicit
    double start = 0.0;
    double stop = 1.0;
    std::size_t count = 11;
    std::vector<double> values;

    std::vector<double> expand() const {
        if (spacing == "explicit") return values;
        if (spacing == "log") return logspace(start, stop, count);
        return linspace(start, stop, count);
    }
    bool operator==(const GridSpec&) const = default;
};

struct ModulusSpec {
    std::string tag = "loglip";
    std::optional<double> tau;

    Modulus build() const { return make_canonical(modulus_tag_from_string(tag), tau); }
    bool operator==(const ModulusSpec&) const = default;
};

struct CoefficientSpec {
    std::string family = "constant"; // constant | affine | synthesized
    std::size_t dim = 1;
    double base = 1.0;
    double slope = 0.0;
    double amplitude = 0.0;
    double h = 0.5;
    ModulusSpec modulus;
    double potential = 0.0;
    std::vector<double> drift;

    CoefficientSet build(double k_A, double T) const {
        ScalarFunction a;
        if (family == "constant") a = ScalarFunction::constant(base);
        else if (family == "affine") a = ScalarFunction::affine(base, slope);
        else a = synthesize_scalar(modulus.build(), amplitude, h, base);
        auto cs = CoefficientSet::isotropic(dim, a, k_A, T, potential);
        for (std::size_t i = 0; i < drift.size(); ++i) cs.drift[i] = ScalarFunction::constant(drift[i]);
        return cs;
    }
    bool operator==(const CoefficientSpec&) const = default;
};

struct ParamPack {
    double gamma = 1.0;
    double beta = 1.0;
    double tau = 0.1;
    double alpha = 0.0;
    double sigma = 0.1;
    double sigma_bar = 0.1;
    double lambda = 1.0;
    double D = 1.0;
    double T = 1.0;
    double T_prime = 0.5;
    double k_A = 0.5;
    bool operator==(const ParamPack&) const = default;
};

struct Tolerances {
    double axiom_tol = 1e-12;
    double ode_rel_tol = 1e-12;
    double quad_rel_tol = 1e-12;
    bool operator==(const Tolerances&) const = default;
};

struct OutputSpec {
    std::string csv = "results.csv";
    std::string manifest = "manifest.json";
    bool operator==(const OutputSpec&) const = default;
};

struct WeightsSpec {
    std::string form = "osgood"; // osgood | loglip
    double y0 = 0.1;
    double psi0 = 100.0;
    double phi0 = 0.0;
    double y1 = 1.0;
    std::size_t points = 101;
    bool operator==(const WeightsSpec&) const = default;
};

struct ModeSpec {
    std::vector<double> xi;
    double re = 1.0;
    double im = 0.0;
    bool operator==(const ModeSpec&) const = default;
};

struct EvolveSpec {
    std::string data = "modes"; // modes | gaussian
    std::vector<ModeSpec> modes;
    double eps = 1.0;
    double K = 1.0;
    bool operator==(const EvolveSpec&) const = default;
};

struct EnergySpec {
    std::string check = "mode"; // mode | loglip | stima_prima
    std::vector<double> constants;
    std::vector<std::vector<double>> frequencies;
    std::vector<double> check_times;
    double psi0 = 100.0;
    double phi0 = 0.0;
    double eps = 1.0;
    double K = 1.0;
    std::size_t z_points = 33;
    bool anchor_at_end = false;
    double y_anchor = 1.0;
    bool operator==(const EnergySpec&) const = default;
};

struct StabilitySpec {
    std::string bound_kind = "hoelder";
    bool operator==(const StabilitySpec&) const = default;
};

struct DivergenceSpec {
    std::string target = "loglip";
    int k_max = 25;
    std::string ratio = "hoelder"; // hoelder | loglip
    std::vector<double> deltas{0.1, 0.3, 0.5, 0.7, 0.9};
    double N = 1.0;
    double amplitude = 0.1;
    double base = 1.0;
    double xi_scale = 1.0 / 256.0;
    double t_window_decay = 1.0;
    std::size_t t_grid_points = 64;
    std::size_t seminorm_points = 800;
    double amp_scale = 1.0;
    bool fixed_frequency = false;
    bool operator==(const DivergenceSpec&) const = default;
};

struct ExperimentConfig {
    std::string kind = "evolve";
    CoefficientSpec coefficients;
    ModulusSpec modulus;
    GridSpec t_grid;
    FrequencyGridSpec xi_grid;
    GridSpec eps_grid{"log", 1e-6, 1e-2, 9, {}};
    ParamPack params;
    Tolerances tolerances;
    OutputSpec output;
    std::optional<WeightsSpec> weights;
    std::optional<EvolveSpec> evolve;
    std::optional<EnergySpec> energy;
    std::optional<StabilitySpec> stability;
    std::optional<DivergenceSpec> divergence;
    bool operator==(const ExperimentConfig&) const = default;
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

class FieldReader {
public:
    FieldReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (const json* v = find(key)) {
            try {
                out = v->get<T>();
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(field(key), std::string("wrong type (") + e.what() + ")");
            }
        }
    }

    template <class T>
    void get(const std::string& key, std::optional<T>& out) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            T tmp{};
            get(key, tmp);
            out = tmp;
        }
    }

    template <class T, class Parse>
    void object(const std::string& key, T& out, Parse&& parse) {
        if (const json* v = find(key)) {
            FieldReader sub(*v, field(key));
            parse(sub, out);
            sub.finish();
        }
    }

    template <class T, class Parse>
    void object(const std::string& key, std::optional<T>& out, Parse&& parse) {
        if (const json* v = find(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            T tmp{};
            FieldReader sub(*v, field(key));
            parse(sub, tmp);
            sub.finish();
            out = tmp;
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(field(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void parse_grid(FieldReader& r, GridSpec& g) {
    r.get("spacing", g.spacing);
    r.get("start", g.start);
    r.get("stop", g.stop);
    r.get("count", g.count);
    r.get("values", g.values);
}

inline json dump_grid(const GridSpec& g) {
    json j;
    j["spacing"] = g.spacing;
    j["start"] = g.start;
    j["stop"] = g.stop;
    j["count"] = g.count;
    j["values"] = g.values;
    return j;
}

inline void parse_modulus(FieldReader& r, ModulusSpec& m) {
    r.get("tag", m.tag);
    r.get("tau", m.tau);
}

inline json dump_modulus(const ModulusSpec& m) {
    json j;
    j["tag"] = m.tag;
    j["tau"] = m.tau ? json(*m.tau) : json(nullptr);
    return j;
}

inline void parse_xi_grid(FieldReader& r, FrequencyGridSpec& g) {
    r.get("dim", g.dim);
    r.get("xi_max", g.xi_max);
    r.get("step", g.step);
    r.get("refine_below", g.refine_below);
    r.get("geometric_levels", g.geometric_levels);
}

} // namespace detail

inline json to_json(const ExperimentConfig& c) {
    json j;
    j["kind"] = c.kind;
    {
        const auto& s = c.coefficients;
        json k;
        k["family"] = s.family;
        k["dim"] = s.dim;
        k["base"] = s.base;
        k["slope"] = s.slope;
        k["amplitude"] = s.amplitude;
        k["h"] = s.h;
        k["modulus"] = detail::dump_modulus(s.modulus);
        k["potential"] = s.potential;
        k["drift"] = s.drift;
        j["coefficients"] = k;
    }
    j["modulus"] = detail::dump_modulus(c.modulus);
    {
        json g;
        g["t"] = detail::dump_grid(c.t_grid);
        json x;
        x["dim"] = c.xi_grid.dim;
        x["xi_max"] = c.xi_grid.xi_max;
        x["step"] = c.xi_grid.step;
        x["refine_below"] = c.xi_grid.refine_below;
        x["geometric_levels"] = c.xi_grid.geometric_levels;
        g["xi"] = x;
        g["epsilon"] = detail::dump_grid(c.eps_grid);
        j["grids"] = g;
    }
    {
        const auto& p = c.params;
        j["params"] = {{"gamma", p.gamma}, {"beta", p.beta},     {"tau", p.tau},     {"alpha", p.alpha},
                       {"sigma", p.sigma}, {"sigma_bar", p.sigma_bar}, {"lambda", p.lambda}, {"D", p.D},
                       {"T", p.T},         {"T_prime", p.T_prime}, {"k_A", p.k_A}};
    }
    j["tolerances"] = {{"axiom_tol", c.tolerances.axiom_tol},
                       {"ode_rel_tol", c.tolerances.ode_rel_tol},
                       {"quad_rel_tol", c.tolerances.quad_rel_tol}};
    j["output"] = {{"csv", c.output.csv}, {"manifest", c.output.manifest}};
    if (c.weights) {
        const auto& w = *c.weights;
        j["weights"] = {{"form", w.form}, {"y0", w.y0},   {"psi0", w.psi0},
                        {"phi0", w.phi0}, {"y1", w.y1},   {"points", w.points}};
    }
    if (c.evolve) {
        const auto& e = *c.evolve;
        json modes = json::array();
        for (const auto& m : e.modes) modes.push_back({{"xi", m.xi}, {"re", m.re}, {"im", m.im}});
        j["evolve"] = {{"data", e.data}, {"modes", modes}, {"eps", e.eps}, {"K", e.K}};
    }
    if (c.energy) {
        const auto& e = *c.energy;
        j["energy"] = {{"check", e.check}, {"constants", e.constants}, {"frequencies", e.frequencies},
                       {"check_times", e.check_times}, {"psi0", e.psi0}, {"phi0", e.phi0},
                       {"eps", e.eps}, {"K", e.K}, {"z_points", e.z_points},
                       {"anchor_at_end", e.anchor_at_end}, {"y_anchor", e.y_anchor}};
    }
    if (c.stability) j["stability"] = {{"bound_kind", c.stability->bound_kind}};
    if (c.divergence) {
        const auto& d = *c.divergence;
        j["divergence"] = {{"target", d.target},
                           {"k_max", d.k_max},
                           {"ratio", d.ratio},
                           {"deltas", d.deltas},
                           {"N", d.N},
                           {"amplitude", d.amplitude},
                           {"base", d.base},
                           {"xi_scale", d.xi_scale},
                           {"t_window_decay", d.t_window_decay},
                           {"t_grid_points", d.t_grid_points},
                           {"seminorm_points", d.seminorm_points},
                           {"amp_scale", d.amp_scale},
                           {"fixed_frequency", d.fixed_frequency}};
    }
    return j;
}

/// Parses without semantic validation (see validate()). Throws ValidationError.
inline ExperimentConfig from_json(const json& j) {
    using detail::FieldReader;
    ExperimentConfig c;
    FieldReader r(j, "");
    r.get("kind", c.kind);
    r.object("coefficients", c.coefficients, [](FieldReader& s, CoefficientSpec& k) {
        s.get("family", k.family);
        s.get("dim", k.dim);
        s.get("base", k.base);
        s.get("slope", k.slope);
        s.get("amplitude", k.amplitude);
        s.get("h", k.h);
        s.object("modulus", k.modulus, detail::parse_modulus);
        s.get("potential", k.potential);
        s.get("drift", k.drift);
    });
    r.object("modulus", c.modulus, detail::parse_modulus);
    r.object("grids", c, [](FieldReader& g, ExperimentConfig& cc) {
        g.object("t", cc.t_grid, detail::parse_grid);
        g.object("xi", cc.xi_grid, detail::parse_xi_grid);
        g.object("epsilon", cc.eps_grid, detail::parse_grid);
    });
    r.object("params", c.params, [](FieldReader& s, ParamPack& p) {
        s.get("gamma", p.gamma);
        s.get("beta", p.beta);
        s.get("tau", p.tau);
        s.get("alpha", p.alpha);
        s.get("sigma", p.sigma);
        s.get("sigma_bar", p.sigma_bar);
        s.get("lambda", p.lambda);
        s.get("D", p.D);
        s.get("T", p.T);
        s.get("T_prime", p.T_prime);
        s.get("k_A", p.k_A);
    });
    r.object("tolerances", c.tolerances, [](FieldReader& s, Tolerances& t) {
        s.get("axiom_tol", t.axiom_tol);
        s.get("ode_rel_tol", t.ode_rel_tol);
        s.get("quad_rel_tol", t.quad_rel_tol);
    });
    r.object("output", c.output, [](FieldReader& s, OutputSpec& o) {
        s.get("csv", o.csv);
        s.get("manifest", o.manifest);
    });
    r.object("weights", c.weights, [](FieldReader& s, WeightsSpec& w) {
        s.get("form", w.form);
        s.get("y0", w.y0);
        s.get("psi0", w.psi0);
        s.get("phi0", w.phi0);
        s.get("y1", w.y1);
        s.get("points", w.points);
    });
    r.object("evolve", c.evolve, [](FieldReader& s, EvolveSpec& e) {
        s.get("data", e.data);
        if (const json* modes = s.find("modes")) {
            if (!modes->is_array()) throw ValidationError(s.field("modes"), "expected an array");
            e.modes.clear();
            for (std::size_t i = 0; i < modes->size(); ++i) {
                ModeSpec m;
                FieldReader mr((*modes)[i], s.field("modes[" + std::to_string(i) + "]"));
                mr.get("xi", m.xi);
                mr.get("re", m.re);
                mr.get("im", m.im);
                mr.finish();
                e.modes.push_back(m);
            }
        }
        s.get("eps", e.eps);
        s.get("K", e.K);
    });
    r.object("energy", c.energy, [](FieldReader& s, EnergySpec& e) {
        s.get("check", e.check);
        s.get("constants", e.constants);
        s.get("frequencies", e.frequencies);
        s.get("check_times", e.check_times);
        s.get("psi0", e.psi0);
        s.get("phi0", e.phi0);
        s.get("eps", e.eps);
        s.get("K", e.K);
        s.get("z_points", e.z_points);
        s.get("anchor_at_end", e.anchor_at_end);
        s.get("y_anchor", e.y_anchor);
    });
    r.object("stability", c.stability, [](FieldReader& s, StabilitySpec& st) { s.get("bound_kind", st.bound_kind); });
    r.object("divergence", c.divergence, [](FieldReader& s, DivergenceSpec& d) {
        s.get("target", d.target);
        s.get("k_max", d.k_max);
        s.get("ratio", d.ratio);
        s.get("deltas", d.deltas);
        s.get("N", d.N);
        s.get("amplitude", d.amplitude);
        s.get("base", d.base);
        s.get("xi_scale", d.xi_scale);
        s.get("t_window_decay", d.t_window_decay);
        s.get("t_grid_points", d.t_grid_points);
        s.get("seminorm_points", d.seminorm_points);
        s.get("amp_scale", d.amp_scale);
        s.get("fixed_frequency", d.fixed_frequency);
    });
    r.finish();
    return c;
}

inline std::string serialize(const ExperimentConfig& c) { return to_json(c).dump(2) + "\n"; }

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ValidationError(field, what);
}

inline void validate_grid(const GridSpec& g, const std::string& field, bool positive) {
    require(g.spacing == "linear" || g.spacing == "log" || g.spacing == "explicit", field + ".spacing",
            "must be linear, log or explicit");
    if (g.spacing == "explicit") {
        require(!g.values.empty(), field + ".values", "grid must be nonempty");
    } else {
        require(g.count >= 1, field + ".count", "grid must be nonempty");
        if (g.spacing == "log") require(g.start > 0.0 && g.stop > 0.0, field, "log grid needs positive limits");
    }
    if (positive)
        for (double v : g.expand()) require(v > 0.0, field, "values must be positive");
}

inline void validate_modulus(const ModulusSpec& m, const std::string& field) {
    try {
        (void)m.build();
    } catch (const std::exception& e) {
        throw ValidationError(field, e.what());
    }
}

} // namespace detail

/// Semantic checks. Throws ValidationError naming the offending field.
inline void validate(const ExperimentConfig& c) {
    using detail::require;
    const auto& kinds = experiment_kinds();
    require(std::find(kinds.begin(), kinds.end(), c.kind) != kinds.end(), "kind", "unknown experiment kind '" + c.kind + "'");

    const auto& p = c.params;
    require(p.T > 0.0, "params.T", "must be positive");
    require(p.T_prime > 0.0, "params.T_prime", "must be positive");
    require(p.T_prime < p.T, "params.T_prime", "must be smaller than params.T");
    require(p.k_A > 0.0 && p.k_A < 1.0, "params.k_A", "must lie in (0, 1)");
    require(p.D > 0.0, "params.D", "must be positive");
    require(p.beta > 0.0, "params.beta", "must be positive");
    require(p.tau > 0.0, "params.tau", "must be positive");
    require(p.sigma > 0.0 && p.sigma <= p.T, "params.sigma", "must lie in (0, T]");
    require(p.sigma_bar >= 0.0 && p.sigma_bar <= p.sigma, "params.sigma_bar", "must lie in [0, sigma]");
    require(p.lambda >= 0.0, "params.lambda", "must be nonnegative");

    const auto& k = c.coefficients;
    require(k.family == "constant" || k.family == "affine" || k.family == "synthesized", "coefficients.family",
            "must be constant, affine or synthesized");
    require(k.dim >= 1 && k.dim <= 3, "coefficients.dim", "must be 1, 2 or 3");
    require(k.drift.empty() || k.drift.size() == k.dim, "coefficients.drift", "needs one entry per dimension");
    detail::validate_modulus(k.modulus, "coefficients.modulus");
    detail::validate_modulus(c.modulus, "modulus");
    try {
        (void)k.build(p.k_A, p.T);
    } catch (const std::exception& e) {
        throw ValidationError("coefficients", e.what());
    }

    detail::validate_grid(c.t_grid, "grids.t", false);
    detail::validate_grid(c.eps_grid, "grids.epsilon", false);
    require(c.xi_grid.dim == k.dim, "grids.xi.dim", "must equal coefficients.dim");
    require(c.xi_grid.xi_max > 0.0 && c.xi_grid.step > 0.0, "grids.xi", "xi_max and step must be positive");
    require(c.xi_grid.geometric_levels >= 0, "grids.xi.geometric_levels", "must be nonnegative");
    require(!c.output.csv.empty(), "output.csv", "must be nonempty");
    require(!c.output.manifest.empty(), "output.manifest", "must be nonempty");
    require(c.tolerances.quad_rel_tol > 0.0, "tolerances.quad_rel_tol", "must be positive");
    require(c.tolerances.ode_rel_tol > 0.0, "tolerances.ode_rel_tol", "must be positive");
    require(c.tolerances.axiom_tol >= 0.0, "tolerances.axiom_tol", "must be nonnegative");

    if (c.kind == "moduli-check") {
        detail::validate_grid(c.eps_grid, "grids.epsilon", true);
        auto t = c.t_grid.expand();
        require(t.size() >= 3, "grids.t", "axiom grid needs at least 3 points");
        for (double v : t) require(v > 0.0 && v <= 1.0, "grids.t", "axiom grid must lie in (0, 1]");
        require(std::is_sorted(t.begin(), t.end()), "grids.t", "axiom grid must be sorted");
    } else if (c.kind == "weights-solve") {
        require(c.weights.has_value(), "weights", "required for kind weights-solve");
        const auto& w = *c.weights;
        require(w.form == "osgood" || w.form == "loglip", "weights.form", "must be osgood or loglip");
        require(w.y0 > 0.0, "weights.y0", "must be positive");
        require(w.y1 > w.y0, "weights.y1", "must exceed weights.y0");
        require(w.psi0 > 0.0, "weights.psi0", "must be positive");
        require(w.points >= 2, "weights.points", "need at least 2 points");
    } else if (c.kind == "evolve") {
        require(c.evolve.has_value(), "evolve", "required for kind evolve");
        const auto& e = *c.evolve;
        require(e.data == "modes" || e.data == "gaussian", "evolve.data", "must be modes or gaussian");
        if (e.data == "modes") {
            require(!e.modes.empty(), "evolve.modes", "must be nonempty");
            for (std::size_t i = 0; i < e.modes.size(); ++i)
                require(e.modes[i].xi.size() == k.dim, "evolve.modes[" + std::to_string(i) + "].xi",
                        "must have coefficients.dim entries");
        } else {
            require(e.K > 0.0, "evolve.K", "must be positive");
        }
        for (double t : c.t_grid.expand()) require(t >= 0.0 && t <= p.T, "grids.t", "times must lie in [0, T]");
    } else if (c.kind == "energy-check") {
        require(c.energy.has_value(), "energy", "required for kind energy-check");
        const auto& e = *c.energy;
        require(e.check == "mode" || e.check == "loglip" || e.check == "stima_prima", "energy.check",
                "must be mode, loglip or stima_prima");
        require(!e.constants.empty(), "energy.constants", "must be nonempty");
        require(std::is_sorted(e.constants.begin(), e.constants.end()), "energy.constants", "must be increasing");
        require(e.K > 0.0, "energy.K", "must be positive");
        if (e.check == "mode") {
            require(!e.frequencies.empty(), "energy.frequencies", "must be nonempty");
            for (const auto& xi : e.frequencies)
                require(xi.size() == k.dim, "energy.frequencies", "must have coefficients.dim entries");
            require(e.psi0 > p.k_A, "energy.psi0", "must exceed params.k_A");
            if (e.anchor_at_end && !e.check_times.empty()) {
                const double s_max = *std::max_element(e.check_times.begin(), e.check_times.end());
                require(e.y_anchor >= (s_max + p.tau) / p.beta, "energy.y_anchor",
                        "must be at least (max check_times + tau) / beta");
            }
        }
        if (e.check != "stima_prima") {
            require(!e.check_times.empty(), "energy.check_times", "must be nonempty");
            for (double s : e.check_times) require(s > 0.0 && s <= p.T, "energy.check_times", "must lie in (0, T]");
        }
        require(e.z_points >= 1, "energy.z_points", "must be positive");
    } else if (c.kind == "stability-modulus") {
        require(c.stability.has_value(), "stability", "required for kind stability-modulus");
        try {
            (void)bound_kind_from_string(c.stability->bound_kind);
        } catch (const std::exception& e) {
            throw ValidationError("stability.bound_kind", e.what());
        }
        for (double e : c.eps_grid.expand()) require(e >= 0.0, "grids.epsilon", "values must be nonnegative");
    } else if (c.kind == "divergence") {
        require(c.divergence.has_value(), "divergence", "required for kind divergence");
        const auto& d = *c.divergence;
        require(d.k_max >= 1 && d.k_max <= 40, "divergence.k_max", "must lie in [1, 40]");
        require(d.target != "custom", "divergence.target", "must be a canonical modulus");
        try {
            (void)modulus_tag_from_string(d.target);
        } catch (const std::exception& e) {
            throw ValidationError("divergence.target", e.what());
        }
        require(d.ratio == "hoelder" || d.ratio == "loglip", "divergence.ratio", "must be hoelder or loglip");
        require(!d.deltas.empty(), "divergence.deltas", "must be nonempty");
        for (double v : d.deltas) require(v > 0.0 && v < 1.0, "divergence.deltas", "must lie in (0, 1)");
        require(d.N > 0.0, "divergence.N", "must be positive");
        require(d.xi_scale > 0.0, "divergence.xi_scale", "must be positive");
        require(d.t_grid_points >= 1, "divergence.t_grid_points", "must be positive");
        require(d.seminorm_points >= 2, "divergence.seminorm_points", "need at least 2");
    }
}

} // namespace osgoodlab

#endif // OSGOODLAB_CONFIG_HPP

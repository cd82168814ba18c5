#ifndef OSGOODLAB_HARNESS_HPP
#define OSGOODLAB_HARNESS_HPP

#include "osgoodlab/coefficients.hpp"
#include "osgoodlab/config.hpp"
#include "osgoodlab/divergence.hpp"
#include "osgoodlab/errors.hpp"
#include "osgoodlab/estimates.hpp"
#include "osgoodlab/io.hpp"
#include "osgoodlab/moduli.hpp"
#include "osgoodlab/spectral.hpp"
#include "osgoodlab/weights.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

namespace osgoodlab {

inline constexpr const char* software_version = "1.0.0";

enum ExitCode : int { exit_success = 0, exit_failure = 1, exit_validation = 2, exit_overflow = 3 };

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::size_t threads = 1;
    std::uint64_t seed = 0;
};

struct RunReport {
    int exit_code = exit_success;
    std::vector<std::string> diagnostics;
    std::vector<std::string> warnings;
    std::filesystem::path csv_path;
    std::filesystem::path manifest_path;
};

/// Parse error or validation failure located in the configuration text.
class ConfigError : public ParameterError {
public:
    ConfigError(int line, std::string field, const std::string& what)
        : ParameterError(what), line_(line), field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

    std::string diagnostic(const std::string& source) const {
        std::ostringstream msg;
        msg << source;
        if (line_ > 0) msg << ":" << line_;
        msg << ": ";
        if (!field_.empty()) msg << "field '" << field_ << "': ";
        msg << what();
        return msg.str();
    }

private:
    int line_;
    std::string field_;
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line of the deepest key of a field path ("params.T_prime" -> line of "T_prime").
inline int line_of_field(const std::string& text, const std::string& field) {
    std::string key = field;
    if (auto dot = key.rfind('.'); dot != std::string::npos) key = key.substr(dot + 1);
    if (auto br = key.find('['); br != std::string::npos) key = key.substr(0, br);
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

} // namespace detail

/// Parses and validates configuration text.
inline ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(detail::line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), "", e.what());
    }
    try {
        auto c = from_json(j);
        validate(c);
        return c;
    } catch (const ValidationError& e) {
        throw ConfigError(detail::line_of_field(text, e.field()), e.field(), e.what());
    }
}

namespace detail {

struct KindOutput {
    io::CsvTable csv{{}};
    json results = json::object();
    std::vector<std::string> warnings;
};

inline std::vector<std::vector<double>> frequency_list(const FrequencyGridSpec& g) {
    const auto nodes = frequency_nodes_1d(g);
    std::vector<std::vector<double>> out;
    if (g.dim == 1) {
        for (double x : nodes) out.push_back({x});
    } else {
        for (double x : nodes)
            for (double y : nodes) out.push_back({x, y});
    }
    return out;
}

inline std::vector<std::string> xi_columns(const std::string& prefix, std::size_t dim) {
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < dim; ++i) cols.push_back(prefix + std::to_string(i + 1));
    return cols;
}

inline std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline json nullable(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline KindOutput run_moduli_check(const ExperimentConfig& c) {
    KindOutput out;
    const auto mu = c.modulus.build();
    const auto t = c.t_grid.expand();
    const auto ax = check_axioms(mu, t, c.tolerances.axiom_tol);
    auto eps = c.eps_grid.expand();
    std::sort(eps.begin(), eps.end(), std::greater<>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    OsgoodHeuristic h;
    h.quad_rel_tol = c.tolerances.quad_rel_tol;
    const auto r = osgood_indicator(mu, eps, h);

    out.csv = io::CsvTable({"epsilon", "integral", "increment_ratio"});
    for (std::size_t i = 0; i < r.epsilons.size(); ++i) {
        out.csv.row().add(r.epsilons[i]).add(r.integrals[i]);
        if (i == 0) out.csv.add("nan");
        else out.csv.add(r.increment_ratios[i - 1]);
    }
    const auto cs = c.coefficients.build(c.params.k_A, c.params.T);
    std::vector<double> samples(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) samples[i] = cs.diffusion[0](t[i]);
    out.results = {{"modulus", mu.label},
                   {"valid_upper", mu.valid_upper},
                   {"axioms", {{"increasing", ax.increasing}, {"concave", ax.concave}, {"vanishes_at_zero", ax.vanishes_at_zero}}},
                   {"classification", to_string(r.classification)},
                   {"extrapolated_limit", nullable(r.extrapolated_limit)},
                   {"coefficient_seminorm", seminorm(t, samples, mu)}};
    if (mu.truncated()) {
        std::ostringstream msg;
        msg << "modulus " << mu.label << " is extended linearly beyond s=" << mu.valid_upper;
        out.warnings.push_back(msg.str());
    }
    return out;
}

inline KindOutput run_weights_solve(const ExperimentConfig& c) {
    KindOutput out;
    const auto& w = *c.weights;
    WeightSolveOptions opt;
    opt.rel_tol = c.tolerances.ode_rel_tol;
    const auto wf = w.form == "loglip"
                        ? solve_loglip_weight(c.params.lambda, w.y0, w.psi0, w.phi0, w.y1, opt)
                        : solve_osgood_weight(c.params.lambda, c.params.k_A, c.modulus.build(), w.y0, w.psi0,
                                              w.phi0, w.y1, opt);
    out.csv = io::CsvTable({"y", "phi", "psi"});
    for (double y : linspace(wf.y0, wf.y1, w.points)) {
        const auto [phi, psi] = wf.evaluate(y);
        out.csv.row().add(y).add(phi).add(psi);
    }
    out.results = {{"form", w.form}, {"y_end", wf.y1}, {"truncated", wf.truncated}, {"nodes", wf.nodes.size()}};
    if (wf.truncated) out.warnings.push_back(wf.warning);
    return out;
}

inline SpectralField initial_field(const ExperimentConfig& c, const std::string& data, const std::vector<ModeSpec>& modes,
                                   double eps, double K) {
    if (data == "gaussian") return gaussian_data(c.coefficients.dim, eps, K, c.xi_grid);
    SpectralField f;
    f.dim = c.coefficients.dim;
    for (const auto& m : modes) f.modes.push_back({m.xi, {m.re, m.im}, 1.0});
    f.validate();
    return f;
}

inline KindOutput run_evolve(const ExperimentConfig& c, std::size_t threads) {
    KindOutput out;
    const auto& e = *c.evolve;
    const auto cs = c.coefficients.build(c.params.k_A, c.params.T);
    const auto field = initial_field(c, e.data, e.modes, e.eps, e.K);
    const auto order = field.summation_order();
    out.csv = io::CsvTable(concat(concat({"t", "mode"}, xi_columns("xi_", field.dim)), {"re", "im", "abs"}));
    json norms = json::array();
    for (double t : c.t_grid.expand()) {
        const auto u = evolve(field, cs, t, threads);
        for (std::size_t idx = 0; idx < order.size(); ++idx) {
            const auto& m = u.modes[order[idx]];
            out.csv.row().add(t).add(idx);
            for (double x : m.xi) out.csv.add(x);
            out.csv.add(m.amp.real()).add(m.amp.imag()).add(std::abs(m.amp));
        }
        norms.push_back({{"t", t}, {"l2", l2_norm(u)}});
    }
    out.results = {{"modes", field.modes.size()}, {"closed_form_symbol", cs.has_closed_form_symbol()}, {"norms", norms}};
    return out;
}

inline KindOutput run_energy_check(const ExperimentConfig& c, std::size_t threads) {
    KindOutput out;
    const auto& e = *c.energy;
    const auto& p = c.params;
    const auto cs = c.coefficients.build(p.k_A, p.T);
    const auto omega = c.modulus.build();
    WeightSolveOptions wopt;
    wopt.rel_tol = c.tolerances.ode_rel_tol;

    if (e.check == "mode") {
        LambdaSweepSetup s;
        s.cs = cs;
        s.frequencies = e.frequencies;
        s.sigmas = e.check_times;
        s.gamma = p.gamma;
        s.beta = p.beta;
        s.tau = p.tau;
        s.alpha = p.alpha;
        s.k_A = p.k_A;
        s.omega = omega;
        s.psi0 = e.psi0;
        s.phi0 = e.phi0;
        s.anchor_at_end = e.anchor_at_end;
        s.y_anchor = e.y_anchor;
        s.threads = threads;
        const auto r = sweep_lambda(s, e.constants);
        out.csv = io::CsvTable(concat(concat({"lambda", "holds", "weight_truncated", "worst_ratio"},
                                             xi_columns("worst_xi_", cs.dim)),
                                      {"worst_sigma"}));
        for (const auto& en : r.entries) {
            out.csv.row().add(en.lambda).add(en.holds).add(en.weight_truncated).add(en.worst_margin_ratio);
            for (std::size_t i = 0; i < cs.dim; ++i) out.csv.add(en.worst_xi.empty() ? 0.0 : en.worst_xi[i]);
            out.csv.add(en.worst_sigma);
        }
        out.results = {{"check", "mode"}, {"lambda_star", nullable(r.lambda_star)}};
        if (!r.lambda_star) out.warnings.push_back("no lambda in the sweep satisfies the inequality");
        return out;
    }

    Trajectory traj{gaussian_data(cs.dim, e.eps, e.K, c.xi_grid), cs, threads};
    EnergyEstimateParams ep;
    ep.gamma = p.gamma;
    ep.beta = p.beta;
    ep.tau = p.tau;
    ep.alpha = p.alpha;
    ep.sigma = p.sigma;
    ep.sigma_bar = p.sigma_bar;
    ep.lambda = p.lambda;
    ep.omega = omega;
    ep.k_A = p.k_A;

    if (e.check == "loglip") {
        const double s_max = *std::max_element(e.check_times.begin(), e.check_times.end());
        ep.weight = solve_loglip_weight(p.lambda, p.tau / p.beta, e.psi0, e.phi0, (s_max + p.tau) / p.beta, wopt);
        if (ep.weight.truncated) out.warnings.push_back(ep.weight.warning);
        out.csv = io::CsvTable({"s", "M", "lhs", "rhs", "holds"});
        json minimal = json::array();
        for (double s : e.check_times) {
            const auto base = check_loglip_energy(traj, ep, 1.0, s);
            const auto m_star = sweep_minimal(e.constants, [&](double M) { return base.lhs <= M * base.rhs; });
            for (double M : e.constants) {
                const auto chk = make_check(base.lhs, M * base.rhs);
                out.csv.row().add(s).add(M).add(chk.lhs).add(chk.rhs).add(chk.holds);
            }
            minimal.push_back({{"s", s}, {"M_min", nullable(m_star)}});
        }
        out.results = {{"check", "loglip"}, {"minimal", minimal},
                       {"sign_note", "first right-hand term uses exp(+2 beta phi((s+tau)/beta)) as printed"}};
        return out;
    }

    ep.weight = solve_osgood_weight(p.lambda, p.k_A, omega, p.tau / p.beta, e.psi0, e.phi0,
                                    (p.sigma + p.tau) / p.beta, wopt);
    if (ep.weight.truncated) out.warnings.push_back(ep.weight.warning);
    const auto base = check_stima_prima(traj, ep, 1.0, e.z_points);
    const auto c_star = sweep_minimal(e.constants, [&](double C) { return base.lhs <= C * base.rhs; });
    out.csv = io::CsvTable({"C", "lhs", "rhs", "holds"});
    for (double C : e.constants) {
        const auto chk = make_check(base.lhs, C * base.rhs);
        out.csv.row().add(C).add(chk.lhs).add(chk.rhs).add(chk.holds);
    }
    out.results = {{"check", "stima_prima"}, {"C_min", nullable(c_star)}, {"sigma_bar", p.sigma_bar}};
    return out;
}

inline KindOutput run_stability_modulus(const ExperimentConfig& c, std::size_t threads) {
    KindOutput out;
    const auto& p = c.params;
    StabilityModulusInput in;
    in.cs = c.coefficients.build(p.k_A, p.T);
    in.D = p.D;
    in.T = p.T;
    in.T_prime = p.T_prime;
    in.epsilons = c.eps_grid.expand();
    in.frequencies = frequency_list(c.xi_grid);
    in.t_grid = c.t_grid.expand();
    in.threads = threads;
    const auto table = stability_modulus(in);
    const auto kind = bound_kind_from_string(c.stability->bound_kind);
    const auto b = fit_bound(table, kind);

    out.csv = io::CsvTable({"epsilon", "S", "bound_kind", "M", "delta", "N", "beta", "t_star"});
    for (const auto& r : table.rows)
        out.csv.row().add(r.epsilon).add(r.S).add(to_string(kind)).add(b.M).add(b.delta).add(b.N).add(b.beta).add(r.t_star);

    const auto t = in.t_grid;
    std::vector<double> samples;
    std::vector<double> ts;
    for (double v : t)
        if (v >= 0.0 && v <= p.T) {
            ts.push_back(v);
            samples.push_back(in.cs.diffusion[0](v));
        }
    json fit = {{"kind", to_string(kind)}, {"M", b.M}, {"delta", b.delta}, {"N", b.N}, {"beta", b.beta},
                {"residual", b.residual}, {"strictly_increasing", b.strictly_increasing},
                {"max_upward_jump", b.max_upward_jump}};
    out.results = {{"fit", fit}, {"distinct_modes", table.distinct_modes},
                   {"objective_times", table.objective_times}, {"constraint_times", table.constraint_times}};
    if (ts.size() >= 2) out.results["coefficient_seminorm"] = seminorm(ts, samples, c.modulus.build());
    return out;
}

inline KindOutput run_divergence(const ExperimentConfig& c) {
    KindOutput out;
    const auto& d = *c.divergence;
    const auto& p = c.params;
    DivergenceTuning tu;
    tu.amplitude = d.amplitude;
    tu.base = d.base;
    tu.xi_scale = d.xi_scale;
    tu.D = p.D;
    tu.T = p.T;
    tu.T_prime = p.T_prime;
    tu.k_A = p.k_A;
    tu.t_window_decay = d.t_window_decay;
    tu.t_grid_points = d.t_grid_points;
    tu.seminorm_points = d.seminorm_points;
    tu.amp_scale = d.amp_scale;
    tu.fixed_frequency = d.fixed_frequency;
    tu.hoelder_tau = c.modulus.tau;
    const auto fam = build_family(modulus_tag_from_string(d.target), d.k_max, tu);
    if (fam.truncated) out.warnings.push_back(fam.warning);

    out.csv = io::CsvTable({"delta", "k", "h_k", "xi_k", "t_k", "norm0", "norm_tk", "ratio", "excluded"});
    bool elliptic = true;
    for (const auto& m : fam.members) elliptic = elliptic && m.ellipticity;
    for (double delta : d.deltas) {
        const auto rs = d.ratio == "loglip" ? loglip_ratio(fam, d.N, delta) : hoelder_ratio(fam, delta);
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const auto& m = fam.members[i];
            out.csv.row().add(delta).add(m.k).add(m.h).add(m.xi).add(m.t_k).add(m.norm0).add(m.norm_tk).add(rs[i].ratio).add(rs[i].excluded);
        }
    }
    out.results = {{"target", d.target},
                   {"members", fam.members.size()},
                   {"seminorm_bound", fam.seminorm_bound},
                   {"max_seminorm", fam.max_seminorm()},
                   {"ellipticity", elliptic},
                   {"truncated", fam.truncated},
                   {"schedule", {{"h_k", "2^-k"}, {"xi_k", d.fixed_frequency ? "c" : "c*2^(k/2)"}, {"c", d.xi_scale},
                                 {"t_k_window", "T_prime*k^-p"}, {"p", d.t_window_decay}}}};
    return out;
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace detail

/// Runs a validated configuration and writes the CSV and manifest atomically.
/// Numerical aborts propagate as exceptions; see run_config_text for exit codes.
inline RunReport run(const ExperimentConfig& c, const RunOptions& opt) {
    validate(c);
    detail::KindOutput out;
    const std::size_t threads = std::max<std::size_t>(1, opt.threads);
    if (c.kind == "moduli-check") out = detail::run_moduli_check(c);
    else if (c.kind == "weights-solve") out = detail::run_weights_solve(c);
    else if (c.kind == "evolve") out = detail::run_evolve(c, threads);
    else if (c.kind == "energy-check") out = detail::run_energy_check(c, threads);
    else if (c.kind == "stability-modulus") out = detail::run_stability_modulus(c, threads);
    else out = detail::run_divergence(c);

    RunReport rep;
    rep.warnings = out.warnings;
    rep.csv_path = opt.out_dir / c.output.csv;
    rep.manifest_path = opt.out_dir / c.output.manifest;

    const std::string serialized = serialize(c);
    json manifest;
    manifest["software"] = {{"name", "osgoodlab"}, {"version", software_version}};
    manifest["timestamp"] = detail::utc_timestamp();
    manifest["kind"] = c.kind;
    manifest["config_hash"] = io::fnv1a_hex(serialized);
    manifest["seed"] = opt.seed;
    manifest["config"] = to_json(c);
    manifest["expanded_grids"] = {{"t", c.t_grid.expand()},
                                  {"epsilon", c.eps_grid.expand()},
                                  {"xi_nodes_1d", frequency_nodes_1d(c.xi_grid)}};
    manifest["results"] = out.results;
    manifest["warnings"] = out.warnings;
    manifest["csv"] = c.output.csv;

    io::write_atomic(rep.csv_path, out.csv.str());
    io::write_atomic(rep.manifest_path, manifest.dump(2) + "\n");
    return rep;
}

/// Parses, validates and runs configuration text, mapping failures to exit
/// codes: 2 for validation, 3 for overflow, 1 for other numerical failures.
inline RunReport run_config_text(const std::string& text, const std::string& source, const RunOptions& opt,
                                 const std::string& expected_kind = "") {
    RunReport rep;
    try {
        const auto c = parse_config(text);
        if (!expected_kind.empty() && c.kind != expected_kind) {
            rep.exit_code = exit_validation;
            rep.diagnostics.push_back(source + ":" + std::to_string(detail::line_of_field(text, "kind")) +
                                      ": field 'kind': config is '" + c.kind + "' but subcommand is '" +
                                      expected_kind + "'");
            return rep;
        }
        rep = run(c, opt);
    } catch (const ConfigError& e) {
        rep.exit_code = exit_validation;
        rep.diagnostics.push_back(e.diagnostic(source));
    } catch (const OverflowAbort& e) {
        rep.exit_code = exit_overflow;
        rep.diagnostics.push_back(std::string("numerical abort (overflow): ") + e.what());
    } catch (const ParameterError& e) {
        rep.exit_code = exit_validation;
        rep.diagnostics.push_back(source + ": " + e.what());
    } catch (const std::exception& e) {
        rep.exit_code = exit_failure;
        rep.diagnostics.push_back(std::string("error: ") + e.what());
    }
    return rep;
}

} // namespace osgoodlab

#endif // OSGOODLAB_HARNESS_HPP

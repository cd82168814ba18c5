#include "osgoodlab/estimates.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace osgoodlab;

namespace {

CoefficientSet unit(std::size_t dim = 1) {
    return CoefficientSet::isotropic(dim, ScalarFunction::constant(1.0), 0.5, 1.0);
}

std::vector<std::vector<double>> default_frequencies() {
    std::vector<std::vector<double>> out;
    for (double x : frequency_nodes_1d(FrequencyGridSpec{})) out.push_back({x});
    return out;
}

EnergyEstimateParams lipschitz_params(double lambda, double sigma) {
    EnergyEstimateParams p;
    p.gamma = 1.0;
    p.beta = 1.0;
    p.tau = 0.1;
    p.alpha = 0.5;
    p.sigma = sigma;
    p.sigma_bar = sigma;
    p.lambda = lambda;
    p.k_A = 0.5;
    p.omega = make_canonical(ModulusTag::lipschitz);
    p.weight = solve_osgood_weight(lambda, 0.5, p.omega, 0.1, 20.0, 0.0, 1.2);
    return p;
}

// phi for the Lipschitz-omega weight psi = psi0 (y0/y)^m, m = lambda k_A != 1.
double phi_exact(double lambda, double y) {
    const double m = lambda * 0.5, y0 = 0.1, psi0 = 20.0;
    return psi0 * std::pow(y0, m) * (std::pow(y, 1.0 - m) - std::pow(y0, 1.0 - m)) / (1.0 - m);
}

template <class F>
double simpson(F&& f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

} // namespace

TEST(ModeEnergy, ZeroAmplitudeDegenerate) {
    const auto p = lipschitz_params(3.0, 0.3);
    const auto c = check_mode_energy(unit(), {1.0}, 0.0, p);
    EXPECT_EQ(c.lhs, 0.0);
    EXPECT_EQ(c.rhs, 0.0);
    EXPECT_TRUE(c.holds);
}

TEST(ModeEnergy, MatchesIndependentQuadrature) {
    const double lambda = 3.0, xi = 2.0, r2 = xi * xi;
    const std::complex<double> amp0{0.7, 0.0};
    const auto p = lipschitz_params(lambda, 0.3);
    const auto c = check_mode_energy(unit(), {xi}, amp0, p);

    const double w = r2 / (r2 + 1.0);
    auto integrand = [&](double t) {
        return std::exp((1.0 - p.alpha * t) * w + 2.0 * p.gamma * t - 2.0 * phi_exact(lambda, t + 0.1) + 2.0 * r2 * t);
    };
    const double lhs = 0.25 * (0.5 * r2 + 1.0) * simpson(integrand, 0.0, 0.3, 20000) * std::norm(amp0);
    const double psi_tau = 20.0;
    const double rhs = (psi_tau * 0.1 * std::exp(w) * std::exp(-2.0 * phi_exact(lambda, 0.1)) +
                        0.4 * (1.0 + r2 / 0.5) * std::exp(0.6) * std::exp(-2.0 * phi_exact(lambda, 0.4)) *
                            std::exp(2.0 * r2 * 0.3)) *
                       std::norm(amp0);
    EXPECT_NEAR(c.lhs, lhs, 1e-7 * lhs);
    EXPECT_NEAR(c.rhs, rhs, 1e-7 * rhs);
    EXPECT_EQ(c.holds, c.lhs <= c.rhs);
}

TEST(ModeEnergy, VanishingIntervalHolds) {
    const auto p = lipschitz_params(1.0, 1e-6);
    const auto c = check_mode_energy(unit(), {5.0}, 1.0, p);
    EXPECT_TRUE(c.holds);
    EXPECT_LT(c.lhs, 1e-4 * c.rhs);
}

TEST(ModeEnergy, WeightDomainViolation) {
    auto p = lipschitz_params(1.0, 0.3);
    p.weight = solve_osgood_weight(1.0, 0.5, p.omega, 0.1, 20.0, 0.0, 0.3);
    EXPECT_THROW(check_mode_energy(unit(), {1.0}, 1.0, p), ParameterError);
}

TEST(LambdaSweep, FindsThresholdAndStaysTrue) {
    LambdaSweepSetup s;
    s.cs = unit();
    s.frequencies = {{1.0}};
    s.sigmas = {0.05, 0.1};
    s.psi0 = 4.0;
    s.anchor_at_end = true;
    s.y_anchor = 0.2;
    const auto r = sweep_lambda(s, logspace(0.1, 5.0, 30));
    ASSERT_TRUE(r.lambda_star.has_value());
    bool seen = false;
    for (const auto& e : r.entries) {
        if (e.lambda >= *r.lambda_star && !e.weight_truncated) {
            EXPECT_TRUE(e.holds) << e.lambda;
            seen = true;
        }
        if (e.lambda < *r.lambda_star) {
            EXPECT_FALSE(e.holds);
        }
    }
    EXPECT_TRUE(seen);
}

TEST(LambdaSweep, AnchorMustCoverDomain) {
    LambdaSweepSetup s;
    s.cs = unit();
    s.frequencies = {{1.0}};
    s.sigmas = {0.5};
    s.anchor_at_end = true;
    s.y_anchor = 0.2;
    EXPECT_THROW(check_lambda(s, 1.0), ParameterError);
    s.sigmas.clear();
    EXPECT_THROW(sweep_lambda(s, {1.0}), ParameterError);
}

TEST(LoglipEnergy, ZeroFieldAndSmallInterval) {
    EnergyEstimateParams p;
    p.lambda = 1.0;
    p.alpha = 0.5;
    p.weight = solve_loglip_weight(1.0, 0.1, 10.0, 0.0, 1.1);
    Trajectory zero{gaussian_data(1, 0.0, 1.0, FrequencyGridSpec{}), unit()};
    const auto z = check_loglip_energy(zero, p, 1.0, 0.5);
    EXPECT_TRUE(z.holds);
    EXPECT_EQ(z.lhs, 0.0);

    FrequencyGridSpec g;
    g.xi_max = 6.0;
    Trajectory u{gaussian_data(1, 1.0, 1.0, g), unit()};
    const auto c = check_loglip_energy(u, p, 1.0, 1e-6);
    EXPECT_TRUE(c.holds);
    EXPECT_GE(c.rhs, 0.0);
}

TEST(LoglipEnergy, MinimalConstantAndMonotonicity) {
    EnergyEstimateParams p;
    p.lambda = 1.0;
    p.alpha = 0.5;
    p.weight = solve_loglip_weight(1.0, 0.1, 10.0, 0.0, 1.1);
    FrequencyGridSpec g;
    g.xi_max = 6.0;
    Trajectory u{gaussian_data(1, 1.0, 1.0, g), unit()};
    const auto base = check_loglip_energy(u, p, 1.0, 0.5);
    const auto Ms = logspace(1e-3, 1e3, 61);
    const auto m = sweep_minimal(Ms, [&](double M) { return check_loglip_energy(u, p, M, 0.5).holds; });
    ASSERT_TRUE(m.has_value());
    EXPECT_GE(*m * base.rhs, base.lhs);
    for (double M : Ms) EXPECT_EQ(check_loglip_energy(u, p, M, 0.5).holds, M >= *m);
}

TEST(StimaPrima, DegenerateCases) {
    EnergyEstimateParams p;
    p.sigma = 0.3;
    p.sigma_bar = 0.0;
    p.omega = make_canonical(ModulusTag::iterated_log);
    p.weight = solve_osgood_weight(0.05, 0.5, p.omega, 0.1, 20.0, 0.0, 0.4);
    Trajectory zero{gaussian_data(1, 0.0, 1.0, FrequencyGridSpec{}), unit()};
    EXPECT_TRUE(check_stima_prima(zero, p, 1.0).holds);

    FrequencyGridSpec g;
    g.xi_max = 6.0;
    Trajectory u{gaussian_data(1, 1.0, 1.0, g), unit()};
    const auto c = check_stima_prima(u, p, 1.0);
    EXPECT_EQ(c.lhs, weighted_norm_squared(u.initial, {1.0, 0.5, p.omega}));

    p.sigma_bar = 0.2;
    const auto d = check_stima_prima(u, p, 1.0);
    EXPECT_GT(d.lhs, c.lhs);
    const std::vector<double> Cs = logspace(1e-2, 1e6, 81);
    const auto cmin = sweep_minimal(Cs, [&](double C) { return check_stima_prima(u, p, C).holds; });
    ASSERT_TRUE(cmin.has_value());
    EXPECT_TRUE(check_stima_prima(u, p, Cs.back()).holds);

    p.sigma_bar = 0.5;
    EXPECT_THROW(check_stima_prima(u, p, 1.0), ParameterError);
}

TEST(StabilityModulus, FrozenLipschitzTable) {
    StabilityModulusInput in;
    in.cs = unit();
    in.epsilons = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
    in.frequencies = default_frequencies();
    in.t_grid = linspace(0.0, 1.0, 11);
    const auto t = stability_modulus(in);
    const double ref[] = {0.0009225936628642572, 0.002701932160338013, 0.009400777311317466,
                          0.028592788685878803, 0.0936034286377054};
    ASSERT_EQ(t.rows.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(t.rows[i].S, ref[i], 1e-9 * ref[i]);
    EXPECT_EQ(t.rows[0].t_star, 0.5);
    EXPECT_EQ(std::abs(t.rows[0].xi_a[0]) + std::abs(t.rows[0].xi_b[0]), 3.5 + 3.75);
}

TEST(StabilityModulus, CapsAndZero) {
    StabilityModulusInput in;
    in.cs = unit();
    in.epsilons = {0.0, 1.0, 2.0};
    in.frequencies = default_frequencies();
    in.t_grid = linspace(0.0, 1.0, 11);
    const auto t = stability_modulus(in);
    EXPECT_EQ(t.rows[0].S, 0.0);
    EXPECT_EQ(t.rows[1].S, 1.0);
    EXPECT_EQ(t.rows[2].S, 1.0);
}

TEST(StabilityModulus, MonotoneBoundedAndAboveZeroMode) {
    StabilityModulusInput in;
    in.cs = CoefficientSet::isotropic(1, synthesize_scalar(make_canonical(ModulusTag::loglip), 0.3, 0.07, 1.0), 0.5, 1.0);
    in.epsilons = logspace(1e-8, 1e-1, 15);
    in.frequencies = default_frequencies();
    in.t_grid = linspace(0.0, 1.0, 17);
    in.threads = 4;
    const auto t = stability_modulus(in);
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        EXPECT_LE(t.rows[i].S, 1.0);
        EXPECT_GE(t.rows[i].S, t.rows[i].epsilon * (1.0 - 1e-12));
        if (i) {
            EXPECT_GE(t.rows[i].S, t.rows[i - 1].S);
        }
    }
    in.D = 0.5;
    const auto tighter = stability_modulus(in);
    for (std::size_t i = 0; i < t.rows.size(); ++i) EXPECT_LE(tighter.rows[i].S, t.rows[i].S);
}

TEST(StabilityModulus, ApproachesSquareRootOnFineGrid) {
    StabilityModulusInput in;
    in.cs = unit();
    in.epsilons = {1e-6, 1e-4, 1e-2};
    for (double x : linspace(0.0, 5.0, 2001)) in.frequencies.push_back({x});
    in.t_grid = {0.0, 0.5, 1.0};
    in.threads = 4;
    const auto t = stability_modulus(in);
    for (const auto& r : t.rows) {
        EXPECT_LE(r.S, std::sqrt(r.epsilon) * (1.0 + 1e-12));
        EXPECT_GE(r.S, std::sqrt(r.epsilon) * 0.999);
    }
}

TEST(StabilityModulus, ThreadIndependent) {
    StabilityModulusInput in;
    in.cs = unit();
    in.epsilons = logspace(1e-6, 1e-2, 9);
    in.frequencies = default_frequencies();
    in.t_grid = linspace(0.0, 1.0, 11);
    const auto a = stability_modulus(in);
    in.threads = 8;
    const auto b = stability_modulus(in);
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].S, b.rows[i].S);
}

TEST(StabilityModulus, Preconditions) {
    StabilityModulusInput in;
    in.cs = unit();
    in.epsilons = {1e-3};
    in.frequencies = {{1.0}};
    in.T_prime = 1.0;
    EXPECT_THROW(stability_modulus(in), ParameterError);
    in.T_prime = 0.5;
    in.frequencies.clear();
    EXPECT_THROW(stability_modulus(in), ParameterError);
    in.frequencies = {{1.0}};
    in.epsilons = {-1.0};
    EXPECT_THROW(stability_modulus(in), ParameterError);
}

TEST(FitBound, ExactPowerLaw) {
    const auto eps = logspace(1e-6, 1e-2, 9);
    std::vector<double> S;
    for (double e : eps) S.push_back(std::sqrt(e));
    const auto b = fit_bound(eps, S, BoundKind::hoelder);
    EXPECT_NEAR(b.M, 1.0, 1e-12);
    EXPECT_NEAR(b.delta, 0.5, 1e-12);
    EXPECT_NEAR(b(1e-4), 1e-2, 1e-13);

    std::vector<double> scaled;
    for (double s : S) scaled.push_back(3.0 * s);
    const auto c = fit_bound(eps, scaled, BoundKind::hoelder);
    EXPECT_NEAR(c.M, 3.0 * b.M, 1e-12);
    EXPECT_NEAR(c.delta, b.delta, 1e-12);
}

TEST(FitBound, ScaleConsistencyOnNoisyData) {
    const auto eps = logspace(1e-7, 1e-2, 11);
    std::vector<double> S, K;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        S.push_back(std::pow(eps[i], 0.4) * (1.0 + 0.1 * std::sin(3.0 * i)));
        K.push_back(0.25 * S.back());
    }
    const auto a = fit_bound(eps, S, BoundKind::hoelder), b = fit_bound(eps, K, BoundKind::hoelder);
    EXPECT_NEAR(b.M, 0.25 * a.M, 1e-12 * a.M);
    EXPECT_NEAR(b.delta, a.delta, 1e-12);
}

TEST(FitBound, SyntheticLoglip) {
    const auto eps = logspace(1e-12, 1e-2, 21);
    std::vector<double> S;
    for (double e : eps) S.push_back(std::exp(-std::pow(std::abs(std::log(e)), 0.5)));
    const auto b = fit_bound(eps, S, BoundKind::loglip);
    EXPECT_NEAR(b.N, 1.0, 0.02);
    EXPECT_NEAR(b.beta, 0.5, 0.01);
    EXPECT_NEAR(b.M, 1.0, 0.02);
}

TEST(FitBound, OsgoodTable) {
    const std::vector<double> eps{1e-8, 1e-6, 1e-4, 1e-3, 1e-2};
    const std::vector<double> S{1e-4, 1e-3, 2e-3, 3e-2, 2e-2};
    const auto b = fit_bound(eps, S, BoundKind::osgood_psi);
    EXPECT_FALSE(b.strictly_increasing);
    EXPECT_NEAR(b.max_upward_jump, 2.8e-2, 1e-15);
    EXPECT_EQ(b(1e-6), 1e-3);
    EXPECT_EQ(b.psi.size(), 5u);
}

TEST(FitBound, Errors) {
    const auto eps = logspace(1e-6, 1e-2, 9);
    EXPECT_THROW(fit_bound(eps, std::vector<double>(9, 0.1), BoundKind::hoelder), NumericalError);
    EXPECT_THROW(fit_bound({1e-6, 1e-5, 1e-4, 1e-3}, {1, 2, 3, 4}, BoundKind::hoelder), ParameterError);
    EXPECT_THROW(fit_bound(logspace(1e-3, 1e-1, 9), eps, BoundKind::hoelder), ParameterError);
    EXPECT_THROW(bound_kind_from_string("cubic"), ParameterError);
    EXPECT_EQ(bound_kind_from_string(to_string(BoundKind::osgood_psi)), BoundKind::osgood_psi);
}

TEST(SweepMinimal, FirstHoldingValue) {
    const std::vector<double> v{1, 2, 3, 4};
    EXPECT_EQ(sweep_minimal(v, [](double x) { return x >= 2.5; }), 3.0);
    EXPECT_FALSE(sweep_minimal(v, [](double) { return false; }).has_value());
}

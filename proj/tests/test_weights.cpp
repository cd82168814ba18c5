#include "osgoodlab/weights.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace osgoodlab;

namespace {

const double e = std::numbers::e;

void expect_shape(const WeightFunction& w) {
    for (std::size_t i = 1; i < w.nodes.size(); ++i) {
        EXPECT_LT(w.nodes[i].psi, w.nodes[i - 1].psi);
        EXPECT_GT(w.nodes[i].phi, w.nodes[i - 1].phi);
    }
    const auto y = linspace(w.y0, w.y1, 200);
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        EXPECT_LE(w.phi(y[i - 1]) - 2.0 * w.phi(y[i]) + w.phi(y[i + 1]), 1e-12);
}

} // namespace

TEST(LoglipWeight, Examples) {
    const auto w = solve_loglip_weight(1.0, 1.0, e, 0.0, 2.0);
    EXPECT_FALSE(w.truncated);
    EXPECT_NEAR(w.psi(2.0), 1.0, 1e-8);
    EXPECT_NEAR(w.psi(std::sqrt(2.0)), 1.5131802507448868296, 1e-8 * 1.5131802507448868296);
    const auto [phi0, psi0] = evaluate_weight(w, 1.0);
    EXPECT_EQ(phi0, 0.0);
    EXPECT_EQ(psi0, e);
}

TEST(LoglipWeight, ZeroLambdaIsAffine) {
    const auto w = solve_loglip_weight(0.0, 0.5, 3.0, 1.0, 2.0);
    for (double y : linspace(0.5, 2.0, 17)) {
        EXPECT_DOUBLE_EQ(w.psi(y), 3.0);
        EXPECT_NEAR(w.phi(y), 1.0 + 3.0 * (y - 0.5), 1e-12);
    }
}

TEST(LoglipWeight, ClosedFormOnHundredPoints) {
    const auto w = solve_loglip_weight(1.7, 0.2, 40.0, 0.3, 1.0);
    for (double y : linspace(0.2, 1.0, 100)) {
        const double ref = closed_form::loglip_psi(1.7, 0.2, 40.0, y);
        EXPECT_NEAR(w.psi(y), ref, 1e-8 * ref) << y;
    }
    expect_shape(w);
}

TEST(LoglipWeight, CrossingOne) {
    // psi falls through 1 at y = y0 (1 + log psi0)^(1/lambda)
    const auto w = solve_loglip_weight(2.0, 0.5, 5.0, 0.0, 3.0);
    for (double y : linspace(0.5, 3.0, 100)) {
        const double ref = closed_form::loglip_psi(2.0, 0.5, 5.0, y);
        EXPECT_NEAR(w.psi(y), ref, 1e-8 * ref) << y;
    }
    expect_shape(w);
}

TEST(LoglipWeight, Residual) {
    const auto w = solve_loglip_weight(1.0, 1.0, e, 0.0, 2.0);
    for (double y : linspace(1.05, 1.95, 19)) EXPECT_LE(w.residual(y, 1e-5), 1e-6);
}

TEST(OsgoodWeight, LipschitzPowerLaw) {
    const auto lip = make_canonical(ModulusTag::lipschitz);
    EXPECT_NEAR(solve_osgood_weight(1.0, 0.9999, lip, 1.0, 4.0, 0.0, 2.0).psi(2.0),
                closed_form::osgood_lipschitz_psi(1.0, 0.9999, 1.0, 4.0, 2.0), 1e-8);
    const auto w = solve_osgood_weight(2.0, 0.5, lip, 1.0, 4.0, 0.0, 2.0);
    EXPECT_NEAR(w.psi(2.0), 2.0, 1e-8);
    for (double y : linspace(1.0, 2.0, 100)) {
        const double ref = closed_form::osgood_lipschitz_psi(2.0, 0.5, 1.0, 4.0, y);
        EXPECT_NEAR(w.psi(y), ref, 1e-8 * ref);
    }
    expect_shape(w);
}

TEST(OsgoodWeight, ZeroLambda) {
    const auto w = solve_osgood_weight(0.0, 0.5, make_canonical(ModulusTag::loglip), 0.1, 7.0, 0.0, 1.0);
    for (double y : linspace(0.1, 1.0, 10)) EXPECT_DOUBLE_EQ(w.psi(y), 7.0);
}

TEST(OsgoodWeight, IteratedLogShapeAndResidual) {
    const auto w = solve_osgood_weight(0.05, 0.5, make_canonical(ModulusTag::iterated_log), 0.1, 100.0, 0.0, 1.1);
    EXPECT_FALSE(w.truncated);
    expect_shape(w);
    for (double y : linspace(0.15, 1.05, 10)) EXPECT_LE(w.residual(y, 1e-6), 1e-6);
}

TEST(OsgoodWeight, LargerLambdaSmallerPsi) {
    const auto om = make_canonical(ModulusTag::loglip);
    const auto a = solve_osgood_weight(1.0, 0.5, om, 0.1, 50.0, 0.0, 1.0);
    const auto b = solve_osgood_weight(2.0, 0.5, om, 0.1, 50.0, 0.0, 1.0);
    for (double y : linspace(0.11, 1.0, 30)) EXPECT_LT(b.psi(y), a.psi(y));
}

TEST(OsgoodWeight, TruncatesAtValidUpper) {
    // psi decays until k_A/psi reaches omega's peak, where the solve stops
    const auto om = make_canonical(ModulusTag::iterated_log);
    const auto w = solve_osgood_weight(50.0, 0.5, om, 0.1, 4.0, 0.0, 10.0);
    EXPECT_TRUE(w.truncated);
    EXPECT_FALSE(w.warning.empty());
    EXPECT_LT(w.y1, 10.0);
    EXPECT_NEAR(0.5 / w.psi(w.y1), om.valid_upper, 1e-6);
}

TEST(OsgoodWeight, AnchorAtEnd) {
    const auto lip = make_canonical(ModulusTag::lipschitz);
    WeightSolveOptions opt;
    opt.anchor_at_end = true;
    const auto w = solve_osgood_weight(2.0, 0.5, lip, 1.0, 2.0, 5.0, 2.0, opt);
    EXPECT_TRUE(w.anchored_at_end);
    EXPECT_NEAR(w.psi(2.0), 2.0, 1e-12);
    EXPECT_NEAR(w.phi(2.0), 5.0, 1e-12);
    EXPECT_NEAR(w.psi(1.0), 4.0, 1e-8 * 4.0);
    EXPECT_NEAR(w.phi(1.0), 5.0 - 4.0 * std::log(2.0), 1e-8);
    // right anchoring: larger lambda gives larger psi to the left of the anchor
    const auto v = solve_osgood_weight(3.0, 0.5, lip, 1.0, 2.0, 5.0, 2.0, opt);
    EXPECT_GT(v.psi(1.2), w.psi(1.2));
}

TEST(OsgoodWeight, AnchorAtEndOverflowTruncates) {
    WeightSolveOptions opt;
    opt.anchor_at_end = true;
    const auto w = solve_osgood_weight(400.0, 0.5, make_canonical(ModulusTag::lipschitz), 0.01, 2.0, 0.0, 1.0, opt);
    EXPECT_TRUE(w.truncated);
    EXPECT_GT(w.y0, 0.01);
    EXPECT_EQ(w.y1, 1.0);
}

TEST(OsgoodWeight, Preconditions) {
    const auto om = make_canonical(ModulusTag::loglip);
    EXPECT_THROW(solve_osgood_weight(1.0, 0.5, om, 0.1, 0.4, 0.0, 1.0), ParameterError);
    EXPECT_THROW(solve_osgood_weight(1.0, 0.0, om, 0.1, 4.0, 0.0, 1.0), ParameterError);
    EXPECT_THROW(solve_osgood_weight(1.0, 0.5, make_canonical(ModulusTag::iterated_log), 0.1, 1.0, 0.0, 1.0),
                 ParameterError);
    EXPECT_THROW(solve_loglip_weight(1.0, 1.0, -1.0, 0.0, 2.0), ParameterError);
    EXPECT_THROW(solve_loglip_weight(1.0, 2.0, 1.0, 0.0, 1.0), ParameterError);
}

TEST(EvaluateWeight, OutsideDomain) {
    const auto w = solve_loglip_weight(1.0, 1.0, e, 0.0, 2.0);
    EXPECT_THROW(evaluate_weight(w, 0.5), RangeError);
    EXPECT_THROW(evaluate_weight(w, 2.5), RangeError);
}

TEST(LoglipWeight, UnderflowTruncates) {
    const auto w = solve_loglip_weight(8.0, 0.1, 0.5, 0.0, 10.0);
    EXPECT_TRUE(w.truncated);
    EXPECT_LT(w.y1, 10.0);
    EXPECT_GT(w.psi(w.y1), 0.0);
}

TEST(EvaluateWeight, PhiIncrement) {
    const auto w = solve_loglip_weight(1.7, 0.2, 40.0, 0.3, 1.0);
    for (double y : {0.2, 0.37, 0.8}) {
        for (double dy : {1e-3, 0.05, 0.19}) {
            const double ref = w.phi(y + dy) - w.phi(y);
            EXPECT_NEAR(w.phi_increment(y, dy), ref, 1e-13 * std::max(1.0, std::abs(w.phi(y)))) << y << " " << dy;
        }
    }
    // tiny increments from a node follow psi rather than rounding noise
    EXPECT_NEAR(w.phi_increment(0.2, 1e-15) / 1e-15, w.psi(0.2), 1e-6 * w.psi(0.2));
    EXPECT_EQ(w.phi_increment(0.5, 0.0), 0.0);
    EXPECT_THROW(w.phi_increment(0.9, 0.2), RangeError);
}

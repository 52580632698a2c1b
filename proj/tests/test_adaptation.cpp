/*
 Copyright 2026 The nladapt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"

using namespace nladapt;
using namespace nladapt::testing;

namespace {

AdaptiveLoopSpec synthetic_loop(double gamma = 0.7) {
    const auto spec = synthetic_spec();
    const auto goal = synthetic_goal();
    const auto param = synthetic_param();
    auto potential = build_potential_single_coordinate(spec, goal, param, 0);
    Matrix G(2, 2);
    G << gamma, 0.1, 0.1, 0.5;
    return AdaptiveLoopSpec(spec, goal, TargetShaper::linear(1.5), param, potential, G);
}

} // namespace

TEST_CASE("integral update matches the hand-derived oscillator law") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    HaltonSampler s(4, 21);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Vector u = s.next();
        Vector x(2);
        x << -3 + 6 * u[0], -3 + 6 * u[1];
        const double uc = -5 + 10 * u[2];
        const double lib = thetaI_rhs(loop, x, 0.0, uc)[0];
        worst = std::max(worst, std::abs(lib - osc_thetaI_rate(x[0], x[1], 1.0, 2.0)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("estimate at the published initial data") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    Vector x(2);
    x << -1.0, 0.0;
    CHECK(theta_hat(loop, x, 0.0, AdaptState{Vector::Constant(1, -1.0)})[0] == doctest::Approx(1.0));
}

TEST_CASE("realizable estimate moves along the virtual law") {
    // d/dt Gamma (psi alpha - Psi + thetaI) along the closed loop must equal Gamma (psi' + phi) alpha
    const auto loop = synthetic_loop();
    const auto& spec = loop.spec();
    const Vector theta = (Vector(2) << 1.2, 0.8).finished();
    HaltonSampler s(6, 4);
    for (int i = 0; i < 50; ++i) {
        const Vector u = s.next();
        const Vector x = spec.stateBox.map_unit(u.head(3)) * 0.8;
        const double t = 2.0 * u[3];
        const Vector thetaI = (Vector(2) << u[4] - 0.5, u[5]).finished();
        const Vector th = theta_hat(loop, x, t, AdaptState{thetaI});
        const double uc = control(spec, loop.goal(), loop.shaper(), x, th, t);
        Vector xdot(3);
        xdot << spec.f1(x, t) + spec.g1(x) * uc, spec.f2(x, theta, t) + spec.g2(x) * uc;
        const Vector idot = thetaI_rhs(loop, x, t, uc);
        const Vector virt = virtual_rhs(loop, x, t, goal_rate(loop.goal(), x, xdot, t));
        for (Eigen::Index c = 0; c < 2; ++c) {
            auto along = [&](double tau) {
                return theta_hat(loop, Vector(x + tau * xdot), t + tau, AdaptState{Vector(thetaI + tau * idot)})[c];
            };
            CHECK(central_difference5(along, 0.0, 1e-3) == doctest::Approx(virt[c]).epsilon(1e-6));
        }
    }
}

TEST_CASE("built potential satisfies the realizability identity") {
    const auto spec = synthetic_spec();
    const auto goal = synthetic_goal();
    const auto param = synthetic_param();
    const auto pot = build_potential_single_coordinate(spec, goal, param, 0);
    const auto e = check_realizability(spec, goal, param, pot);
    CHECK(e.passed());
    CHECK(e.margin > 0.0);

    auto wrong = pot;
    wrong.gradState = [](const Vector&, double) { return Matrix::Zero(2, 3); };
    const auto bad = check_realizability(spec, goal, param, wrong);
    CHECK(bad.status == CheckStatus::Fail);
    CHECK(bad.margin <= 0.0);
}

TEST_CASE("zero potential is realizable for the oscillator") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    CHECK(check_realizability(loop.spec(), loop.goal(), loop.param(), loop.potential()).passed());
}

TEST_CASE("single-coordinate builder refuses multi-coordinate dependence") {
    CHECK_THROWS_AS(build_potential_single_coordinate(asymmetric_spec(), asymmetric_goal(), asymmetric_param(), 0),
                    ValidationError);
    CHECK_THROWS_AS(build_potential_single_coordinate(synthetic_spec(), synthetic_goal(), synthetic_param(), 5),
                    DimensionError);
}

TEST_CASE("poincare checker reports the asymmetry residual") {
    const auto e = check_poincare(asymmetric_spec(), asymmetric_goal(), asymmetric_param());
    CHECK(e.status == CheckStatus::Fail);
    CHECK(e.tolerance - e.margin == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(check_poincare(synthetic_spec(), synthetic_goal(), synthetic_param()).passed());
}

TEST_CASE("loop construction rejects bad gains and gradients") {
    const auto spec = synthetic_spec();
    const auto goal = synthetic_goal();
    const auto param = synthetic_param();
    const auto pot = build_potential_single_coordinate(spec, goal, param, 0);
    const auto shaper = TargetShaper::linear(1.0);

    Matrix asym(2, 2);
    asym << 1.0, 0.2, 0.0, 1.0;
    CHECK_THROWS_AS(AdaptiveLoopSpec(spec, goal, shaper, param, pot, asym), ValidationError);
    CHECK_THROWS_AS(AdaptiveLoopSpec(spec, goal, shaper, param, pot, -Matrix::Identity(2, 2)), ValidationError);
    CHECK_THROWS_AS(AdaptiveLoopSpec(spec, goal, shaper, param, pot, Matrix::Identity(3, 3)), Error);

    auto badParam = param;
    badParam.gradState = [](const Vector&, double) { return Matrix::Zero(2, 3); };
    CHECK_THROWS_AS(AdaptiveLoopSpec(spec, goal, shaper, badParam, pot, Matrix::Identity(2, 2)), ValidationError);

    // the zero potential is not realizable here
    CHECK_THROWS_AS(AdaptiveLoopSpec(spec, goal, shaper, param, AuxiliaryPotential::zero(2, 3),
                                     Matrix::Identity(2, 2)),
                    ValidationError);

    CHECK_NOTHROW(AdaptiveLoopSpec::unvalidated(spec, goal, shaper, param, pot, -Matrix::Identity(2, 2)));
}

TEST_CASE("gamma inverse norm") {
    const auto loop = synthetic_loop(0.7);
    const Vector v = (Vector(2) << 1.0, -2.0).finished();
    CHECK(loop.gamma_inv_norm_sq(v) == doctest::Approx(v.dot(loop.gamma().inverse() * v)));
    CHECK((loop.gamma() * loop.gammaInverse() - Matrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("hand-evaluated estimate, integral update and virtual law") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    Vector x(2);
    x << -1.0, 0.0;
    CHECK(thetaI_rhs(loop, x, 0.0, 0.0)[0] == doctest::Approx(4.0));
    CHECK(thetaI_rhs(loop, Vector::Zero(2), 0.0, 3.0)[0] == 0.0);
    CHECK(virtual_rhs(loop, x, 0.0, -0.4546487134)[0] == doctest::Approx(4.9092974268).epsilon(1e-10));
    // matched estimate: psi' = -phi(psi)
    CHECK(virtual_rhs(loop, x, 0.0, 2.0)[0] == 0.0);

    const Vector target = (Vector(2) << 0.5, -0.5).finished();
    CHECK(theta_hat(loop, target, 0.0, AdaptState{Vector::Zero(1)})[0] == 0.0);

    const auto twice = AdaptiveLoopSpec::unvalidated(loop.spec(), loop.goal(), loop.shaper(), loop.param(),
                                                     loop.potential(), 2.0 * loop.gamma());
    const AdaptState a{Vector::Constant(1, 0.3)};
    CHECK(theta_hat(twice, x, 0.0, a)[0] == doctest::Approx(2.0 * theta_hat(loop, x, 0.0, a)[0]));
    CHECK(virtual_rhs(twice, x, 0.0, 0.7)[0] == doctest::Approx(2.0 * virtual_rhs(loop, x, 0.0, 0.7)[0]));
}

TEST_CASE("estimate is Lipschitz in the integral state with constant |Gamma|") {
    const auto loop = synthetic_loop();
    const double L = loop.gamma().operatorNorm();
    HaltonSampler s(7, 8);
    for (int i = 0; i < 200; ++i) {
        const Vector u = s.next().array() - 0.5;
        const Vector x = 2.0 * u.head(3);
        const Vector a = 4.0 * u.segment(3, 2);
        const Vector b = 4.0 * u.segment(5, 2);
        const Vector d = theta_hat(loop, x, 0.1, AdaptState{a}) - theta_hat(loop, x, 0.1, AdaptState{b});
        CHECK(d.norm() <= L * (a - b).norm() * (1 + 1e-12) + 1e-15);
    }
}

TEST_CASE("single-coordinate potential examples") {
    // psi = x21 and dalpha/dx21 = 1: Psi = (x21^2 - lo^2) / 2
    SubsystemSpec spec = synthetic_spec();
    GoalFunction goal{[](const Vector& x, double) { return x[1]; },
                      [](const Vector&, double) { return (Vector(3) << 0.0, 1.0, 0.0).finished(); },
                      [](const Vector&, double) { return 0.0; }};
    Parametrization lin{[](const Vector& x, double) { return (Vector(2) << x[1] + x[0], x[0]).finished(); },
                        [](const Vector&, double) { return (Matrix(2, 3) << 1, 1, 0, 1, 0, 0).finished(); },
                        [](const Vector&, double) { return Vector::Zero(2); }, 1.0, 1.0};
    const auto pot = build_potential_single_coordinate(spec, goal, lin, 0);
    const double lo = spec.stateBox.lower[1];
    HaltonSampler s(3, 1);
    for (int i = 0; i < 50; ++i) {
        const Vector x = spec.stateBox.map_unit(s.next());
        const Vector P = pot.Psi(x, 0.0);
        CHECK(std::abs(P[0] - 0.5 * (x[1] * x[1] - lo * lo)) <= 1e-9);
        CHECK(std::abs(P[1]) <= 1e-12);
        CHECK(std::abs(pot.gradState(x, 0.0)(0, 1) - x[1]) <= 1e-9);
    }
    CHECK(check_realizability(spec, goal, lin, pot).passed());

    Parametrization constant{[](const Vector&, double) { return Vector::Constant(2, 3.0); },
                             [](const Vector&, double) { return Matrix::Zero(2, 3); },
                             [](const Vector&, double) { return Vector::Zero(2); }, 1.0, 1.0};
    const auto zero = build_potential_single_coordinate(spec, goal, constant, 0);
    CHECK(zero.Psi(Vector::Constant(3, 0.7), 0.0).cwiseAbs().maxCoeff() == 0.0);

    const auto osc = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    const auto oscPot = build_potential_single_coordinate(osc.spec(), osc.goal(), osc.param(), 0);
    CHECK(oscPot.Psi((Vector(2) << 2.0, -1.0).finished(), 0.0)[0] == 0.0);
}

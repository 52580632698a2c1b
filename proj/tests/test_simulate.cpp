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

#include <sstream>

using namespace nladapt;
using namespace nladapt::testing;

TEST_CASE("linear probe against the exponential") {
    IntegratorConfig cfg;
    cfg.tFinal = 1.0;
    const auto sol = integrate_ode([](double, const Vector& y) { return Vector(-y); }, Vector::Ones(1), cfg);
    CHECK(std::abs(sol.states.back()[0] - std::exp(-1.0)) <= 1e-10);
    CHECK(sol.times.back() == doctest::Approx(1.0));
}

TEST_CASE("RK4 order on the linear probe") {
    auto err = [](double h) {
        IntegratorConfig cfg;
        cfg.step = h;
        cfg.tFinal = 1.0;
        const auto sol = integrate_ode([](double, const Vector& y) { return Vector(-y); }, Vector::Ones(1), cfg);
        return std::abs(sol.states.back()[0] - std::exp(-1.0));
    };
    CHECK(err(0.1) / err(0.05) >= 14.0);
    CHECK(err(0.05) / err(0.025) >= 14.0);
}

TEST_CASE("config validation") {
    IntegratorConfig cfg;
    cfg.step = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.step = 2.0;
    cfg.tFinal = 1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg.step = 0.1;
    cfg.logEvery = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

namespace {

// Zero dynamics: f = 0, phi = 0, so u = 0 and every state stays put.
AdaptiveLoopSpec still_loop() {
    SubsystemSpec spec{PartitionLayout(1, 1),
                       [](const Vector&, double) { return Vector::Zero(1); },
                       [](const Vector&, const Vector&, double) { return Vector::Zero(1); },
                       [](const Vector&) { return Vector::Zero(1); },
                       [](const Vector&) { return Vector::Ones(1); },
                       1,
                       DomainBox::uniform(2, -2.0, 2.0),
                       DomainBox::uniform(1, 0.5, 1.5),
                       TimeWindow{0.0, 1.0}};
    GoalFunction goal{[](const Vector& x, double) { return x[1]; },
                      [](const Vector&, double) { return (Vector(2) << 0.0, 1.0).finished(); },
                      [](const Vector&, double) { return 0.0; }};
    Parametrization param{[](const Vector&, double) { return Vector::Ones(1); },
                          [](const Vector&, double) { return Matrix::Zero(1, 2); },
                          [](const Vector&, double) { return Vector::Zero(1); }, 1.0, 1.0};
    TargetShaper shaper;
    shaper.phi = [](double, double) { return 0.0; };
    shaper.omega = Vector::Zero(0);
    return AdaptiveLoopSpec(spec, goal, shaper, param, AuxiliaryPotential::zero(1, 2), Matrix::Identity(1, 1));
}

} // namespace

TEST_CASE("constant trajectory and accumulator growth") {
    const auto loop = still_loop();
    IntegratorConfig cfg;
    cfg.step = 0.01;
    cfg.tFinal = 4.0;
    const Vector aug0 = (Vector(3) << 0.5, 0.8, 0.0).finished();
    const auto traj = integrate(loop, Vector::Ones(1), disturbance::zero(), cfg, aug0);
    REQUIRE(traj.status == RunStatus::Completed);
    CHECK(traj.x.state.back() == traj.x.state.front());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj.x.l2Psi[k] == doctest::Approx(0.8 * std::sqrt(traj.times[k])).epsilon(1e-6));
        CHECK(traj.x.linfPsi[k] == 0.8);
    }
}

TEST_CASE("accumulators are non-decreasing and times evenly spaced") {
    OscillatorScenario sc;
    sc.integrator.tFinal = 6.0;
    sc.integrator.logEvery = 7;
    const auto traj = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
    const double spacing = sc.integrator.step * 7;
    CHECK(traj.spacing == doctest::Approx(spacing));
    for (std::size_t k = 1; k < traj.size(); ++k) {
        CHECK(traj.times[k] - traj.times[k - 1] == doctest::Approx(spacing).epsilon(1e-9));
        for (const LoopRecord* r : {&traj.x, &*traj.y}) {
            CHECK(r->l2Psi[k] >= r->l2Psi[k - 1]);
            CHECK(r->l2Eps[k] >= r->l2Eps[k - 1]);
            CHECK(r->l2Mismatch[k] >= r->l2Mismatch[k - 1]);
            CHECK(r->linfPsi[k] >= r->linfPsi[k - 1]);
        }
    }
}

TEST_CASE("determinism") {
    OscillatorScenario sc;
    sc.integrator.tFinal = 5.0;
    const auto a = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
    const auto b = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
    std::ostringstream sa, sb;
    write_csv(a, sa);
    write_csv(b, sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("divergence is detected") {
    OscillatorScenario sc;
    sc.integrator.tFinal = 50.0;
    sc.integrator.divergenceBound = 5.0;
    auto sys = build_oscillator(sc);
    const auto& l = sys.loopX;
    sys.loopX = AdaptiveLoopSpec::unvalidated(l.spec(), l.goal(), l.shaper(), l.param(), l.potential(), -l.gamma());
    Vector aug = initial_state(sc);
    aug[2] = 0.0;
    const auto traj = integrate(sys, sc.integrator, aug);
    CHECK(traj.status == RunStatus::Diverged);
    CHECK(traj.times.back() < 50.0);
    CHECK(traj.x.state.back().cwiseAbs().maxCoeff() <= 5.0);

    const auto sol = integrate_ode([](double, const Vector& y) { return Vector(y); }, Vector::Ones(1),
                                   IntegratorConfig{0.01, 100.0, 1e3});
    CHECK(sol.status == RunStatus::Diverged);
}

TEST_CASE("disturbance generators") {
    CHECK(disturbance::zero()(3.0) == 0.0);
    CHECK(disturbance::decaying_exponential(2.0, 1.0)(1.0) == doctest::Approx(2.0 * std::exp(-1.0)));
    const auto p = disturbance::truncated_pulse(1.5, 1.0, 2.0);
    CHECK(p(0.5) == 0.0);
    CHECK(p(1.0) == 1.5);
    CHECK(p(2.0) == 0.0);
    CHECK_THROWS_AS(disturbance::decaying_exponential(1.0, 0.0), ValidationError);
}

TEST_CASE("single-loop disturbance enters psi unscaled") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    IntegratorConfig cfg;
    cfg.tFinal = 3.0;
    const Vector aug0 = (Vector(3) << -1.0, 0.0, -1.0).finished();
    const auto eps = disturbance::decaying_exponential(1.0, 1.0);
    const auto traj = integrate(loop, Vector::Ones(1), eps, cfg, aug0);
    for (std::size_t k = 0; k < traj.size(); k += 100) {
        CHECK(traj.x.eps[k] == doctest::Approx(std::exp(-traj.times[k])).epsilon(1e-12));
    }
}

namespace {

Trajectory synthetic_psi(const std::vector<double>& t, const std::vector<double>& psi) {
    Trajectory traj;
    traj.times = t;
    traj.x.psi = psi;
    return traj;
}

} // namespace

TEST_CASE("goal attainment") {
    std::vector<double> t, zero, decay, flat;
    for (int k = 0; k <= 500; ++k) {
        t.push_back(0.01 * k);
        zero.push_back(0.0);
        decay.push_back(std::exp(-0.01 * k));
        flat.push_back(1.0);
    }
    CHECK(*goal_attainment(synthetic_psi(t, zero), 1e-3, 1e-3) == 0.0);
    const auto ts = goal_attainment(synthetic_psi(t, decay), std::exp(-2.0), 0.0);
    REQUIRE(ts.has_value());
    CHECK(*ts >= 2.0);
    CHECK(*ts <= 2.0 + 0.01 + 1e-12);
    CHECK_FALSE(goal_attainment(synthetic_psi(t, flat), 0.5, 0.5).has_value());
    CHECK_FALSE(goal_attainment(synthetic_psi(t, decay), std::exp(-2.0), 0.0, 4.0).has_value());
}

TEST_CASE("csv header and precision") {
    OscillatorScenario sc;
    sc.integrator.tFinal = 0.01;
    const auto traj = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
    CHECK(csv_header(traj) ==
          "t,x1,x2,y1,y2,psiX,psiY,uX,uY,thetaHatX1,thetaHatY1,l2PsiX,l2PsiY,linfPsiX,linfPsiY,l2MismatchX,"
          "l2MismatchY,hIntoX,hIntoY");
    std::ostringstream os;
    write_csv(traj, os);
    std::istringstream in(os.str());
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    std::getline(in, row); // second sample
    std::vector<double> vals;
    std::stringstream ss(row);
    for (std::string cell; std::getline(ss, cell, ',');) {
        vals.push_back(std::stod(cell));
    }
    REQUIRE(vals.size() == 19);
    CHECK(vals[1] == traj.x.state[1][0]); // round-trips exactly
    CHECK(vals[17] == traj.x.eps[1]);
}

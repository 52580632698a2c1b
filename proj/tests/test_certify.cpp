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

const DomainBox kX = DomainBox::uniform(1, -3.0, 3.0);
const DomainBox kTheta = DomainBox::uniform(1, 0.2, 2.0);

Parametrization offset_alpha(double D, double D1) {
    return Parametrization{[](const Vector& x, double) { return Vector::Constant(1, x[0] - 1.0); },
                           [](const Vector&, double) { return Matrix::Ones(1, 1); },
                           [](const Vector&, double) { return Vector::Zero(1); }, D, D1};
}

Trajectory constant_psi_trajectory(double psi, double mismatch) {
    Trajectory traj;
    for (int k = 0; k <= 100; ++k) {
        traj.times.push_back(0.1 * k);
        traj.x.psi.push_back(psi);
        traj.x.mismatch.push_back(mismatch);
        traj.x.state.push_back(Vector::Zero(2));
    }
    return traj;
}

} // namespace

TEST_CASE("monotonicity of the oscillator nonlinearity") {
    auto f = [](const Vector& x, const Vector& th, double) { return osc_f(x[0], 1.0, th[0], 0.5); };
    const auto res = verify_monotonicity(f, offset_alpha(1.5, 0.5), kX, kTheta, {0.0, 1.0});
    CHECK(res.entry.passed());
    CHECK(res.dHat <= 1.5 * (1 + 1e-6));
    CHECK(res.d1Hat >= 0.5 * (1 - 1e-6));

    // declared constants tighter than the truth are caught
    const auto tight = verify_monotonicity(f, offset_alpha(1.2, 0.5), kX, kTheta, {0.0, 1.0});
    CHECK(tight.entry.status == CheckStatus::Fail);
    CHECK(tight.entry.margin < 0.0);
}

TEST_CASE("linear-in-parameters uncertainty has unit growth") {
    auto f = [](const Vector& x, const Vector& th, double) { return th[0] * (x[0] - 1.0); };
    const auto res = verify_monotonicity(f, offset_alpha(1.0, 1.0), kX, kTheta, {0.0, 1.0});
    CHECK(res.dHat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.d1Hat == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(res.entry.passed());
}

TEST_CASE("anti-monotone uncertainty fails the sign condition") {
    Parametrization pos{[](const Vector& x, double) { return Vector::Constant(1, x[0] + 4.0); },
                        [](const Vector&, double) { return Matrix::Ones(1, 1); },
                        [](const Vector&, double) { return Vector::Zero(1); }, 1.0, 1.0};
    auto f = [](const Vector& x, const Vector& th, double) { return -th[0] * (x[0] + 4.0); };
    const auto res = verify_monotonicity(f, pos, kX, kTheta, {0.0, 1.0});
    CHECK(res.entry.status == CheckStatus::Fail);
    CHECK(res.entry.margin < 0.0);
}

TEST_CASE("degenerate sampling is inconclusive") {
    Parametrization zero{[](const Vector&, double) { return Vector::Zero(1); },
                         [](const Vector&, double) { return Matrix::Zero(1, 1); },
                         [](const Vector&, double) { return Vector::Zero(1); }, 1.0, 1.0};
    auto f = [](const Vector&, const Vector& th, double) { return th[0]; };
    const auto res = verify_monotonicity(f, zero, kX, kTheta, {0.0, 1.0});
    CHECK(res.entry.status == CheckStatus::Inconclusive);
    CHECK(res.entry.margin == -1.0);
}

TEST_CASE("growth estimates tighten under sample doubling") {
    auto f = [](const Vector& x, const Vector& th, double) { return osc_f(x[0], 1.0, th[0], 0.6); };
    double prevD = 0.0, prevD1 = 1e9;
    for (std::size_t n = 100; n <= 12800; n *= 2) {
        MonotonicityConfig cfg;
        cfg.samples = n;
        const auto r = verify_monotonicity(f, offset_alpha(1.6, 0.4), kX, kTheta, {0.0, 1.0}, cfg);
        CHECK(r.dHat >= prevD);
        CHECK(r.d1Hat <= prevD1);
        prevD = r.dHat;
        prevD1 = r.d1Hat;
    }
}

TEST_CASE("small gain: linear evaluator is exact") {
    for (const auto& [k1, k2] : {std::pair{0.4, 0.4}, std::pair{1.0, 0.1}, std::pair{0.5, 0.5}, std::pair{0.3, 0.2}}) {
        OscillatorScenario sc;
        sc.k1 = k1;
        sc.k2 = k2;
        const auto e = check_small_gain(oscillator_small_gain(sc));
        const double product = k1 * k2 * 0.5 * 0.5 * (1.5 / 0.5 + 1) * (1.6 / 0.4 + 1);
        CHECK(e.margin == doctest::Approx(1.0 - product).epsilon(1e-15));
        CHECK(e.passed() == (product < 1.0));
        CHECK(e.detail.find("regime=linear") != std::string::npos);
    }
}

TEST_CASE("small gain: scanned regime agrees with the linear verdict off the boundary") {
    auto table = [](double slope) {
        std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
        for (double s = 1e-6; s <= 1e6; s *= 2) {
            pts.emplace_back(s, slope * s);
        }
        return GainDescriptor::tabulated(pts);
    };
    for (double k : {0.3, 0.6}) {
        SmallGainProblem p;
        p.gainX22 = table(0.5);
        p.gainY22 = table(0.5);
        p.betaX = k;
        p.betaY = k;
        p.ratioX = 3.0;
        p.ratioY = 4.0;
        p.scanMin = 1e-3;
        p.scanMax = 1e2;
        const auto e = check_small_gain(p);
        CHECK(e.detail.find("scanned") != std::string::npos);
        CHECK(e.passed() == (k * k * 5.0 < 1.0));
    }
    SmallGainProblem short_table;
    short_table.gainX22 = GainDescriptor::tabulated({{0.0, 0.0}, {1.0, 0.5}});
    short_table.gainY22 = GainDescriptor::linear(0.0, 0.5);
    short_table.scanMax = 10.0;
    CHECK(check_small_gain(short_table).status == CheckStatus::Inconclusive);
}

TEST_CASE("small gain problem validation") {
    SmallGainProblem p;
    p.ratioX = 0.5;
    CHECK_THROWS_AS(check_small_gain(p), ValidationError);
    SmallGainProblem q;
    q.probeDeltas = {0.0};
    CHECK_THROWS_AS(check_small_gain(q), ValidationError);
}

TEST_CASE("theorem 1 monitor: matched start without disturbance") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    IntegratorConfig cfg;
    cfg.tFinal = 10.0;
    // published x data: thetaHat(0) = 1 = theta
    const auto traj = integrate(loop, Vector::Ones(1), disturbance::zero(), cfg,
                                (Vector(3) << -1.0, 0.0, -1.0).finished());
    const auto rep = theorem1_monitor(traj, loop, Vector::Ones(1));
    REQUIRE(rep.entries().size() == 3);
    CHECK(rep.all_passed());
    CHECK(traj.x.l2Mismatch.back() <= 1e-6);
}

TEST_CASE("theorem 1 monitor: parameter bound with a disturbance") {
    const auto loop = make_oscillator_loop(2.0, 1.0, 1.0, 0.5);
    IntegratorConfig cfg;
    cfg.tFinal = 20.0;
    const auto eps = disturbance::decaying_exponential(1.0, 1.0);
    const Vector aug0 = (Vector(3) << -1.0, 0.0, 0.0).finished();
    const auto good = integrate(loop, Vector::Ones(1), eps, cfg, aug0);
    const auto rep = theorem1_monitor(good, loop, Vector::Ones(1));
    CHECK(rep.entries().size() == 2);
    CHECK(rep.all_passed());

    const auto bad = AdaptiveLoopSpec::unvalidated(loop.spec(), loop.goal(), loop.shaper(), loop.param(),
                                                   loop.potential(), -loop.gamma());
    const auto sabotaged = integrate(bad, Vector::Ones(1), eps, cfg, aug0);
    const auto badRep = theorem1_monitor(sabotaged, loop, Vector::Ones(1));
    CHECK(badRep.failures() >= 1);
}

TEST_CASE("coupling bounds on the oscillator") {
    OscillatorScenario sc;
    sc.integrator.tFinal = 20.0;
    const auto sys = build_oscillator(sc);
    const auto traj = integrate(sys, sc.integrator, initial_state(sc));
    const auto off = oscillator_coupling_offsets(sc);
    CHECK(off.intoPsiY == doctest::Approx(0.4 / std::sqrt(2.0)));
    CHECK(verify_coupling_bound(traj, LoopSide::X, 0.4, CouplingBoundMode::L2WithOffset, off.intoPsiY).passed());
    CHECK(verify_coupling_bound(traj, LoopSide::Y, 0.4, CouplingBoundMode::L2WithOffset, off.intoPsiX).passed());
    // h depends on x1, not on psi: the pointwise form does not hold
    CHECK_FALSE(verify_coupling_bound(traj, LoopSide::X, 0.4, CouplingBoundMode::Pointwise).passed());

    OscillatorScenario z = sc;
    z.k1 = z.k2 = 0.0;
    const auto zt = integrate(build_oscillator(z), z.integrator, initial_state(z));
    CHECK(verify_coupling_bound(zt, LoopSide::X, 0.0, CouplingBoundMode::Pointwise).passed());
    CHECK(verify_coupling_bound(zt, LoopSide::Y, 0.0, CouplingBoundMode::L2WithOffset).passed());
}

TEST_CASE("convergence monitor") {
    const auto flat = convergence_monitor(constant_psi_trajectory(0.5, 0.0));
    CHECK(flat.find("convergence.x.psi_tail")->status == CheckStatus::Fail);
    CHECK(flat.find("convergence.x.mismatch_tail")->passed());

    OscillatorScenario sc;
    sc.k1 = sc.k2 = 0.0;
    sc.thetaIY0 = 1.0; // y: thetaHat(0) = 1 (0) + ... = 1 = theta
    sc.integrator.tFinal = 20.0;
    const auto traj = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
    const auto rep = convergence_monitor(traj);
    CHECK(rep.all_passed());
    CHECK(rep.find("convergence.x.mismatch_tail")->margin == doctest::Approx(1e-2).epsilon(1e-9));

    auto aborted = constant_psi_trajectory(0.0, 0.0);
    aborted.status = RunStatus::Diverged;
    CHECK(convergence_monitor(aborted).find("convergence.x.psi_tail")->status == CheckStatus::Inconclusive);
    CHECK_FALSE(run_status_entry(aborted).passed());
}

TEST_CASE("every entry's margin sign matches its status") {
    for (const auto& [k1, k2] : {std::pair{0.4, 0.4}, std::pair{0.5, 0.5}}) {
        OscillatorScenario sc;
        sc.k1 = k1;
        sc.k2 = k2;
        sc.integrator.tFinal = 20.0;
        sc.certify.monotonicitySamples = 2000;
        const auto cert = certify_scenario(sc);
        for (const auto& e : cert.report.entries()) {
            CHECK(std::isfinite(e.margin));
            if (e.status == CheckStatus::Pass) {
                CHECK(e.margin > 0.0);
            } else {
                CHECK(e.margin <= 0.0);
            }
        }
    }
}

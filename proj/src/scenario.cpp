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
#include "nladapt/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace nladapt {

void OscillatorScenario::validate() const {
    if (!(lambdaX > 0.0) || !(lambdaY > 0.0)) {
        throw ValidationError("oscillator scenario needs lambdaX, lambdaY > 0");
    }
    if (!(GammaX > 0.0) || !(GammaY > 0.0)) {
        throw ValidationError("oscillator scenario needs GammaX, GammaY > 0");
    }
    if (!(sineX >= 0.0 && sineX < 1.0) || !(sineY >= 0.0 && sineY < 1.0)) {
        throw ValidationError("oscillator sine weights must lie in [0, 1)");
    }
    for (double v : {k1, k2, x0, y0, thetaX, thetaY, x1Init, x2Init, y1Init, y2Init, thetaIX0, thetaIY0}) {
        if (!std::isfinite(v)) {
            throw ValidationError("oscillator scenario values must be finite");
        }
    }
    integrator.validate();
    if (!(certify.tailWindow > 0.0) || certify.monotonicitySamples == 0) {
        throw ValidationError("certify options need tailWindow > 0 and at least one monotonicity sample");
    }
}

double oscillator_nonlinearity(double x1, double offset, double theta, double sine) {
    const double a = theta * (x1 - offset);
    return a + sine * std::sin(a);
}

AdaptiveLoopSpec make_oscillator_loop(double lambda, double offset, double Gamma, double sine, double psiInit) {
    SubsystemSpec spec{
        PartitionLayout(1, 1),
        [](const Vector& x, double) { return Vector::Constant(1, x[1]); },
        [offset, sine](const Vector& x, const Vector& theta, double) {
            return Vector::Constant(1, oscillator_nonlinearity(x[0], offset, theta[0], sine));
        },
        [](const Vector&) { return Vector::Zero(1); },
        [](const Vector&) { return Vector::Ones(1); },
        1,
        DomainBox::uniform(2, -3.0, 3.0),
        DomainBox::uniform(1, 0.2, 2.0),
        TimeWindow{0.0, 1.0},
    };
    GoalFunction goal{
        [](const Vector& x, double) { return x[0] + x[1]; },
        [](const Vector&, double) { return Vector::Ones(2); },
        [](const Vector&, double) { return 0.0; },
    };
    Parametrization param{
        [offset](const Vector& x, double) { return Vector::Constant(1, x[0] - offset); },
        [](const Vector&, double) {
            Matrix J(1, 2);
            J << 1.0, 0.0;
            return J;
        },
        [](const Vector&, double) { return Vector::Zero(1); },
        1.0 + sine,
        1.0 - sine,
    };
    return AdaptiveLoopSpec(std::move(spec), std::move(goal), TargetShaper::linear(lambda, psiInit), std::move(param),
                            AuxiliaryPotential::zero(1, 2), Matrix::Constant(1, 1, Gamma));
}

CoupledClosedLoop build_oscillator(const OscillatorScenario& sc) {
    sc.validate();
    const double k1 = sc.k1;
    const double k2 = sc.k2;
    Coupling coupling{
        [k1](const Vector& y, double) { return Vector::Constant(1, k1 * y[0]); },
        [k2](const Vector& x, double) { return Vector::Constant(1, k2 * x[0]); },
        std::abs(k2),
        std::abs(k1),
    };
    return CoupledClosedLoop{
        make_oscillator_loop(sc.lambdaX, sc.x0, sc.GammaX, sc.sineX, sc.x1Init + sc.x2Init),
        make_oscillator_loop(sc.lambdaY, sc.y0, sc.GammaY, sc.sineY, sc.y1Init + sc.y2Init),
        std::move(coupling),
        Vector::Constant(1, sc.thetaX),
        Vector::Constant(1, sc.thetaY),
    };
}

Vector initial_state(const OscillatorScenario& sc) {
    Vector aug(6);
    aug << sc.x1Init, sc.x2Init, sc.thetaIX0, sc.y1Init, sc.y2Init, sc.thetaIY0;
    return aug;
}

SmallGainProblem oscillator_small_gain(const OscillatorScenario& sc) {
    const auto sys = build_oscillator(sc);
    SmallGainProblem prob;
    prob.gainX22 = sys.loopX.shaper().gainL2ToL2;
    prob.gainY22 = sys.loopY.shaper().gainL2ToL2;
    prob.betaX = sys.coupling.betaX;
    prob.betaY = sys.coupling.betaY;
    prob.ratioX = sys.loopX.param().D / sys.loopX.param().D1;
    prob.ratioY = sys.loopY.param().D / sys.loopY.param().D1;
    return prob;
}

CouplingOffsets oscillator_coupling_offsets(const OscillatorScenario& sc) {
    const double r = 1.0 / std::sqrt(2.0);
    return CouplingOffsets{std::abs(sc.k1) * r * std::abs(sc.y1Init), std::abs(sc.k2) * r * std::abs(sc.x1Init)};
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Keys of the config format bound to scenario fields.
struct Binding {
    std::function<std::string(const OscillatorScenario&)> get;
    std::function<void(OscillatorScenario&, const std::string&)> set;
};

double parse_double(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw ValidationError("not a finite number: '" + s + "'");
    }
    return v;
}

unsigned long long parse_count(const std::string& s) {
    unsigned long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ValidationError("not a nonnegative integer: '" + s + "'");
    }
    return v;
}

template <class T>
Binding real(T OscillatorScenario::*field) {
    return {[field](const OscillatorScenario& sc) { return fmt(sc.*field); },
            [field](OscillatorScenario& sc, const std::string& v) { sc.*field = parse_double(v); }};
}

template <class Owner, class T>
Binding nested_real(Owner OscillatorScenario::*group, T Owner::*field) {
    return {[=](const OscillatorScenario& sc) { return fmt(sc.*group.*field); },
            [=](OscillatorScenario& sc, const std::string& v) { sc.*group.*field = parse_double(v); }};
}

template <class Owner, class T>
Binding nested_count(Owner OscillatorScenario::*group, T Owner::*field) {
    return {[=](const OscillatorScenario& sc) { return std::to_string(sc.*group.*field); },
            [=](OscillatorScenario& sc, const std::string& v) {
                sc.*group.*field = static_cast<T>(parse_count(v));
            }};
}

// Ordered (section, key) table; serialize walks it in order.
const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Binding>>>>& table() {
    using S = OscillatorScenario;
    static const std::vector<std::pair<std::string, std::vector<std::pair<std::string, Binding>>>> t{
        {"coupling", {{"k1", real(&S::k1)}, {"k2", real(&S::k2)}}},
        {"x",
         {{"lambda", real(&S::lambdaX)},
          {"offset", real(&S::x0)},
          {"theta", real(&S::thetaX)},
          {"gamma", real(&S::GammaX)},
          {"sine", real(&S::sineX)},
          {"x1", real(&S::x1Init)},
          {"x2", real(&S::x2Init)},
          {"thetaI", real(&S::thetaIX0)}}},
        {"y",
         {{"lambda", real(&S::lambdaY)},
          {"offset", real(&S::y0)},
          {"theta", real(&S::thetaY)},
          {"gamma", real(&S::GammaY)},
          {"sine", real(&S::sineY)},
          {"y1", real(&S::y1Init)},
          {"y2", real(&S::y2Init)},
          {"thetaI", real(&S::thetaIY0)}}},
        {"integrator",
         {{"step", nested_real(&S::integrator, &IntegratorConfig::step)},
          {"tFinal", nested_real(&S::integrator, &IntegratorConfig::tFinal)},
          {"t0", nested_real(&S::integrator, &IntegratorConfig::t0)},
          {"divergenceBound", nested_real(&S::integrator, &IntegratorConfig::divergenceBound)},
          {"logEvery", nested_count(&S::integrator, &IntegratorConfig::logEvery)}}},
        {"certify",
         {{"monotonicitySamples", nested_count(&S::certify, &CertifyOptions::monotonicitySamples)},
          {"tailWindow", nested_real(&S::certify, &CertifyOptions::tailWindow)},
          {"psiThreshold", nested_real(&S::certify, &CertifyOptions::psiThreshold)},
          {"mismatchThreshold", nested_real(&S::certify, &CertifyOptions::mismatchThreshold)},
          {"theoremTolerance", nested_real(&S::certify, &CertifyOptions::theoremTolerance)},
          {"couplingTolerance", nested_real(&S::certify, &CertifyOptions::couplingTolerance)},
          {"seed", nested_count(&S::certify, &CertifyOptions::seed)}}},
    };
    return t;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

std::string serialize(const OscillatorScenario& sc) {
    std::ostringstream os;
    os << "# nladapt scenario\n";
    os << "model = oscillator\n";
    for (const auto& [section, keys] : table()) {
        os << "\n[" << section << "]\n";
        for (const auto& [key, binding] : keys) {
            os << key << " = " << binding.get(sc) << '\n';
        }
    }
    return os.str();
}

OscillatorScenario parse_scenario(const std::string& text) {
    std::map<std::string, std::map<std::string, const Binding*>> index;
    for (const auto& [section, keys] : table()) {
        for (const auto& [key, binding] : keys) {
            index[section][key] = &binding;
        }
    }

    OscillatorScenario sc;
    std::set<std::string> seen;
    std::string section;
    bool haveModel = false;
    std::istringstream in(text);
    std::string raw;
    int lineNo = 0;
    auto fail = [&](const std::string& why) {
        throw ValidationError("scenario line " + std::to_string(lineNo) + ": " + why);
    };
    while (std::getline(in, raw)) {
        ++lineNo;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        if (line.front() == '[') {
            if (line.back() != ']') {
                fail("unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            if (!index.count(section)) {
                fail("unknown section [" + section + "]");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const std::string qualified = section + "." + key;
        if (!seen.insert(qualified).second) {
            fail("duplicate key " + qualified);
        }
        if (section.empty()) {
            if (key != "model") {
                fail("unknown top-level key '" + key + "'");
            }
            if (value != "oscillator") {
                fail("unsupported model '" + value + "'; custom systems are declared in code");
            }
            haveModel = true;
            continue;
        }
        const auto it = index[section].find(key);
        if (it == index[section].end()) {
            fail("unknown key " + qualified);
        }
        try {
            it->second->set(sc, value);
        } catch (const ValidationError& e) {
            fail(qualified + ": " + e.what());
        }
    }
    if (!haveModel) {
        throw ValidationError("scenario is missing 'model = oscillator'");
    }
    sc.validate();
    return sc;
}

OscillatorScenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

namespace {

CertificateEntry renamed(CertificateEntry e, std::string name) {
    e.name = std::move(name);
    return e;
}

void loop_assumptions(CertificateReport& report, const AdaptiveLoopSpec& loop, const std::string& side,
                      const CertifyOptions& opt) {
    const auto& spec = loop.spec();
    report.add(to_entry("gradient." + side + ".goal", check_goal_gradient(loop.goal(), spec, 100, opt.seed)));
    report.add(to_entry("gradient." + side + ".alpha", check_parametrization_gradient(loop.param(), spec, 100, opt.seed)));
    report.add(renamed(check_realizability(spec, loop.goal(), loop.param(), loop.potential(), 200, opt.seed),
                       "realizability." + side));
    report.add(renamed(check_poincare(spec, loop.goal(), loop.param(), 200, opt.seed), "poincare_symmetry." + side));
    MonotonicityConfig mc;
    mc.samples = opt.monotonicitySamples;
    mc.seed = opt.seed;
    report.add(renamed(verify_monotonicity(spec, loop.goal(), loop.param(), mc).entry, "monotonicity." + side));
}

} // namespace

ScenarioCertificate certify_scenario(const OscillatorScenario& sc) {
    const auto sys = build_oscillator(sc);
    const auto& opt = sc.certify;
    ScenarioCertificate out;
    auto& report = out.report;

    loop_assumptions(report, sys.loopX, "x", opt);
    loop_assumptions(report, sys.loopY, "y", opt);
    report.add(check_small_gain(oscillator_small_gain(sc)));

    out.trajectory = integrate(sys, sc.integrator, initial_state(sc));
    const auto& traj = out.trajectory;
    report.add(run_status_entry(traj));

    Theorem1Config tc;
    tc.tolerance = opt.theoremTolerance;
    report.append(theorem1_monitor(traj, sys.loopX, sys.thetaTrueX, LoopSide::X, tc));
    report.append(theorem1_monitor(traj, sys.loopY, sys.thetaTrueY, LoopSide::Y, tc));

    const auto offsets = oscillator_coupling_offsets(sc);
    report.add(verify_coupling_bound(traj, LoopSide::X, sys.coupling.betaX, CouplingBoundMode::L2WithOffset,
                                     offsets.intoPsiY, opt.couplingTolerance));
    report.add(verify_coupling_bound(traj, LoopSide::Y, sys.coupling.betaY, CouplingBoundMode::L2WithOffset,
                                     offsets.intoPsiX, opt.couplingTolerance));

    ConvergenceConfig cc;
    cc.window = opt.tailWindow;
    cc.psiThreshold = opt.psiThreshold;
    cc.mismatchThreshold = opt.mismatchThreshold;
    report.append(convergence_monitor(traj, cc));
    return out;
}

} // namespace nladapt

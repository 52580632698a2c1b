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
#ifndef NLADAPT_SCENARIO_HPP
#define NLADAPT_SCENARIO_HPP

#include "nladapt/certify.hpp"
#include "nladapt/interconnect.hpp"
#include "nladapt/simulate.hpp"

#include <iosfwd>
#include <string>

namespace nladapt {

/// Tolerances and sample counts used by certify_scenario.
struct CertifyOptions {
    std::size_t monotonicitySamples = 10000;
    double tailWindow = 5.0;
    double psiThreshold = 1e-2;
    double mismatchThreshold = 1e-2;
    double theoremTolerance = 1e-4;
    double couplingTolerance = 1e-6;
    unsigned long long seed = kDefaultSeed;

    bool operator==(const CertifyOptions&) const = default;
};

/**
 * Two oscillators with nonlinear damping, coupled through their positions:
 *
 *     x1' = x2,   x2' = thetaX (x1 - x0) + sineX sin(thetaX (x1 - x0)) + k1 y1 + uX
 *     y1' = y2,   y2' = thetaY (y1 - y0) + sineY sin(thetaY (y1 - y0)) + k2 x1 + uY
 *
 * with psi = x1 + x2, alpha = x1 - x0, phi = lambda psi and Psi = 0.
 * Defaults reproduce the published case study.
 */
struct OscillatorScenario {
    double k1 = 0.4;
    double k2 = 0.4;
    double lambdaX = 2.0;
    double lambdaY = 2.0;
    double x0 = 1.0;
    double y0 = 1.0;
    double thetaX = 1.0;
    double thetaY = 1.0;
    double GammaX = 1.0;
    double GammaY = 1.0;
    double sineX = 0.5;
    double sineY = 0.6;

    double x1Init = -1.0;
    double x2Init = 0.0;
    double y1Init = 1.0;
    double y2Init = 0.0;
    double thetaIX0 = -1.0;
    double thetaIY0 = -2.0;

    IntegratorConfig integrator{};
    CertifyOptions certify{};

    /// Throws ValidationError unless lambdas and Gammas are positive and 0 <= sine < 1.
    void validate() const;

    bool operator==(const OscillatorScenario&) const = default;
};

/**
 * One oscillator loop: state (x1, x2), parameter box [0.2, 2], state box
 * [-3, 3]^2, D = 1 + sine and D1 = 1 - sine. psiInit only enters the
 * declared target-dynamics gains.
 */
AdaptiveLoopSpec make_oscillator_loop(double lambda, double offset, double Gamma, double sine, double psiInit = 0.0);

/// Oscillator nonlinearity theta a + sine sin(theta a), a = x1 - offset.
double oscillator_nonlinearity(double x1, double offset, double theta, double sine);

CoupledClosedLoop build_oscillator(const OscillatorScenario& sc);

/// x (+) thetaI_x (+) y (+) thetaI_y at t0.
Vector initial_state(const OscillatorScenario& sc);

/// Small-gain inputs assembled from the loops and coupling of the scenario.
SmallGainProblem oscillator_small_gain(const OscillatorScenario& sc);

/**
 * Offsets C of the running L2 coupling bounds. The channel into psi_y is
 * k2 x1 and ||x1||_2 <= |x1(0)| / sqrt(2) + ||psi_x||_2, so C = k2 |x1(0)| / sqrt(2);
 * symmetrically for the channel into psi_x.
 */
struct CouplingOffsets {
    double intoPsiX = 0.0;
    double intoPsiY = 0.0;
};
CouplingOffsets oscillator_coupling_offsets(const OscillatorScenario& sc);

/// Flat sectioned key = value text; see README for the grammar.
std::string serialize(const OscillatorScenario& sc);
/// Throws ValidationError on unknown keys, malformed numbers or invariant violations.
OscillatorScenario parse_scenario(const std::string& text);
OscillatorScenario load_scenario(const std::string& path);

struct ScenarioCertificate {
    CertificateReport report;
    Trajectory trajectory;
};

/**
 * Assumption checks for both loops, small-gain test, one simulation and the
 * trajectory monitors on it.
 */
ScenarioCertificate certify_scenario(const OscillatorScenario& sc);

/// Exit codes of run_cli.
enum ExitCode : int { kExitOk = 0, kExitCertificateFailed = 1, kExitUsage = 2, kExitAborted = 3 };

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace nladapt

#endif // NLADAPT_SCENARIO_HPP

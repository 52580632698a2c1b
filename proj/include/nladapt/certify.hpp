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
#ifndef NLADAPT_CERTIFY_HPP
#define NLADAPT_CERTIFY_HPP

#include "nladapt/adaptation.hpp"
#include "nladapt/report.hpp"
#include "nladapt/simulate.hpp"

#include <vector>

namespace nladapt {

/// f(x, theta, t) as a plain callable.
using ScalarUncertainty = std::function<double(const Vector& x, const Vector& theta, double t)>;

struct MonotonicityConfig {
    std::size_t samples = 10000;
    unsigned long long seed = kDefaultSeed;
    /// sign condition (f(thetaHat) - f(theta)) alpha^T (thetaHat - theta) >= -signTolerance
    double signTolerance = 1e-10;
    /// samples with |alpha^T dtheta| below this do not enter the ratio estimates
    double denominatorFloor = 1e-9;
    /// relative slack granted to the declared D and D1
    double relativeTolerance = 1e-6;
};

struct MonotonicityResult {
    CertificateEntry entry;
    /// max |df| / |alpha^T dtheta| over usable samples
    double dHat = 0.0;
    /// min |df| / |alpha^T dtheta| over usable samples
    double d1Hat = 0.0;
    std::size_t usable = 0;
};

/**
 * Samples (x, t, theta, thetaHat) from the boxes and checks the monotonicity
 * sign condition plus the declared growth constants param.D and param.D1.
 * Inconclusive when no sample clears the denominator floor.
 */
MonotonicityResult verify_monotonicity(const ScalarUncertainty& f, const Parametrization& param,
                                       const DomainBox& stateBox, const DomainBox& paramBox, TimeWindow window,
                                       const MonotonicityConfig& cfg = {});

/// Same, with f = f_scalar(spec, goal, .) over the spec's own boxes.
MonotonicityResult verify_monotonicity(const SubsystemSpec& spec, const GoalFunction& goal,
                                       const Parametrization& param, const MonotonicityConfig& cfg = {});

enum class LoopSide { X, Y };

struct Theorem1Config {
    /// absolute slack added to both running bounds
    double tolerance = 1e-6;
    /// per-step slack of the parameter-error monotonicity check
    double lyapunovStepTolerance = 1e-8;
    /// max |eps| under which the disturbance is treated as identically zero
    double zeroDisturbance = 0.0;
};

/**
 * Runtime monitors of the decoupled-loop guarantees along a trajectory,
 * using the logged eps of the loop as the disturbance:
 *
 *  - mismatch_l2:     ||f(theta) - f(thetaHat)||_2 <= sqrt(D/2 e0) + D/D1 ||eps||_2
 *  - parameter_norm:  |theta - thetaHat(T)|^2_{Gamma^-1} <= e0 + D/(2 D1^2) ||eps||_2^2
 *  - lyapunov_nonincreasing (only when eps == 0): 1/2 |thetaHat - theta|^2_{Gamma^-1} per step
 *
 * with e0 = |theta - thetaHat(t0)|^2_{Gamma^-1}, checked at every logged T.
 * D, D1 and Gamma are read from the loop spec.
 */
CertificateReport theorem1_monitor(const Trajectory& traj, const AdaptiveLoopSpec& loop, const Vector& thetaTrue,
                                   LoopSide side = LoopSide::X, const Theorem1Config& cfg = {});

/**
 * Inputs of the small-gain test
 *
 *     bY o gY o r1 o (RY + 1) o r3 o bX o gX o r2 o (RX + 1) (s) < s   for s >= sBar
 *
 * with R = D / D1 and probes r(s) = (1 + delta) s, delta > 0.
 */
struct SmallGainProblem {
    GainDescriptor gainX22 = GainDescriptor::linear(0.0, 0.0);
    GainDescriptor gainY22 = GainDescriptor::linear(0.0, 0.0);
    double betaX = 0.0;
    double betaY = 0.0;
    double ratioX = 1.0;
    double ratioY = 1.0;
    std::vector<double> probeDeltas{1e-9, 1e-6, 1e-4, 1e-3, 1e-2, 1e-1};
    double scanMin = 0.0;
    double scanMax = 1e3;
    std::size_t scanPoints = 400;

    void validate() const;
};

/**
 * Linear gains: exact product test bY bX gX gY (RY + 1)(RX + 1) < 1, margin
 * 1 - product. Otherwise a log-grid scan over [scanMin, scanMax] for each
 * probe delta, margin = best relative slack min (s - composed(s)) / s; the
 * result only covers the scanned range.
 */
CertificateEntry check_small_gain(const SmallGainProblem& prob);

enum class CouplingBoundMode { Pointwise, L2WithOffset };

/**
 * Checks the channel driven by the driver subsystem against its psi:
 * pointwise |h(t)| <= beta |psi(t)|, or running ||h||_2 <= beta ||psi||_2 + offset.
 * For driver X the channel is epsIntoPsiY; for driver Y it is epsIntoPsiX.
 */
CertificateEntry verify_coupling_bound(const Trajectory& traj, LoopSide driver, double beta, CouplingBoundMode mode,
                                       double offset = 0.0, double tolerance = 1e-6);

struct ConvergenceConfig {
    double window = 5.0;
    double psiThreshold = 1e-2;
    double mismatchThreshold = 1e-2;
};

/// Tail suprema of |psi| and |f(theta) - f(thetaHat)| over [t_end - window, t_end].
CertificateReport convergence_monitor(const Trajectory& traj, const ConvergenceConfig& cfg = {});

/// Single entry PASS iff the run completed.
CertificateEntry run_status_entry(const Trajectory& traj);

} // namespace nladapt

#endif // NLADAPT_CERTIFY_HPP

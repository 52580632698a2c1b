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
#ifndef NLADAPT_SIMULATE_HPP
#define NLADAPT_SIMULATE_HPP

#include "nladapt/interconnect.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nladapt {

struct IntegratorConfig {
    double step = 1e-3;
    double tFinal = 50.0;
    double divergenceBound = 1e6;
    std::size_t logEvery = 1;
    double t0 = 0.0;

    /// Throws ValidationError unless step > 0, tFinal > 0, step <= tFinal, logEvery >= 1.
    void validate() const;
    /// Number of RK4 steps, round(tFinal / step).
    std::size_t steps() const;

    bool operator==(const IntegratorConfig&) const = default;
};

enum class RunStatus { Completed, Diverged, Singular };

const char* to_string(RunStatus s) noexcept;

/**
 * Logged samples of one loop. Running accumulators are stored per sample:
 * l2X[k] is the trapezoidal L2 norm of X over [t0, times[k]], linfPsi[k] the
 * running sup of |psi|.
 */
struct LoopRecord {
    std::vector<Vector> state;
    std::vector<Vector> thetaHat;
    std::vector<Vector> thetaI;
    std::vector<double> psi;
    std::vector<double> u;
    std::vector<double> eps;
    std::vector<double> mismatch;

    std::vector<double> l2Psi;
    std::vector<double> linfPsi;
    std::vector<double> l2Eps;
    std::vector<double> l2Mismatch;
};

struct Trajectory {
    std::vector<double> times;
    LoopRecord x;
    /// Present for coupled runs only.
    std::optional<LoopRecord> y;
    RunStatus status = RunStatus::Completed;
    std::string message;
    double spacing = 0.0;

    std::size_t size() const noexcept { return times.size(); }
    bool coupled() const noexcept { return y.has_value(); }
};

using OdeRhs = std::function<Vector(double t, const Vector& y)>;

/// One classical fourth-order Runge-Kutta step.
Vector rk4_step(const OdeRhs& f, double t, const Vector& y, double h);

struct OdeSolution {
    std::vector<double> times;
    std::vector<Vector> states;
    RunStatus status = RunStatus::Completed;
};

/// Fixed-step RK4 for a plain ODE, logged every cfg.logEvery steps.
OdeSolution integrate_ode(const OdeRhs& f, const Vector& y0, const IntegratorConfig& cfg);

/// Scalar disturbance eps(t) added to a single loop's error equation.
using Disturbance = std::function<double(double t)>;

namespace disturbance {
Disturbance zero();
/// c * exp(-a t), a > 0.
Disturbance decaying_exponential(double c, double a);
/// amplitude on [start, stop), zero elsewhere.
Disturbance truncated_pulse(double amplitude, double start, double stop);
} // namespace disturbance

/// Coupled run; aug0 = x (+) thetaI_x (+) y (+) thetaI_y.
Trajectory integrate(const CoupledClosedLoop& sys, const IntegratorConfig& cfg, const Vector& aug0);

/**
 * Single loop driven by eps(t); aug0 = x (+) thetaI. The disturbance enters
 * the x2 block along dpsi/dx2 / |dpsi/dx2|^2 so that it appears unscaled in
 * psi'. Where dpsi/dx2 vanishes nothing is injected and the logged eps is 0.
 */
Trajectory integrate(const AdaptiveLoopSpec& loop, const Vector& thetaTrue, const Disturbance& eps,
                     const IntegratorConfig& cfg, const Vector& aug0, const ControlLawConfig& control = {});

/**
 * Earliest logged t* with |psi_x| <= epsX and |psi_y| <= epsY on every
 * logged sample in [t*, t_end], provided t_end - t* >= tailWindow.
 * Single-loop trajectories ignore epsY.
 */
std::optional<double> goal_attainment(const Trajectory& traj, double epsX, double epsY, double tailWindow = 0.0);

std::string csv_header(const Trajectory& traj);
/// Header row plus one row per sample, 17 significant digits.
void write_csv(const Trajectory& traj, std::ostream& os);

} // namespace nladapt

#endif // NLADAPT_SIMULATE_HPP

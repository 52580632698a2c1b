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
#ifndef NLADAPT_CONTROLLER_HPP
#define NLADAPT_CONTROLLER_HPP

#include "nladapt/core_model.hpp"

namespace nladapt {

struct ControlLawConfig {
    /// Smallest admissible |L_g psi|.
    double singularityFloor = 1e-9;

    void validate() const;
};

/**
 * Certainty-equivalent control
 *
 *     u = (L_g psi)^-1 (-L_{f(x, thetaHat)} psi - phi(psi, t) - dpsi/dt).
 *
 * Only this subsystem's state is an argument. Throws SingularityError when
 * |L_g psi| < cfg.singularityFloor.
 */
double control(const SubsystemSpec& spec, const GoalFunction& goal, const TargetShaper& shaper,
               const Vector& x, const Vector& thetaHat, double t, const ControlLawConfig& cfg = {});

/// Error model psi' = f(x, theta) - f(x, thetaHat) - phi(psi, t) + eps.
double error_rhs(const SubsystemSpec& spec, const GoalFunction& goal, const TargetShaper& shaper,
                 const Vector& x, const Vector& theta, const Vector& thetaHat, double t, double eps,
                 const ControlLawConfig& cfg = {});

} // namespace nladapt

#endif // NLADAPT_CONTROLLER_HPP

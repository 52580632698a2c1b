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
#include "nladapt/controller.hpp"

#include <cmath>

namespace nladapt {

void ControlLawConfig::validate() const {
    if (!(singularityFloor > 0.0)) {
        throw ValidationError("singularity floor must be positive");
    }
}

double control(const SubsystemSpec& spec, const GoalFunction& goal, const TargetShaper& shaper,
               const Vector& x, const Vector& thetaHat, double t, const ControlLawConfig& cfg) {
    const double lg = input_gain(spec, goal, x, t);
    if (!(std::abs(lg) >= cfg.singularityFloor)) {
        throw SingularityError(x, t, lg);
    }
    const double psi = goal.psi(x, t);
    return (-f_scalar(spec, goal, x, thetaHat, t) - shaper.phi(psi, t) - goal.dTime(x, t)) / lg;
}

double error_rhs(const SubsystemSpec& spec, const GoalFunction& goal, const TargetShaper& shaper,
                 const Vector& x, const Vector& theta, const Vector& thetaHat, double t, double eps,
                 const ControlLawConfig& cfg) {
    (void)control(spec, goal, shaper, x, thetaHat, t, cfg);
    const double psi = goal.psi(x, t);
    return f_scalar(spec, goal, x, theta, t) - f_scalar(spec, goal, x, thetaHat, t) - shaper.phi(psi, t) + eps;
}

} // namespace nladapt

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
#ifndef NLADAPT_INTERCONNECT_HPP
#define NLADAPT_INTERCONNECT_HPP

#include "nladapt/adaptation.hpp"
#include "nladapt/controller.hpp"

#include <string>

namespace nladapt {

/**
 * Coupling between two subsystems. Each field returns only the block added to
 * the partner's x2 (resp. y2) equation; the x1/y1 blocks receive nothing.
 *
 * Declared bounds: betaX bounds the channel driven by x (epsIntoPsiY) in terms
 * of psi_x, betaY bounds the channel driven by y (epsIntoPsiX) in terms of psi_y.
 */
struct Coupling {
    /// gamma_y(y, t): enters the x2 block, length p_x.
    std::function<Vector(const Vector& y, double t)> gammaToX;
    /// gamma_x(x, t): enters the y2 block, length p_y.
    std::function<Vector(const Vector& x, double t)> gammaToY;
    double betaX = 0.0;
    double betaY = 0.0;

    static Coupling none(std::size_t px, std::size_t py);
};

/// One subsystem's closed-loop quantities at a single (x, thetaI, t).
struct LoopEvaluation {
    Vector thetaHat;
    double psi = 0.0;
    double u = 0.0;
    Vector stateRate;
    Vector thetaIRate;
    /// f(x, theta) - f(x, thetaHat)
    double mismatch = 0.0;
    /// Disturbance dpsi/dx2 . injection entering this loop's error model.
    double eps = 0.0;
};

/**
 * Closed-loop right-hand side of one adaptive loop with an additive x2-block
 * injection (coupling or disturbance). The controller and adaptation law see
 * only (x, thetaI, t); thetaTrue is used solely for the plant's f2.
 */
LoopEvaluation evaluate_loop(const AdaptiveLoopSpec& loop, const Vector& thetaTrue, const Vector& x,
                             const Vector& thetaI, double t, const Vector& injection,
                             const ControlLawConfig& cfg = {});

struct CoupledClosedLoop {
    AdaptiveLoopSpec loopX;
    AdaptiveLoopSpec loopY;
    Coupling coupling;
    Vector thetaTrueX;
    Vector thetaTrueY;
    ControlLawConfig control{};

    void validate() const;
};

/// Offsets of x, thetaI_x, y, thetaI_y inside the augmented state.
struct AugmentedLayout {
    Eigen::Index nx, dx, ny, dy;

    static AugmentedLayout of(const CoupledClosedLoop& sys);

    Eigen::Index size() const noexcept { return nx + dx + ny + dy; }
    Eigen::Index x_offset() const noexcept { return 0; }
    Eigen::Index thetaIx_offset() const noexcept { return nx; }
    Eigen::Index y_offset() const noexcept { return nx + dx; }
    Eigen::Index thetaIy_offset() const noexcept { return nx + dx + ny; }

    /// x (+) thetaIx (+) y (+) thetaIy.
    Vector pack(const Vector& x, const Vector& thetaIx, const Vector& y, const Vector& thetaIy) const;
};

struct CoupledEvaluation {
    LoopEvaluation x;
    LoopEvaluation y;
};

/// Evaluates both loops; singularities are rethrown tagged "x" or "y".
CoupledEvaluation evaluate_coupled(const CoupledClosedLoop& sys, double t, const Vector& augState);

/// Derivative of x (+) thetaI_x (+) y (+) thetaI_y.
Vector augmented_rhs(const CoupledClosedLoop& sys, double t, const Vector& augState);

/**
 * Scalar disturbance channels, named by the error equation they enter:
 * epsIntoPsiX = dpsi_x/dx2 . gamma_y(y, t) and epsIntoPsiY = dpsi_y/dy2 . gamma_x(x, t).
 */
struct CouplingTerms {
    double epsIntoPsiX = 0.0;
    double epsIntoPsiY = 0.0;
};

CouplingTerms coupling_terms(const CoupledClosedLoop& sys, double t, const Vector& augState);

} // namespace nladapt

#endif // NLADAPT_INTERCONNECT_HPP

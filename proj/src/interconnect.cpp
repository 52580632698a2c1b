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
#include "nladapt/interconnect.hpp"

namespace nladapt {

Coupling Coupling::none(std::size_t px, std::size_t py) {
    const auto a = static_cast<Eigen::Index>(px);
    const auto b = static_cast<Eigen::Index>(py);
    return Coupling{
        [a](const Vector&, double) -> Vector { return Vector::Zero(a); },
        [b](const Vector&, double) -> Vector { return Vector::Zero(b); },
        0.0,
        0.0,
    };
}

LoopEvaluation evaluate_loop(const AdaptiveLoopSpec& loop, const Vector& thetaTrue, const Vector& x,
                             const Vector& thetaI, double t, const Vector& injection, const ControlLawConfig& cfg) {
    const auto& spec = loop.spec();
    const auto& layout = spec.layout;
    layout.require_state(x);
    require_length("x2-block injection", layout.p(), static_cast<std::size_t>(injection.size()));
    require_length("true parameter", loop.paramDim(), static_cast<std::size_t>(thetaTrue.size()));

    LoopEvaluation ev;
    ev.thetaHat = theta_hat(loop, x, t, AdaptState{thetaI});
    ev.psi = loop.goal().psi(x, t);
    ev.u = control(spec, loop.goal(), loop.shaper(), x, ev.thetaHat, t, cfg);

    const auto q = static_cast<Eigen::Index>(layout.q());
    const auto p = static_cast<Eigen::Index>(layout.p());
    ev.stateRate.resize(q + p);
    const Vector f1 = spec.f1(x, t);
    const Vector g1 = spec.g1(x);
    const Vector f2 = spec.f2(x, thetaTrue, t);
    const Vector g2 = spec.g2(x);
    ev.stateRate.head(q) = f1 + g1 * ev.u;
    ev.stateRate.tail(p) = f2 + injection + g2 * ev.u;

    ev.thetaIRate = thetaI_rhs(loop, x, t, ev.u);
    ev.mismatch = f_scalar(spec, loop.goal(), x, thetaTrue, t) - f_scalar(spec, loop.goal(), x, ev.thetaHat, t);
    ev.eps = lie_derivative(injection, layout.x2(loop.goal().gradState(x, t)));
    return ev;
}

void CoupledClosedLoop::validate() const {
    require_length("true parameter X", loopX.paramDim(), static_cast<std::size_t>(thetaTrueX.size()));
    require_length("true parameter Y", loopY.paramDim(), static_cast<std::size_t>(thetaTrueY.size()));
    if (!coupling.gammaToX || !coupling.gammaToY) {
        throw ValidationError("coupling fields must be set");
    }
    if (!(coupling.betaX >= 0.0) || !(coupling.betaY >= 0.0)) {
        throw ValidationError("coupling bounds must be nonnegative");
    }
    control.validate();
}

AugmentedLayout AugmentedLayout::of(const CoupledClosedLoop& sys) {
    return AugmentedLayout{static_cast<Eigen::Index>(sys.loopX.stateDim()),
                           static_cast<Eigen::Index>(sys.loopX.paramDim()),
                           static_cast<Eigen::Index>(sys.loopY.stateDim()),
                           static_cast<Eigen::Index>(sys.loopY.paramDim())};
}

Vector AugmentedLayout::pack(const Vector& x, const Vector& thetaIx, const Vector& y, const Vector& thetaIy) const {
    require_length("x", static_cast<std::size_t>(nx), static_cast<std::size_t>(x.size()));
    require_length("thetaI_x", static_cast<std::size_t>(dx), static_cast<std::size_t>(thetaIx.size()));
    require_length("y", static_cast<std::size_t>(ny), static_cast<std::size_t>(y.size()));
    require_length("thetaI_y", static_cast<std::size_t>(dy), static_cast<std::size_t>(thetaIy.size()));
    Vector out(size());
    out << x, thetaIx, y, thetaIy;
    return out;
}

CoupledEvaluation evaluate_coupled(const CoupledClosedLoop& sys, double t, const Vector& augState) {
    const auto L = AugmentedLayout::of(sys);
    require_length("augmented state", static_cast<std::size_t>(L.size()), static_cast<std::size_t>(augState.size()));
    const Vector x = augState.segment(L.x_offset(), L.nx);
    const Vector thetaIx = augState.segment(L.thetaIx_offset(), L.dx);
    const Vector y = augState.segment(L.y_offset(), L.ny);
    const Vector thetaIy = augState.segment(L.thetaIy_offset(), L.dy);

    const Vector intoX = sys.coupling.gammaToX(y, t);
    const Vector intoY = sys.coupling.gammaToY(x, t);

    CoupledEvaluation out;
    try {
        out.x = evaluate_loop(sys.loopX, sys.thetaTrueX, x, thetaIx, t, intoX, sys.control);
    } catch (const SingularityError& e) {
        throw e.tagged("x");
    }
    try {
        out.y = evaluate_loop(sys.loopY, sys.thetaTrueY, y, thetaIy, t, intoY, sys.control);
    } catch (const SingularityError& e) {
        throw e.tagged("y");
    }
    return out;
}

Vector augmented_rhs(const CoupledClosedLoop& sys, double t, const Vector& augState) {
    const auto L = AugmentedLayout::of(sys);
    const auto ev = evaluate_coupled(sys, t, augState);
    return L.pack(ev.x.stateRate, ev.x.thetaIRate, ev.y.stateRate, ev.y.thetaIRate);
}

CouplingTerms coupling_terms(const CoupledClosedLoop& sys, double t, const Vector& augState) {
    const auto L = AugmentedLayout::of(sys);
    require_length("augmented state", static_cast<std::size_t>(L.size()), static_cast<std::size_t>(augState.size()));
    const Vector x = augState.segment(L.x_offset(), L.nx);
    const Vector y = augState.segment(L.y_offset(), L.ny);
    const auto& lx = sys.loopX.spec().layout;
    const auto& ly = sys.loopY.spec().layout;
    CouplingTerms out;
    out.epsIntoPsiX = lie_derivative(sys.coupling.gammaToX(y, t), lx.x2(sys.loopX.goal().gradState(x, t)));
    out.epsIntoPsiY = lie_derivative(sys.coupling.gammaToY(x, t), ly.x2(sys.loopY.goal().gradState(y, t)));
    return out;
}

} // namespace nladapt

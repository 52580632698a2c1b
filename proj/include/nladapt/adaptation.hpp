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
#ifndef NLADAPT_ADAPTATION_HPP
#define NLADAPT_ADAPTATION_HPP

#include "nladapt/controller.hpp"
#include "nladapt/core_model.hpp"
#include "nladapt/report.hpp"

namespace nladapt {

/**
 * Auxiliary potential Psi(x, t) in R^d. The adaptation law is realizable
 * (uses no x2-velocity, hence no theta) when dPsi/dx2 = psi * dalpha/dx2.
 */
struct AuxiliaryPotential {
    VectorField Psi;
    JacobianField gradState;
    VectorField dTime;

    static AuxiliaryPotential zero(std::size_t d, std::size_t n);
};

struct LoopValidation {
    std::size_t gradientSamples = 100;
    std::size_t realizabilitySamples = 200;
    double realizabilityTolerance = 1e-7;
    double symmetryTolerance = 1e-12;
    GradientTolerance gradientTolerance{};
    unsigned long long seed = kDefaultSeed;
};

/**
 * Everything one decentralized adaptive loop needs. Construction runs the
 * registration checks (field dimensions, analytic gradients against finite
 * differences, realizability residual of the potential, Gamma symmetric
 * positive definite) and throws ValidationError on the first failure.
 */
class AdaptiveLoopSpec {
public:
    AdaptiveLoopSpec(SubsystemSpec spec, GoalFunction goal, TargetShaper shaper, Parametrization param,
                     AuxiliaryPotential potential, Matrix gamma, const LoopValidation& validation = {});

    /// Skips every registration check. Meant for fault-injection studies only.
    static AdaptiveLoopSpec unvalidated(SubsystemSpec spec, GoalFunction goal, TargetShaper shaper,
                                        Parametrization param, AuxiliaryPotential potential, Matrix gamma);

    const SubsystemSpec& spec() const noexcept { return spec_; }
    const GoalFunction& goal() const noexcept { return goal_; }
    const TargetShaper& shaper() const noexcept { return shaper_; }
    const Parametrization& param() const noexcept { return param_; }
    const AuxiliaryPotential& potential() const noexcept { return potential_; }
    const Matrix& gamma() const noexcept { return gamma_; }
    const Matrix& gammaInverse() const noexcept { return gammaInverse_; }

    std::size_t stateDim() const noexcept { return spec_.layout.n(); }
    std::size_t paramDim() const noexcept { return spec_.paramDim; }

    /// v^T Gamma^-1 v.
    double gamma_inv_norm_sq(const Vector& v) const;

private:
    struct Unchecked {};
    AdaptiveLoopSpec(Unchecked, SubsystemSpec spec, GoalFunction goal, TargetShaper shaper, Parametrization param,
                     AuxiliaryPotential potential, Matrix gamma);

    SubsystemSpec spec_;
    GoalFunction goal_;
    TargetShaper shaper_;
    Parametrization param_;
    AuxiliaryPotential potential_;
    Matrix gamma_;
    Matrix gammaInverse_;
};

/// Integral part of the estimate.
struct AdaptState {
    Vector thetaI;
};

/// thetaHat = Gamma (psi * alpha - Psi + thetaI).
Vector theta_hat(const AdaptiveLoopSpec& loop, const Vector& x, double t, const AdaptState& adapt);

/**
 * Integral update thetaI' = phi * alpha + R with
 *
 *     R = dPsi/dt - psi (dalpha/dt + L_f1 alpha) + L_f1 Psi - (psi L_g1 alpha - L_g1 Psi) u.
 *
 * Only the x1 block fields f1, g1 are evaluated. The law depends on thetaHat
 * only through u, which the caller passes in.
 */
Vector thetaI_rhs(const AdaptiveLoopSpec& loop, const Vector& x, double t, double u);

/// thetaHat' = Gamma (psi' + phi(psi)) alpha, given the true closed-loop psi'.
Vector virtual_rhs(const AdaptiveLoopSpec& loop, const Vector& x, double t, double psiDot);

struct QuadratureConfig {
    double absTolerance = 1e-10;
    int maxDepth = 40;
    std::size_t precheckSamples = 200;
    double precheckTolerance = 1e-9;
    unsigned long long seed = kDefaultSeed;
};

/**
 * Psi(x, t) = int_{lo_k}^{x_{2k}} psi * dalpha/dx_{2k} dx_{2k} for goals and
 * parametrizations whose x2 dependence is confined to coordinate k of the x2
 * block. lo_k is the state box lower bound of that coordinate. Throws
 * ValidationError when another x2 coordinate carries a nonzero partial
 * (use check_poincare to diagnose those cases).
 */
AuxiliaryPotential build_potential_single_coordinate(const SubsystemSpec& spec, const GoalFunction& goal,
                                                     const Parametrization& param, std::size_t k,
                                                     const QuadratureConfig& cfg = {});

/// max |dPsi/dx2 - psi dalpha/dx2| over samples in the state box.
CertificateEntry check_realizability(const SubsystemSpec& spec, const GoalFunction& goal,
                                     const Parametrization& param, const AuxiliaryPotential& potential,
                                     std::size_t samples = 200, unsigned long long seed = kDefaultSeed,
                                     double tolerance = 1e-7);

/**
 * Symmetry of d/dx2 (psi dalpha_i/dx2) for every i, by finite differences.
 * The worst asymmetry residual equals tolerance - margin of the entry.
 */
CertificateEntry check_poincare(const SubsystemSpec& spec, const GoalFunction& goal, const Parametrization& param,
                                std::size_t samples = 200, unsigned long long seed = kDefaultSeed,
                                double tolerance = 1e-6);

} // namespace nladapt

#endif // NLADAPT_ADAPTATION_HPP

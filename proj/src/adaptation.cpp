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
#include "nladapt/adaptation.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nladapt {

AuxiliaryPotential AuxiliaryPotential::zero(std::size_t d, std::size_t n) {
    const auto dd = static_cast<Eigen::Index>(d);
    const auto nn = static_cast<Eigen::Index>(n);
    return AuxiliaryPotential{
        [dd](const Vector&, double) -> Vector { return Vector::Zero(dd); },
        [dd, nn](const Vector&, double) -> Matrix { return Matrix::Zero(dd, nn); },
        [dd](const Vector&, double) -> Vector { return Vector::Zero(dd); },
    };
}

AdaptiveLoopSpec::AdaptiveLoopSpec(Unchecked, SubsystemSpec spec, GoalFunction goal, TargetShaper shaper,
                                   Parametrization param, AuxiliaryPotential potential, Matrix gamma)
    : spec_(std::move(spec)),
      goal_(std::move(goal)),
      shaper_(std::move(shaper)),
      param_(std::move(param)),
      potential_(std::move(potential)),
      gamma_(std::move(gamma)) {
    require_length("Gamma rows", spec_.paramDim, static_cast<std::size_t>(gamma_.rows()));
    require_length("Gamma cols", spec_.paramDim, static_cast<std::size_t>(gamma_.cols()));
    gammaInverse_ = gamma_.fullPivLu().inverse();
}

AdaptiveLoopSpec AdaptiveLoopSpec::unvalidated(SubsystemSpec spec, GoalFunction goal, TargetShaper shaper,
                                               Parametrization param, AuxiliaryPotential potential, Matrix gamma) {
    return AdaptiveLoopSpec(Unchecked{}, std::move(spec), std::move(goal), std::move(shaper), std::move(param),
                            std::move(potential), std::move(gamma));
}

AdaptiveLoopSpec::AdaptiveLoopSpec(SubsystemSpec spec, GoalFunction goal, TargetShaper shaper,
                                   Parametrization param, AuxiliaryPotential potential, Matrix gamma,
                                   const LoopValidation& validation)
    : AdaptiveLoopSpec(Unchecked{}, std::move(spec), std::move(goal), std::move(shaper), std::move(param),
                       std::move(potential), std::move(gamma)) {
    spec_.validate();
    param_.validate();
    if (!goal_.psi || !goal_.gradState || !goal_.dTime || !shaper_.phi) {
        throw ValidationError("goal function and shaper callables must all be set");
    }
    if (!potential_.Psi || !potential_.gradState || !potential_.dTime) {
        throw ValidationError("auxiliary potential callables must all be set");
    }
    if (!(goal_.epsilonGoal >= 0.0)) {
        throw ValidationError("goal attainment threshold must be nonnegative");
    }

    if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > validation.symmetryTolerance) {
        throw ValidationError("Gamma must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gamma_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
        throw ValidationError("Gamma must be positive definite");
    }

    const auto tol = validation.gradientTolerance;
    const auto goalCheck = check_goal_gradient(goal_, spec_, validation.gradientSamples, validation.seed, tol);
    if (!goalCheck.passed) {
        std::ostringstream os;
        os << "goal gradient disagrees with finite differences (abs " << goalCheck.worstAbsolute << ", rel "
           << goalCheck.worstRelative << ")";
        throw ValidationError(os.str());
    }
    const auto paramCheck =
        check_parametrization_gradient(param_, spec_, validation.gradientSamples, validation.seed, tol);
    if (!paramCheck.passed) {
        std::ostringstream os;
        os << "parametrization Jacobian disagrees with finite differences (abs " << paramCheck.worstAbsolute
           << ", rel " << paramCheck.worstRelative << ")";
        throw ValidationError(os.str());
    }
    const auto real = check_realizability(spec_, goal_, param_, potential_, validation.realizabilitySamples,
                                          validation.seed, validation.realizabilityTolerance);
    if (!real.passed()) {
        throw ValidationError("auxiliary potential is not realizable: " + real.detail);
    }
}

double AdaptiveLoopSpec::gamma_inv_norm_sq(const Vector& v) const {
    require_length("parameter vector", paramDim(), static_cast<std::size_t>(v.size()));
    return v.dot(gammaInverse_ * v);
}

Vector theta_hat(const AdaptiveLoopSpec& loop, const Vector& x, double t, const AdaptState& adapt) {
    loop.spec().layout.require_state(x);
    require_length("thetaI", loop.paramDim(), static_cast<std::size_t>(adapt.thetaI.size()));
    const double psi = loop.goal().psi(x, t);
    const Vector alpha = loop.param().alpha(x, t);
    const Vector Psi = loop.potential().Psi(x, t);
    require_length("alpha", loop.paramDim(), static_cast<std::size_t>(alpha.size()));
    require_length("Psi", loop.paramDim(), static_cast<std::size_t>(Psi.size()));
    Vector out = loop.gamma() * (psi * alpha - Psi + adapt.thetaI);
    require_finite("thetaHat", out);
    return out;
}

Vector thetaI_rhs(const AdaptiveLoopSpec& loop, const Vector& x, double t, double u) {
    const auto& layout = loop.spec().layout;
    layout.require_state(x);
    const auto q = static_cast<Eigen::Index>(layout.q());

    const double psi = loop.goal().psi(x, t);
    const Vector alpha = loop.param().alpha(x, t);
    const Matrix dAlpha = loop.param().gradState(x, t);
    const Vector dAlphaDt = loop.param().dTime(x, t);
    const Matrix dPsi = loop.potential().gradState(x, t);
    const Vector dPsiDt = loop.potential().dTime(x, t);

    const Vector f1 = loop.spec().f1(x, t);
    const Vector g1 = loop.spec().g1(x);
    require_length("f1 output", layout.q(), static_cast<std::size_t>(f1.size()));
    require_length("g1 output", layout.q(), static_cast<std::size_t>(g1.size()));

    const Vector lf1Alpha = dAlpha.leftCols(q) * f1;
    const Vector lg1Alpha = dAlpha.leftCols(q) * g1;
    const Vector lf1Psi = dPsi.leftCols(q) * f1;
    const Vector lg1Psi = dPsi.leftCols(q) * g1;

    const Vector r = dPsiDt - psi * (dAlphaDt + lf1Alpha) + lf1Psi - (psi * lg1Alpha - lg1Psi) * u;
    return loop.shaper().phi(psi, t) * alpha + r;
}

Vector virtual_rhs(const AdaptiveLoopSpec& loop, const Vector& x, double t, double psiDot) {
    const double psi = loop.goal().psi(x, t);
    return loop.gamma() * ((psiDot + loop.shaper().phi(psi, t)) * loop.param().alpha(x, t));
}

namespace {

struct SimpsonPanel {
    double a, b;
    Vector fa, fm, fb, whole;
};

Vector simpson_recurse(const std::function<Vector(double)>& f, const SimpsonPanel& p, double tol, int depth) {
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const Vector flm = f(lm);
    const Vector frm = f(rm);
    const double h = (p.b - p.a) / 12.0;
    const Vector left = h * (p.fa + 4.0 * flm + p.fm);
    const Vector right = h * (p.fm + 4.0 * frm + p.fb);
    const Vector delta = left + right - p.whole;
    if (depth <= 0 || delta.lpNorm<Eigen::Infinity>() <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth - 1) +
           simpson_recurse(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth - 1);
}

// Adaptive Simpson on [a, b] (b < a allowed) for a vector-valued integrand.
Vector adaptive_simpson(const std::function<Vector(double)>& f, double a, double b, double tol, int maxDepth) {
    const Vector fa = f(a);
    if (a == b) {
        return Vector::Zero(fa.size());
    }
    const Vector fb = f(b);
    const Vector fm = f(0.5 * (a + b));
    const Vector whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, {a, b, fa, fm, fb, whole}, tol, maxDepth);
}

double fd_step(double at) { return 1e-3 * std::max(1.0, std::abs(at)); }

// 5-point central difference of a matrix column along one coordinate (or time when coord < 0).
Vector column_derivative(const JacobianField& jac, Eigen::Index col, const Vector& x, double t, Eigen::Index coord) {
    const double at = coord < 0 ? t : x[coord];
    const double h = fd_step(at);
    auto eval = [&](double v) -> Vector {
        if (coord < 0) {
            return jac(x, v).col(col);
        }
        Vector y = x;
        y[coord] = v;
        return jac(y, t).col(col);
    };
    return (-eval(at + 2 * h) + 8.0 * eval(at + h) - 8.0 * eval(at - h) + eval(at - 2 * h)) / (12.0 * h);
}

} // namespace

AuxiliaryPotential build_potential_single_coordinate(const SubsystemSpec& spec, const GoalFunction& goal,
                                                     const Parametrization& param, std::size_t k,
                                                     const QuadratureConfig& cfg) {
    spec.validate();
    const auto& layout = spec.layout;
    if (k >= layout.p()) {
        throw DimensionError("single-coordinate potential: coordinate index within x2 block", layout.p(), k);
    }
    const auto n = static_cast<Eigen::Index>(layout.n());
    const auto q = static_cast<Eigen::Index>(layout.q());
    const Eigen::Index c = q + static_cast<Eigen::Index>(k);

    HaltonSampler sampler(layout.n() + 1, cfg.seed);
    for (std::size_t s = 0; s < cfg.precheckSamples; ++s) {
        const Vector u = sampler.next();
        const Vector x = spec.stateBox.map_unit(u.head(n));
        const double t = spec.timeWindow.begin + u[n] * (spec.timeWindow.end - spec.timeWindow.begin);
        const Vector gpsi = goal.gradState(x, t);
        const Matrix ja = param.gradState(x, t);
        for (Eigen::Index j = q; j < n; ++j) {
            if (j == c) {
                continue;
            }
            const double worst = std::max(std::abs(gpsi[j]), ja.col(j).cwiseAbs().maxCoeff());
            if (worst > cfg.precheckTolerance) {
                std::ostringstream os;
                os << "single-coordinate potential needs psi and alpha to depend on x2 only through coordinate "
                   << k << ", but state coordinate " << j << " has partial " << worst
                   << "; run check_poincare to test whether a potential exists";
                throw ValidationError(os.str());
            }
        }
    }

    const double lower = spec.stateBox.lower[c];
    const double tol = cfg.absTolerance;
    const int depth = cfg.maxDepth;

    auto along = [c](const Vector& x, double s) {
        Vector y = x;
        y[c] = s;
        return y;
    };

    auto Psi = [=](const Vector& x, double t) -> Vector {
        auto integrand = [&](double s) -> Vector {
            const Vector y = along(x, s);
            return goal.psi(y, t) * param.gradState(y, t).col(c);
        };
        return adaptive_simpson(integrand, lower, x[c], tol, depth);
    };

    // Leibniz rule: differentiate under the integral; the upper limit contributes
    // the integrand itself for coordinate c.
    auto grad = [=](const Vector& x, double t) -> Matrix {
        const Matrix atX = param.gradState(x, t);
        Matrix out(atX.rows(), n);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == c) {
                out.col(j) = goal.psi(x, t) * atX.col(c);
                continue;
            }
            auto integrand = [&](double s) -> Vector {
                const Vector y = along(x, s);
                return goal.gradState(y, t)[j] * param.gradState(y, t).col(c) +
                       goal.psi(y, t) * column_derivative(param.gradState, c, y, t, j);
            };
            out.col(j) = adaptive_simpson(integrand, lower, x[c], tol, depth);
        }
        return out;
    };

    auto dTime = [=](const Vector& x, double t) -> Vector {
        auto integrand = [&](double s) -> Vector {
            const Vector y = along(x, s);
            return goal.dTime(y, t) * param.gradState(y, t).col(c) +
                   goal.psi(y, t) * column_derivative(param.gradState, c, y, t, -1);
        };
        return adaptive_simpson(integrand, lower, x[c], tol, depth);
    };

    return AuxiliaryPotential{Psi, grad, dTime};
}

CertificateEntry check_realizability(const SubsystemSpec& spec, const GoalFunction& goal,
                                     const Parametrization& param, const AuxiliaryPotential& potential,
                                     std::size_t samples, unsigned long long seed, double tolerance) {
    const auto& layout = spec.layout;
    const auto n = static_cast<Eigen::Index>(layout.n());
    const auto q = static_cast<Eigen::Index>(layout.q());
    const auto p = static_cast<Eigen::Index>(layout.p());
    HaltonSampler sampler(layout.n() + 1, seed);
    double worst = 0.0;
    Vector witness;
    double witnessTime = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector u = sampler.next();
        const Vector x = spec.stateBox.map_unit(u.head(n));
        const double t = spec.timeWindow.begin + u[n] * (spec.timeWindow.end - spec.timeWindow.begin);
        const Matrix dPsi = potential.gradState(x, t);
        const Matrix dAlpha = param.gradState(x, t);
        require_length("potential Jacobian cols", layout.n(), static_cast<std::size_t>(dPsi.cols()));
        require_length("potential Jacobian rows", static_cast<std::size_t>(dAlpha.rows()),
                       static_cast<std::size_t>(dPsi.rows()));
        double r = (dPsi.middleCols(q, p) - goal.psi(x, t) * dAlpha.middleCols(q, p)).cwiseAbs().maxCoeff();
        if (std::isnan(r)) {
            r = std::numeric_limits<double>::infinity();
        }
        if (witness.size() == 0 || r > worst) {
            worst = r;
            witness = x;
            witnessTime = t;
        }
    }
    std::ostringstream os;
    os << "max |dPsi/dx2 - psi dalpha/dx2| = " << worst << " over " << samples << " samples";
    return CertificateEntry::from_margin("realizability", tolerance - worst, tolerance, witness, witnessTime,
                                         os.str());
}

CertificateEntry check_poincare(const SubsystemSpec& spec, const GoalFunction& goal, const Parametrization& param,
                                std::size_t samples, unsigned long long seed, double tolerance) {
    const auto& layout = spec.layout;
    const auto n = static_cast<Eigen::Index>(layout.n());
    const auto q = static_cast<Eigen::Index>(layout.q());
    const auto p = static_cast<Eigen::Index>(layout.p());
    const auto d = static_cast<Eigen::Index>(spec.paramDim);

    // field_i(x) = psi(x) * dalpha_i/dx2, a p-vector
    auto field = [&](const Vector& x, double t, Eigen::Index i) -> Vector {
        return goal.psi(x, t) * param.gradState(x, t).row(i).segment(q, p).transpose();
    };

    HaltonSampler sampler(layout.n() + 1, seed);
    double worst = 0.0;
    Vector witness;
    double witnessTime = 0.0;
    Eigen::Index worstComponent = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vector u = sampler.next();
        const Vector x = spec.stateBox.map_unit(u.head(n));
        const double t = spec.timeWindow.begin + u[n] * (spec.timeWindow.end - spec.timeWindow.begin);
        if (witness.size() == 0) {
            witness = x;
            witnessTime = t;
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            Matrix jac(p, p);
            for (Eigen::Index b = 0; b < p; ++b) {
                const Eigen::Index coord = q + b;
                const double h = fd_step(x[coord]);
                auto shifted = [&](double delta) {
                    Vector y = x;
                    y[coord] += delta;
                    return field(y, t, i);
                };
                jac.col(b) = (-shifted(2 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) + shifted(-2 * h)) / (12.0 * h);
            }
            const double asym = (jac - jac.transpose()).cwiseAbs().maxCoeff();
            if (asym > worst) {
                worst = asym;
                witness = x;
                witnessTime = t;
                worstComponent = i;
            }
        }
    }
    std::ostringstream os;
    os << "worst asymmetry " << worst << " (alpha component " << worstComponent << ") over " << samples
       << " samples";
    return CertificateEntry::from_margin("poincare_symmetry", tolerance - worst, tolerance, witness, witnessTime,
                                         os.str());
}

} // namespace nladapt

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
#ifndef NLADAPT_CORE_MODEL_HPP
#define NLADAPT_CORE_MODEL_HPP

#include "nladapt/report.hpp"
#include "nladapt/types.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <variant>
#include <vector>

namespace nladapt {

/**
 * Split of a state vector into an uncertainty-independent block x1 = s[0, q)
 * and an uncertainty-dependent block x2 = s[q, n).
 */
class PartitionLayout {
public:
    PartitionLayout(std::size_t q, std::size_t p);

    std::size_t q() const noexcept { return q_; }
    std::size_t p() const noexcept { return p_; }
    std::size_t n() const noexcept { return q_ + p_; }

    auto x1(const Vector& state) const { return state.head(static_cast<Eigen::Index>(q_)); }
    auto x2(const Vector& state) const { return state.tail(static_cast<Eigen::Index>(p_)); }

    void require_state(const Vector& state) const;

private:
    std::size_t q_;
    std::size_t p_;
};

/// Per-coordinate closed interval [lower_i, upper_i].
struct DomainBox {
    Vector lower;
    Vector upper;

    static DomainBox uniform(std::size_t dim, double lo, double hi);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(lower.size()); }
    bool contains(const Vector& v) const;
    /// Affine image of a unit-cube point.
    Vector map_unit(const Eigen::Ref<const Vector>& unit) const;
    void validate() const;
};

/// Closed time interval the verifiers sample t from.
struct TimeWindow {
    double begin = 0.0;
    double end = 0.0;
};

using DriftField = std::function<Vector(const Vector& x, double t)>;
using UncertainField = std::function<Vector(const Vector& x, const Vector& theta, double t)>;
using InputField = std::function<Vector(const Vector& x)>;
using ScalarField = std::function<double(const Vector& x, double t)>;
using VectorField = std::function<Vector(const Vector& x, double t)>;
using JacobianField = std::function<Matrix(const Vector& x, double t)>;

/**
 * A controlled subsystem
 *
 *     x1' = f1(x, t) + g1(x) u
 *     x2' = f2(x, theta, t) + g2(x) u
 *
 * f1 and g1 cannot see theta: their signatures do not carry it.
 * The boxes bound every sampling-based verifier.
 */
struct SubsystemSpec {
    PartitionLayout layout;
    DriftField f1;
    UncertainField f2;
    InputField g1;
    InputField g2;
    std::size_t paramDim = 1;
    DomainBox stateBox;
    DomainBox paramBox;
    TimeWindow timeWindow;

    /// Throws ValidationError on inconsistent dimensions or missing callables.
    void validate() const;
};

/// Goal functional psi(x, t) with analytic partials and attainment threshold.
struct GoalFunction {
    ScalarField psi;
    VectorField gradState;
    ScalarField dTime;
    double epsilonGoal = 1e-2;
};

/**
 * alpha(x, t) of the monotone parametrization together with the growth
 * constants D (upper) and D1 (lower). gradState returns the d x n Jacobian.
 */
struct Parametrization {
    VectorField alpha;
    JacobianField gradState;
    VectorField dTime;
    double D = 1.0;
    double D1 = 1.0;

    void validate() const;
};

/// Gain bound: either C + g * s, or a monotone table interpolated linearly.
class GainDescriptor {
public:
    struct Linear {
        double offset = 0.0;
        double slope = 0.0;
    };
    struct Tabulated {
        std::vector<std::pair<double, double>> points;
    };

    static GainDescriptor linear(double offset, double slope);
    static GainDescriptor tabulated(std::vector<std::pair<double, double>> points);

    bool is_linear() const noexcept { return std::holds_alternative<Linear>(kind_); }
    const Linear& as_linear() const { return std::get<Linear>(kind_); }
    const Tabulated& as_tabulated() const { return std::get<Tabulated>(kind_); }

    /**
     * Class-K part of the gain at s >= 0 (the offset is not included for the
     * linear kind). Tabulated gains return nullopt outside the sampled range.
     */
    std::optional<double> evaluate(double s) const;

    double offset() const noexcept;

private:
    explicit GainDescriptor(std::variant<Linear, Tabulated> k) : kind_(std::move(k)) {}
    std::variant<Linear, Tabulated> kind_;
};

/**
 * Target dynamics psi' = -phi(psi, t) + zeta with declared gains
 * L2 -> Linf (gainInfToL2) and L2 -> L2 (gainL2ToL2).
 */
struct TargetShaper {
    std::function<double(double psi, double t)> phi;
    Vector omega;
    GainDescriptor gainInfToL2 = GainDescriptor::linear(0.0, 0.0);
    GainDescriptor gainL2ToL2 = GainDescriptor::linear(0.0, 0.0);

    /**
     * phi = lambda * psi. For psi' = -lambda psi + zeta the L2 -> L2 gain is
     * |psi0| / sqrt(2 lambda) + s / lambda and the L2 -> Linf gain is
     * |psi0| + s / sqrt(2 lambda).
     */
    static TargetShaper linear(double lambda, double psi0 = 0.0);
};

/// Sum_j grad_j * field_j.
double lie_derivative(const Eigen::Ref<const Vector>& field, const Eigen::Ref<const Vector>& gradSlice);

/// Lie derivative of a scalar with gradient `gradSlice` along `field(x, t)`.
double lie_derivative(const DriftField& field, const Eigen::Ref<const Vector>& gradSlice,
                      const Vector& x, double t);

/// Input gain L_g psi = dpsi/dx1 . g1(x) + dpsi/dx2 . g2(x).
double input_gain(const SubsystemSpec& spec, const GoalFunction& goal, const Vector& x, double t);

/// f(x, theta, t) = L_{f(x, theta)} psi, without the explicit time derivative.
double f_scalar(const SubsystemSpec& spec, const GoalFunction& goal, const Vector& x,
                const Vector& theta, double t);

/// Chain-rule derivative dpsi/dx . xdot + dpsi/dt.
double goal_rate(const GoalFunction& goal, const Vector& x, const Vector& xdot, double t);

/**
 * Randomly shifted Halton sequence on [0, 1)^dim. Prefixes are nested, so a
 * longer run visits a superset of the points of a shorter one with the same seed.
 */
class HaltonSampler {
public:
    HaltonSampler(std::size_t dim, unsigned long long seed = kDefaultSeed);

    Vector next();
    std::size_t dim() const noexcept { return shift_.size(); }

private:
    std::vector<double> shift_;
    std::vector<unsigned> bases_;
    unsigned long long index_ = 1;
};

/// Error statistics of an analytic derivative against 5-point central differences.
struct GradientCheck {
    double worstRelative = 0.0;
    double worstAbsolute = 0.0;
    Vector worstPoint;
    double worstTime = 0.0;
    std::size_t samples = 0;
    bool passed = true;
};

struct GradientTolerance {
    double relative = 1e-5;
    double absolute = 1e-8;
};

/// 5-point central difference of a scalar function of one variable.
double central_difference5(const std::function<double(double)>& f, double at, double step);

GradientCheck check_goal_gradient(const GoalFunction& goal, const SubsystemSpec& spec,
                                  std::size_t samples = 100, unsigned long long seed = kDefaultSeed,
                                  GradientTolerance tol = {});

GradientCheck check_parametrization_gradient(const Parametrization& param, const SubsystemSpec& spec,
                                             std::size_t samples = 100,
                                             unsigned long long seed = kDefaultSeed,
                                             GradientTolerance tol = {});

CertificateEntry to_entry(std::string name, const GradientCheck& check, GradientTolerance tol = {});

} // namespace nladapt

#endif // NLADAPT_CORE_MODEL_HPP

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
#include "nladapt/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nladapt {

PartitionLayout::PartitionLayout(std::size_t q, std::size_t p) : q_(q), p_(p) {
    if (p == 0) {
        throw ValidationError("partition layout needs at least one uncertainty-dependent coordinate (p >= 1)");
    }
}

void PartitionLayout::require_state(const Vector& state) const {
    require_length("state vector", n(), static_cast<std::size_t>(state.size()));
}

DomainBox DomainBox::uniform(std::size_t dim, double lo, double hi) {
    const auto n = static_cast<Eigen::Index>(dim);
    return DomainBox{Vector::Constant(n, lo), Vector::Constant(n, hi)};
}

bool DomainBox::contains(const Vector& v) const {
    if (v.size() != lower.size()) {
        return false;
    }
    return ((v.array() >= lower.array()) && (v.array() <= upper.array())).all();
}

Vector DomainBox::map_unit(const Eigen::Ref<const Vector>& unit) const {
    require_length("unit sample", dim(), static_cast<std::size_t>(unit.size()));
    return lower.array() + unit.array() * (upper - lower).array();
}

void DomainBox::validate() const {
    require_length("domain box upper bound", dim(), static_cast<std::size_t>(upper.size()));
    if (!(lower.array() <= upper.array()).all() || !lower.allFinite() || !upper.allFinite()) {
        throw ValidationError("domain box bounds must be finite with lower <= upper");
    }
}

void SubsystemSpec::validate() const {
    if (!f1 || !f2 || !g1 || !g2) {
        throw ValidationError("subsystem spec is missing a vector field");
    }
    if (paramDim == 0) {
        throw ValidationError("subsystem spec needs paramDim >= 1");
    }
    require_length("state box", layout.n(), stateBox.dim());
    require_length("parameter box", paramDim, paramBox.dim());
    stateBox.validate();
    paramBox.validate();
    if (!(timeWindow.begin <= timeWindow.end)) {
        throw ValidationError("time window must satisfy begin <= end");
    }
}

void Parametrization::validate() const {
    if (!alpha || !gradState || !dTime) {
        throw ValidationError("parametrization is missing a callable");
    }
    if (!(D1 > 0.0) || !(D >= D1)) {
        std::ostringstream os;
        os << "parametrization growth constants must satisfy D >= D1 > 0 (D = " << D << ", D1 = " << D1 << ")";
        throw ValidationError(os.str());
    }
}

GainDescriptor GainDescriptor::linear(double offset, double slope) {
    if (!(offset >= 0.0) || !(slope >= 0.0)) {
        throw ValidationError("linear gain needs offset >= 0 and slope >= 0");
    }
    return GainDescriptor(Linear{offset, slope});
}

GainDescriptor GainDescriptor::tabulated(std::vector<std::pair<double, double>> points) {
    if (points.empty() || points.front().first != 0.0) {
        throw ValidationError("tabulated gain must start at input 0");
    }
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].first > points[i - 1].first)) {
            throw ValidationError("tabulated gain inputs must be strictly increasing");
        }
        if (!(points[i].second >= points[i - 1].second)) {
            throw ValidationError("tabulated gain outputs must be non-decreasing");
        }
    }
    return GainDescriptor(Tabulated{std::move(points)});
}

std::optional<double> GainDescriptor::evaluate(double s) const {
    if (s < 0.0) {
        return std::nullopt;
    }
    if (const auto* lin = std::get_if<Linear>(&kind_)) {
        return lin->slope * s;
    }
    const auto& pts = std::get<Tabulated>(kind_).points;
    if (s > pts.back().first) {
        return std::nullopt;
    }
    auto hi = std::lower_bound(pts.begin(), pts.end(), s,
                               [](const auto& pt, double v) { return pt.first < v; });
    if (hi->first == s || hi == pts.begin()) {
        return hi->second;
    }
    auto lo = std::prev(hi);
    const double w = (s - lo->first) / (hi->first - lo->first);
    return lo->second + w * (hi->second - lo->second);
}

double GainDescriptor::offset() const noexcept {
    if (const auto* lin = std::get_if<Linear>(&kind_)) {
        return lin->offset;
    }
    return std::get<Tabulated>(kind_).points.front().second;
}

TargetShaper TargetShaper::linear(double lambda, double psi0) {
    if (!(lambda > 0.0)) {
        throw ValidationError("linear shaper needs lambda > 0");
    }
    TargetShaper s;
    s.phi = [lambda](double psi, double) { return lambda * psi; };
    s.omega = Vector::Constant(1, lambda);
    s.gainL2ToL2 = GainDescriptor::linear(std::abs(psi0) / std::sqrt(2.0 * lambda), 1.0 / lambda);
    s.gainInfToL2 = GainDescriptor::linear(std::abs(psi0), 1.0 / std::sqrt(2.0 * lambda));
    return s;
}

double lie_derivative(const Eigen::Ref<const Vector>& field, const Eigen::Ref<const Vector>& gradSlice) {
    require_length("lie derivative: field vs gradient slice", static_cast<std::size_t>(gradSlice.size()),
                   static_cast<std::size_t>(field.size()));
    return gradSlice.dot(field);
}

double lie_derivative(const DriftField& field, const Eigen::Ref<const Vector>& gradSlice, const Vector& x,
                      double t) {
    return lie_derivative(field(x, t), gradSlice);
}

double input_gain(const SubsystemSpec& spec, const GoalFunction& goal, const Vector& x, double t) {
    const auto& layout = spec.layout;
    layout.require_state(x);
    const Vector grad = goal.gradState(x, t);
    require_length("goal gradient", layout.n(), static_cast<std::size_t>(grad.size()));
    const Vector g1 = spec.g1(x);
    const Vector g2 = spec.g2(x);
    return lie_derivative(g1, layout.x1(grad)) + lie_derivative(g2, layout.x2(grad));
}

double f_scalar(const SubsystemSpec& spec, const GoalFunction& goal, const Vector& x, const Vector& theta,
                double t) {
    const auto& layout = spec.layout;
    layout.require_state(x);
    require_length("parameter vector", spec.paramDim, static_cast<std::size_t>(theta.size()));
    const Vector grad = goal.gradState(x, t);
    require_length("goal gradient", layout.n(), static_cast<std::size_t>(grad.size()));
    const Vector f1 = spec.f1(x, t);
    const Vector f2 = spec.f2(x, theta, t);
    require_finite("f1 output", f1);
    try {
        require_finite("f2 output", f2);
    } catch (const NumericError& e) {
        // report the coordinate in full-state numbering
        throw NumericError("f2 output", layout.q() + e.index());
    }
    return lie_derivative(f1, layout.x1(grad)) + lie_derivative(f2, layout.x2(grad));
}

double goal_rate(const GoalFunction& goal, const Vector& x, const Vector& xdot, double t) {
    const Vector grad = goal.gradState(x, t);
    require_length("state derivative", static_cast<std::size_t>(grad.size()), static_cast<std::size_t>(xdot.size()));
    return grad.dot(xdot) + goal.dTime(x, t);
}

namespace {

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

double radical_inverse(unsigned long long i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

} // namespace

HaltonSampler::HaltonSampler(std::size_t dim, unsigned long long seed) {
    if (dim > std::size(kPrimes)) {
        throw ValidationError("Halton sampler supports at most 32 dimensions");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    shift_.resize(dim);
    bases_.assign(std::begin(kPrimes), std::begin(kPrimes) + static_cast<std::ptrdiff_t>(dim));
    for (auto& s : shift_) {
        s = u(rng);
    }
}

Vector HaltonSampler::next() {
    Vector v(static_cast<Eigen::Index>(shift_.size()));
    for (std::size_t k = 0; k < shift_.size(); ++k) {
        double x = radical_inverse(index_, bases_[k]) + shift_[k];
        v[static_cast<Eigen::Index>(k)] = x - std::floor(x);
    }
    ++index_;
    return v;
}

double central_difference5(const std::function<double(double)>& f, double at, double step) {
    return (-f(at + 2 * step) + 8 * f(at + step) - 8 * f(at - step) + f(at - 2 * step)) / (12 * step);
}

namespace {

double fd_step(double at) { return 1e-3 * std::max(1.0, std::abs(at)); }

struct SamplePoint {
    Vector x;
    double t;
};

SamplePoint draw(HaltonSampler& sampler, const SubsystemSpec& spec) {
    const Vector u = sampler.next();
    const auto n = static_cast<Eigen::Index>(spec.layout.n());
    SamplePoint pt{spec.stateBox.map_unit(u.head(n)), spec.timeWindow.begin +
                                                          u[n] * (spec.timeWindow.end - spec.timeWindow.begin)};
    return pt;
}

// Records one analytic/numeric comparison into `check`.
void compare(GradientCheck& check, double analytic, double numeric, const SamplePoint& pt,
             GradientTolerance tol) {
    const double absErr = std::abs(analytic - numeric);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    const double relErr = scale > 0.0 ? absErr / scale : 0.0;
    const bool ok = absErr <= tol.absolute || relErr <= tol.relative;
    // worst = the comparison furthest outside the tolerance
    const double badness = std::min(absErr / tol.absolute, relErr / tol.relative);
    const double worstBadness =
        std::min(check.worstAbsolute / tol.absolute, check.worstRelative / tol.relative);
    if (badness > worstBadness || check.worstPoint.size() == 0) {
        check.worstAbsolute = absErr;
        check.worstRelative = relErr;
        check.worstPoint = pt.x;
        check.worstTime = pt.t;
    }
    check.passed = check.passed && ok;
}

} // namespace

GradientCheck check_goal_gradient(const GoalFunction& goal, const SubsystemSpec& spec, std::size_t samples,
                                  unsigned long long seed, GradientTolerance tol) {
    const std::size_t n = spec.layout.n();
    HaltonSampler sampler(n + 1, seed);
    GradientCheck check;
    check.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const SamplePoint pt = draw(sampler, spec);
        const Vector grad = goal.gradState(pt.x, pt.t);
        require_length("goal gradient", n, static_cast<std::size_t>(grad.size()));
        for (std::size_t j = 0; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            auto along = [&](double v) {
                Vector y = pt.x;
                y[jj] = v;
                return goal.psi(y, pt.t);
            };
            compare(check, grad[jj], central_difference5(along, pt.x[jj], fd_step(pt.x[jj])), pt, tol);
        }
        auto inTime = [&](double tau) { return goal.psi(pt.x, tau); };
        compare(check, goal.dTime(pt.x, pt.t), central_difference5(inTime, pt.t, fd_step(pt.t)), pt, tol);
    }
    return check;
}

GradientCheck check_parametrization_gradient(const Parametrization& param, const SubsystemSpec& spec,
                                             std::size_t samples, unsigned long long seed,
                                             GradientTolerance tol) {
    const std::size_t n = spec.layout.n();
    const std::size_t d = spec.paramDim;
    HaltonSampler sampler(n + 1, seed);
    GradientCheck check;
    check.samples = samples;
    for (std::size_t s = 0; s < samples; ++s) {
        const SamplePoint pt = draw(sampler, spec);
        const Matrix jac = param.gradState(pt.x, pt.t);
        const Vector dt = param.dTime(pt.x, pt.t);
        require_length("parametrization Jacobian rows", d, static_cast<std::size_t>(jac.rows()));
        require_length("parametrization Jacobian cols", n, static_cast<std::size_t>(jac.cols()));
        require_length("parametrization time derivative", d, static_cast<std::size_t>(dt.size()));
        for (std::size_t i = 0; i < d; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            for (std::size_t j = 0; j < n; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                auto along = [&](double v) {
                    Vector y = pt.x;
                    y[jj] = v;
                    return param.alpha(y, pt.t)[ii];
                };
                compare(check, jac(ii, jj), central_difference5(along, pt.x[jj], fd_step(pt.x[jj])), pt, tol);
            }
            auto inTime = [&](double tau) { return param.alpha(pt.x, tau)[ii]; };
            compare(check, dt[ii], central_difference5(inTime, pt.t, fd_step(pt.t)), pt, tol);
        }
    }
    return check;
}

CertificateEntry to_entry(std::string name, const GradientCheck& check, GradientTolerance tol) {
    // slack: how far inside the looser of the two tolerances the worst comparison sits
    const double margin =
        std::max(1.0 - check.worstAbsolute / tol.absolute, 1.0 - check.worstRelative / tol.relative);
    std::ostringstream os;
    os << check.samples << " samples, worst abs " << check.worstAbsolute << ", worst rel " << check.worstRelative;
    return CertificateEntry::from_margin(std::move(name), check.passed ? std::max(margin, 1e-300) : std::min(margin, 0.0),
                                         tol.relative, check.worstPoint, check.worstTime, os.str());
}

} // namespace nladapt

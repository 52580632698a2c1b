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
#ifndef NLADAPT_TESTS_SUPPORT_HPP
#define NLADAPT_TESTS_SUPPORT_HPP

// Independent oracles shared by the unit tests and the acceptance suite.
// Nothing here calls into the library's control or adaptation code.

#include "nladapt/scenario.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace nladapt::testing {

inline double osc_f(double x1, double offset, double theta, double sine) {
    const double a = theta * (x1 - offset);
    return a + sine * std::sin(a);
}

/// Hand-derived control for psi = x1 + x2, phi = lambda psi.
inline double osc_control(double x1, double x2, double offset, double thetaHat, double lambda, double sine) {
    return -lambda * (x1 + x2) - x2 - osc_f(x1, offset, thetaHat, sine);
}

/// Hand-derived integral update lambda (x1 + x2)(x1 - x0) - (x1 + x2) x2.
inline double osc_thetaI_rate(double x1, double x2, double offset, double lambda) {
    return lambda * (x1 + x2) * (x1 - offset) - (x1 + x2) * x2;
}

/// Hand-written coupled oscillator, state (x1, x2, thetaIx, y1, y2, thetaIy).
struct OscillatorOracle {
    OscillatorScenario sc;

    using State = std::array<double, 6>;

    State rhs(const State& s) const {
        const double thx = sc.GammaX * ((s[0] + s[1]) * (s[0] - sc.x0) + s[2]);
        const double thy = sc.GammaY * ((s[3] + s[4]) * (s[3] - sc.y0) + s[5]);
        const double ux = osc_control(s[0], s[1], sc.x0, thx, sc.lambdaX, sc.sineX);
        const double uy = osc_control(s[3], s[4], sc.y0, thy, sc.lambdaY, sc.sineY);
        return {s[1],
                osc_f(s[0], sc.x0, sc.thetaX, sc.sineX) + sc.k1 * s[3] + ux,
                osc_thetaI_rate(s[0], s[1], sc.x0, sc.lambdaX),
                s[4],
                osc_f(s[3], sc.y0, sc.thetaY, sc.sineY) + sc.k2 * s[0] + uy,
                osc_thetaI_rate(s[3], s[4], sc.y0, sc.lambdaY)};
    }

    State step(const State& s, double h) const {
        auto axpy = [](const State& a, double c, const State& b) {
            State r;
            for (std::size_t i = 0; i < 6; ++i) {
                r[i] = a[i] + c * b[i];
            }
            return r;
        };
        const State k1 = rhs(s);
        const State k2 = rhs(axpy(s, 0.5 * h, k1));
        const State k3 = rhs(axpy(s, 0.5 * h, k2));
        const State k4 = rhs(axpy(s, h, k3));
        State r;
        for (std::size_t i = 0; i < 6; ++i) {
            r[i] = s[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        }
        return r;
    }

    struct Run {
        std::vector<double> t;
        std::vector<State> s;
        double maxAbsState = 0.0;
    };

    /// RK4 at step h, keeps every logEvery-th sample.
    Run run(double h, double tFinal, std::size_t logEvery) const {
        State s{sc.x1Init, sc.x2Init, sc.thetaIX0, sc.y1Init, sc.y2Init, sc.thetaIY0};
        Run out;
        out.t.push_back(0.0);
        out.s.push_back(s);
        const auto n = static_cast<std::size_t>(std::llround(tFinal / h));
        for (std::size_t k = 0; k < n; ++k) {
            s = step(s, h);
            for (int i : {0, 1, 3, 4}) {
                out.maxAbsState = std::max(out.maxAbsState, std::abs(s[i]));
            }
            if ((k + 1) % logEvery == 0) {
                out.t.push_back(static_cast<double>(k + 1) * h);
                out.s.push_back(s);
            }
        }
        return out;
    }
};

/// Heun (explicit trapezoid) integration of a plain ODE.
template <class F>
std::vector<Vector> heun(const F& f, Vector y, double h, std::size_t steps) {
    std::vector<Vector> out{y};
    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const Vector a = f(t, y);
        const Vector b = f(t + h, y + h * a);
        y = y + 0.5 * h * (a + b);
        out.push_back(y);
    }
    return out;
}

/**
 * Synthetic loop with q = 1, p = 2 whose goal and alpha depend on x2 only
 * through its first coordinate:
 *   psi = x1 + x21 + 0.3 sin(x21), alpha = (x21, x1 x21^2 / 2).
 */
inline SubsystemSpec synthetic_spec() {
    return SubsystemSpec{
        PartitionLayout(1, 2),
        [](const Vector& x, double t) { return Vector::Constant(1, x[1] + 0.1 * std::cos(t)); },
        [](const Vector& x, const Vector& th, double) {
            Vector v(2);
            v << th[0] * x[1] + th[1] * std::tanh(x[0]), -x[2];
            return v;
        },
        [](const Vector&) { return Vector::Zero(1); },
        [](const Vector& x) {
            Vector v(2);
            v << 1.0 + 0.1 * x[2] * x[2], 0.5;
            return v;
        },
        2,
        DomainBox::uniform(3, -1.5, 1.5),
        DomainBox::uniform(2, 0.5, 2.0),
        TimeWindow{0.0, 2.0},
    };
}

inline GoalFunction synthetic_goal() {
    return GoalFunction{
        [](const Vector& x, double) { return x[0] + x[1] + 0.3 * std::sin(x[1]); },
        [](const Vector& x, double) {
            Vector g(3);
            g << 1.0, 1.0 + 0.3 * std::cos(x[1]), 0.0;
            return g;
        },
        [](const Vector&, double) { return 0.0; },
    };
}

inline Parametrization synthetic_param() {
    return Parametrization{
        [](const Vector& x, double) {
            Vector a(2);
            a << x[1], 0.5 * x[0] * x[1] * x[1];
            return a;
        },
        [](const Vector& x, double) {
            Matrix J(2, 3);
            J << 0.0, 1.0, 0.0, 0.5 * x[1] * x[1], x[0] * x[1], 0.0;
            return J;
        },
        [](const Vector&, double) { return Vector::Zero(2); },
        1.0,
        1.0,
    };
}

/// Goal psi = x21 + x22 with alpha = x22: d/dx2 (psi dalpha/dx2) = [[0, 0], [1, 1]].
inline SubsystemSpec asymmetric_spec() {
    return SubsystemSpec{
        PartitionLayout(1, 2),
        [](const Vector& x, double) { return Vector::Constant(1, x[1]); },
        [](const Vector& x, const Vector& th, double) {
            Vector v(2);
            v << th[0] * x[2], 0.0;
            return v;
        },
        [](const Vector&) { return Vector::Zero(1); },
        [](const Vector&) { return Vector::Ones(2); },
        1,
        DomainBox::uniform(3, -2.0, 2.0),
        DomainBox::uniform(1, 0.5, 2.0),
        TimeWindow{0.0, 1.0},
    };
}

inline GoalFunction asymmetric_goal() {
    return GoalFunction{
        [](const Vector& x, double) { return x[1] + x[2]; },
        [](const Vector&, double) {
            Vector g(3);
            g << 0.0, 1.0, 1.0;
            return g;
        },
        [](const Vector&, double) { return 0.0; },
    };
}

inline Parametrization asymmetric_param() {
    return Parametrization{
        [](const Vector& x, double) { return Vector::Constant(1, x[2]); },
        [](const Vector&, double) {
            Matrix J(1, 3);
            J << 0.0, 0.0, 1.0;
            return J;
        },
        [](const Vector&, double) { return Vector::Zero(1); },
        1.0,
        1.0,
    };
}

} // namespace nladapt::testing

#endif // NLADAPT_TESTS_SUPPORT_HPP

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
#include "nladapt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace nladapt {

void IntegratorConfig::validate() const {
    if (!(step > 0.0) || !(tFinal > 0.0) || !(step <= tFinal)) {
        throw ValidationError("integrator config needs step > 0, tFinal > 0 and step <= tFinal");
    }
    if (!(divergenceBound > 0.0)) {
        throw ValidationError("divergence bound must be positive");
    }
    if (logEvery == 0) {
        throw ValidationError("logEvery must be at least 1");
    }
    if (!std::isfinite(t0)) {
        throw ValidationError("t0 must be finite");
    }
}

std::size_t IntegratorConfig::steps() const {
    return static_cast<std::size_t>(std::llround(tFinal / step));
}

const char* to_string(RunStatus s) noexcept {
    switch (s) {
    case RunStatus::Completed:
        return "completed";
    case RunStatus::Diverged:
        return "diverged";
    case RunStatus::Singular:
        return "singular";
    }
    return "?";
}

Vector rk4_step(const OdeRhs& f, double t, const Vector& y, double h) {
    const Vector k1 = f(t, y);
    const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    const Vector k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

bool out_of_bounds(const Vector& y, double bound) {
    return !y.allFinite() || y.cwiseAbs().maxCoeff() > bound;
}

} // namespace

OdeSolution integrate_ode(const OdeRhs& f, const Vector& y0, const IntegratorConfig& cfg) {
    cfg.validate();
    OdeSolution sol;
    Vector y = y0;
    sol.times.push_back(cfg.t0);
    sol.states.push_back(y);
    const std::size_t n = cfg.steps();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = cfg.t0 + static_cast<double>(k) * cfg.step;
        Vector next = rk4_step(f, t, y, cfg.step);
        if (out_of_bounds(next, cfg.divergenceBound)) {
            sol.status = RunStatus::Diverged;
            break;
        }
        y = std::move(next);
        if ((k + 1) % cfg.logEvery == 0) {
            sol.times.push_back(cfg.t0 + static_cast<double>(k + 1) * cfg.step);
            sol.states.push_back(y);
        }
    }
    return sol;
}

namespace disturbance {

Disturbance zero() {
    return [](double) { return 0.0; };
}

Disturbance decaying_exponential(double c, double a) {
    if (!(a > 0.0)) {
        throw ValidationError("decaying exponential needs a > 0");
    }
    return [c, a](double t) { return c * std::exp(-a * t); };
}

Disturbance truncated_pulse(double amplitude, double start, double stop) {
    if (!(stop >= start)) {
        throw ValidationError("pulse needs stop >= start");
    }
    return [=](double t) { return (t >= start && t < stop) ? amplitude : 0.0; };
}

} // namespace disturbance

namespace {

struct Slice {
    Eigen::Index stateOffset, stateDim, thetaIOffset, thetaIDim;
};

void append_sample(LoopRecord& rec, const LoopEvaluation& ev, const Vector& aug, const Slice& s, double dt) {
    auto l2 = [dt](const std::vector<double>& acc, const std::vector<double>& series, double v) {
        if (acc.empty()) {
            return 0.0;
        }
        const double prev = series.back();
        const double a = acc.back();
        return std::sqrt(a * a + 0.5 * dt * (prev * prev + v * v));
    };

    rec.l2Psi.push_back(l2(rec.l2Psi, rec.psi, ev.psi));
    rec.l2Eps.push_back(l2(rec.l2Eps, rec.eps, ev.eps));
    rec.l2Mismatch.push_back(l2(rec.l2Mismatch, rec.mismatch, ev.mismatch));
    rec.linfPsi.push_back(std::max(rec.linfPsi.empty() ? 0.0 : rec.linfPsi.back(), std::abs(ev.psi)));

    rec.state.push_back(aug.segment(s.stateOffset, s.stateDim));
    rec.thetaI.push_back(aug.segment(s.thetaIOffset, s.thetaIDim));
    rec.thetaHat.push_back(ev.thetaHat);
    rec.psi.push_back(ev.psi);
    rec.u.push_back(ev.u);
    rec.eps.push_back(ev.eps);
    rec.mismatch.push_back(ev.mismatch);
}

using Evaluator = std::function<std::vector<LoopEvaluation>(double, const Vector&)>;

Trajectory drive(const OdeRhs& rhs, const Evaluator& evaluate, const std::vector<Slice>& slices,
                 const IntegratorConfig& cfg, const Vector& aug0) {
    cfg.validate();
    Trajectory traj;
    traj.spacing = cfg.step * static_cast<double>(cfg.logEvery);
    if (slices.size() == 2) {
        traj.y.emplace();
    }
    auto record = [&](double t, const Vector& aug) {
        const auto evs = evaluate(t, aug);
        traj.times.push_back(t);
        append_sample(traj.x, evs[0], aug, slices[0], traj.spacing);
        if (traj.y) {
            append_sample(*traj.y, evs[1], aug, slices[1], traj.spacing);
        }
    };

    if (out_of_bounds(aug0, cfg.divergenceBound)) {
        traj.status = RunStatus::Diverged;
        traj.message = "initial state outside the divergence bound";
        return traj;
    }
    Vector aug = aug0;
    try {
        record(cfg.t0, aug);
    } catch (const SingularityError& e) {
        traj.status = RunStatus::Singular;
        traj.message = e.what();
        return traj;
    }

    const std::size_t n = cfg.steps();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = cfg.t0 + static_cast<double>(k) * cfg.step;
        const double tNext = cfg.t0 + static_cast<double>(k + 1) * cfg.step;
        try {
            Vector next = rk4_step(rhs, t, aug, cfg.step);
            if (out_of_bounds(next, cfg.divergenceBound)) {
                traj.status = RunStatus::Diverged;
                std::ostringstream os;
                os << "state left the divergence bound " << cfg.divergenceBound << " at t = " << tNext;
                traj.message = os.str();
                break;
            }
            if ((k + 1) % cfg.logEvery == 0) {
                record(tNext, next);
            }
            aug = std::move(next);
        } catch (const SingularityError& e) {
            traj.status = RunStatus::Singular;
            traj.message = e.what();
            break;
        }
    }
    return traj;
}

} // namespace

Trajectory integrate(const CoupledClosedLoop& sys, const IntegratorConfig& cfg, const Vector& aug0) {
    sys.validate();
    const auto L = AugmentedLayout::of(sys);
    require_length("initial augmented state", static_cast<std::size_t>(L.size()), static_cast<std::size_t>(aug0.size()));
    const OdeRhs rhs = [&sys](double t, const Vector& aug) { return augmented_rhs(sys, t, aug); };
    const Evaluator eval = [&sys](double t, const Vector& aug) {
        auto ev = evaluate_coupled(sys, t, aug);
        return std::vector<LoopEvaluation>{std::move(ev.x), std::move(ev.y)};
    };
    const std::vector<Slice> slices{{L.x_offset(), L.nx, L.thetaIx_offset(), L.dx},
                                    {L.y_offset(), L.ny, L.thetaIy_offset(), L.dy}};
    return drive(rhs, eval, slices, cfg, aug0);
}

Trajectory integrate(const AdaptiveLoopSpec& loop, const Vector& thetaTrue, const Disturbance& eps,
                     const IntegratorConfig& cfg, const Vector& aug0, const ControlLawConfig& control) {
    control.validate();
    const auto n = static_cast<Eigen::Index>(loop.stateDim());
    const auto d = static_cast<Eigen::Index>(loop.paramDim());
    require_length("initial augmented state", static_cast<std::size_t>(n + d), static_cast<std::size_t>(aug0.size()));
    const auto& layout = loop.spec().layout;

    auto evalAt = [&](double t, const Vector& aug) {
        const Vector x = aug.head(n);
        const Vector thetaI = aug.tail(d);
        const Vector grad2 = layout.x2(loop.goal().gradState(x, t));
        const double norm2 = grad2.squaredNorm();
        const Vector injection = norm2 > 0.0 ? Vector(eps(t) / norm2 * grad2) : Vector(Vector::Zero(grad2.size()));
        return evaluate_loop(loop, thetaTrue, x, thetaI, t, injection, control);
    };
    const OdeRhs rhs = [&](double t, const Vector& aug) {
        const auto ev = evalAt(t, aug);
        Vector out(n + d);
        out << ev.stateRate, ev.thetaIRate;
        return out;
    };
    const Evaluator eval = [&](double t, const Vector& aug) { return std::vector<LoopEvaluation>{evalAt(t, aug)}; };
    return drive(rhs, eval, {{0, n, n, d}}, cfg, aug0);
}

std::optional<double> goal_attainment(const Trajectory& traj, double epsX, double epsY, double tailWindow) {
    if (traj.times.empty()) {
        return std::nullopt;
    }
    const double tEnd = traj.times.back();
    std::optional<double> best;
    for (std::size_t k = traj.size(); k-- > 0;) {
        const bool ok = std::abs(traj.x.psi[k]) <= epsX && (!traj.y || std::abs(traj.y->psi[k]) <= epsY);
        if (!ok) {
            break;
        }
        best = traj.times[k];
    }
    if (best && tEnd - *best < tailWindow) {
        return std::nullopt;
    }
    return best;
}

namespace {

void put(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
}

} // namespace

std::string csv_header(const Trajectory& traj) {
    std::ostringstream os;
    os << 't';
    const auto nx = traj.x.state.empty() ? 0 : traj.x.state.front().size();
    for (Eigen::Index i = 0; i < nx; ++i) {
        os << ",x" << i + 1;
    }
    if (traj.y) {
        const auto ny = traj.y->state.empty() ? 0 : traj.y->state.front().size();
        for (Eigen::Index i = 0; i < ny; ++i) {
            os << ",y" << i + 1;
        }
    }
    const bool c = traj.coupled();
    os << ",psiX" << (c ? ",psiY" : "") << ",uX" << (c ? ",uY" : "");
    const auto dx = traj.x.thetaHat.empty() ? 0 : traj.x.thetaHat.front().size();
    for (Eigen::Index i = 0; i < dx; ++i) {
        os << ",thetaHatX" << i + 1;
    }
    if (traj.y) {
        const auto dy = traj.y->thetaHat.empty() ? 0 : traj.y->thetaHat.front().size();
        for (Eigen::Index i = 0; i < dy; ++i) {
            os << ",thetaHatY" << i + 1;
        }
    }
    os << ",l2PsiX" << (c ? ",l2PsiY" : "") << ",linfPsiX" << (c ? ",linfPsiY" : "") << ",l2MismatchX"
       << (c ? ",l2MismatchY" : "") << ",hIntoX" << (c ? ",hIntoY" : "");
    return os.str();
}

void write_csv(const Trajectory& traj, std::ostream& os) {
    os << csv_header(traj) << '\n';
    const LoopRecord* y = traj.y ? &*traj.y : nullptr;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[k]);
        os << buf;
        for (Eigen::Index i = 0; i < traj.x.state[k].size(); ++i) {
            put(os, traj.x.state[k][i]);
        }
        if (y) {
            for (Eigen::Index i = 0; i < y->state[k].size(); ++i) {
                put(os, y->state[k][i]);
            }
        }
        auto both = [&](const std::vector<double>& ax, const std::vector<double>* ay) {
            put(os, ax[k]);
            if (ay) {
                put(os, (*ay)[k]);
            }
        };
        both(traj.x.psi, y ? &y->psi : nullptr);
        both(traj.x.u, y ? &y->u : nullptr);
        for (Eigen::Index i = 0; i < traj.x.thetaHat[k].size(); ++i) {
            put(os, traj.x.thetaHat[k][i]);
        }
        if (y) {
            for (Eigen::Index i = 0; i < y->thetaHat[k].size(); ++i) {
                put(os, y->thetaHat[k][i]);
            }
        }
        both(traj.x.l2Psi, y ? &y->l2Psi : nullptr);
        both(traj.x.linfPsi, y ? &y->linfPsi : nullptr);
        both(traj.x.l2Mismatch, y ? &y->l2Mismatch : nullptr);
        both(traj.x.eps, y ? &y->eps : nullptr);
        os << '\n';
    }
}

} // namespace nladapt

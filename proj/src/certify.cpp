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
#include "nladapt/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nladapt {

MonotonicityResult verify_monotonicity(const ScalarUncertainty& f, const Parametrization& param,
                                       const DomainBox& stateBox, const DomainBox& paramBox, TimeWindow window,
                                       const MonotonicityConfig& cfg) {
    param.validate();
    const auto n = static_cast<Eigen::Index>(stateBox.dim());
    const auto d = static_cast<Eigen::Index>(paramBox.dim());
    HaltonSampler sampler(static_cast<std::size_t>(n + 1 + 2 * d), cfg.seed);

    MonotonicityResult res;
    double worstSign = std::numeric_limits<double>::infinity();
    Vector signWitness;
    double dHat = 0.0;
    double d1Hat = std::numeric_limits<double>::infinity();
    Vector upperWitness;
    Vector lowerWitness;

    auto witness = [&](const Vector& x, const Vector& th, const Vector& thh) {
        Vector w(n + 2 * d);
        w << x, th, thh;
        return w;
    };

    for (std::size_t s = 0; s < cfg.samples; ++s) {
        const Vector u = sampler.next();
        const Vector x = stateBox.map_unit(u.head(n));
        const double t = window.begin + u[n] * (window.end - window.begin);
        const Vector theta = paramBox.map_unit(u.segment(n + 1, d));
        const Vector thetaHat = paramBox.map_unit(u.segment(n + 1 + d, d));

        const Vector alpha = param.alpha(x, t);
        require_length("alpha", static_cast<std::size_t>(d), static_cast<std::size_t>(alpha.size()));
        const double df = f(x, thetaHat, t) - f(x, theta, t);
        const double proj = alpha.dot(thetaHat - theta);
        const double sign = df * proj;
        if (sign < worstSign) {
            worstSign = sign;
            signWitness = witness(x, theta, thetaHat);
        }
        if (std::abs(proj) > cfg.denominatorFloor) {
            ++res.usable;
            const double ratio = std::abs(df) / std::abs(proj);
            if (ratio > dHat) {
                dHat = ratio;
                upperWitness = witness(x, theta, thetaHat);
            }
            if (ratio < d1Hat) {
                d1Hat = ratio;
                lowerWitness = witness(x, theta, thetaHat);
            }
        }
    }

    if (res.usable == 0) {
        res.entry = CertificateEntry::inconclusive("monotonicity", cfg.relativeTolerance,
                                                   "every sample had |alpha^T (thetaHat - theta)| below the floor");
        return res;
    }
    res.dHat = dHat;
    res.d1Hat = d1Hat;

    const double signMargin = worstSign + cfg.signTolerance;
    const double upperMargin = param.D * (1.0 + cfg.relativeTolerance) - dHat;
    const double lowerMargin = d1Hat - param.D1 * (1.0 - cfg.relativeTolerance);
    double margin = signMargin;
    Vector w = signWitness;
    if (upperMargin < margin) {
        margin = upperMargin;
        w = upperWitness;
    }
    if (lowerMargin < margin) {
        margin = lowerMargin;
        w = lowerWitness;
    }
    std::ostringstream os;
    os << "D_hat = " << dHat << " (declared " << param.D << "), D1_hat = " << d1Hat << " (declared " << param.D1
       << "), worst sign product " << worstSign << ", " << res.usable << "/" << cfg.samples << " usable samples";
    res.entry = CertificateEntry::from_margin("monotonicity", margin, cfg.relativeTolerance, w, std::nullopt, os.str());
    return res;
}

MonotonicityResult verify_monotonicity(const SubsystemSpec& spec, const GoalFunction& goal,
                                       const Parametrization& param, const MonotonicityConfig& cfg) {
    spec.validate();
    auto f = [&](const Vector& x, const Vector& theta, double t) { return f_scalar(spec, goal, x, theta, t); };
    return verify_monotonicity(f, param, spec.stateBox, spec.paramBox, spec.timeWindow, cfg);
}

namespace {

const LoopRecord& record_of(const Trajectory& traj, LoopSide side) {
    if (side == LoopSide::X) {
        return traj.x;
    }
    if (!traj.y) {
        throw ValidationError("trajectory has no Y loop");
    }
    return *traj.y;
}

const char* label(LoopSide side) { return side == LoopSide::X ? "x" : "y"; }

// Tracks the smallest slack and where it occurred.
struct WorstSlack {
    double margin = std::numeric_limits<double>::infinity();
    std::size_t index = 0;

    void offer(double m, std::size_t k) {
        if (m < margin || std::isnan(m)) {
            margin = std::isnan(m) ? -std::numeric_limits<double>::infinity() : m;
            index = k;
        }
    }
};

} // namespace

CertificateReport theorem1_monitor(const Trajectory& traj, const AdaptiveLoopSpec& loop, const Vector& thetaTrue,
                                   LoopSide side, const Theorem1Config& cfg) {
    const LoopRecord& rec = record_of(traj, side);
    const std::string prefix = std::string("theorem1.") + label(side) + ".";
    CertificateReport report;
    if (traj.size() == 0) {
        report.add(CertificateEntry::inconclusive(prefix + "mismatch_l2", cfg.tolerance, "empty trajectory"));
        report.add(CertificateEntry::inconclusive(prefix + "parameter_norm", cfg.tolerance, "empty trajectory"));
        return report;
    }
    const double D = loop.param().D;
    const double D1 = loop.param().D1;
    const double e0 = loop.gamma_inv_norm_sq(thetaTrue - rec.thetaHat.front());

    WorstSlack mismatch;
    WorstSlack paramNorm;
    // both bounds hold with equality at t0; start at the first step when there is one
    const std::size_t first = traj.size() > 1 ? 1 : 0;
    for (std::size_t k = first; k < traj.size(); ++k) {
        const double epsL2 = rec.l2Eps[k];
        const double boundA = std::sqrt(0.5 * D * e0) + (D / D1) * epsL2;
        mismatch.offer(boundA + cfg.tolerance - rec.l2Mismatch[k], k);

        const double ek = loop.gamma_inv_norm_sq(thetaTrue - rec.thetaHat[k]);
        const double boundB = e0 + D / (2.0 * D1 * D1) * epsL2 * epsL2;
        paramNorm.offer(boundB + cfg.tolerance - ek, k);
    }
    {
        std::ostringstream os;
        os << "worst at T = " << traj.times[mismatch.index] << ": ||f mismatch||_2 = " << rec.l2Mismatch[mismatch.index];
        report.add(CertificateEntry::from_margin(prefix + "mismatch_l2", mismatch.margin, cfg.tolerance,
                                                 rec.state[mismatch.index], traj.times[mismatch.index], os.str()));
    }
    {
        std::ostringstream os;
        os << "e0 = " << e0 << ", worst at T = " << traj.times[paramNorm.index];
        report.add(CertificateEntry::from_margin(prefix + "parameter_norm", paramNorm.margin, cfg.tolerance,
                                                 rec.thetaHat[paramNorm.index], traj.times[paramNorm.index],
                                                 os.str()));
    }

    const double maxEps = rec.eps.empty() ? 0.0 : std::abs(*std::max_element(
                                                      rec.eps.begin(), rec.eps.end(),
                                                      [](double a, double b) { return std::abs(a) < std::abs(b); }));
    if (maxEps <= cfg.zeroDisturbance) {
        WorstSlack lyap;
        double prev = 0.5 * e0;
        for (std::size_t k = 1; k < traj.size(); ++k) {
            const double v = 0.5 * loop.gamma_inv_norm_sq(thetaTrue - rec.thetaHat[k]);
            lyap.offer(prev + cfg.lyapunovStepTolerance - v, k);
            prev = v;
        }
        if (traj.size() < 2) {
            lyap.margin = cfg.lyapunovStepTolerance;
        }
        report.add(CertificateEntry::from_margin(prefix + "lyapunov_nonincreasing", lyap.margin,
                                                 cfg.lyapunovStepTolerance, rec.thetaHat[lyap.index],
                                                 traj.times[lyap.index], "per-step increase of 1/2 |thetaHat - theta|^2"));
    }
    return report;
}

void SmallGainProblem::validate() const {
    if (!(betaX >= 0.0) || !(betaY >= 0.0)) {
        throw ValidationError("small-gain coupling bounds must be nonnegative");
    }
    if (!(ratioX >= 1.0) || !(ratioY >= 1.0)) {
        throw ValidationError("growth ratios D / D1 must be >= 1");
    }
    if (!(scanMax > scanMin) || !(scanMin >= 0.0) || scanPoints < 2) {
        throw ValidationError("small-gain scan range must satisfy 0 <= scanMin < scanMax with >= 2 points");
    }
    for (double d : probeDeltas) {
        if (!(d > 0.0)) {
            throw ValidationError("probe deltas must be strictly positive");
        }
    }
    if (probeDeltas.empty()) {
        throw ValidationError("need at least one probe delta");
    }
}

CertificateEntry check_small_gain(const SmallGainProblem& prob) {
    prob.validate();
    if (prob.gainX22.is_linear() && prob.gainY22.is_linear()) {
        const double product = prob.betaY * prob.betaX * prob.gainX22.as_linear().slope *
                               prob.gainY22.as_linear().slope * (prob.ratioY + 1.0) * (prob.ratioX + 1.0);
        std::ostringstream os;
        os << "regime=linear, loop gain product = " << product;
        Vector w(1);
        w << product;
        return CertificateEntry::from_margin("small_gain", 1.0 - product, 0.0, w, std::nullopt, os.str());
    }

    const double lo = prob.scanMin > 0.0 ? prob.scanMin : prob.scanMax * 1e-9;
    const double hi = prob.scanMax;
    const double logStep = std::log(hi / lo) / static_cast<double>(prob.scanPoints - 1);

    double bestSlack = -std::numeric_limits<double>::infinity();
    double bestDelta = prob.probeDeltas.front();
    double bestWorstDelta = lo;
    for (double delta : prob.probeDeltas) {
        const double rho = 1.0 + delta;
        double worst = std::numeric_limits<double>::infinity();
        double worstAt = lo;
        for (std::size_t i = 0; i < prob.scanPoints; ++i) {
            const double s = lo * std::exp(logStep * static_cast<double>(i));
            double v = rho * ((prob.ratioX + 1.0) * s);
            const auto gx = prob.gainX22.evaluate(v);
            if (!gx) {
                return CertificateEntry::inconclusive("small_gain", 0.0,
                                                      "regime=scanned, gamma_x22 table does not cover the scan range");
            }
            v = rho * (prob.betaX * *gx);
            v = rho * ((prob.ratioY + 1.0) * v);
            const auto gy = prob.gainY22.evaluate(v);
            if (!gy) {
                return CertificateEntry::inconclusive("small_gain", 0.0,
                                                      "regime=scanned, gamma_y22 table does not cover the scan range");
            }
            v = prob.betaY * *gy;
            const double slack = (s - v) / s;
            if (slack < worst) {
                worst = slack;
                worstAt = s;
            }
        }
        if (worst > bestSlack) {
            bestSlack = worst;
            bestDelta = delta;
            bestWorstDelta = worstAt;
        }
    }
    std::ostringstream os;
    os << "regime=scanned, certified on scanned range [" << lo << ", " << hi << "] only; best probe delta "
       << bestDelta << ", tightest at s = " << bestWorstDelta;
    Vector w(1);
    w << bestWorstDelta;
    return CertificateEntry::from_margin("small_gain", bestSlack, 0.0, w, std::nullopt, os.str());
}

CertificateEntry verify_coupling_bound(const Trajectory& traj, LoopSide driver, double beta, CouplingBoundMode mode,
                                       double offset, double tolerance) {
    if (!traj.y) {
        throw ValidationError("coupling bound needs a coupled trajectory");
    }
    const LoopRecord& source = record_of(traj, driver);
    const LoopRecord& target = record_of(traj, driver == LoopSide::X ? LoopSide::Y : LoopSide::X);
    const std::string name = std::string("coupling_bound.") + label(driver) + "." +
                             (mode == CouplingBoundMode::Pointwise ? "pointwise" : "l2");
    if (traj.size() == 0) {
        return CertificateEntry::inconclusive(name, tolerance, "empty trajectory");
    }
    WorstSlack worst;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (mode == CouplingBoundMode::Pointwise) {
            worst.offer(beta * std::abs(source.psi[k]) + tolerance - std::abs(target.eps[k]), k);
        } else {
            worst.offer(beta * source.l2Psi[k] + offset + tolerance - target.l2Eps[k], k);
        }
    }
    std::ostringstream os;
    os << "beta = " << beta << ", offset = " << offset << ", worst at t = " << traj.times[worst.index];
    return CertificateEntry::from_margin(name, worst.margin, tolerance, source.state[worst.index],
                                         traj.times[worst.index], os.str());
}

CertificateReport convergence_monitor(const Trajectory& traj, const ConvergenceConfig& cfg) {
    CertificateReport report;
    std::vector<std::pair<LoopSide, const LoopRecord*>> loops{{LoopSide::X, &traj.x}};
    if (traj.y) {
        loops.emplace_back(LoopSide::Y, &*traj.y);
    }
    for (const auto& [side, rec] : loops) {
        const std::string prefix = std::string("convergence.") + label(side) + ".";
        if (traj.status != RunStatus::Completed || traj.size() == 0) {
            const std::string why = std::string("run ") + to_string(traj.status);
            report.add(CertificateEntry::inconclusive(prefix + "psi_tail", cfg.psiThreshold, why));
            report.add(CertificateEntry::inconclusive(prefix + "mismatch_tail", cfg.mismatchThreshold, why));
            continue;
        }
        const double tStart = traj.times.back() - cfg.window;
        double supPsi = 0.0;
        double supMismatch = 0.0;
        std::size_t atPsi = traj.size() - 1;
        std::size_t atMismatch = atPsi;
        for (std::size_t k = traj.size(); k-- > 0 && traj.times[k] >= tStart;) {
            if (std::abs(rec->psi[k]) > supPsi) {
                supPsi = std::abs(rec->psi[k]);
                atPsi = k;
            }
            if (std::abs(rec->mismatch[k]) > supMismatch) {
                supMismatch = std::abs(rec->mismatch[k]);
                atMismatch = k;
            }
        }
        std::ostringstream a;
        a << "sup |psi| on tail = " << supPsi;
        report.add(CertificateEntry::from_margin(prefix + "psi_tail", cfg.psiThreshold - supPsi, cfg.psiThreshold,
                                                 rec->state[atPsi], traj.times[atPsi], a.str()));
        std::ostringstream b;
        b << "sup |f mismatch| on tail = " << supMismatch;
        report.add(CertificateEntry::from_margin(prefix + "mismatch_tail", cfg.mismatchThreshold - supMismatch,
                                                 cfg.mismatchThreshold, rec->state[atMismatch],
                                                 traj.times[atMismatch], b.str()));
    }
    return report;
}

CertificateEntry run_status_entry(const Trajectory& traj) {
    const double t = traj.times.empty() ? 0.0 : traj.times.back();
    Vector w = traj.x.state.empty() ? Vector() : traj.x.state.back();
    return CertificateEntry::from_margin("simulation.status", traj.status == RunStatus::Completed ? 1.0 : -1.0, 0.0,
                                         w, t, std::string(to_string(traj.status)) +
                                                   (traj.message.empty() ? "" : ": " + traj.message));
}

} // namespace nladapt

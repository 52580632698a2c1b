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
#include "nladapt/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <ostream>
#include <thread>

namespace nladapt {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

fs::path output_dir() {
    const char* env = std::getenv("NLADAPT_OUTPUT_DIR");
    return (env && *env) ? fs::path(env) : fs::path(".");
}

fs::path resolve_out(const std::string& flag, const std::string& fallback) {
    return flag.empty() ? output_dir() / fallback : fs::path(flag);
}

std::ofstream open_out(const fs::path& p) {
    if (p.has_parent_path()) {
        fs::create_directories(p.parent_path());
    }
    std::ofstream f(p);
    if (!f) {
        throw ValidationError("cannot write '" + p.string() + "'");
    }
    return f;
}

struct Overrides {
    double k1 = 0, k2 = 0, lambdaX = 0, lambdaY = 0, tFinal = 0, step = 0;
    std::size_t logEvery = 1;
    CLI::Option *k1Opt = nullptr, *k2Opt = nullptr, *lxOpt = nullptr, *lyOpt = nullptr;
    CLI::Option *tfOpt = nullptr, *dtOpt = nullptr, *logOpt = nullptr;

    void attach(CLI::App* app, bool couplings = true) {
        if (couplings) {
            k1Opt = app->add_option("--k1", k1, "coupling of y1 into the x2 equation");
            k2Opt = app->add_option("--k2", k2, "coupling of x1 into the y2 equation");
        }
        lxOpt = app->add_option("--lambda-x", lambdaX, "target-dynamics gain of loop x")->check(CLI::PositiveNumber);
        lyOpt = app->add_option("--lambda-y", lambdaY, "target-dynamics gain of loop y")->check(CLI::PositiveNumber);
        tfOpt = app->add_option("--t-final", tFinal, "simulation horizon")->check(CLI::PositiveNumber);
        dtOpt = app->add_option("--dt", step, "RK4 step")->check(CLI::PositiveNumber);
        logOpt = app->add_option("--log-every", logEvery, "log every N steps")->check(CLI::PositiveNumber);
    }

    void apply(OscillatorScenario& sc) const {
        auto set = [](CLI::Option* o, double v, double& dst) {
            if (o && o->count() > 0) {
                dst = v;
            }
        };
        set(k1Opt, k1, sc.k1);
        set(k2Opt, k2, sc.k2);
        set(lxOpt, lambdaX, sc.lambdaX);
        set(lyOpt, lambdaY, sc.lambdaY);
        set(tfOpt, tFinal, sc.integrator.tFinal);
        set(dtOpt, step, sc.integrator.step);
        if (logOpt && logOpt->count() > 0) {
            sc.integrator.logEvery = logEvery;
        }
        sc.validate();
    }
};

OscillatorScenario resolve(const std::string& source, const Overrides& ov) {
    OscillatorScenario sc = source == "oscillator" ? OscillatorScenario{} : load_scenario(source);
    ov.apply(sc);
    return sc;
}

double tail_sup(const Trajectory& traj, const std::vector<double>& series, double window) {
    if (traj.times.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    const double start = traj.times.back() - window;
    double sup = 0.0;
    for (std::size_t k = traj.size(); k-- > 0 && traj.times[k] >= start;) {
        sup = std::max(sup, std::abs(series[k]));
    }
    return sup;
}

int cmd_simulate(const OscillatorScenario& sc, const std::string& outFlag, std::ostream& out) {
    const auto sys = build_oscillator(sc);
    const Trajectory traj = integrate(sys, sc.integrator, initial_state(sc));
    const fs::path path = resolve_out(outFlag, "trajectory.csv");
    {
        auto f = open_out(path);
        write_csv(traj, f);
    }
    out << "status " << to_string(traj.status) << " t_end " << fmt(traj.times.empty() ? 0.0 : traj.times.back())
        << " samples " << traj.size() << " csv " << path.string() << '\n';
    if (!traj.message.empty()) {
        out << "message " << traj.message << '\n';
    }
    const auto tStar = goal_attainment(traj, sc.certify.psiThreshold, sc.certify.psiThreshold);
    out << "goal_attainment " << (tStar ? fmt(*tStar) : std::string("none")) << '\n';
    return traj.status == RunStatus::Completed ? kExitOk : kExitAborted;
}

int cmd_certify(const OscillatorScenario& sc, const std::string& reportFlag, const std::string& jsonFlag,
                std::ostream& out) {
    const auto cert = certify_scenario(sc);
    const std::string text = cert.report.to_text();
    if (reportFlag.empty()) {
        out << text;
    } else {
        auto f = open_out(reportFlag);
        f << text;
    }
    if (!jsonFlag.empty()) {
        auto f = open_out(jsonFlag);
        f << cert.report.to_json() << '\n';
    }
    const std::size_t failing =
        std::count_if(cert.report.entries().begin(), cert.report.entries().end(),
                      [](const CertificateEntry& e) { return !e.passed(); });
    out << "summary " << cert.report.entries().size() << " checks, " << failing << " not passed\n";
    if (cert.trajectory.status != RunStatus::Completed) {
        return kExitAborted;
    }
    return failing == 0 ? kExitOk : kExitCertificateFailed;
}

struct SweepCell {
    double k1 = 0, k2 = 0;
    CheckStatus smallGain = CheckStatus::Inconclusive;
    double margin = 0;
    RunStatus status = RunStatus::Completed;
    double tailX = 0, tailY = 0;
    std::string error;
};

int cmd_sweep(const OscillatorScenario& base, const std::vector<double>& k1s, const std::vector<double>& k2s,
              unsigned threads, const std::string& outFlag, std::ostream& out) {
    std::vector<SweepCell> cells;
    for (double a : k1s) {
        for (double b : k2s) {
            SweepCell c;
            c.k1 = a;
            c.k2 = b;
            cells.push_back(c);
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next++) < cells.size();) {
            SweepCell& c = cells[i];
            try {
                OscillatorScenario sc = base;
                sc.k1 = c.k1;
                sc.k2 = c.k2;
                const auto sg = check_small_gain(oscillator_small_gain(sc));
                c.smallGain = sg.status;
                c.margin = sg.margin;
                const Trajectory traj = integrate(build_oscillator(sc), sc.integrator, initial_state(sc));
                c.status = traj.status;
                c.tailX = tail_sup(traj, traj.x.psi, sc.certify.tailWindow);
                c.tailY = tail_sup(traj, traj.y->psi, sc.certify.tailWindow);
            } catch (const std::exception& e) {
                c.error = e.what();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }

    std::ostringstream table;
    table << "k1,k2,smallGain,smallGainMargin,status,tailPsiX,tailPsiY,converged\n";
    bool anyError = false;
    for (const auto& c : cells) {
        if (!c.error.empty()) {
            anyError = true;
            table << fmt(c.k1) << ',' << fmt(c.k2) << ",ERROR,,,,," << '\n';
            continue;
        }
        const bool converged = c.status == RunStatus::Completed && c.tailX <= base.certify.psiThreshold &&
                               c.tailY <= base.certify.psiThreshold;
        table << fmt(c.k1) << ',' << fmt(c.k2) << ',' << to_string(c.smallGain) << ',' << fmt(c.margin) << ','
              << to_string(c.status) << ',' << fmt(c.tailX) << ',' << fmt(c.tailY) << ','
              << (converged ? "PASS" : "FAIL") << '\n';
    }
    const fs::path path = resolve_out(outFlag, "sweep.csv");
    {
        auto f = open_out(path);
        f << table.str();
    }
    out << table.str();
    for (const auto& c : cells) {
        if (!c.error.empty()) {
            out << "cell k1=" << fmt(c.k1) << " k2=" << fmt(c.k2) << " error: " << c.error << '\n';
        }
    }
    return anyError ? kExitUsage : kExitOk;
}

int cmd_plotdata(const OscillatorScenario& base, const std::string& outDirFlag, std::ostream& out) {
    struct Case {
        double k1, k2;
        std::string label;
    };
    const std::vector<Case> cases{{1.0, 0.1, "k1=1_k2=0.1"}, {0.4, 0.4, "k1=0.4_k2=0.4"}};
    std::vector<Trajectory> runs;
    bool aborted = false;
    for (const auto& c : cases) {
        OscillatorScenario sc = base;
        sc.k1 = c.k1;
        sc.k2 = c.k2;
        runs.push_back(integrate(build_oscillator(sc), sc.integrator, initial_state(sc)));
        aborted = aborted || runs.back().status != RunStatus::Completed;
    }
    const fs::path dir = outDirFlag.empty() ? output_dir() : fs::path(outDirFlag);
    struct Panel {
        const char* file;
        const char* column;
        bool y;
        Eigen::Index idx;
    };
    const Panel panels[] = {{"fig2a_x1.csv", "x1", false, 0},
                            {"fig2b_x2.csv", "x2", false, 1},
                            {"fig2c_y1.csv", "y1", true, 0},
                            {"fig2d_y2.csv", "y2", true, 1}};
    for (const auto& p : panels) {
        auto f = open_out(dir / p.file);
        f << 't';
        for (const auto& c : cases) {
            f << ',' << p.column << '_' << c.label;
        }
        f << '\n';
        const std::size_t rows = std::min(runs[0].size(), runs[1].size());
        for (std::size_t k = 0; k < rows; ++k) {
            f << fmt(runs[0].times[k]);
            for (const auto& r : runs) {
                const LoopRecord& rec = p.y ? *r.y : r.x;
                f << ',' << fmt(rec.state[k][p.idx]);
            }
            f << '\n';
        }
        out << "wrote " << (dir / p.file).string() << '\n';
    }
    return aborted ? kExitAborted : kExitOk;
}

} // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decentralized adaptive control of coupled nonlinear systems: simulation and certification",
                 "nladapt"};
    app.require_subcommand(1, 1);

    std::string source = "oscillator";
    std::string outFlag, reportFlag, jsonFlag, outDir;
    Overrides ovSim, ovCert, ovSweep, ovPlot, ovDump;

    auto* sim = app.add_subcommand("simulate", "integrate a scenario and write its trajectory CSV");
    sim->add_option("scenario", source, "'oscillator' or a scenario file");
    ovSim.attach(sim);
    sim->add_option("--out", outFlag, "CSV path (default $NLADAPT_OUTPUT_DIR/trajectory.csv)");

    auto* cert = app.add_subcommand("certify", "assumption checks, small-gain test and trajectory monitors");
    cert->add_option("scenario", source, "'oscillator' or a scenario file");
    ovCert.attach(cert);
    cert->add_option("--report", reportFlag, "text report path (default: stdout)");
    cert->add_option("--json", jsonFlag, "JSON report path");

    std::vector<double> k1s{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> k2s{0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    auto* sweep = app.add_subcommand("sweep", "grid over k1 x k2 with small-gain verdict and tail |psi|");
    sweep->add_option("scenario", source, "'oscillator' or a scenario file");
    ovSweep.attach(sweep, false);
    sweep->add_option("--k1-values", k1s, "comma-separated k1 grid")->delimiter(',');
    sweep->add_option("--k2-values", k2s, "comma-separated k2 grid")->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    sweep->add_option("--out", outFlag, "CSV path (default $NLADAPT_OUTPUT_DIR/sweep.csv)");

    auto* plot = app.add_subcommand("plotdata", "CSV panels of x1, x2, y1, y2 for the two reference couplings");
    plot->add_option("scenario", source, "'oscillator' or a scenario file");
    ovPlot.attach(plot, false);
    plot->add_option("--out-dir", outDir, "output directory (default $NLADAPT_OUTPUT_DIR or .)");

    auto* dump = app.add_subcommand("dump", "print the resolved scenario in config-file form");
    dump->add_option("scenario", source, "'oscillator' or a scenario file");
    ovDump.attach(dump);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(resolve(source, ovSim), outFlag, out);
        }
        if (cert->parsed()) {
            return cmd_certify(resolve(source, ovCert), reportFlag, jsonFlag, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep(resolve(source, ovSweep), k1s, k2s, threads, outFlag, out);
        }
        if (plot->parsed()) {
            return cmd_plotdata(resolve(source, ovPlot), outDir, out);
        }
        out << serialize(resolve(source, ovDump));
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

} // namespace nladapt

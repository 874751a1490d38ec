// Acceptance suite: one PASS/FAIL line per criterion, plus indented detail
// lines. Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "boundlab/harness.hpp"

using namespace boundlab;

namespace {

const int kThreads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

int failures = 0;

void verdict(int id, bool ok, const std::string& title, const std::string& summary) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " - " << title << ": " << summary << std::endl;
}

void detail(const std::string& line) { std::cout << "    " << line << std::endl; }

std::string num(double v) { return format_number(v); }

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::string elapsed() const {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1fs", s);
        return buf;
    }
};

HyperParams hp_of(double alpha, double beta1, double beta2, Beta1Schedule schedule = Beta1Schedule::Constant) {
    HyperParams hp;
    hp.alpha = alpha;
    hp.beta1 = beta1;
    hp.beta2 = beta2;
    hp.beta1_schedule = schedule;
    return hp;
}

// Criterion 1 settings. alpha is not pinned by the criterion; 0.001 is the
// default step size and keeps the iterates away from the x = 1 wall.
constexpr double kAlpha = 0.001;
constexpr double kBeta2 = 0.99;
constexpr std::int64_t kK = 10000;
constexpr int kTrials = 1000;

struct Calibrated {
    double beta1;
    double C;
};

std::vector<Calibrated> calibrations;

double calibrated_C(double beta1) {
    for (const Calibrated& c : calibrations) {
        if (c.beta1 == beta1) return c.C;
    }
    const CalibrationResult cal = calibrate_C(hp_of(kAlpha, beta1, kBeta2), 1.0, 10000, 200,
                                              derive_seed(2024, static_cast<std::uint64_t>(beta1 * 1000)), kThreads);
    const CalibrationProbe& p = cal.probes.back();
    detail("calibrate_C(beta1=" + num(beta1) + "): C=" + num(cal.C) + " after " + std::to_string(cal.probes.size()) +
           " probes, drift z=" + num(p.z()) + ", late z=" + num(p.late_z()));
    calibrations.push_back({beta1, cal.C});
    return cal.C;
}

// Counterexample reproduction for one optimizer. Also tracks v_hat.
bool counterexample_run(OptimizerKind kind, bool check_vhat, std::string& summary) {
    bool ok = true;
    std::ostringstream out;
    for (double beta1 : {0.0, 0.9}) {
        const double C = calibrated_C(beta1);
        ExperimentConfig cfg;
        cfg.optimizer = kind;
        cfg.hp = hp_of(kAlpha, beta1, kBeta2);
        cfg.bounds = StepFamily{kK, kAlpha, kBeta2, C};
        cfg.problem = ReddiProblem(C, 1.0);
        cfg.horizon = kK;
        cfg.trials = kTrials;
        cfg.seed = derive_seed(7, static_cast<std::uint64_t>(beta1 * 1000) + 1);
        cfg.threads = kThreads;
        cfg.checkpoints = default_checkpoints(kK);

        std::vector<int> vhat_bad(static_cast<std::size_t>(kTrials), 0);
        std::vector<double> vhat_prev(static_cast<std::size_t>(kTrials), 0.0);
        TrialObserver observer;
        if (check_vhat) {
            observer = [&](std::int64_t trial, const StepTrace& s) {
                const auto k = static_cast<std::size_t>(trial);
                if (s.after.v_hat[0] < vhat_prev[k]) ++vhat_bad[k];
                vhat_prev[k] = s.after.v_hat[0];
            };
        }
        const MonteCarloReport report = monte_carlo(cfg, observer);
        const CounterexampleCertificate cert = check_counterexample(report, 0.5);
        double min_x = report.rows.front().mean_x;
        for (const CheckpointSummary& r : report.rows) min_x = std::min(min_x, r.mean_x);
        const int vbad = std::accumulate(vhat_bad.begin(), vhat_bad.end(), 0);
        const bool this_ok = cert.ok() && vbad == 0;
        ok = ok && this_ok;
        detail(std::string(to_string(kind)) + " beta1=" + num(beta1) + " C=" + num(C) + ": min mean subopt " +
               num(cert.min_mean_subopt) + ", final mean x " + num(report.rows.back().mean_x) + ", min mean x " +
               num(min_x) + ", worst mean-x drop " + num(cert.worst_drop) + " at t=" +
               std::to_string(cert.worst_drop_t) + (check_vhat ? ", v_hat decreases " + std::to_string(vbad) : "") +
               (this_ok ? "" : "  <-- failed"));
        out << (out.tellp() > 0 ? "; " : "") << "beta1=" << num(beta1) << " min subopt " << num(cert.min_mean_subopt);
    }
    summary = out.str();
    return ok;
}

void criterion1() {
    Timer timer;
    std::string summary;
    const bool ok = counterexample_run(OptimizerKind::AdaBound, false, summary);
    verdict(1, ok, "counterexample reproduction", summary + " (" + timer.elapsed() + ")");
}

// Paired-stream comparison of a bounded optimizer against its unbounded twin
// over 10 seeds. Returns the largest difference seen.
double paired_max_diff(OptimizerKind bounded, OptimizerKind plain, const BoundFunctionSpec& bounds, double C,
                       const HyperParams& hp, bool& streams_ok) {
    ExperimentConfig a;
    a.optimizer = bounded;
    a.hp = hp;
    a.bounds = bounds;
    a.problem = ReddiProblem(C, 1.0);
    ExperimentConfig b = a;
    b.optimizer = plain;
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const EquivalenceReport rep = equivalence_check(a, b, kK, seed);
        worst = std::max(worst, rep.max_abs_diff);
        streams_ok = streams_ok && rep.streams_identical;
    }
    return worst;
}

bool clip_identity(OptimizerKind bounded, OptimizerKind plain, std::string& summary) {
    bool ok = true;
    std::ostringstream out;
    for (double beta1 : {0.0, 0.9}) {
        const double C = calibrated_C(beta1);
        bool streams = true;
        const double diff = paired_max_diff(bounded, plain, StepFamily{kK, kAlpha, kBeta2, C}, C,
                                            hp_of(kAlpha, beta1, kBeta2), streams);
        ok = ok && diff == 0.0 && streams;
        out << (out.tellp() > 0 ? "; " : "") << "beta1=" << num(beta1) << " C=" << num(C) << " max |dx| "
            << num(diff) << (streams ? "" : " (streams differ)");
    }
    summary = out.str();
    return ok;
}

void criterion2() {
    Timer timer;
    std::string summary;
    const bool ok = clip_identity(OptimizerKind::AdaBound, OptimizerKind::Adam, summary);
    verdict(2, ok, "AdaBound(step) vs Adam, 10 seeds", summary + " (" + timer.elapsed() + ")");
}

void criterion3() {
    Timer timer;
    struct Case {
        double alpha, C, beta2;
    };
    const double C = calibrated_C(0.9);
    bool ok = true;
    std::ostringstream out;
    for (const Case c : {Case{kAlpha, C, kBeta2}, Case{0.1, 2.0, 0.99}, Case{0.5, 8.0, 0.999}}) {
        const double gamma = claim1_gamma(kK, c.alpha, c.C, c.beta2);
        bool streams = true;
        const double diff = paired_max_diff(OptimizerKind::AdaBound, OptimizerKind::Adam, GammaFamily{gamma}, c.C,
                                            hp_of(c.alpha, 0.9, c.beta2), streams);
        ok = ok && diff == 0.0 && streams;
        out << (out.tellp() > 0 ? "; " : "") << "alpha=" << num(c.alpha) << " C=" << num(c.C) << " gamma="
            << num(gamma) << " max |dx| " << num(diff);
    }
    verdict(3, ok, "transfer gamma keeps clipping inactive", out.str() + " (" + timer.elapsed() + ")");
}

void criterion4() {
    Timer timer;
    bool ok = true;
    std::ostringstream out;
    for (double gamma : {1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0}) {
        const double m = drift_M(GammaFamily{gamma}, 1000000);
        const double bound = prop1_bound(gamma);
        const double limit = 1.0 + 2.0 / gamma;
        const double rel = std::abs(m - limit) / limit;
        const bool this_ok = m <= bound && rel <= 0.01;
        ok = ok && this_ok;
        detail("gamma=" + num(gamma) + ": drift_M=" + num(m) + " bound=" + num(bound) + " limit=" + num(limit) +
               " rel gap=" + num(rel) + (this_ok ? "" : "  <-- failed"));
        out << (out.tellp() > 0 ? ", " : "") << num(m) << "<=" << num(bound);
    }
    verdict(4, ok, "gamma drift below 3 + 2/gamma at T=1e6", out.str() + " (" + timer.elapsed() + ")");
}

void print_contradiction(const std::string& label, const ContradictionReport& r) {
    detail(label + ": C=" + num(r.C) + " K=" + std::to_string(r.K) + " rhs/K=" + num(r.rhs_over_K) +
           " mc per-step regret=" + num(r.mc_avg_regret_per_step) + " ci95=" + num(r.ci95) + " trials=" +
           std::to_string(r.trials));
    detail("  " + r.message);
}

void criterion5() {
    Timer timer;
    ContradictionOptions opts;
    opts.threads = kThreads;
    const ContradictionReport rep = contradiction_demo(1, 0.1, 0.99, 1.0, 20, 11, opts);
    const double lower = rep.mc_avg_regret_per_step - (std::isnan(rep.ci95) ? 0.0 : rep.ci95);
    const bool ok = rep.executed && rep.rhs_over_K < 0.01 && rep.mc_avg_regret_per_step >= 0.5 && lower > 0.01 &&
                    rep.succeeded;
    print_contradiction("alpha=0.1 beta2=0.99, calibrated C", rep);
    if (!rep.executed) {
        detail("  K grows like (100 (2dC/alpha + 2 alpha C^2 / sqrt(1-beta2)))^2; at the calibrated C the run needs " +
               num(rep.required_steps) + " steps, which is not feasible on a desk machine");
    }

    // Side runs, not part of the verdict.
    ContradictionOptions literal = opts;
    literal.C = 2.0;
    const ContradictionReport at2 = contradiction_demo(1, 0.1, 0.99, 1.0, 20, 11, literal);
    print_contradiction("info, C=2 forced (outside the drifting regime)", at2);

    const ContradictionReport small = contradiction_demo(1, 0.3, 0.1, 1.0, 20, 11, opts);
    print_contradiction("info, alpha=0.3 beta2=0.1, calibrated C", small);

    verdict(5, ok, "classical bound contradiction demo (alpha=0.1, beta2=0.99)",
            "K=" + std::to_string(rep.K) + " rhs/K=" + num(rep.rhs_over_K) +
                (rep.executed ? " mc per-step regret " + num(rep.mc_avg_regret_per_step) : " not executed") + " (" +
                timer.elapsed() + ")");
}

struct RegretSweep {
    std::int64_t checks = 0;
    std::int64_t thm3_violations = 0;
    std::int64_t cor2_checks = 0;
    std::int64_t cor2_violations = 0;
    std::int64_t dominance_violations = 0;
    std::int64_t vhat_violations = 0;
    double worst_ratio = 0.0;
    double worst_cor2_ratio = 0.0;
};

RegretSweep regret_sweep(OptimizerKind kind) {
    RegretSweep sweep;
    std::vector<std::int64_t> dense(static_cast<std::size_t>(kK));
    for (std::int64_t t = 1; t <= kK; ++t) dense[static_cast<std::size_t>(t - 1)] = t;
    const ProblemSpec problems[] = {ReddiProblem(4.0, 1.0), LinearLossProblem({0.5, -0.3, 0.2}, 1.0)};
    for (const ProblemSpec& problem : problems) {
        for (double gamma : {0.1, 1.0}) {
            for (Beta1Schedule schedule : {Beta1Schedule::Constant, Beta1Schedule::OverT}) {
                ExperimentConfig cfg;
                cfg.optimizer = kind;
                // alpha = 1 matches the scale of the gamma bounds, so the clip
                // binds on some steps and not on others.
                cfg.hp = hp_of(1.0, 0.9, 0.999, schedule);
                cfg.bounds = GammaFamily{gamma};
                cfg.problem = problem;
                cfg.horizon = kK;
                cfg.trials = 20;
                cfg.seed = derive_seed(31, static_cast<std::uint64_t>(gamma * 10));
                cfg.threads = kThreads;
                cfg.checkpoints = dense;

                const std::size_t d = problem.dim();
                std::vector<std::vector<double>> prev(20, std::vector<double>(d, 0.0));
                std::vector<std::int64_t> vbad(20, 0);
                const MonteCarloReport report = monte_carlo(cfg, [&](std::int64_t trial, const StepTrace& s) {
                    auto& p = prev[static_cast<std::size_t>(trial)];
                    for (std::size_t i = 0; i < d; ++i) {
                        if (s.after.v_hat[i] < p[i]) ++vbad[static_cast<std::size_t>(trial)];
                        p[i] = s.after.v_hat[i];
                    }
                });
                const bool over_t = schedule == Beta1Schedule::OverT;
                const RegretCertificate cert = check_regret_bounds(report, over_t);
                sweep.checks += cert.checks;
                sweep.thm3_violations += cert.thm3_violations;
                sweep.worst_ratio = std::max(sweep.worst_ratio, cert.max_regret_over_thm3);
                if (over_t) {
                    sweep.cor2_checks += cert.checks;
                    sweep.cor2_violations += cert.cor2_violations;
                    sweep.dominance_violations += cert.dominance_violations;
                    for (const TrialResult& r : report.results) {
                        for (const CheckpointRecord& rec : r.checkpoints) {
                            sweep.worst_cor2_ratio = std::max(sweep.worst_cor2_ratio, rec.regret / rec.bounds.cor2);
                        }
                    }
                }
                if (kind == OptimizerKind::AMSBound) {
                    sweep.vhat_violations += std::accumulate(vbad.begin(), vbad.end(), std::int64_t{0});
                }
                detail(std::string(to_string(kind)) + " " + (problem.reddi() ? "reddi(C=4)" : "linear(d=3)") +
                       " gamma=" + num(gamma) + (over_t ? " beta1/t" : " beta1") + ": max R_t/thm3=" +
                       num(cert.max_regret_over_thm3) + ", mean R_T/thm3=" +
                       num(report.rows.back().mean_regret / report.rows.back().mean_bounds.thm3) + ", thm3 violations " + std::to_string(cert.thm3_violations) +
                       (over_t ? ", cor2 violations " + std::to_string(cert.cor2_violations) + ", thm3>cor2 " +
                                     std::to_string(cert.dominance_violations)
                               : ""));
            }
        }
    }
    return sweep;
}

RegretSweep adabound_sweep;

void criterion6() {
    Timer timer;
    adabound_sweep = regret_sweep(OptimizerKind::AdaBound);
    const RegretSweep& s = adabound_sweep;
    verdict(6, s.checks > 0 && s.thm3_violations == 0, "drift-based regret bound, 20 seeds x 8 configs, dense t<=1e4",
            std::to_string(s.thm3_violations) + " violations in " + std::to_string(s.checks) +
                " checks, max R_t/thm3 " + num(s.worst_ratio) + " (" + timer.elapsed() + ")");
}

void criterion7() {
    const RegretSweep& s = adabound_sweep;
    const bool ok = s.cor2_checks > 0 && s.cor2_violations == 0 && s.dominance_violations == 0;
    verdict(7, ok, "closed-form gamma bound on the beta1/t runs",
            std::to_string(s.cor2_violations) + " regret violations, " + std::to_string(s.dominance_violations) +
                " thm3>cor2 in " + std::to_string(s.cor2_checks) + " checks, max R_t/cor2 " +
                num(s.worst_cor2_ratio));
}

void criterion8() {
    Timer timer;
    ExperimentConfig a;
    a.optimizer = OptimizerKind::AdaBound;
    a.hp = hp_of(0.001, 0.9, 0.999);
    a.bounds = ConstantFamily{0.1};
    a.problem = ReddiProblem(4.0, 1.0);
    ExperimentConfig b = a;
    b.optimizer = OptimizerKind::SGDM;
    b.hp.kappa = b.hp.beta1;
    b.sgdm = SgdmSchedule{0.1, true};
    double worst = 0.0;
    bool streams = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const EquivalenceReport rep = equivalence_check(a, b, kK, seed);
        worst = std::max(worst, rep.max_abs_diff);
        streams = streams && rep.streams_identical;
    }
    verdict(8, worst <= 1e-12 && streams, "AdaBound(constant 0.1) vs SGDM(kappa=beta1, 0.1/sqrt(t)), 10 seeds",
            "max |dx| " + num(worst) + " (" + timer.elapsed() + ")");
}

void criterion9() {
    Timer timer;
    std::string s1, s2;
    const bool c1 = counterexample_run(OptimizerKind::AMSBound, true, s1);
    const bool c2 = clip_identity(OptimizerKind::AMSBound, OptimizerKind::AMSGrad, s2);
    detail("AMSBound(step) vs AMSGrad: " + s2);
    const RegretSweep sweep = regret_sweep(OptimizerKind::AMSBound);
    const bool c6 = sweep.checks > 0 && sweep.thm3_violations == 0 && sweep.vhat_violations == 0;
    std::ostringstream out;
    out << "counterexample " << (c1 ? "ok" : "failed") << ", clip identity " << (c2 ? "ok" : "failed")
        << ", regret bound " << sweep.thm3_violations << " violations / " << sweep.checks << " checks, v_hat decreases "
        << sweep.vhat_violations << " (" << timer.elapsed() << ")";
    verdict(9, c1 && c2 && c6, "AMSBound parity for criteria 1, 2, 6", out.str());
}

void criterion10() {
    bool ok = true;
    std::ostringstream out;
    const FeasibleBox box = FeasibleBox::cube(1, -1.0, 1.0);
    for (double beta1 : {0.9, 0.5, 0.99}) {
        HyperParams hp = hp_of(0.001, beta1, 0.999);
        hp.kappa = 0.0;
        const OptimizerState plain = sgdm_step(OptimizerState::initial({0.0}), std::vector{1.0}, 0.1, hp, box);
        hp.kappa = beta1;
        const OptimizerState damped = sgdm_step(OptimizerState::initial({0.0}), std::vector{1.0}, 0.1, hp, box);
        const double ratio = plain.m[0] / damped.m[0];
        const bool this_ok = ratio == 1.0 / (1.0 - beta1);
        ok = ok && this_ok;
        out << (out.tellp() > 0 ? ", " : "") << "beta1=" << num(beta1) << " ratio " << num(ratio);
    }
    detail("dataset-scale results are out of scope; this criterion reduces to the momentum-ratio check");
    verdict(10, ok, "first-step momentum ratio kappa=0 vs kappa=beta1 equals 1/(1-beta1)", out.str());
}

}  // namespace

int main() {
    std::cout << "acceptance suite, " << kThreads << " worker thread(s)" << std::endl;
    try {
        criterion1();
        criterion2();
        criterion3();
        criterion4();
        criterion5();
        criterion6();
        criterion7();
        criterion8();
        criterion9();
        criterion10();
    } catch (const std::exception& e) {
        std::cout << "FAIL aborted: " << e.what() << std::endl;
        return 1;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}

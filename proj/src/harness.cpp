#include "boundlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace boundlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMaxCalibratedC = 65536.0;

std::vector<std::int64_t> normalized_checkpoints(std::vector<std::int64_t> cps) {
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

}  // namespace

std::string_view to_string(OptimizerKind kind) noexcept {
    switch (kind) {
        case OptimizerKind::SGDM: return "sgdm";
        case OptimizerKind::Adam: return "adam";
        case OptimizerKind::AMSGrad: return "amsgrad";
        case OptimizerKind::AdaBound: return "adabound";
        case OptimizerKind::AMSBound: return "amsbound";
    }
    return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
    for (auto k : {OptimizerKind::SGDM, OptimizerKind::Adam, OptimizerKind::AMSGrad, OptimizerKind::AdaBound,
                   OptimizerKind::AMSBound}) {
        if (name == to_string(k)) return k;
    }
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

bool uses_bounds(OptimizerKind kind) noexcept {
    return kind == OptimizerKind::AdaBound || kind == OptimizerKind::AMSBound;
}

double SgdmSchedule::at(std::int64_t t) const noexcept {
    return inverse_sqrt ? lr / std::sqrt(static_cast<double>(t)) : lr;
}

void ExperimentConfig::validate() const {
    if (optimizer == OptimizerKind::SGDM) {
        hp.validate();
        if (!(sgdm.lr > 0.0)) throw std::invalid_argument("config: sgdm learning rate must be positive");
    } else {
        hp.validate_adaptive();
    }
    if (const ReddiProblem* r = problem.reddi(); r != nullptr && optimizer != OptimizerKind::SGDM) {
        if (!(r->C() > hp.alpha)) throw std::invalid_argument("config: counterexample needs C > max(1, alpha)");
    }
    if (horizon < 0) throw std::invalid_argument("config: horizon must be >= 0");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    for (std::int64_t c : checkpoints) {
        if (c < 1 || c > horizon) throw std::invalid_argument("config: checkpoints must lie in [1, T]");
    }
    const std::vector<double> x1v(problem.dim(), x1);
    if (!problem.box().contains(x1v)) throw std::invalid_argument("config: x1 outside the feasible box");
}

std::vector<std::int64_t> default_checkpoints(std::int64_t T) {
    std::vector<std::int64_t> cps;
    for (std::int64_t p = 1; p <= T; p *= 2) cps.push_back(p);
    if (T >= 1 && (cps.empty() || cps.back() != T)) cps.push_back(T);
    return cps;
}

TrialRunner::TrialRunner(const ExperimentConfig& config, std::int64_t trial_index)
    : cfg_(config),
      rng_(config.seed, static_cast<std::uint64_t>(trial_index)),
      box_(config.problem.box()),
      x_star_(config.problem.x_star()),
      state_(OptimizerState::initial(std::vector<double>(config.problem.dim(), config.x1))),
      ledger_(RegretLedger::empty(config.problem.dim())),
      uniforms_(config.problem.draws_per_step()),
      g_(config.problem.dim()),
      g_sum_(config.problem.dim(), 0.0),
      x_before_(config.problem.dim()),
      eta_inv_(config.problem.dim()),
      last_bounds_{kNaN, kNaN} {
    config.validate();
    if (uses_bounds(config.optimizer)) drift_.emplace(config.bounds);
}

void TrialRunner::step() {
    const std::int64_t t = state_.t;
    const auto base = static_cast<std::uint64_t>(t - 1) * uniforms_.size();
    for (std::size_t j = 0; j < uniforms_.size(); ++j) uniforms_[j] = rng_.uniform(base + j);
    cfg_.problem.sample_gradient(uniforms_, g_);
    std::copy(state_.x.begin(), state_.x.end(), x_before_.begin());

    switch (cfg_.optimizer) {
        case OptimizerKind::SGDM: sgdm_update(state_, g_, cfg_.sgdm.at(t), cfg_.hp, box_); break;
        case OptimizerKind::Adam: adam_update(state_, g_, cfg_.hp, box_); break;
        case OptimizerKind::AMSGrad: amsgrad_update(state_, g_, cfg_.hp, box_); break;
        case OptimizerKind::AdaBound: adabound_update(state_, g_, cfg_.hp, cfg_.bounds, box_); break;
        case OptimizerKind::AMSBound: amsbound_update(state_, g_, cfg_.hp, cfg_.bounds, box_); break;
    }

    for (std::size_t i = 0; i < eta_inv_.size(); ++i) {
        eta_inv_[i] = 1.0 / state_.eta[i];
        g_sum_[i] += g_[i];
    }
    ledger_.record(g_, x_before_, x_star_, eta_inv_, cfg_.hp.beta1_at(t));
    if (drift_) {
        drift_->advance();
        last_bounds_ = eval_bounds(cfg_.bounds, t);
    }
}

BoundValues TrialRunner::bound_values() const {
    if (!drift_ || ledger_.T == 0) return {kNaN, kNaN, kNaN};
    const BoundInputs in = BoundInputs::from_ledger(ledger_, box_.diameter(), cfg_.problem.G2(),
                                                    cfg_.bounds.upper_at_one(), cfg_.hp.beta1, drift_->value());
    BoundValues out{thm1_rhs(in), thm3_rhs(in), kNaN};
    if (const auto* gamma = std::get_if<GammaFamily>(&cfg_.bounds.family())) {
        out.cor2 = cor2_rhs(in.T, in.beta1, gamma->gamma, in.d, in.D_inf, in.G2);
    }
    return out;
}

TrialResult run_trial(const ExperimentConfig& config, std::int64_t trial_index, const StepObserver& observer) {
    TrialRunner runner(config, trial_index);
    const std::vector<std::int64_t> cps = normalized_checkpoints(config.checkpoints);
    auto next_cp = cps.begin();

    TrialResult result;
    result.checkpoints.reserve(cps.size());
    for (std::int64_t t = 1; t <= config.horizon; ++t) {
        runner.step();
        if (observer) {
            observer(StepTrace{t, runner.last_x(), runner.last_gradient(), runner.state(), runner.last_bounds()});
        }
        if (next_cp != cps.end() && *next_cp == t) {
            const auto x_t = runner.last_x();
            result.checkpoints.push_back(CheckpointRecord{t, std::vector<double>(x_t.begin(), x_t.end()),
                                                          runner.ledger().regret, runner.bound_values()});
            ++next_cp;
        }
    }
    result.final_x = runner.state().x;
    result.regret = runner.ledger().regret;
    result.ledger = runner.ledger();
    result.bound_values = runner.bound_values();
    result.mean_gradient = runner.gradient_sum();
    for (double& g : result.mean_gradient) g = config.horizon > 0 ? g / static_cast<double>(config.horizon) : kNaN;
    return result;
}

double mean_of(std::span<const double> samples) {
    if (samples.empty()) return kNaN;
    double s = 0.0;
    for (double v : samples) s += v;
    return s / static_cast<double>(samples.size());
}

double ci95_half_width(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) return kNaN;
    const double mu = mean_of(samples);
    double ss = 0.0;
    for (double v : samples) ss += (v - mu) * (v - mu);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    return 1.96 * sd / std::sqrt(static_cast<double>(n));
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    const int workers = static_cast<int>(std::clamp<std::int64_t>(threads, 1, std::max<std::int64_t>(n, 1)));
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::int64_t i = next++; i < n; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = n;
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
}

MonteCarloReport monte_carlo(const ExperimentConfig& config, const TrialObserver& observer) {
    config.validate();
    MonteCarloReport report;
    report.trials = config.trials;
    report.results.resize(static_cast<std::size_t>(config.trials));
    parallel_for(config.trials, config.threads,
                 [&](std::int64_t i) {
                     StepObserver per_step;
                     if (observer) per_step = [&observer, i](const StepTrace& s) { observer(i, s); };
                     report.results[static_cast<std::size_t>(i)] = run_trial(config, i, per_step);
                 });

    const std::size_t n = report.results.size();
    std::vector<double> xs(n), subopts(n), regrets(n), thm1(n), thm3(n), cor2(n);
    const std::size_t n_cp = report.results.front().checkpoints.size();
    for (std::size_t c = 0; c < n_cp; ++c) {
        for (std::size_t k = 0; k < n; ++k) {
            const CheckpointRecord& rec = report.results[k].checkpoints[c];
            xs[k] = rec.x.front();
            subopts[k] = config.problem.expected_suboptimality(rec.x);
            regrets[k] = rec.regret;
            thm1[k] = rec.bounds.thm1;
            thm3[k] = rec.bounds.thm3;
            cor2[k] = rec.bounds.cor2;
        }
        CheckpointSummary row;
        row.t = report.results.front().checkpoints[c].t;
        row.mean_x = mean_of(xs);
        row.ci95_x = ci95_half_width(xs);
        row.mean_subopt = mean_of(subopts);
        row.ci95_subopt = ci95_half_width(subopts);
        row.mean_regret = mean_of(regrets);
        row.ci95_regret = ci95_half_width(regrets);
        row.mean_bounds = BoundValues{mean_of(thm1), mean_of(thm3), mean_of(cor2)};
        row.trials = static_cast<int>(n);
        report.rows.push_back(std::move(row));
    }

    for (std::size_t k = 0; k < n; ++k) regrets[k] = report.results[k].regret;
    report.mean_regret = mean_of(regrets);
    report.ci95_regret = ci95_half_width(regrets);
    for (std::size_t i = 0; i < config.problem.dim(); ++i) {
        for (std::size_t k = 0; k < n; ++k) xs[k] = report.results[k].mean_gradient[i];
        report.mean_gradient.push_back(mean_of(xs));
        report.ci95_gradient.push_back(ci95_half_width(xs));
    }
    return report;
}

CounterexampleCertificate check_counterexample(const MonteCarloReport& report, double min_subopt) {
    CounterexampleCertificate cert;
    cert.min_mean_subopt = std::numeric_limits<double>::infinity();
    const auto ci = [](double c) { return std::isnan(c) ? 0.0 : c; };
    for (std::size_t k = 0; k < report.rows.size(); ++k) {
        const CheckpointSummary& row = report.rows[k];
        cert.min_mean_subopt = std::min(cert.min_mean_subopt, row.mean_subopt);
        if (!(row.mean_subopt >= min_subopt)) cert.subopt_ok = false;
        if (k == 0) continue;
        const CheckpointSummary& prev = report.rows[k - 1];
        const double drop = prev.mean_x - row.mean_x;
        if (drop > cert.worst_drop) {
            cert.worst_drop = drop;
            cert.worst_drop_t = row.t;
        }
        if (drop > 2.0 * std::max(ci(prev.ci95_x), ci(row.ci95_x))) cert.monotone_ok = false;
    }
    return cert;
}

RegretCertificate check_regret_bounds(const MonteCarloReport& report, bool check_cor2) {
    RegretCertificate cert;
    for (const TrialResult& trial : report.results) {
        for (const CheckpointRecord& rec : trial.checkpoints) {
            ++cert.checks;
            if (!(rec.regret <= rec.bounds.thm3)) ++cert.thm3_violations;
            cert.max_regret_over_thm3 = std::max(cert.max_regret_over_thm3, rec.regret / rec.bounds.thm3);
            if (check_cor2) {
                if (!(rec.regret <= rec.bounds.cor2)) ++cert.cor2_violations;
                if (!(rec.bounds.thm3 <= rec.bounds.cor2)) ++cert.dominance_violations;
            }
        }
    }
    return cert;
}

CalibrationResult calibrate_C(const HyperParams& hp, double delta, std::int64_t probe_T, int trials,
                              std::uint64_t seed, int threads) {
    if (probe_T < 1000) throw std::invalid_argument("calibrate_C: probe horizon must be >= 1000");
    if (trials < 2) throw std::invalid_argument("calibrate_C: need at least 2 trials");
    hp.validate_adaptive();

    const std::int64_t half = probe_T / 2;
    const double late_len = static_cast<double>(probe_T - half);
    CalibrationResult result;
    std::ostringstream tried;
    for (double C = std::max(2.0, 2.0 * hp.alpha); C <= kMaxCalibratedC; C *= 2.0) {
        if (C < delta) continue;
        ExperimentConfig cfg;
        cfg.optimizer = OptimizerKind::Adam;
        cfg.hp = hp;
        cfg.problem = ReddiProblem(C, delta);
        cfg.horizon = probe_T;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.checkpoints = {half + 1};
        const MonteCarloReport mc = monte_carlo(cfg);

        std::vector<double> full(mc.results.size()), late(mc.results.size());
        for (std::size_t k = 0; k < mc.results.size(); ++k) {
            const double x_end = mc.results[k].final_x.front();
            full[k] = (x_end - cfg.x1) / static_cast<double>(probe_T);
            late[k] = (x_end - mc.results[k].checkpoints.front().x.front()) / late_len;
        }
        CalibrationProbe probe;
        probe.C = C;
        probe.drift = mean_of(full);
        probe.drift_se = ci95_half_width(full) / 1.96;
        probe.late_drift = mean_of(late);
        probe.late_se = ci95_half_width(late) / 1.96;
        // The late window only has to rule out a significant decline: iterates
        // pinned at the upper wall have zero late drift and zero spread.
        probe.accepted = probe.drift > 0.0 && probe.drift >= 3.0 * probe.drift_se &&
                         probe.late_drift >= -3.0 * probe.late_se;
        result.probes.push_back(probe);
        tried << " C=" << C << " (z=" << probe.z() << ", late z=" << probe.late_z() << ")";
        if (probe.accepted) {
            result.C = C;
            return result;
        }
    }
    throw CalibrationError("calibrate_C: no C <= 65536 produces a significant positive drift; hyperparameters are "
                           "outside the counterexample regime. Probes:" +
                           tried.str());
}

EquivalenceReport equivalence_check(const ExperimentConfig& configA, const ExperimentConfig& configB, std::int64_t T,
                                    std::uint64_t seed) {
    if (!(configA.problem == configB.problem)) throw std::invalid_argument("equivalence_check: problems differ");
    if (T < 0) throw std::invalid_argument("equivalence_check: T must be >= 0");
    ExperimentConfig a = configA;
    ExperimentConfig b = configB;
    a.horizon = b.horizon = T;
    a.seed = b.seed = seed;
    a.checkpoints.clear();
    b.checkpoints.clear();
    const std::vector<std::int64_t> cps =
        normalized_checkpoints(configA.checkpoints.empty() ? default_checkpoints(T) : configA.checkpoints);

    TrialRunner ra(a, 0);
    TrialRunner rb(b, 0);
    EquivalenceReport report;
    auto diff_inf = [](std::span<const double> u, std::span<const double> w) {
        double d = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - w[i]));
        return d;
    };
    auto next_cp = cps.begin();
    for (std::int64_t t = 1; t <= T; ++t) {
        ra.step();
        rb.step();
        if (!std::equal(ra.last_gradient().begin(), ra.last_gradient().end(), rb.last_gradient().begin())) {
            report.streams_identical = false;
        }
        // x_t, then x_{t+1} once the last step is done.
        report.max_abs_diff = std::max(report.max_abs_diff, diff_inf(ra.last_x(), rb.last_x()));
        if (t == T) report.max_abs_diff = std::max(report.max_abs_diff, diff_inf(ra.state().x, rb.state().x));
        if (next_cp != cps.end() && *next_cp == t) {
            report.rows.push_back(EquivalenceRow{t, report.max_abs_diff});
            ++next_cp;
        }
    }
    return report;
}

ContradictionReport contradiction_demo(std::int64_t d, double alpha, double beta2, double delta, int trials,
                                       std::uint64_t seed, const ContradictionOptions& options) {
    if (d != 1) throw std::invalid_argument("contradiction_demo: the counterexample is one-dimensional (d = 1)");
    if (trials < 1) throw std::invalid_argument("contradiction_demo: trials must be >= 1");

    HyperParams hp;
    hp.alpha = alpha;
    hp.beta1 = 0.0;
    hp.beta1_schedule = Beta1Schedule::Constant;
    hp.beta2 = beta2;
    hp.validate_adaptive();

    ContradictionReport report;
    report.trials = trials;
    report.C = options.C ? *options.C
                         : calibrate_C(hp, delta, options.probe_T, options.calibration_trials, seed, options.threads).C;
    report.K = find_contradiction_K(d, report.C, alpha, beta2);
    report.rhs_over_K = wrongregret_rhs(report.K, d, report.C, alpha, beta2) / static_cast<double>(report.K);
    report.required_steps = static_cast<double>(report.K) * static_cast<double>(trials);
    report.mc_avg_regret_per_step = kNaN;
    report.ci95 = kNaN;

    if (report.required_steps > options.max_total_steps) {
        std::ostringstream msg;
        msg << "not executed: K = " << report.K << " at C = " << report.C << " needs " << report.required_steps
            << " steps, above the budget of " << options.max_total_steps;
        report.message = msg.str();
        return report;
    }

    ExperimentConfig cfg;
    cfg.optimizer = OptimizerKind::AdaBound;
    cfg.hp = hp;
    cfg.bounds = StepFamily{report.K, alpha, beta2, report.C};
    cfg.problem = ReddiProblem(report.C, delta);
    cfg.horizon = report.K;
    cfg.trials = trials;
    // Independent of the calibration streams.
    cfg.seed = derive_seed(seed, 1);
    cfg.threads = options.threads;
    const MonteCarloReport mc = monte_carlo(cfg);

    std::vector<double> per_step(mc.results.size());
    for (std::size_t k = 0; k < per_step.size(); ++k) per_step[k] = mc.results[k].regret / static_cast<double>(report.K);
    report.executed = true;
    report.mc_avg_regret_per_step = mean_of(per_step);
    report.ci95 = ci95_half_width(per_step);
    const double lower_edge = trials >= 2 ? report.mc_avg_regret_per_step - report.ci95 : report.mc_avg_regret_per_step;
    report.succeeded = report.rhs_over_K < 0.01 && lower_edge > report.rhs_over_K;
    std::ostringstream msg;
    msg << (report.succeeded ? "contradiction shown" : "contradiction not shown") << ": average per-step regret "
        << report.mc_avg_regret_per_step << " (lower edge " << lower_edge << ") vs bound/K " << report.rhs_over_K;
    report.message = msg.str();
    return report;
}

}  // namespace boundlab

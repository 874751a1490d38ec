#include "boundlab/cli.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "boundlab/harness.hpp"

namespace boundlab::cli {

namespace {

enum class Kind { Value, Switch };

struct FlagDef {
    std::string_view name;
    std::string_view fallback;
    Kind kind;
    std::string_view help;
};

struct CommandDef {
    std::string_view name;
    std::string_view help;
    std::vector<FlagDef> flags;
};

constexpr FlagDef value(std::string_view name, std::string_view fallback, std::string_view help) {
    return FlagDef{name, fallback, Kind::Value, help};
}
constexpr FlagDef toggle(std::string_view name, std::string_view help) {
    return FlagDef{name, "false", Kind::Switch, help};
}

const std::vector<CommandDef>& commands() {
    static const std::vector<CommandDef> table = {
        {"counterexample",
         "Monte Carlo of an optimizer on the stochastic counterexample; writes counterexample.csv",
         {value("optimizer", "adabound", "sgdm | adam | amsgrad | adabound | amsbound"),
          value("family", "step", "bound family: step | gamma (gamma from the transfer formula unless --gamma)"),
          value("gamma", "auto", "gamma for --family gamma"),
          value("K", "10000", "horizon and step-family switch point"),
          value("trials", "1000", "Monte Carlo trials"),
          value("delta", "1", "expected slope delta"),
          value("C", "auto", "large slope, or auto to calibrate"),
          value("probe-T", "10000", "calibration probe horizon"),
          value("calibration-trials", "200", "calibration trials per probe"),
          value("alpha", "0.001", "step size alpha"),
          value("alpha-star", "0.1", "SGDM learning rate (decayed by 1/sqrt(t))"),
          value("beta1", "0.9", "first-moment decay"),
          value("beta2", "0.999", "second-moment decay"),
          value("beta1-schedule", "const", "const | over-t"),
          value("kappa", "0", "SGDM dampening"),
          toggle("bias-correction", "SGDM bias correction"),
          value("seed", "0", "random seed"),
          value("threads", "1", "worker threads"),
          value("out", "runs", "output directory")}},
        {"contradiction",
         "Refutation of the original regret bound on the counterexample (beta1 = 0); writes contradiction.csv",
         {value("alpha", "0.1", "step size alpha"),
          value("beta2", "0.99", "second-moment decay"),
          value("delta", "1", "expected slope delta"),
          value("C", "auto", "large slope, or auto to calibrate"),
          value("probe-T", "10000", "calibration probe horizon"),
          value("calibration-trials", "200", "calibration trials per probe"),
          value("trials", "20", "Monte Carlo trials"),
          value("max-steps", "2e9", "refuse to simulate more than this many steps in total"),
          value("seed", "0", "random seed"),
          value("threads", "1", "worker threads"),
          value("out", "runs", "output directory")}},
        {"regret",
         "Realized regret against the corrected bounds; writes regret.csv",
         {value("optimizer", "adabound", "adabound | amsbound"),
          value("family", "gamma", "gamma | step | constant"),
          value("gamma", "1", "gamma family parameter"),
          value("K", "10000", "step family switch point"),
          value("alpha-star", "0.1", "constant family rate"),
          value("problem", "reddi", "reddi | linear"),
          value("C", "4", "large slope of the counterexample problem"),
          value("delta", "1", "expected slope delta"),
          value("mean", "0.5,-0.3,0.2", "linear problem: mean gradient"),
          value("noise", "1", "linear problem: uniform noise half-width"),
          value("T", "10000", "horizon"),
          value("trials", "20", "Monte Carlo trials"),
          value("alpha", "0.001", "step size alpha"),
          value("beta1", "0.9", "first-moment decay"),
          value("beta2", "0.999", "second-moment decay"),
          value("beta1-schedule", "const", "const | over-t"),
          value("seed", "0", "random seed"),
          value("threads", "1", "worker threads"),
          value("out", "runs", "output directory")}},
        {"equivalence",
         "Paired-stream comparison of two optimizers; writes equivalence.csv",
         {value("a", "adabound:step", "first optimizer spec"),
          value("b", "adam", "second optimizer spec"),
          value("T", "10000", "horizon"),
          value("K", "auto", "step family switch point (auto = T)"),
          value("C", "4", "large slope of the counterexample problem"),
          value("delta", "1", "expected slope delta"),
          value("alpha", "0.001", "step size alpha"),
          value("alpha-star", "0.1", "constant family rate and SGDM learning rate"),
          value("gamma", "1", "gamma family parameter"),
          value("beta1", "0.9", "first-moment decay"),
          value("beta2", "0.999", "second-moment decay"),
          value("beta1-schedule", "const", "const | over-t"),
          value("kappa", "0", "SGDM dampening unless the optimizer string sets kappa="),
          toggle("bias-correction", "SGDM bias correction"),
          value("tol", "1e-12", "maximum accepted difference"),
          value("seed", "0", "random seed"),
          value("out", "runs", "output directory")}},
        {"validate-bounds",
         "Scan a bound-function family: drift quantity and monotonicity hypotheses",
         {value("family", "gamma", "gamma | step | constant"),
          value("gamma", "1", "gamma family parameter"),
          value("K", "100", "step family switch point"),
          value("alpha", "0.1", "step family alpha"),
          value("beta2", "0.99", "step family beta2"),
          value("C", "2", "step family C"),
          value("alpha-star", "0.1", "constant family rate"),
          value("T", "1000000", "scan horizon (alias --horizon)"),
          value("out", "runs", "output directory")}},
        {"calibrate-c",
         "Find the smallest C for which Adam drifts away from the optimum",
         {value("alpha", "0.001", "step size alpha"),
          value("beta1", "0.9", "first-moment decay"),
          value("beta2", "0.999", "second-moment decay"),
          value("beta1-schedule", "const", "const | over-t"),
          value("delta", "1", "expected slope delta"),
          value("T", "10000", "probe horizon"),
          value("trials", "200", "trials per probe"),
          value("seed", "0", "random seed"),
          value("threads", "1", "worker threads"),
          value("out", "runs", "output directory")}},
    };
    return table;
}

const CommandDef& command(std::string_view name) {
    for (const CommandDef& c : commands()) {
        if (c.name == name) return c;
    }
    throw UsageError("unknown subcommand '" + std::string(name) + "'");
}

// Subcommands whose C defaults to auto accept --calibrate.
bool calibrates(const CommandDef& cmd) {
    for (const FlagDef& f : cmd.flags) {
        if (f.name == "C") return f.fallback == "auto";
    }
    return false;
}

struct Bindings {
    std::map<std::string, std::string> values;
    std::map<std::string, bool> switches;
    bool calibrate = false;
};

struct ParserSet {
    std::unique_ptr<CLI::App> app = std::make_unique<CLI::App>("Deterministic laboratory for bounded adaptive optimizers",
                                                               "boundlab");
    std::map<std::string, Bindings> bindings;  // node-based: stable addresses
};

ParserSet build_parser() {
    ParserSet ps;
    ps.app->require_subcommand(1);
    for (const CommandDef& cmd : commands()) {
        CLI::App* sub = ps.app->add_subcommand(std::string(cmd.name), std::string(cmd.help));
        Bindings& b = ps.bindings[std::string(cmd.name)];
        for (const FlagDef& f : cmd.flags) {
            const std::string key(f.name);
            std::string names = "--" + key;
            if (key == "T" && cmd.name == "validate-bounds") names += ",--horizon";
            if (f.kind == Kind::Switch) {
                sub->add_flag(names, b.switches[key], std::string(f.help));
            } else {
                b.values[key] = std::string(f.fallback);
                sub->add_option(names, b.values[key], std::string(f.help))->capture_default_str();
            }
        }
        if (calibrates(cmd)) sub->add_flag("--calibrate", b.calibrate, "calibrate C (same as --C auto)");
    }
    return ps;
}

CliInvocation resolve(const ParserSet& ps) {
    CLI::App* chosen = ps.app->get_subcommands().front();
    CliInvocation inv;
    inv.subcommand = chosen->get_name();
    const Bindings& b = ps.bindings.at(inv.subcommand);
    inv.flags = b.values;
    for (const auto& [k, on] : b.switches) inv.flags[k] = on ? "true" : "false";
    if (b.calibrate) inv.flags["C"] = "auto";
    inv.out_dir = inv.flags.at("out");
    return inv;
}

// Typed accessors: malformed values are usage errors.

const std::string& raw(const CliInvocation& inv, const std::string& key) {
    auto it = inv.flags.find(key);
    if (it == inv.flags.end()) throw UsageError("missing flag --" + key);
    return it->second;
}

double num(const CliInvocation& inv, const std::string& key) {
    const std::string& s = raw(inv, key);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw UsageError("--" + key + ": expected a number, got '" + s + "'");
    }
    return v;
}

template <class Int>
Int integer(const CliInvocation& inv, const std::string& key) {
    const std::string& s = raw(inv, key);
    Int v{};
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
    // Accept integral values written as floats, e.g. 1e6.
    const double d = num(inv, key);
    if (d != std::floor(d) || d < static_cast<double>(std::numeric_limits<Int>::min()) ||
        d > static_cast<double>(std::numeric_limits<Int>::max())) {
        throw UsageError("--" + key + ": expected an integer, got '" + s + "'");
    }
    return static_cast<Int>(d);
}

bool on(const CliInvocation& inv, const std::string& key) { return raw(inv, key) == "true"; }

bool is_auto(const CliInvocation& inv, const std::string& key) { return raw(inv, key) == "auto"; }

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

Beta1Schedule schedule(const CliInvocation& inv) {
    const std::string& s = raw(inv, "beta1-schedule");
    if (s == "const") return Beta1Schedule::Constant;
    if (s == "over-t") return Beta1Schedule::OverT;
    throw UsageError("--beta1-schedule: expected const or over-t, got '" + s + "'");
}

HyperParams hyper_params(const CliInvocation& inv) {
    HyperParams hp;
    hp.alpha = num(inv, "alpha");
    if (inv.flags.count("beta1")) hp.beta1 = num(inv, "beta1");
    hp.beta2 = num(inv, "beta2");
    if (inv.flags.count("beta1-schedule")) hp.beta1_schedule = schedule(inv);
    if (inv.flags.count("kappa")) hp.kappa = num(inv, "kappa");
    if (inv.flags.count("bias-correction")) hp.bias_correction = on(inv, "bias-correction");
    return hp;
}

OptimizerKind optimizer(const std::string& name) {
    try {
        return parse_optimizer(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

BoundFunctionSpec family_from(const std::string& family, const CliInvocation& inv, std::int64_t K, double C) {
    if (family == "gamma") return GammaFamily{num(inv, "gamma")};
    if (family == "step") return StepFamily{K, num(inv, "alpha"), num(inv, "beta2"), C};
    if (family == "constant") return ConstantFamily{num(inv, "alpha-star")};
    throw UsageError("unknown bound family '" + family + "'");
}

std::filesystem::path prepare_out(const CliInvocation& inv) {
    std::filesystem::create_directories(inv.out_dir);
    const std::filesystem::path echo = inv.out_dir / "config.echo";
    std::ofstream f(echo, std::ios::binary | std::ios::trunc);
    f << echo_text(inv);
    if (!f) throw std::runtime_error(echo.string() + ": write failed");
    return inv.out_dir;
}

double resolve_C(const CliInvocation& inv, const HyperParams& hp, std::ostream& out) {
    if (!is_auto(inv, "C")) return num(inv, "C");
    const CalibrationResult cal =
        calibrate_C(hp, num(inv, "delta"), integer<std::int64_t>(inv, "probe-T"), integer<int>(inv, "calibration-trials"),
                    integer<std::uint64_t>(inv, "seed"), integer<int>(inv, "threads"));
    out << "calibrated C=" << format_number(cal.C) << " (z=" << format_number(cal.probes.back().z())
        << ", late z=" << format_number(cal.probes.back().late_z()) << ")\n";
    return cal.C;
}

int run_counterexample(const CliInvocation& inv, std::ostream& out) {
    const auto dir = prepare_out(inv);
    const OptimizerKind kind = optimizer(raw(inv, "optimizer"));
    const HyperParams hp = hyper_params(inv);
    const auto K = integer<std::int64_t>(inv, "K");
    const double C = resolve_C(inv, hp, out);

    ExperimentConfig cfg;
    cfg.optimizer = kind;
    cfg.hp = hp;
    const std::string& family = raw(inv, "family");
    if (family == "step") {
        cfg.bounds = StepFamily{K, hp.alpha, hp.beta2, C};
    } else if (family == "gamma") {
        const double gamma = is_auto(inv, "gamma") ? claim1_gamma(K, hp.alpha, C, hp.beta2) : num(inv, "gamma");
        cfg.bounds = GammaFamily{gamma};
        out << "gamma=" << format_number(gamma) << "\n";
    } else {
        throw UsageError("--family: expected step or gamma, got '" + family + "'");
    }
    cfg.problem = ReddiProblem(C, num(inv, "delta"));
    cfg.sgdm = SgdmSchedule{num(inv, "alpha-star"), true};
    cfg.horizon = K;
    cfg.trials = integer<int>(inv, "trials");
    cfg.seed = derive_seed(integer<std::uint64_t>(inv, "seed"), 2);
    cfg.threads = integer<int>(inv, "threads");
    cfg.checkpoints = default_checkpoints(K);

    const MonteCarloReport report = monte_carlo(cfg);
    write_counterexample_csv(report, dir / "counterexample.csv");
    const CounterexampleCertificate cert = check_counterexample(report);
    out << "C=" << format_number(C) << " K=" << K << " trials=" << cfg.trials
        << " min_mean_subopt=" << format_number(cert.min_mean_subopt)
        << " worst_mean_x_drop=" << format_number(cert.worst_drop) << " at t=" << cert.worst_drop_t << "\n";
    out << "certificate: " << (cert.ok() ? "PASS" : "FAIL") << "\n";
    return cert.ok() ? kExitOk : kExitCertificateFailed;
}

int run_contradiction(const CliInvocation& inv, std::ostream& out) {
    const auto dir = prepare_out(inv);
    ContradictionOptions opts;
    opts.probe_T = integer<std::int64_t>(inv, "probe-T");
    opts.calibration_trials = integer<int>(inv, "calibration-trials");
    opts.max_total_steps = num(inv, "max-steps");
    opts.threads = integer<int>(inv, "threads");
    if (!is_auto(inv, "C")) opts.C = num(inv, "C");
    const ContradictionReport rep =
        contradiction_demo(1, num(inv, "alpha"), num(inv, "beta2"), num(inv, "delta"), integer<int>(inv, "trials"),
                           integer<std::uint64_t>(inv, "seed"), opts);
    write_contradiction_csv(rep, dir / "contradiction.csv");
    out << "C=" << format_number(rep.C) << " K=" << rep.K << " rhs_over_K=" << format_number(rep.rhs_over_K)
        << " mc_avg_regret_per_step=" << format_number(rep.mc_avg_regret_per_step)
        << " ci95=" << format_number(rep.ci95) << "\n"
        << rep.message << "\n";
    return rep.succeeded ? kExitOk : kExitCertificateFailed;
}

int run_regret(const CliInvocation& inv, std::ostream& out) {
    const auto dir = prepare_out(inv);
    ExperimentConfig cfg;
    cfg.optimizer = optimizer(raw(inv, "optimizer"));
    if (!uses_bounds(cfg.optimizer)) throw UsageError("--optimizer: regret bounds need adabound or amsbound");
    cfg.hp = hyper_params(inv);
    const double C = num(inv, "C");
    const std::string& problem = raw(inv, "problem");
    if (problem == "reddi") {
        cfg.problem = ReddiProblem(C, num(inv, "delta"));
    } else if (problem == "linear") {
        std::vector<double> mean;
        for (const std::string& part : split(raw(inv, "mean"), ',')) {
            CliInvocation one;
            one.flags["mean"] = part;
            mean.push_back(num(one, "mean"));
        }
        cfg.problem = LinearLossProblem(std::move(mean), num(inv, "noise"));
    } else {
        throw UsageError("--problem: expected reddi or linear, got '" + problem + "'");
    }
    cfg.bounds = family_from(raw(inv, "family"), inv, integer<std::int64_t>(inv, "K"), C);
    cfg.horizon = integer<std::int64_t>(inv, "T");
    cfg.trials = integer<int>(inv, "trials");
    cfg.seed = integer<std::uint64_t>(inv, "seed");
    cfg.threads = integer<int>(inv, "threads");
    cfg.checkpoints = default_checkpoints(cfg.horizon);

    const MonteCarloReport report = monte_carlo(cfg);
    write_regret_csv(report, dir / "regret.csv");
    const bool cor2 = cfg.bounds.is_gamma() && cfg.hp.beta1_schedule == Beta1Schedule::OverT;
    const RegretCertificate cert = check_regret_bounds(report, cor2);
    out << "checks=" << cert.checks << " thm3_violations=" << cert.thm3_violations
        << " cor2_violations=" << cert.cor2_violations << " dominance_violations=" << cert.dominance_violations
        << " max_regret_over_thm3=" << format_number(cert.max_regret_over_thm3) << "\n";
    out << "certificate: " << (cert.ok() ? "PASS" : "FAIL") << "\n";
    return cert.ok() ? kExitOk : kExitCertificateFailed;
}

// <optimizer>[:<family>[:<param>]] for adabound / amsbound, and
// sgdm[:kappa=<v|beta1>][:lr=<v>][:decay=sqrt|none][:bias].
ExperimentConfig member_config(const std::string& spec, const CliInvocation& inv, std::int64_t T) {
    const std::vector<std::string> parts = split(spec, ':');
    ExperimentConfig cfg;
    cfg.optimizer = optimizer(parts[0]);
    cfg.hp = hyper_params(inv);
    const double C = num(inv, "C");
    const std::int64_t K = is_auto(inv, "K") ? T : integer<std::int64_t>(inv, "K");
    cfg.problem = ReddiProblem(C, num(inv, "delta"));
    cfg.sgdm = SgdmSchedule{num(inv, "alpha-star"), true};

    if (uses_bounds(cfg.optimizer)) {
        const std::string family = parts.size() > 1 ? parts[1] : "step";
        CliInvocation local = inv;
        if (parts.size() > 2) local.flags[family == "constant" ? "alpha-star" : "gamma"] = parts[2];
        if (family == "claim1") {
            cfg.bounds = GammaFamily{claim1_gamma(K, cfg.hp.alpha, C, cfg.hp.beta2)};
        } else {
            cfg.bounds = family_from(family, local, K, C);
        }
    } else if (cfg.optimizer == OptimizerKind::SGDM) {
        for (std::size_t i = 1; i < parts.size(); ++i) {
            const std::string& p = parts[i];
            CliInvocation one;
            if (p == "bias") {
                cfg.hp.bias_correction = true;
            } else if (p == "kappa=beta1") {
                cfg.hp.kappa = cfg.hp.beta1;
            } else if (p.rfind("kappa=", 0) == 0) {
                one.flags["kappa"] = p.substr(6);
                cfg.hp.kappa = num(one, "kappa");
            } else if (p.rfind("lr=", 0) == 0) {
                one.flags["lr"] = p.substr(3);
                cfg.sgdm.lr = num(one, "lr");
            } else if (p == "decay=none") {
                cfg.sgdm.inverse_sqrt = false;
            } else if (p != "decay=sqrt") {
                throw UsageError("unknown sgdm option '" + p + "'");
            }
        }
    } else if (parts.size() > 1) {
        throw UsageError("'" + parts[0] + "' takes no options");
    }
    return cfg;
}

int run_equivalence(const CliInvocation& inv, std::ostream& out) {
    const auto dir = prepare_out(inv);
    const auto T = integer<std::int64_t>(inv, "T");
    const ExperimentConfig a = member_config(raw(inv, "a"), inv, T);
    const ExperimentConfig b = member_config(raw(inv, "b"), inv, T);
    const EquivalenceReport rep = equivalence_check(a, b, T, integer<std::uint64_t>(inv, "seed"));
    write_equivalence_csv(rep, dir / "equivalence.csv");
    const double tol = num(inv, "tol");
    const bool ok = rep.streams_identical && rep.max_abs_diff <= tol;
    out << "max_abs_diff=" << format_number(rep.max_abs_diff) << " tol=" << format_number(tol)
        << " streams_identical=" << (rep.streams_identical ? "true" : "false") << "\n";
    out << "certificate: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitCertificateFailed;
}

int run_validate_bounds(const CliInvocation& inv, std::ostream& out) {
    prepare_out(inv);
    const std::string& family = raw(inv, "family");
    const auto T = integer<std::int64_t>(inv, "T");
    const BoundFunctionSpec spec = family_from(family, inv, integer<std::int64_t>(inv, "K"), num(inv, "C"));
    const double drift = drift_M(spec, T);
    const BoundHypotheses hyp = check_bound_hypotheses(spec, T);
    out << "family=" << family << " T=" << T << " drift_M=" << format_number(drift)
        << " L_inf=" << format_number(spec.lower_at_one()) << " R_inf=" << format_number(spec.upper_at_one())
        << " final_gap=" << format_number(hyp.final_gap) << "\n";
    out << "hypotheses: positive_lower=" << hyp.positive_lower << " ordered=" << hyp.ordered
        << " lower_nondecreasing=" << hyp.lower_nondecreasing << " upper_nonincreasing=" << hyp.upper_nonincreasing
        << "\n";
    bool ok = hyp.ok();
    if (const auto* g = std::get_if<GammaFamily>(&spec.family())) {
        const double bound = prop1_bound(g->gamma);
        out << "prop1_bound=" << format_number(bound) << " limit=" << format_number(1.0 + 2.0 / g->gamma) << "\n";
        ok = ok && drift <= bound;
    } else if (spec.is_step()) {
        ok = ok && hyp.final_gap == 0.0;
    }
    out << "certificate: " << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? kExitOk : kExitCertificateFailed;
}

int run_calibrate(const CliInvocation& inv, std::ostream& out) {
    prepare_out(inv);
    const HyperParams hp = hyper_params(inv);
    try {
        const CalibrationResult cal =
            calibrate_C(hp, num(inv, "delta"), integer<std::int64_t>(inv, "T"), integer<int>(inv, "trials"),
                        integer<std::uint64_t>(inv, "seed"), integer<int>(inv, "threads"));
        for (const CalibrationProbe& p : cal.probes) {
            out << "probe C=" << format_number(p.C) << " drift=" << format_number(p.drift)
                << " z=" << format_number(p.z()) << " late_z=" << format_number(p.late_z())
                << (p.accepted ? " accepted" : "") << "\n";
        }
        out << "C=" << format_number(cal.C) << "\n";
        return kExitOk;
    } catch (const CalibrationError& e) {
        out << e.what() << "\n";
        return kExitCertificateFailed;
    }
}

}  // namespace

std::vector<std::string> subcommands() {
    std::vector<std::string> names;
    for (const CommandDef& c : commands()) names.emplace_back(c.name);
    return names;
}

CliInvocation parse_invocation(std::span<const std::string> args) {
    ParserSet ps = build_parser();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        ps.app->parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    return resolve(ps);
}

std::vector<std::string> to_args(const CliInvocation& inv) {
    const CommandDef& cmd = command(inv.subcommand);
    std::vector<std::string> args{inv.subcommand};
    for (const FlagDef& f : cmd.flags) {
        const std::string key(f.name);
        const std::string& v = inv.flags.at(key);
        if (f.kind == Kind::Switch) {
            if (v == "true") args.push_back("--" + key);
        } else {
            args.push_back("--" + key + "=" + v);
        }
    }
    return args;
}

std::string echo_text(const CliInvocation& inv) {
    std::ostringstream os;
    os << "subcommand=" << inv.subcommand << "\n";
    for (const auto& [k, v] : inv.flags) os << k << "=" << v << "\n";
    return os.str();
}

CliInvocation parse_echo(std::string_view text) {
    CliInvocation inv;
    for (const std::string& line : split(text, '\n')) {
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw UsageError("config.echo: malformed line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        if (key == "subcommand") {
            inv.subcommand = val;
        } else {
            inv.flags[key] = val;
        }
    }
    const CommandDef& cmd = command(inv.subcommand);
    for (const FlagDef& f : cmd.flags) {
        if (!inv.flags.count(std::string(f.name))) {
            throw UsageError("config.echo: missing key '" + std::string(f.name) + "'");
        }
    }
    if (inv.flags.size() != cmd.flags.size()) throw UsageError("config.echo: unexpected keys");
    inv.out_dir = inv.flags.at("out");
    return inv;
}

int run(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    try {
        if (inv.subcommand == "counterexample") return run_counterexample(inv, out);
        if (inv.subcommand == "contradiction") return run_contradiction(inv, out);
        if (inv.subcommand == "regret") return run_regret(inv, out);
        if (inv.subcommand == "equivalence") return run_equivalence(inv, out);
        if (inv.subcommand == "validate-bounds") return run_validate_bounds(inv, out);
        if (inv.subcommand == "calibrate-c") return run_calibrate(inv, out);
        throw UsageError("unknown subcommand '" + inv.subcommand + "'");
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid parameters: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CalibrationError& e) {
        err << e.what() << "\n";
        return kExitCertificateFailed;
    }
}

int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    ParserSet ps = build_parser();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        ps.app->parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return ps.app->exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return ps.app->exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        ps.app->exit(e, out, err);
        return kExitUsage;
    }
    return run(resolve(ps), out, err);
}

}  // namespace boundlab::cli

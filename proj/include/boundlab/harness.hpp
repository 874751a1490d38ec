#pragma once

#include <bit>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "boundlab/analysis.hpp"
#include "boundlab/bounds.hpp"
#include "boundlab/kernels.hpp"
#include "boundlab/problems.hpp"
#include "boundlab/rng.hpp"

namespace boundlab {

enum class OptimizerKind { SGDM, Adam, AMSGrad, AdaBound, AMSBound };

std::string_view to_string(OptimizerKind kind) noexcept;
/// Accepts "sgdm", "adam", "amsgrad", "adabound", "amsbound".
OptimizerKind parse_optimizer(std::string_view name);
bool uses_bounds(OptimizerKind kind) noexcept;

/// SGDM learning rate: lr, or lr / sqrt(t) when inverse_sqrt is set.
struct SgdmSchedule {
    double lr = 0.1;
    bool inverse_sqrt = true;

    double at(std::int64_t t) const noexcept;
    bool operator==(const SgdmSchedule&) const = default;
};

struct ExperimentConfig {
    OptimizerKind optimizer = OptimizerKind::AdaBound;
    HyperParams hp;
    BoundFunctionSpec bounds = ConstantFamily{0.1};  // read only by AdaBound / AMSBound
    ProblemSpec problem = ReddiProblem(2.0);
    SgdmSchedule sgdm;                               // read only by SGDM
    double x1 = 0.0;                                 // broadcast to every coordinate
    std::int64_t horizon = 0;
    int trials = 1;
    std::uint64_t seed = 0;
    std::vector<std::int64_t> checkpoints;
    int threads = 1;
    std::filesystem::path output;

    /// Throws std::invalid_argument.
    void validate() const;
};

/// Powers of two up to T, plus T.
std::vector<std::int64_t> default_checkpoints(std::int64_t T);

struct BoundValues {
    double thm1 = 0.0;
    double thm3 = 0.0;
    double cor2 = 0.0;  // NaN unless the bounds are a GammaFamily

    /// Bitwise, so NaN placeholders compare equal to themselves.
    bool operator==(const BoundValues& o) const noexcept {
        return std::bit_cast<std::uint64_t>(thm1) == std::bit_cast<std::uint64_t>(o.thm1) &&
               std::bit_cast<std::uint64_t>(thm3) == std::bit_cast<std::uint64_t>(o.thm3) &&
               std::bit_cast<std::uint64_t>(cor2) == std::bit_cast<std::uint64_t>(o.cor2);
    }
};

/// State at a logged step t: the iterate x_t that step t evaluated the loss
/// at, and regret R_t including f_t.
struct CheckpointRecord {
    std::int64_t t = 0;
    std::vector<double> x;
    double regret = 0.0;
    BoundValues bounds;

    bool operator==(const CheckpointRecord&) const = default;
};

struct TrialResult {
    std::vector<double> final_x;
    double regret = 0.0;
    RegretLedger ledger;
    std::vector<CheckpointRecord> checkpoints;
    BoundValues bound_values;            // at T; NaN for unbounded optimizers or T = 0
    std::vector<double> mean_gradient;   // average sampled gradient; NaN for T = 0

    bool operator==(const TrialResult&) const = default;
};

struct StepTrace {
    std::int64_t t;
    std::span<const double> x_before;
    std::span<const double> g;
    const OptimizerState& after;
    BoundPair bounds;  // NaN for unbounded optimizers
};

using StepObserver = std::function<void(const StepTrace&)>;

/// One trial, advanced a step at a time. Draws for step t come from
/// CounterRng(seed, trial_index) at counters (t - 1) * draws_per_step + j,
/// so two runners with the same seed and trial see the same losses.
/// The config must outlive the runner.
class TrialRunner {
public:
    TrialRunner(const ExperimentConfig& config, std::int64_t trial_index);

    void step();

    std::int64_t steps_done() const noexcept { return state_.t - 1; }
    const OptimizerState& state() const noexcept { return state_; }
    const RegretLedger& ledger() const noexcept { return ledger_; }
    std::span<const double> last_gradient() const noexcept { return g_; }
    std::span<const double> last_x() const noexcept { return x_before_; }
    BoundPair last_bounds() const noexcept { return last_bounds_; }
    const std::vector<double>& gradient_sum() const noexcept { return g_sum_; }

    /// Regret bounds for the steps taken so far.
    BoundValues bound_values() const;

private:
    const ExperimentConfig& cfg_;
    CounterRng rng_;
    FeasibleBox box_;
    std::vector<double> x_star_;
    OptimizerState state_;
    RegretLedger ledger_;
    std::optional<DriftTracker> drift_;
    std::vector<double> uniforms_;
    std::vector<double> g_;
    std::vector<double> g_sum_;
    std::vector<double> x_before_;
    std::vector<double> eta_inv_;
    BoundPair last_bounds_;
};

TrialResult run_trial(const ExperimentConfig& config, std::int64_t trial_index, const StepObserver& observer = {});

struct CheckpointSummary {
    std::int64_t t = 0;
    double mean_x = 0.0;  // first coordinate
    double ci95_x = 0.0;
    double mean_subopt = 0.0;
    double ci95_subopt = 0.0;
    double mean_regret = 0.0;
    double ci95_regret = 0.0;
    BoundValues mean_bounds;
    int trials = 0;
};

struct MonteCarloReport {
    std::vector<CheckpointSummary> rows;
    double mean_regret = 0.0;
    double ci95_regret = 0.0;
    std::vector<double> mean_gradient;
    std::vector<double> ci95_gradient;
    int trials = 0;
    std::vector<TrialResult> results;  // in trial-index order
};

/// Half-width of the normal-approximation 95% interval; NaN for n < 2.
double ci95_half_width(std::span<const double> samples);
double mean_of(std::span<const double> samples);

/// Called with the trial index after every step; must be thread-safe when
/// config.threads > 1.
using TrialObserver = std::function<void(std::int64_t trial, const StepTrace&)>;

/// Runs config.trials trials on config.threads workers and folds them in
/// trial-index order. Output does not depend on the thread count.
MonteCarloReport monte_carlo(const ExperimentConfig& config, const TrialObserver& observer = {});

/// Calls fn(i) for i in [0, n) on `threads` workers; rethrows the first error.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

/// Mean suboptimality >= min_subopt at every checkpoint, and mean x_t
/// non-decreasing between consecutive checkpoints up to twice the larger
/// of the two CI half-widths.
struct CounterexampleCertificate {
    bool subopt_ok = true;
    bool monotone_ok = true;
    double min_mean_subopt = 0.0;
    double worst_drop = 0.0;        // largest mean_x decrease between consecutive checkpoints
    std::int64_t worst_drop_t = 0;  // checkpoint where it ends

    bool ok() const noexcept { return subopt_ok && monotone_ok; }
};

CounterexampleCertificate check_counterexample(const MonteCarloReport& report, double min_subopt = 0.5);

/// Per trial and checkpoint: R_t <= thm3_rhs(t); with check_cor2 also
/// R_t <= cor2_rhs(t) and thm3_rhs(t) <= cor2_rhs(t).
struct RegretCertificate {
    std::int64_t checks = 0;
    std::int64_t thm3_violations = 0;
    std::int64_t cor2_violations = 0;
    std::int64_t dominance_violations = 0;
    double max_regret_over_thm3 = -std::numeric_limits<double>::infinity();

    bool ok() const noexcept { return checks > 0 && thm3_violations + cor2_violations + dominance_violations == 0; }
};

RegretCertificate check_regret_bounds(const MonteCarloReport& report, bool check_cor2);

class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CalibrationProbe {
    double C = 0.0;
    double drift = 0.0;       // (1 / T) E[x_{T+1} - x_1]
    double drift_se = 0.0;
    double late_drift = 0.0;  // same over the second half of the horizon
    double late_se = 0.0;
    bool accepted = false;

    double z() const noexcept { return drift / drift_se; }
    double late_z() const noexcept { return late_drift / late_se; }
};

struct CalibrationResult {
    double C = 0.0;
    std::vector<CalibrationProbe> probes;
};

/// Doubling search over C from max(2, 2 alpha) for the smallest C at which
/// Adam drifts away from x* = -1 on ReddiProblem(C, delta): the Monte Carlo
/// mean drift must be positive by at least 3 standard errors over the whole
/// probe horizon, and the drift over its second half must not be negative by
/// more than 3 standard errors. Throws CalibrationError when no C <= 2^16
/// qualifies.
CalibrationResult calibrate_C(const HyperParams& hp, double delta, std::int64_t probe_T, int trials, std::uint64_t seed,
                              int threads = 1);

struct EquivalenceRow {
    std::int64_t t = 0;
    double max_abs_diff = 0.0;  // max over s <= t of ||x_s^A - x_s^B||_inf
};

struct EquivalenceReport {
    double max_abs_diff = 0.0;
    bool streams_identical = true;  // every sampled gradient matched
    std::vector<EquivalenceRow> rows;
};

/// Runs both optimizers on trial 0 of `seed` over T steps and compares the
/// iterates x_1 .. x_{T+1}. Rows follow configA's checkpoints, or the
/// default ones when empty. Throws std::invalid_argument on differing problems.
EquivalenceReport equivalence_check(const ExperimentConfig& configA, const ExperimentConfig& configB, std::int64_t T,
                                    std::uint64_t seed);

struct ContradictionOptions {
    std::int64_t probe_T = 10000;
    int calibration_trials = 200;
    /// Refuse to simulate when K * trials exceeds this budget.
    double max_total_steps = 2.0e9;
    int threads = 1;
    /// Skip calibration and use this C.
    std::optional<double> C;
};

struct ContradictionReport {
    std::int64_t K = 0;
    double rhs_over_K = 0.0;
    double mc_avg_regret_per_step = 0.0;  // NaN when not executed
    double ci95 = 0.0;                    // NaN when not executed or trials < 2
    int trials = 0;
    double C = 0.0;
    std::string bound_family = "step";
    double required_steps = 0.0;          // K * trials
    bool executed = false;
    bool succeeded = false;
    std::string message;
};

/// Calibrates C, finds K, runs AdaBound with StepFamily(K) for K steps per
/// trial with beta1 = 0 and reports wrongregret_rhs(K) / K against the Monte
/// Carlo average per-step regret. Succeeds when the lower CI edge (the mean
/// when trials = 1) exceeds rhs / K.
ContradictionReport contradiction_demo(std::int64_t d, double alpha, double beta2, double delta, int trials,
                                       std::uint64_t seed, const ContradictionOptions& options = {});

// CSV writers. UTF-8, LF line endings, header row, shortest round-trip
// decimal formatting. Throw std::runtime_error naming the path on I/O failure.

void write_counterexample_csv(const MonteCarloReport& report, const std::filesystem::path& path);
void write_regret_csv(const MonteCarloReport& report, const std::filesystem::path& path);
void write_equivalence_csv(const EquivalenceReport& report, const std::filesystem::path& path);
void write_contradiction_csv(const ContradictionReport& report, const std::filesystem::path& path);

/// Shortest decimal that round-trips; "nan", "inf", "-inf" for non-finite.
std::string format_number(double value);

}  // namespace boundlab

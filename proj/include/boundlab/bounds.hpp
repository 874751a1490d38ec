#pragma once

#include <cstdint>
#include <variant>

namespace boundlab {

/// eta_l(t) = gamma t / (gamma t + 1), eta_u(t) = (gamma t + 1) / (gamma t).
/// Both converge to 1.
struct GammaFamily {
    double gamma = 1.0;
    bool operator==(const GammaFamily&) const = default;
};

/// Bounds that are inactive on the counterexample stream for t <= K and
/// collapse to alpha / C afterwards.
struct StepFamily {
    std::int64_t K = 1;
    double alpha = 0.1;
    double beta2 = 0.99;
    double C = 2.0;
    bool operator==(const StepFamily&) const = default;
};

/// eta_l(t) = eta_u(t) = alpha_star: AdaBound reduces to SGD with momentum.
struct ConstantFamily {
    double alpha_star = 0.1;
    bool operator==(const ConstantFamily&) const = default;
};

struct BoundPair {
    double lower;
    double upper;
};

class BoundFunctionSpec {
public:
    using Variant = std::variant<GammaFamily, StepFamily, ConstantFamily>;

    // Throws std::invalid_argument on out-of-domain parameters.
    BoundFunctionSpec(GammaFamily family);
    BoundFunctionSpec(StepFamily family);
    BoundFunctionSpec(ConstantFamily family);

    const Variant& family() const noexcept { return family_; }

    bool is_gamma() const noexcept { return std::holds_alternative<GammaFamily>(family_); }
    bool is_step() const noexcept { return std::holds_alternative<StepFamily>(family_); }
    bool is_constant() const noexcept { return std::holds_alternative<ConstantFamily>(family_); }

    /// L_inf = eta_l(1).
    double lower_at_one() const;
    /// R_inf = eta_u(1).
    double upper_at_one() const;

    bool operator==(const BoundFunctionSpec&) const = default;

private:
    Variant family_;
};

/// (eta_l(t), eta_u(t)) for t >= 1.
BoundPair eval_bounds(const BoundFunctionSpec& spec, std::int64_t t);

/// Running maximum of t / eta_l(t) - (t - 1) / eta_u(t - 1). The t = 1 term
/// has no second summand and equals 1 / eta_l(1).
class DriftTracker {
public:
    explicit DriftTracker(const BoundFunctionSpec& spec) : spec_(spec) {}

    /// Advances to the next t and returns the running maximum.
    double advance();

    std::int64_t t() const noexcept { return t_; }
    double value() const noexcept { return max_; }
    double last_term() const noexcept { return last_term_; }

private:
    BoundFunctionSpec spec_;
    std::int64_t t_ = 0;
    double prev_upper_ = 0.0;
    double max_ = 0.0;
    double last_term_ = 0.0;
};

/// max over t in [1, T] of t / eta_l(t) - (t - 1) / eta_u(t - 1), by scan.
double drift_M(const BoundFunctionSpec& spec, std::int64_t T);

/// Scan of the classical bound-function hypotheses over t in [1, T]:
/// 0 < eta_l(t) <= eta_u(t), eta_l non-decreasing, eta_u non-increasing.
/// final_gap = eta_u(T) - eta_l(T) indicates whether the limits agree.
struct BoundHypotheses {
    bool positive_lower = true;
    bool ordered = true;
    bool lower_nondecreasing = true;
    bool upper_nonincreasing = true;
    double final_gap = 0.0;
    std::int64_t scanned = 0;

    bool ok() const noexcept { return positive_lower && ordered && lower_nondecreasing && upper_nonincreasing; }
};

BoundHypotheses check_bound_hypotheses(const BoundFunctionSpec& spec, std::int64_t T);

/// 3 + 2 / gamma, an upper bound on drift_M for GammaFamily{gamma}.
double prop1_bound(double gamma);

/// Gamma for which GammaFamily bounds stay inactive on the counterexample
/// stream for every t <= K:
///   gamma = (1 / K) * min(alpha / (C - alpha), sqrt(1 - beta2) / alpha).
double claim1_gamma(std::int64_t K, double alpha, double C, double beta2);

}  // namespace boundlab

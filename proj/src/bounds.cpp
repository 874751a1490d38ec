#include "boundlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace boundlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

BoundFunctionSpec::BoundFunctionSpec(GammaFamily family) : family_(family) {
    require(std::isfinite(family.gamma) && family.gamma > 0.0, "gamma family: gamma must be positive");
}

BoundFunctionSpec::BoundFunctionSpec(StepFamily family) : family_(family) {
    require(family.K >= 1, "step family: K must be >= 1");
    require(family.alpha > 0.0, "step family: alpha must be positive");
    require(family.beta2 >= 0.0 && family.beta2 < 1.0, "step family: beta2 must lie in [0, 1)");
    require(family.C > std::max(1.0, family.alpha), "step family: C must exceed max(1, alpha)");
}

BoundFunctionSpec::BoundFunctionSpec(ConstantFamily family) : family_(family) {
    require(std::isfinite(family.alpha_star) && family.alpha_star > 0.0,
            "constant family: alpha_star must be positive");
}

double BoundFunctionSpec::lower_at_one() const { return eval_bounds(*this, 1).lower; }

double BoundFunctionSpec::upper_at_one() const { return eval_bounds(*this, 1).upper; }

BoundPair eval_bounds(const BoundFunctionSpec& spec, std::int64_t t) {
    if (t < 1) throw std::invalid_argument("eval_bounds: t must be >= 1");
    const auto td = static_cast<double>(t);
    return std::visit(
        overloaded{
            // 1 - 1/(gt + 1) and 1 + 1/(gt), written without the cancellation.
            [td](const GammaFamily& f) {
                const double gt = f.gamma * td;
                return BoundPair{gt / (gt + 1.0), (gt + 1.0) / gt};
            },
            [t](const StepFamily& f) {
                const double floor_rate = f.alpha / f.C;
                const double upper = t <= f.K ? f.alpha / std::sqrt(1.0 - f.beta2) : floor_rate;
                return BoundPair{floor_rate, upper};
            },
            [](const ConstantFamily& f) { return BoundPair{f.alpha_star, f.alpha_star}; },
        },
        spec.family());
}

double DriftTracker::advance() {
    ++t_;
    const BoundPair b = eval_bounds(spec_, t_);
    const auto td = static_cast<double>(t_);
    last_term_ = td / b.lower;
    if (t_ > 1) last_term_ -= (td - 1.0) / prev_upper_;
    max_ = t_ == 1 ? last_term_ : std::max(max_, last_term_);
    prev_upper_ = b.upper;
    return max_;
}

double drift_M(const BoundFunctionSpec& spec, std::int64_t T) {
    if (T < 1) throw std::invalid_argument("drift_M: T must be >= 1");
    DriftTracker tracker(spec);
    while (tracker.t() < T) tracker.advance();
    return tracker.value();
}

BoundHypotheses check_bound_hypotheses(const BoundFunctionSpec& spec, std::int64_t T) {
    if (T < 1) throw std::invalid_argument("check_bound_hypotheses: T must be >= 1");
    BoundHypotheses h;
    BoundPair prev{};
    for (std::int64_t t = 1; t <= T; ++t) {
        const BoundPair b = eval_bounds(spec, t);
        if (!(b.lower > 0.0)) h.positive_lower = false;
        if (!(b.lower <= b.upper)) h.ordered = false;
        if (t > 1) {
            if (b.lower < prev.lower) h.lower_nondecreasing = false;
            if (b.upper > prev.upper) h.upper_nonincreasing = false;
        }
        prev = b;
    }
    h.final_gap = prev.upper - prev.lower;
    h.scanned = T;
    return h;
}

double prop1_bound(double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prop1_bound: gamma must be positive");
    return 3.0 + 2.0 / gamma;
}

double claim1_gamma(std::int64_t K, double alpha, double C, double beta2) {
    require(K >= 1, "claim1_gamma: K must be >= 1");
    require(alpha > 0.0, "claim1_gamma: alpha must be positive");
    require(beta2 >= 0.0 && beta2 < 1.0, "claim1_gamma: beta2 must lie in [0, 1)");
    require(C > alpha, "claim1_gamma: C must exceed alpha");
    const double lower_side = alpha / (C - alpha);
    const double upper_side = std::sqrt(1.0 - beta2) / alpha;
    return std::min(lower_side, upper_side) / static_cast<double>(K);
}

}  // namespace boundlab

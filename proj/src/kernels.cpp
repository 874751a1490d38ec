#include "boundlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace boundlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_step_inputs(const OptimizerState& state, std::span<const double> g, const FeasibleBox& box) {
    if (state.t < 1) throw std::invalid_argument("optimizer step: state.t must be >= 1");
    const std::size_t d = state.x.size();
    if (g.size() != d || box.dim() != d || state.m.size() != d || state.v.size() != d ||
        state.v_hat.size() != d || state.eta_hat.size() != d || state.eta.size() != d) {
        throw std::invalid_argument("optimizer step: dimension mismatch");
    }
}

// Algorithm lines: m_t, v_t.
void update_moments(OptimizerState& s, std::span<const double> g, const HyperParams& hp) {
    const double b1 = hp.beta1_at(s.t);
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        s.m[i] = b1 * s.m[i] + (1.0 - b1) * g[i];
        s.v[i] = hp.beta2 * s.v[i] + (1.0 - hp.beta2) * g[i] * g[i];
    }
}

// alpha / (sqrt(second) + eps); +inf when the denominator vanishes.
double raw_rate(double alpha, double second, double eps) {
    const double denom = std::sqrt(second) + eps;
    return denom == 0.0 ? kInf : alpha / denom;
}

double clip_one(double raw, double lower, double upper) { return std::max(std::min(raw, upper), lower); }

// eta_t = eta_hat_t / sqrt(t); x_{t+1} = Pi_box(x_t - eta_t * m_t); t += 1.
void descend(OptimizerState& s, const FeasibleBox& box) {
    const double sqrt_t = std::sqrt(static_cast<double>(s.t));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        s.eta[i] = s.eta_hat[i] / sqrt_t;
        s.x[i] = std::clamp(s.x[i] - s.eta[i] * s.m[i], box.lo()[i], box.hi()[i]);
    }
    ++s.t;
}

void unclipped_rates(OptimizerState& s, const std::vector<double>& second, const HyperParams& hp) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (second[i] == 0.0 && hp.epsilon == 0.0) {
            throw std::domain_error("adam step: v_t has a zero coordinate and epsilon = 0 (index " +
                                    std::to_string(i) + ", t = " + std::to_string(s.t) + ")");
        }
        s.eta_hat[i] = raw_rate(hp.alpha, second[i], hp.epsilon);
    }
}

void clipped_rates(OptimizerState& s, const std::vector<double>& second, const HyperParams& hp,
                   const BoundFunctionSpec& bounds) {
    const BoundPair b = eval_bounds(bounds, s.t);
    if (!(b.lower <= b.upper)) {
        throw std::invalid_argument("adabound step: malformed bounds at t = " + std::to_string(s.t));
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        s.eta_hat[i] = clip_one(raw_rate(hp.alpha, second[i], hp.epsilon), b.lower, b.upper);
    }
}

void update_max_accumulator(OptimizerState& s) {
    for (std::size_t i = 0; i < s.x.size(); ++i) s.v_hat[i] = std::max(s.v_hat[i], s.v[i]);
}

}  // namespace

double HyperParams::beta1_at(std::int64_t t) const noexcept {
    return beta1_schedule == Beta1Schedule::OverT ? beta1 / static_cast<double>(t) : beta1;
}

void HyperParams::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("beta2 must lie in [0, 1)");
    if (!(kappa >= 0.0 && kappa < 1.0)) throw std::invalid_argument("kappa must lie in [0, 1)");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be nonnegative");
}

void HyperParams::validate_adaptive() const {
    validate();
    if (!(beta1 < std::sqrt(beta2))) throw std::invalid_argument("beta1 / sqrt(beta2) must be < 1");
}

FeasibleBox::FeasibleBox(std::vector<double> lo, std::vector<double> hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (lo_.size() != hi_.size()) throw std::invalid_argument("box: lo and hi differ in dimension");
    for (std::size_t i = 0; i < lo_.size(); ++i) {
        if (!(lo_[i] <= hi_[i]) || !std::isfinite(hi_[i] - lo_[i])) {
            throw std::invalid_argument("box: need finite lo_i <= hi_i at index " + std::to_string(i));
        }
    }
}

FeasibleBox FeasibleBox::cube(std::size_t d, double lo, double hi) {
    return FeasibleBox(std::vector<double>(d, lo), std::vector<double>(d, hi));
}

double FeasibleBox::diameter() const noexcept {
    double d = 0.0;
    for (std::size_t i = 0; i < lo_.size(); ++i) d = std::max(d, hi_[i] - lo_[i]);
    return d;
}

bool FeasibleBox::contains(std::span<const double> x) const noexcept {
    if (x.size() != lo_.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] >= lo_[i] && x[i] <= hi_[i])) return false;
    }
    return true;
}

OptimizerState OptimizerState::initial(std::vector<double> x1) {
    OptimizerState s;
    const std::size_t d = x1.size();
    s.x = std::move(x1);
    s.m.assign(d, 0.0);
    s.v.assign(d, 0.0);
    s.v_hat.assign(d, 0.0);
    s.eta_hat.assign(d, 0.0);
    s.eta.assign(d, 0.0);
    s.t = 1;
    return s;
}

std::vector<double> clip_elementwise(std::span<const double> raw, double lower, double upper) {
    if (!(lower <= upper)) throw std::invalid_argument("clip_elementwise: lower > upper");
    std::vector<double> out(raw.size());
    std::transform(raw.begin(), raw.end(), out.begin(), [&](double r) { return clip_one(r, lower, upper); });
    return out;
}

std::vector<double> project_box_weighted(std::span<const double> x, const FeasibleBox& box,
                                         std::span<const double> weights) {
    if (x.size() != box.dim() || weights.size() != box.dim()) {
        throw std::invalid_argument("project_box_weighted: dimension mismatch");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(weights[i] > 0.0)) throw std::invalid_argument("project_box_weighted: weights must be positive");
        out[i] = std::clamp(x[i], box.lo()[i], box.hi()[i]);
    }
    return out;
}

void sgdm_update(OptimizerState& s, std::span<const double> g, double lr_t, const HyperParams& hp,
                 const FeasibleBox& box) {
    check_step_inputs(s, g, box);
    if (!(lr_t > 0.0)) throw std::invalid_argument("sgdm step: lr_t must be positive");
    const double b1 = hp.beta1_at(s.t);
    double rate = lr_t;
    if (hp.bias_correction) rate = lr_t / (1.0 - std::pow(hp.beta1, static_cast<double>(s.t)));
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        s.m[i] = b1 * s.m[i] + (1.0 - hp.kappa) * g[i];
        s.eta_hat[i] = rate;
        s.eta[i] = rate;
        s.x[i] = std::clamp(s.x[i] - rate * s.m[i], box.lo()[i], box.hi()[i]);
    }
    ++s.t;
}

void adam_update(OptimizerState& s, std::span<const double> g, const HyperParams& hp, const FeasibleBox& box) {
    check_step_inputs(s, g, box);
    hp.validate_adaptive();
    update_moments(s, g, hp);
    unclipped_rates(s, s.v, hp);
    descend(s, box);
}

void amsgrad_update(OptimizerState& s, std::span<const double> g, const HyperParams& hp,
                    const FeasibleBox& box) {
    check_step_inputs(s, g, box);
    hp.validate_adaptive();
    update_moments(s, g, hp);
    update_max_accumulator(s);
    unclipped_rates(s, s.v_hat, hp);
    descend(s, box);
}

// The weighted projection Pi_{F, diag(1/eta)} is the plain clamp in descend():
// see project_box_weighted.
void adabound_update(OptimizerState& s, std::span<const double> g, const HyperParams& hp,
                     const BoundFunctionSpec& bounds, const FeasibleBox& box) {
    check_step_inputs(s, g, box);
    hp.validate_adaptive();
    update_moments(s, g, hp);
    clipped_rates(s, s.v, hp, bounds);
    descend(s, box);
}

void amsbound_update(OptimizerState& s, std::span<const double> g, const HyperParams& hp,
                     const BoundFunctionSpec& bounds, const FeasibleBox& box) {
    check_step_inputs(s, g, box);
    hp.validate_adaptive();
    update_moments(s, g, hp);
    update_max_accumulator(s);
    clipped_rates(s, s.v_hat, hp, bounds);
    descend(s, box);
}

OptimizerState sgdm_step(OptimizerState state, std::span<const double> g, double lr_t, const HyperParams& hp,
                         const FeasibleBox& box) {
    sgdm_update(state, g, lr_t, hp, box);
    return state;
}

OptimizerState adam_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                         const FeasibleBox& box) {
    adam_update(state, g, hp, box);
    return state;
}

OptimizerState amsgrad_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                            const FeasibleBox& box) {
    amsgrad_update(state, g, hp, box);
    return state;
}

OptimizerState adabound_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                             const BoundFunctionSpec& bounds, const FeasibleBox& box) {
    adabound_update(state, g, hp, bounds, box);
    return state;
}

OptimizerState amsbound_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                             const BoundFunctionSpec& bounds, const FeasibleBox& box) {
    amsbound_update(state, g, hp, bounds, box);
    return state;
}

}  // namespace boundlab

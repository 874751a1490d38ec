#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "boundlab/bounds.hpp"

namespace boundlab {

enum class Beta1Schedule { Constant, OverT };

struct HyperParams {
    double alpha = 0.001;
    double beta1 = 0.9;
    Beta1Schedule beta1_schedule = Beta1Schedule::Constant;
    double beta2 = 0.999;
    double kappa = 0.0;
    bool bias_correction = false;
    double epsilon = 0.0;

    /// beta_{1t}: beta1, or beta1 / t under the OverT schedule.
    double beta1_at(std::int64_t t) const noexcept;

    /// Range checks shared by every kernel. Throws std::invalid_argument.
    void validate() const;
    /// validate() plus beta1 / sqrt(beta2) < 1.
    void validate_adaptive() const;

    bool operator==(const HyperParams&) const = default;
};

class FeasibleBox {
public:
    FeasibleBox(std::vector<double> lo, std::vector<double> hi);

    /// [lo, hi]^d.
    static FeasibleBox cube(std::size_t d, double lo, double hi);

    std::size_t dim() const noexcept { return lo_.size(); }
    const std::vector<double>& lo() const noexcept { return lo_; }
    const std::vector<double>& hi() const noexcept { return hi_; }

    /// D_inf = max_i (hi_i - lo_i).
    double diameter() const noexcept;
    bool contains(std::span<const double> x) const noexcept;

    bool operator==(const FeasibleBox&) const = default;

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

/// Per-run optimizer record. `t` is the index of the next step to execute,
/// so a fresh state has t = 1 and x = x_1.
///
/// `eta_hat` and `eta` hold the per-coordinate rates used by the most recent
/// step (eta_hat before the 1/sqrt(t) decay, eta after it). For SGDM both
/// carry the effective learning rate.
struct OptimizerState {
    std::vector<double> x;
    std::vector<double> m;
    std::vector<double> v;
    std::vector<double> v_hat;
    std::vector<double> eta_hat;
    std::vector<double> eta;
    std::int64_t t = 1;

    static OptimizerState initial(std::vector<double> x1);

    std::size_t dim() const noexcept { return x.size(); }

    bool operator==(const OptimizerState&) const = default;
};

/// max(min(raw, upper), lower) element-wise. +inf maps to upper.
std::vector<double> clip_elementwise(std::span<const double> raw, double lower, double upper);

/// Minimizer of sum_i w_i (y_i - x_i)^2 over the box. The metric is diagonal
/// and the box separable, so this is a per-coordinate clamp for any positive
/// weights; the weights are only validated.
std::vector<double> project_box_weighted(std::span<const double> x, const FeasibleBox& box,
                                         std::span<const double> weights);

// Value-returning kernels. Each takes the state by value so callers can
// `state = adam_step(std::move(state), ...)` without reallocating.

OptimizerState sgdm_step(OptimizerState state, std::span<const double> g, double lr_t,
                         const HyperParams& hp, const FeasibleBox& box);
OptimizerState adam_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                         const FeasibleBox& box);
OptimizerState amsgrad_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                            const FeasibleBox& box);
OptimizerState adabound_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                             const BoundFunctionSpec& bounds, const FeasibleBox& box);
OptimizerState amsbound_step(OptimizerState state, std::span<const double> g, const HyperParams& hp,
                             const BoundFunctionSpec& bounds, const FeasibleBox& box);

// In-place forms used by the harness hot loops; identical arithmetic.

void sgdm_update(OptimizerState& state, std::span<const double> g, double lr_t, const HyperParams& hp,
                 const FeasibleBox& box);
void adam_update(OptimizerState& state, std::span<const double> g, const HyperParams& hp,
                 const FeasibleBox& box);
void amsgrad_update(OptimizerState& state, std::span<const double> g, const HyperParams& hp,
                    const FeasibleBox& box);
void adabound_update(OptimizerState& state, std::span<const double> g, const HyperParams& hp,
                     const BoundFunctionSpec& bounds, const FeasibleBox& box);
void amsbound_update(OptimizerState& state, std::span<const double> g, const HyperParams& hp,
                     const BoundFunctionSpec& bounds, const FeasibleBox& box);

}  // namespace boundlab

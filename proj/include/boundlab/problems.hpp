#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "boundlab/kernels.hpp"

namespace boundlab {

/// One-dimensional stochastic problem on [-1, 1]: f_t(x) = C x with
/// probability p = (1 + delta) / (C + 1), otherwise f_t(x) = -x. The
/// expected loss is delta * x, minimized at x* = -1.
class ReddiProblem {
public:
    explicit ReddiProblem(double C, double delta = 1.0);

    double C() const noexcept { return C_; }
    double delta() const noexcept { return delta_; }
    double p() const noexcept { return (1.0 + delta_) / (C_ + 1.0); }
    FeasibleBox box() const { return FeasibleBox::cube(1, -1.0, 1.0); }
    double x_star() const noexcept { return -1.0; }

    bool operator==(const ReddiProblem&) const = default;

private:
    double C_;
    double delta_;
};

/// f_t(x) = slope * x; the gradient is `slope` everywhere.
struct LossSample {
    double slope;
};

/// Consumes exactly one uniform u in [0, 1): slope C if u < p, else -1.
LossSample sample_loss(const ReddiProblem& problem, double u);

/// E[f(x)] - f(x*) = delta (x + 1).
double expected_suboptimality(const ReddiProblem& problem, double x);

/// Synthetic benchmark, not part of the counterexample: i.i.d. linear losses
/// f_t(x) = <g_t, x> on [-1, 1]^d with g_{t,i} = mean_i + noise (2 u_i - 1).
/// The minimizer of the expected loss is the corner x*_i = -sign(mean_i)
/// (-1 where mean_i = 0).
class LinearLossProblem {
public:
    LinearLossProblem(std::vector<double> mean, double noise);

    const std::vector<double>& mean() const noexcept { return mean_; }
    double noise() const noexcept { return noise_; }

    bool operator==(const LinearLossProblem&) const = default;

private:
    std::vector<double> mean_;
    double noise_;
};

/// Either problem behind one interface: linear losses with a sampled
/// gradient, a box, a comparator x* and an l2 gradient bound G2.
class ProblemSpec {
public:
    using Variant = std::variant<ReddiProblem, LinearLossProblem>;

    ProblemSpec(ReddiProblem p) : problem_(std::move(p)) {}
    ProblemSpec(LinearLossProblem p) : problem_(std::move(p)) {}

    const Variant& problem() const noexcept { return problem_; }
    const ReddiProblem* reddi() const noexcept { return std::get_if<ReddiProblem>(&problem_); }

    std::size_t dim() const noexcept;
    /// Uniform draws consumed per step (the fixed draw discipline).
    std::size_t draws_per_step() const noexcept { return dim(); }
    FeasibleBox box() const;
    std::vector<double> x_star() const;
    /// Bound on ||grad f_t(x)||_2 over all samples.
    double G2() const noexcept;
    /// delta for the counterexample, ||mean||_1 for the linear problem;
    /// equals E[f(x1)] - f(x*) at x1 = 0.
    double scale() const noexcept;

    /// Writes the gradient of f_t given draws_per_step() uniforms.
    void sample_gradient(std::span<const double> uniforms, std::span<double> g) const;
    /// E[f(x)] - f(x*).
    double expected_suboptimality(std::span<const double> x) const;

    bool operator==(const ProblemSpec&) const = default;

private:
    Variant problem_;
};

/// Running regret and the eta^{-1} statistics the regret bounds consume.
struct RegretLedger {
    std::int64_t T = 0;
    double regret = 0.0;
    /// sum_t beta_{1t} eta_{t,i}^{-1}, t from 1.
    std::vector<double> sum_beta1t_eta_inv;
    /// eta_{1,i}^{-1}.
    std::vector<double> eta1_inv;
    /// eta_hat_{T,i}^{-1} = eta_{T,i}^{-1} / sqrt(T).
    std::vector<double> eta_hat_inv_final;

    static RegretLedger empty(std::size_t d);

    /// In-place form of ledger_update for a linear loss with gradient g.
    void record(std::span<const double> g, std::span<const double> x_t, std::span<const double> x_star,
                std::span<const double> eta_t_inv, double beta1t);

    double sum_eta1_inv() const noexcept;
    double total_beta1t_eta_inv() const noexcept;
    double sum_eta_hat_inv_final() const noexcept;

    bool operator==(const RegretLedger&) const = default;
};

/// regret += f_t(x_t) - f_t(x*); statistics updated; T += 1.
RegretLedger ledger_update(RegretLedger ledger, const LossSample& sample, std::span<const double> x_t,
                           std::span<const double> x_star, std::span<const double> eta_t_inv, double beta1t);

}  // namespace boundlab

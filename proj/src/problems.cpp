#include "boundlab/problems.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace boundlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double corner_for(double mean) { return mean > 0.0 ? -1.0 : (mean < 0.0 ? 1.0 : -1.0); }

}  // namespace

ReddiProblem::ReddiProblem(double C, double delta) : C_(C), delta_(delta) {
    if (!(C > 1.0) || !std::isfinite(C)) throw std::invalid_argument("reddi problem: C must exceed 1");
    if (!(delta > 0.0)) throw std::invalid_argument("reddi problem: delta must be positive");
    if (!(C >= delta)) throw std::invalid_argument("reddi problem: p <= 1 requires C >= delta");
}

LossSample sample_loss(const ReddiProblem& problem, double u) {
    return LossSample{u < problem.p() ? problem.C() : -1.0};
}

double expected_suboptimality(const ReddiProblem& problem, double x) { return problem.delta() * (x + 1.0); }

LinearLossProblem::LinearLossProblem(std::vector<double> mean, double noise)
    : mean_(std::move(mean)), noise_(noise) {
    if (mean_.empty()) throw std::invalid_argument("linear problem: dimension must be >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw std::invalid_argument("linear problem: noise must be >= 0");
}

std::size_t ProblemSpec::dim() const noexcept {
    return std::visit(overloaded{[](const ReddiProblem&) { return std::size_t{1}; },
                                 [](const LinearLossProblem& p) { return p.mean().size(); }},
                      problem_);
}

FeasibleBox ProblemSpec::box() const { return FeasibleBox::cube(dim(), -1.0, 1.0); }

std::vector<double> ProblemSpec::x_star() const {
    return std::visit(overloaded{[](const ReddiProblem& p) { return std::vector<double>{p.x_star()}; },
                                 [](const LinearLossProblem& p) {
                                     std::vector<double> xs;
                                     for (double mu : p.mean()) xs.push_back(corner_for(mu));
                                     return xs;
                                 }},
                      problem_);
}

double ProblemSpec::G2() const noexcept {
    return std::visit(overloaded{[](const ReddiProblem& p) { return p.C(); },
                                 [](const LinearLossProblem& p) {
                                     double sq = 0.0;
                                     for (double mu : p.mean()) {
                                         const double b = std::abs(mu) + p.noise();
                                         sq += b * b;
                                     }
                                     return std::sqrt(sq);
                                 }},
                      problem_);
}

double ProblemSpec::scale() const noexcept {
    return std::visit(overloaded{[](const ReddiProblem& p) { return p.delta(); },
                                 [](const LinearLossProblem& p) {
                                     double s = 0.0;
                                     for (double mu : p.mean()) s += std::abs(mu);
                                     return s;
                                 }},
                      problem_);
}

void ProblemSpec::sample_gradient(std::span<const double> uniforms, std::span<double> g) const {
    std::visit(overloaded{[&](const ReddiProblem& p) { g[0] = sample_loss(p, uniforms[0]).slope; },
                          [&](const LinearLossProblem& p) {
                              for (std::size_t i = 0; i < g.size(); ++i) {
                                  g[i] = p.mean()[i] + p.noise() * (2.0 * uniforms[i] - 1.0);
                              }
                          }},
               problem_);
}

double ProblemSpec::expected_suboptimality(std::span<const double> x) const {
    return std::visit(overloaded{[&](const ReddiProblem& p) { return boundlab::expected_suboptimality(p, x[0]); },
                                 [&](const LinearLossProblem& p) {
                                     double s = 0.0;
                                     for (std::size_t i = 0; i < x.size(); ++i) {
                                         s += p.mean()[i] * (x[i] - corner_for(p.mean()[i]));
                                     }
                                     return s;
                                 }},
                      problem_);
}

RegretLedger RegretLedger::empty(std::size_t d) {
    RegretLedger l;
    l.sum_beta1t_eta_inv.assign(d, 0.0);
    l.eta1_inv.assign(d, 0.0);
    l.eta_hat_inv_final.assign(d, 0.0);
    return l;
}

void RegretLedger::record(std::span<const double> g, std::span<const double> x_t, std::span<const double> x_star,
                          std::span<const double> eta_t_inv, double beta1t) {
    const std::size_t d = sum_beta1t_eta_inv.size();
    if (g.size() != d || x_t.size() != d || x_star.size() != d || eta_t_inv.size() != d) {
        throw std::invalid_argument("ledger update: dimension mismatch");
    }
    ++T;
    const double root_t = std::sqrt(static_cast<double>(T));
    for (std::size_t i = 0; i < d; ++i) {
        regret += g[i] * (x_t[i] - x_star[i]);
        sum_beta1t_eta_inv[i] += beta1t * eta_t_inv[i];
        if (T == 1) eta1_inv[i] = eta_t_inv[i];
        eta_hat_inv_final[i] = eta_t_inv[i] / root_t;
    }
}

double RegretLedger::sum_eta1_inv() const noexcept { return std::accumulate(eta1_inv.begin(), eta1_inv.end(), 0.0); }

double RegretLedger::total_beta1t_eta_inv() const noexcept {
    return std::accumulate(sum_beta1t_eta_inv.begin(), sum_beta1t_eta_inv.end(), 0.0);
}

double RegretLedger::sum_eta_hat_inv_final() const noexcept {
    return std::accumulate(eta_hat_inv_final.begin(), eta_hat_inv_final.end(), 0.0);
}

RegretLedger ledger_update(RegretLedger ledger, const LossSample& sample, std::span<const double> x_t,
                           std::span<const double> x_star, std::span<const double> eta_t_inv, double beta1t) {
    const double g[1] = {sample.slope};
    ledger.record(g, x_t, x_star, eta_t_inv, beta1t);
    return ledger;
}

}  // namespace boundlab

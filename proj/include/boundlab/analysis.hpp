#pragma once

#include <cstdint>

#include "boundlab/problems.hpp"

namespace boundlab {

/// Inputs to the regret bounds. The eta^{-1} statistics are sums over
/// coordinates of the run-realized values (see RegretLedger).
struct BoundInputs {
    std::int64_t T = 1;
    std::int64_t d = 1;
    double D_inf = 2.0;
    double G2 = 1.0;
    double R_inf = 1.0;
    double beta1 = 0.0;
    double M = 0.0;
    /// sum_i eta_hat_{T,i}^{-1}
    double sum_eta_hat_inv_final = 0.0;
    /// sum_i eta_{1,i}^{-1}
    double sum_eta1_inv = 0.0;
    /// sum_t sum_i beta_{1t} eta_{t,i}^{-1}
    double sum_beta1t_eta_inv = 0.0;

    static BoundInputs from_ledger(const RegretLedger& ledger, double D_inf, double G2, double R_inf, double beta1,
                                   double M);
};

/// The original AdaBound regret bound, which the counterexample refutes:
///   D^2 sqrt(T) / (2(1-b1)) sum_i eta_hat_{T,i}^{-1}
///   + D^2 / (2(1-b1)) sum_t sum_i b1t eta_{t,i}^{-1}
///   + (2 sqrt(T) - 1) R_inf G2^2 / (1-b1).
double thm1_rhs(const BoundInputs& in);

/// thm1_rhs specialized to the step-family counterexample with beta1 = 0,
/// D_inf = 2, G2 = C, R_inf = alpha / sqrt(1 - beta2), eta_hat^{-1} <= C / alpha:
///   2 d C sqrt(K) / alpha + (2 sqrt(K) - 1) alpha C^2 / sqrt(1 - beta2).
double wrongregret_rhs(std::int64_t K, std::int64_t d, double C, double alpha, double beta2);

/// Smallest K with wrongregret_rhs(K) < K / 100. Throws std::overflow_error
/// when K does not fit in int64.
std::int64_t find_contradiction_K(std::int64_t d, double C, double alpha, double beta2);

/// Corrected bound under the drift assumption t/eta_l(t) - (t-1)/eta_u(t-1) <= M:
///   D^2 / (2(1-b1)) [2 d M (sqrt(T) - 1) + sum_i (eta_{1,i}^{-1} + sum_t b1t eta_{t,i}^{-1})]
///   + (2 sqrt(T) - 1) R_inf G2^2 / (1-b1).
double thm3_rhs(const BoundInputs& in);

/// Closed form for GammaFamily bounds and beta_{1t} = beta1 / t:
///   5 sqrt(T) (1 + 1/gamma) (d D^2 + G2^2) / (1 - beta1).
double cor2_rhs(std::int64_t T, double beta1, double gamma, std::int64_t d, double D_inf, double G2);

}  // namespace boundlab

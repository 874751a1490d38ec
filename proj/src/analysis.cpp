#include "boundlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace boundlab {

namespace {

void check_beta1(double beta1) {
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw std::invalid_argument("regret bound: beta1 must lie in [0, 1)");
}

double last_term(const BoundInputs& in) {
    const double root_t = std::sqrt(static_cast<double>(in.T));
    return (2.0 * root_t - 1.0) * in.R_inf * in.G2 * in.G2 / (1.0 - in.beta1);
}

}  // namespace

BoundInputs BoundInputs::from_ledger(const RegretLedger& ledger, double D_inf, double G2, double R_inf, double beta1,
                                     double M) {
    BoundInputs in;
    in.T = ledger.T;
    in.d = static_cast<std::int64_t>(ledger.eta1_inv.size());
    in.D_inf = D_inf;
    in.G2 = G2;
    in.R_inf = R_inf;
    in.beta1 = beta1;
    in.M = M;
    in.sum_eta_hat_inv_final = ledger.sum_eta_hat_inv_final();
    in.sum_eta1_inv = ledger.sum_eta1_inv();
    in.sum_beta1t_eta_inv = ledger.total_beta1t_eta_inv();
    return in;
}

double thm1_rhs(const BoundInputs& in) {
    check_beta1(in.beta1);
    const double root_t = std::sqrt(static_cast<double>(in.T));
    const double coeff = in.D_inf * in.D_inf / (2.0 * (1.0 - in.beta1));
    return coeff * root_t * in.sum_eta_hat_inv_final + coeff * in.sum_beta1t_eta_inv + last_term(in);
}

double thm3_rhs(const BoundInputs& in) {
    check_beta1(in.beta1);
    const double root_t = std::sqrt(static_cast<double>(in.T));
    const double coeff = in.D_inf * in.D_inf / (2.0 * (1.0 - in.beta1));
    const double drift_part = 2.0 * static_cast<double>(in.d) * in.M * (root_t - 1.0);
    return coeff * (drift_part + in.sum_eta1_inv + in.sum_beta1t_eta_inv) + last_term(in);
}

double wrongregret_rhs(std::int64_t K, std::int64_t d, double C, double alpha, double beta2) {
    if (!(alpha > 0.0)) throw std::invalid_argument("wrongregret_rhs: alpha must be positive");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw std::invalid_argument("wrongregret_rhs: beta2 must lie in [0, 1)");
    const double root_k = std::sqrt(static_cast<double>(K));
    return 2.0 * static_cast<double>(d) * C * root_k / alpha +
           (2.0 * root_k - 1.0) * alpha * C * C / std::sqrt(1.0 - beta2);
}

// wrongregret_rhs is A s - B in s = sqrt(K), so the condition is
// s^2 / 100 - A s + B > 0. Start just past the larger root and walk to the
// exact integer boundary.
std::int64_t find_contradiction_K(std::int64_t d, double C, double alpha, double beta2) {
    if (d < 1) throw std::invalid_argument("find_contradiction_K: d must be >= 1");
    const double B = alpha * C * C / std::sqrt(1.0 - beta2);
    const double A = 2.0 * static_cast<double>(d) * C / alpha + 2.0 * B;
    const double disc = std::max(0.0, A * A - 4.0 * B / 100.0);
    const double s_root = 50.0 * (A + std::sqrt(disc));
    const double k_est = std::floor(s_root * s_root);
    if (!(k_est < 9.0e18)) throw std::overflow_error("find_contradiction_K: K exceeds int64 range");

    auto holds = [&](std::int64_t K) { return wrongregret_rhs(K, d, C, alpha, beta2) < static_cast<double>(K) / 100.0; };
    auto K = std::max<std::int64_t>(1, static_cast<std::int64_t>(k_est));
    while (!holds(K)) ++K;
    while (K > 1 && holds(K - 1)) --K;
    return K;
}

double cor2_rhs(std::int64_t T, double beta1, double gamma, std::int64_t d, double D_inf, double G2) {
    check_beta1(beta1);
    if (!(gamma > 0.0)) throw std::invalid_argument("cor2_rhs: gamma must be positive");
    const double root_t = std::sqrt(static_cast<double>(T));
    return 5.0 * root_t * (1.0 + 1.0 / gamma) * (static_cast<double>(d) * D_inf * D_inf + G2 * G2) / (1.0 - beta1);
}

}  // namespace boundlab

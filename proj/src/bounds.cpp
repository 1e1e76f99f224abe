#include "cclt/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "cclt/normal.hpp"

namespace cclt {

SteinConstants::SteinConstants() {
    c2 = 4.0 / std::sqrt(2.0 * kPi * std::exp(1.0));
    c3 = (2.0 + 8.0 * std::exp(-1.5)) / std::sqrt(2.0 * kPi);
    abs_z_mean = std::sqrt(2.0 / kPi);
    pi_over_8_quarter = std::pow(kPi / 8.0, 0.25);
}

const SteinConstants& stein_constants() {
    static const SteinConstants c;
    return c;
}

BoundReport bound_t11(double r1_mean, double r2_mean, double dw3_mean, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("bound_t11: lambda must be positive");
    if (r1_mean < 0.0 || r2_mean < 0.0 || dw3_mean < 0.0)
        throw std::invalid_argument("bound_t11: inputs must be nonnegative");
    BoundReport rep;
    rep.theorem = "T1.1";
    rep.add("R1_mean", r1_mean);
    rep.add("R2_term", std::sqrt(2.0 / kPi) * r2_mean);
    rep.add("dW3_term", dw3_mean / (3.0 * lambda));
    return rep;
}

BoundReport bound_t13(double r_mean, double gamma_hs, double op_norm, double max_moment,
                      double mixed_moment, double trace_sigma) {
    BoundReport rep;
    rep.theorem = "T1.3";
    rep.add("R_mean", r_mean);
    rep.add("Gamma_term", op_norm * gamma_hs);
    rep.add("mixed_term", std::pow(op_norm, 1.5) * stein_constants().pi_over_8_quarter *
                              std::pow(std::max(max_moment, trace_sigma), 0.25) *
                              std::sqrt(mixed_moment));
    return rep;
}

BoundReport bound_t21(const ResidualSummary& s, const PairConstants& c, bool averaged) {
    if (!(s.p_k > 0.0)) throw std::invalid_argument("bound_t21: p_k must be positive");
    const double psi = c.psi();
    BoundReport rep;
    rep.theorem = averaged ? "T2.1-avg" : "T2.1";
    // A_k, B_k are level-k conditional means; C, D, E are unconditional
    const double a_k = s.abs_r1_minus_at_k.mean;
    const double b_k = s.abs_r2_minus_at_k.mean;
    const double c_unc = s.uncond_r1_diff.mean;
    const double d_unc = s.uncond_r2_diff.mean;
    const double e_unc = s.uncond_dw3.mean;
    const double lin = averaged ? 1.0 / psi : 2.0 / psi;
    const double quad = averaged ? std::sqrt(1.0 / (2.0 * kPi * psi * psi))
                                 : std::sqrt(2.0 / (kPi * psi * psi));
    const double cub = averaged ? 1.0 / (3.0 * c.lambda * psi * s.p_k)
                                : 2.0 / (3.0 * c.lambda * psi * s.p_k);
    rep.add("A_k_term", lin * a_k);
    rep.add("C_term", lin * c_unc / s.p_k);
    rep.add("B_k_term", quad * b_k);
    rep.add("D_term", quad * d_unc / s.p_k);
    rep.add("E_term", cub * e_unc);
    return rep;
}

BoundReport bound_l22(const ResidualSummary& s, const PairConstants& c) {
    const double psi = c.psi();
    const double a_hat = s.abs_r1_minus_at_k.mean + s.r_k * s.abs_r1_plus_at_km1.mean;
    const double b_hat = s.abs_r2_minus_at_k.mean + s.r_k * s.abs_r2_plus_at_km1.mean;
    BoundReport rep;
    rep.theorem = "L2.2";
    rep.add("A_hat_term", 2.0 / (psi * (1.0 + s.r_k)) * a_hat);
    rep.add("B_hat_term", std::sqrt(2.0 / kPi) / (psi * (1.0 + s.r_k)) * b_hat);
    rep.add("E_hat_term", 2.0 / (3.0 * c.lambda * psi) * s.e_hat.mean);
    return rep;
}

BoundReport bound_t23(const ResidualSummary& s, const PairConstants& c) {
    const double psi = c.psi();
    const double a_hat = s.abs_r1_minus_at_k.mean + s.r_k * s.abs_r1_plus_at_km1.mean;
    const double b_hat = s.abs_r2_minus_at_k.mean + s.r_k * s.abs_r2_plus_at_km1.mean;
    const double c_hat = s.c_hat(stein_constants().abs_z_mean);
    const double one_r = 1.0 + s.r_k;
    BoundReport rep;
    rep.theorem = "T2.3";
    rep.add("A_hat_term", a_hat / psi);
    rep.add("B_hat_term", std::sqrt(1.0 / (2.0 * kPi * psi * psi)) * b_hat);
    rep.add("C_hat_term", one_r / (2.0 * c.q) * c_hat);
    rep.add("D_hat_term", one_r / (2.0 * c.q) * s.d_hat.mean);
    rep.add("E_hat_term", one_r * 2.0 / (3.0 * c.lambda * psi) * s.e_hat.mean);
    return rep;
}

namespace {

double op_norm_inv_sqrt(const Eigen::MatrixXd& sigma) {
    if (sigma.rows() != sigma.cols()) throw std::invalid_argument("bound_t31: sigma must be square");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
        throw std::invalid_argument("bound_t31: sigma must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    const double lmin = es.eigenvalues().minCoeff();
    if (!(lmin > 1e-10)) throw std::invalid_argument("bound_t31: sigma must be positive definite");
    return 1.0 / std::sqrt(lmin);
}

} // namespace

BoundReport bound_t31(const ResidualSummary& s, const Eigen::MatrixXd& sigma,
                      const PairConstants& c, MultiVariant variant) {
    const double op = op_norm_inv_sqrt(sigma);
    const double tr = sigma.trace();
    const double one_r = 1.0 + s.r_k;
    const double a_hat = s.abs_r1_minus_at_k.mean + s.r_k * s.abs_r1_plus_at_km1.mean;
    const double b_hat = s.abs_r2_minus_at_k.mean + s.r_k * s.abs_r2_plus_at_km1.mean;
    const double c_hat = s.c_hat_w_part.mean + std::sqrt(tr) * s.c_hat_r0_part.mean;
    const double f_hat = std::sqrt(tr + s.w_norm2.mean);
    BoundReport rep;
    rep.theorem = variant == MultiVariant::fourth_moment ? "T3.1-4mom" : "T3.1-3mom";
    rep.add("A_hat_term", a_hat / one_r);
    rep.add("B_hat_term", 0.5 / one_r * op * b_hat);
    rep.add("C_hat_term", one_r / (2.0 * c.q) * c_hat);
    rep.add("D_hat_term", one_r / (2.0 * c.q) * s.d_hat.mean);
    if (variant == MultiVariant::fourth_moment) {
        rep.add("E_hat_term", one_r * std::pow(op, 1.5) *
                                  std::sqrt(stein_constants().c3 * s.e_hat4.mean * f_hat));
    } else {
        const double e3 = s.e_hat3.mean;
        const double c2 = stein_constants().c2;
        double f_prime = 1.0;
        if (e3 > 0.0 && f_hat > 0.0)
            f_prime = 1.0 + std::abs(std::log(c2 * op * op * e3 / f_hat));
        rep.add("E_hat_term", c2 * one_r * op * op * e3 * f_prime);
    }
    return rep;
}

BoundReport bound_l51(const ResidualSummary& s, double trace_sigma, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("bound_l51: Q must be positive");
    // indicator expectations = conditional means times P(Y in {k-1,k})
    const double p_union = s.p_k + s.p_km1;
    BoundReport rep;
    rep.theorem = "L5.1";
    rep.add("dW_term", s.d_hat.mean * p_union / q);
    rep.add("R0_term",
            (s.c_hat_w_part.mean + std::sqrt(trace_sigma) * s.c_hat_r0_part.mean) * p_union / q);
    return rep;
}

BoundReport bound_t16_llt(double sigma, double r1_second_moment, double r2_mean,
                          double r2_abs_y_mean, double r2_indicator_sup, double sup_pmf,
                          double universal_c) {
    if (!(sigma > 0.0)) throw std::invalid_argument("bound_t16_llt: sigma must be positive");
    const double inv_sqrt_2e = 1.0 / std::sqrt(2.0 * std::exp(1.0));
    BoundReport rep;
    rep.theorem = "T1.6";
    rep.note = "universal-constant envelope: C is not pinned by theory; supplied value used";
    rep.add("C_term", universal_c / sigma);
    rep.add("R1_term", std::sqrt(r1_second_moment) / sigma * (2.0 + inv_sqrt_2e + sigma * sup_pmf));
    rep.add("R2_term", r2_mean / (sigma * sigma) * inv_sqrt_2e);
    rep.add("R2_absY_term", r2_abs_y_mean / (sigma * sigma * sigma));
    rep.add("R2_indicator_term", (2.0 + r2_indicator_sup) / sigma);
    return rep;
}

double llt_ratio_bound(double eps_y, long long k, double sigma_y) {
    if (!(eps_y < 1.0)) throw std::invalid_argument("llt_ratio_bound: eps_y must be below 1");
    if (!(sigma_y > 0.0)) throw std::invalid_argument("llt_ratio_bound: sigma_y must be positive");
    // the Gaussian-difference term scales with max(|k|, |k-1|)/sigma^2; the
    // literal k/sigma^2 would vanish at k = 0 where the exact ratio does not
    const double kk = std::max(std::abs(static_cast<double>(k)), std::abs(static_cast<double>(k) - 1.0));
    return std::max(eps_y, kk / (sigma_y * sigma_y)) / (1.0 - eps_y);
}

} // namespace cclt

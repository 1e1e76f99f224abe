#pragma once

#include "cclt/core.hpp"

namespace cclt {

// smoothing constants of the Lipschitz approximation scheme
struct SteinConstants {
    double c2;                 // 4 / sqrt(2 pi e) < 1
    double c3;                 // (2 + 8 e^{-3/2}) / sqrt(2 pi) < 2
    double abs_z_mean;         // sqrt(2/pi)
    double pi_over_8_quarter;  // (pi/8)^{1/4}
    SteinConstants();
};

const SteinConstants& stein_constants();

// classical exchangeable-pair bound:
// d_W(W,Z) <= E|R1| + sqrt(2/pi) E|R2| + E|dW|^3 / (3 lambda)
BoundReport bound_t11(double r1_mean, double r2_mean, double dw3_mean, double lambda);

// multivariate exchangeable-pair bound with general covariance:
// E|R| + op E||Gamma||_HS + op^{3/2} (pi/8)^{1/4} max(E|W|^2, tr)^{1/4} sqrt(mixed)
BoundReport bound_t13(double r_mean, double gamma_hs, double op_norm, double max_moment,
                      double mixed_moment, double trace_sigma);

// symmetric case conditioned on Y = k
BoundReport bound_t21(const ResidualSummary& s, const PairConstants& c, bool averaged = false);

// conditioning on Y in {k-1, k}
BoundReport bound_l22(const ResidualSummary& s, const PairConstants& c);

// improved symmetric case at Y = k
BoundReport bound_t23(const ResidualSummary& s, const PairConstants& c);

enum class MultiVariant { fourth_moment, third_moment };

// multivariate bound at Y = k; sigma is the covariance of W (validated SPD)
BoundReport bound_t31(const ResidualSummary& s, const Eigen::MatrixXd& sigma,
                      const PairConstants& c, MultiVariant variant);

// the k vs k-1 comparison term
BoundReport bound_l51(const ResidualSummary& s, double trace_sigma, double q);

// Stein local limit theorem envelope
BoundReport bound_t16_llt(double sigma, double r1_second_moment, double r2_mean,
                          double r2_abs_y_mean, double r2_indicator_sup, double sup_pmf,
                          double universal_c);

// |1 - p_{k-1}/p_k| envelope from the local limit theorem; reported with
// implied constant 1 (an envelope, not an equality)
double llt_ratio_bound(double eps_y, long long k, double sigma_y);

} // namespace cclt

#pragma once

#include <cmath>

namespace cclt {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// mean absolute value of a standard normal, sqrt(2/pi)
inline double abs_z_mean() { return std::sqrt(2.0 / kPi); }

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

// Phi via the complementary error function; |err| < a few ulp
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// antiderivative of Phi: G(x) = x Phi(x) + phi(x), G(-inf)=0
inline double normal_cdf_integral(double x) { return x * normal_cdf(x) + normal_pdf(x); }

// inverse standard normal cdf, |abs err| ~ 1e-15 after Newton polish
double normal_quantile(double p);

// density of N(0, sigma2) at x
inline double normal_density(double x, double sigma2) {
    return std::exp(-0.5 * x * x / sigma2) / std::sqrt(2.0 * kPi * sigma2);
}

} // namespace cclt

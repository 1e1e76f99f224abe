#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "cclt/core.hpp"

namespace cclt {

// W conditioned on Y = k; rows of w are samples
struct ConditionalSample {
    Eigen::MatrixXd w;
    double k = 0.0;
    double acceptance = 1.0;
    std::uint64_t seed = 0;
};

struct SampleOptions {
    std::size_t target = 20000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t pilot = 10000;
    double min_acceptance = 1e-6;
};

ConditionalSample sample_conditional(const PairModel& model, long long k, const SampleOptions& opts);

// exact 1-d Wasserstein-1 distance between the empirical law of the sample
// and N(0,1), via piecewise integration of |F_n - Phi|
double w1_to_std_normal(std::vector<double> sample);

struct SlicedOptions {
    int directions = 64;
    std::uint64_t seed = 9;
};

// mean over random unit directions of the 1-d W1 between the projected
// sample and N(0,1); a faithful proxy when the target is N(0, I_d)
double sliced_w1_to_std_normal(const Eigen::MatrixXd& sample, const SlicedOptions& opts = {});

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0; // rms of log-log fit residuals
};

// least squares of log(distance) on log(n)
RateFit rate_regression(const std::vector<std::pair<double, double>>& points);

struct LltReport {
    double sigma = 0.0;
    double eps_y = 0.0;    // sup_k |sigma P(Y=k) - sigma phi_{sigma^2}(k)|
    double sup_pmf = 0.0;
    long long arg_sup = 0; // centered lattice index attaining the sup
};

LltReport llt_check(const YLaw& law);

// --- small test statistics -------------------------------------------------

// two-sample Kolmogorov-Smirnov p-value (asymptotic)
double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b);
// chi-square goodness of fit p-value, expected counts given
double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected);

} // namespace cclt

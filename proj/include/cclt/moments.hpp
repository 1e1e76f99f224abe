#pragma once

#include "cclt/core.hpp"

namespace cclt {

// M_{l,±} by exact averaging over the full proposal distribution
MomentProfile enumerated_profile(const PairModel& model, const ModelState& state);
// analytic closed forms when the model declares them, else enumeration
MomentProfile exact_moments(const PairModel& model, const ModelState& state);

// residual terms extracted from a profile against the declared contract
struct ResidualParts {
    double r0_plus = 0.0, r0_minus = 0.0;
    // symmetric contract: M1,± = -lambda ((1/2) Psi W + R1,±)
    Eigen::VectorXd r1_plus, r1_minus;
    // asymmetric contract: M1,± = -lambda (Psi_± W + b_± Y + R1,±)
    Eigen::VectorXd r1_plus_asym, r1_minus_asym;
    // second-moment residual matrices: M2,± = lambda (Psi Sigma + Gamma2,±)
    Eigen::MatrixXd gamma2_plus, gamma2_minus;
    // scalar convention, unit-variance scale: R2,± = M2,±/(lambda sigma_w2) - psi
    double r2_plus = 0.0, r2_minus = 0.0;
};

ResidualParts residuals_from_profile(const MomentProfile& prof, const PairConstants& constants,
                                     const Eigen::VectorXd& sigma_w2);

// per-state conditional expectations over one chain step
struct StateFunctionals {
    MomentProfile prof;
    double abs_dw = 0.0;    // E |dW|
    double abs_dw3 = 0.0;   // E |dW|^3
    double lam_dw4 = 0.0;   // E |(lambda Psi)^-1 dW| |dW|^3
    double lam_dw3 = 0.0;   // E |(lambda Psi)^-1 dW| |dW|^2
};

StateFunctionals collect_state_functionals(const PairModel& model, const ModelState& state);

struct SummaryOptions {
    std::size_t samples = 20000;       // target accepted per conditioning level
    std::uint64_t seed = 1;
    int workers = 1;
    std::size_t pilot = 10000;
    double min_acceptance = 1e-6;
    std::size_t unconditional = 0;     // 0 = samples/4
};

// Monte-Carlo (or exact-conditioning) estimates of every conditional
// expectation consumed by the bound evaluators, at lattice level k.
ResidualSummary estimate_residual_summary(const PairModel& model, long long k,
                                          const SummaryOptions& opts);

enum class StepFunction { alternating, point }; // (-1)^y 1{y<=0} and 1{y=0}

struct ThetaOptions {
    std::size_t samples = 100000;
    std::uint64_t seed = 1;
    bool stationary = true; // false: chain trajectory from the all-zero state
};

// Monte-Carlo mean of the exchangeability functional Theta_f for f = sin;
// zero in expectation at stationarity
MeanWithError theta_diagnostic(const PairModel& model, long long k, StepFunction g,
                               const ThetaOptions& opts);

// Hölder envelope of Remark-style conditional expectations:
// E(|R| | Y=i) <= ||R||_p / P(Y=i)^{1/p}
double holder_bound(double norm_p, double prob, double p = 8.0);

} // namespace cclt

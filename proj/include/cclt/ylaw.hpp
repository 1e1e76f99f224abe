#pragma once

#include <cstdint>
#include <vector>

namespace cclt {

// Exact law of the conditioning statistic Y. Y = (count) + shift, where the
// count lives on 0..trials and shift places Y on its lattice zeta + Z.
enum class YLawKind { binomial, convolution, degenerate, none };

struct YLaw {
    YLawKind kind = YLawKind::none;
    int trials = 0;
    double p = 0.0;      // binomial success probability
    double shift = 0.0;  // Y = count + shift
    std::vector<double> pmf;  // convolution/degenerate: pmf[c] = P(count = c)

    bool exact() const { return kind != YLawKind::none; }

    // P(count = c)
    double pmf_at(int c) const;
    // P(Y = y); y must sit on the lattice to within 1e-9, else returns 0
    double prob_y(double y) const;
    // count index for the lattice point y (rounds y - shift)
    int count_of(double y) const;

    double mean_count() const;
    double var() const;              // variance (shift-invariant)
    double central_moment3() const;  // E (Y - EY)^3

    // convolution of independent Bernoulli(p_i) counts
    static YLaw poisson_binomial(const std::vector<double>& probs, double shift);
};

// log C(n,k)
double log_binom(int n, int k);
// C(n,k) in double precision (exact for values below 2^53)
double binom(int n, int k);

} // namespace cclt

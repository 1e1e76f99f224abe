#include "cclt/ylaw.hpp"

#include <cmath>
#include <stdexcept>

namespace cclt {

double log_binom(int n, int k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double YLaw::pmf_at(int c) const {
    if (c < 0 || c > trials) return 0.0;
    switch (kind) {
        case YLawKind::binomial: {
            // log-space keeps n ~ 1e4 accurate to ~1e-13 relative
            const double lp = log_binom(trials, c) + c * std::log(p) + (trials - c) * std::log1p(-p);
            return std::exp(lp);
        }
        case YLawKind::convolution:
        case YLawKind::degenerate:
            return pmf[static_cast<std::size_t>(c)];
        case YLawKind::none:
            throw std::logic_error("YLaw: law not available");
    }
    return 0.0;
}

int YLaw::count_of(double y) const { return static_cast<int>(std::llround(y - shift)); }

double YLaw::prob_y(double y) const {
    const double c = y - shift;
    const double r = std::round(c);
    if (std::abs(c - r) > 1e-9) return 0.0;
    return pmf_at(static_cast<int>(r));
}

double YLaw::mean_count() const {
    if (kind == YLawKind::binomial) return trials * p;
    double m = 0.0;
    for (std::size_t c = 0; c < pmf.size(); ++c) m += static_cast<double>(c) * pmf[c];
    return m;
}

double YLaw::var() const {
    if (kind == YLawKind::binomial) return trials * p * (1.0 - p);
    const double m = mean_count();
    double v = 0.0;
    for (std::size_t c = 0; c < pmf.size(); ++c) {
        const double d = static_cast<double>(c) - m;
        v += d * d * pmf[c];
    }
    return v;
}

double YLaw::central_moment3() const {
    if (kind == YLawKind::binomial) return trials * p * (1.0 - p) * (1.0 - 2.0 * p);
    const double m = mean_count();
    double v = 0.0;
    for (std::size_t c = 0; c < pmf.size(); ++c) {
        const double d = static_cast<double>(c) - m;
        v += d * d * d * pmf[c];
    }
    return v;
}

YLaw YLaw::poisson_binomial(const std::vector<double>& probs, double shift) {
    YLaw law;
    law.kind = YLawKind::convolution;
    law.trials = static_cast<int>(probs.size());
    law.shift = shift;
    law.pmf.assign(probs.size() + 1, 0.0);
    law.pmf[0] = 1.0;
    std::size_t top = 0;
    for (const double pi : probs) {
        ++top;
        for (std::size_t c = top; c > 0; --c)
            law.pmf[c] = law.pmf[c] * (1.0 - pi) + law.pmf[c - 1] * pi;
        law.pmf[0] *= (1.0 - pi);
    }
    return law;
}

} // namespace cclt

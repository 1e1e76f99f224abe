#include "cclt/empirics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cclt/normal.hpp"
#include "cclt/parallel.hpp"

namespace cclt {

ConditionalSample sample_conditional(const PairModel& model, long long k, const SampleOptions& opts) {
    const ModelContract& mc = model.contract();
    const double y_k = mc.lattice.point(k);
    ConditionalSample out;
    out.k = y_k;
    out.seed = opts.seed;
    const std::size_t nblocks = 64;

    if (mc.conditional_sampler) {
        const std::size_t per_block = (opts.target + nblocks - 1) / nblocks;
        auto blocks = parallel_blocks<Eigen::MatrixXd>(nblocks, opts.workers, [&](std::size_t b) {
            Rng rng(opts.seed, 11000027ULL + b);
            Eigen::MatrixXd w(per_block, mc.dim);
            ModelState s;
            for (std::size_t i = 0; i < per_block; ++i) {
                if (!model.draw_given_y(y_k, s, rng))
                    throw std::invalid_argument("sample_conditional: level off support");
                w.row(i) = s.w.transpose();
            }
            return w;
        });
        out.w.resize(per_block * nblocks, mc.dim);
        std::size_t r = 0;
        for (const auto& b : blocks) {
            out.w.middleRows(r, b.rows()) = b;
            r += b.rows();
        }
        out.acceptance = 1.0;
        return out;
    }

    // rejection: pilot sizes the main run
    Rng pilot_rng(opts.seed, 999331ULL);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < opts.pilot; ++i) {
        ModelState s = model.draw(pilot_rng);
        if (std::abs(s.y - y_k) < 1e-9) ++hits;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(opts.pilot);
    if (rate < opts.min_acceptance)
        throw std::runtime_error("sample_conditional: conditioning event too rare");
    const std::size_t trials =
        static_cast<std::size_t>(1.3 * static_cast<double>(opts.target) / rate) + opts.pilot;
    const std::size_t per_block = (trials + nblocks - 1) / nblocks;
    struct Block {
        std::vector<double> w; // row-major dim-strided
        double trials = 0.0;
    };
    const int d = mc.dim;
    auto blocks = parallel_blocks<Block>(nblocks, opts.workers, [&](std::size_t b) {
        Rng rng(opts.seed, 11000027ULL + b);
        Block blk;
        for (std::size_t i = 0; i < per_block; ++i) {
            ModelState s = model.draw(rng);
            blk.trials += 1.0;
            if (std::abs(s.y - y_k) < 1e-9)
                for (int c = 0; c < d; ++c) blk.w.push_back(s.w(c));
        }
        return blk;
    });
    std::size_t total = 0;
    double trials_done = 0.0;
    for (const auto& b : blocks) {
        total += b.w.size() / static_cast<std::size_t>(d);
        trials_done += b.trials;
    }
    out.w.resize(total, d);
    std::size_t r = 0;
    for (const auto& b : blocks)
        for (std::size_t i = 0; i + d <= b.w.size(); i += d) {
            for (int c = 0; c < d; ++c) out.w(r, c) = b.w[i + c];
            ++r;
        }
    out.acceptance = static_cast<double>(total) / trials_done;
    return out;
}

namespace {

// integral of |c - Phi| over [a, b] for constant c in [0, 1]
double segment_integral(double a, double b, double c, double z_c) {
    if (b <= a) return 0.0;
    const double ga = normal_cdf_integral(a);
    const double gb = normal_cdf_integral(b);
    if (z_c <= a) return (gb - ga) - c * (b - a);
    if (z_c >= b) return c * (b - a) - (gb - ga);
    const double gz = normal_cdf_integral(z_c);
    return c * (z_c - a) - (gz - ga) + (gb - gz) - c * (b - z_c);
}

} // namespace

double w1_to_std_normal(std::vector<double> sample) {
    if (sample.empty()) throw std::invalid_argument("w1_to_std_normal: empty sample");
    std::sort(sample.begin(), sample.end());
    const std::size_t m = sample.size();
    // left tail: int_{-inf}^{x_1} Phi
    double total = normal_cdf_integral(sample.front());
    for (std::size_t i = 1; i < m; ++i) {
        const double c = static_cast<double>(i) / static_cast<double>(m);
        total += segment_integral(sample[i - 1], sample[i], c, normal_quantile(c));
    }
    // right tail: int_{x_m}^{inf} (1 - Phi), computed in its stable form
    const double b = sample.back();
    total += normal_pdf(b) - b * 0.5 * std::erfc(b / kSqrt2);
    return total;
}

double sliced_w1_to_std_normal(const Eigen::MatrixXd& sample, const SlicedOptions& opts) {
    if (sample.rows() == 0) throw std::invalid_argument("sliced_w1: empty sample");
    if (opts.directions < 32) throw std::invalid_argument("sliced_w1: need >= 32 directions");
    const int d = static_cast<int>(sample.cols());
    Rng rng(opts.seed, 77);
    double total = 0.0;
    std::vector<double> proj(static_cast<std::size_t>(sample.rows()));
    for (int dir = 0; dir < opts.directions; ++dir) {
        Eigen::VectorXd u(d);
        double norm2 = 0.0;
        do {
            for (int c = 0; c < d; ++c) u(c) = rng.normal();
            norm2 = u.squaredNorm();
        } while (norm2 == 0.0);
        u /= std::sqrt(norm2);
        Eigen::Map<Eigen::VectorXd>(proj.data(), sample.rows()) = sample * u;
        total += w1_to_std_normal(proj);
    }
    return total / static_cast<double>(opts.directions);
}

RateFit rate_regression(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 4) throw std::invalid_argument("rate_regression: need at least 4 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [n, dist] : points) {
        if (!(dist > 0.0)) throw std::invalid_argument("rate_regression: distances must be positive");
        const double x = std::log(n), y = std::log(dist);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(points.size());
    RateFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    double ss = 0.0;
    for (const auto& [n, dist] : points) {
        const double r = std::log(dist) - (fit.intercept + fit.slope * std::log(n));
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / m);
    return fit;
}

LltReport llt_check(const YLaw& law) {
    if (!law.exact()) throw std::invalid_argument("llt_check: exact law required");
    LltReport rep;
    const double var = law.var();
    rep.sigma = std::sqrt(var);
    const double mean = law.mean_count();
    for (int c = 0; c <= law.trials; ++c) {
        const double pk = law.pmf_at(c);
        rep.sup_pmf = std::max(rep.sup_pmf, pk);
        const double y = static_cast<double>(c) - mean;
        const double gap = std::abs(rep.sigma * pk - rep.sigma * normal_density(y, var));
        if (gap > rep.eps_y) {
            rep.eps_y = gap;
            rep.arg_sup = static_cast<long long>(std::llround(y));
        }
    }
    return rep;
}

// --- test statistics --------------------------------------------------------

namespace {

double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

// regularized upper incomplete gamma Q(a, x), series / continued fraction
double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

} // namespace

double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
}

double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
    if (observed.size() != expected.size() || observed.empty())
        throw std::invalid_argument("chi_square_pvalue: size mismatch");
    double chi2 = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0) continue;
        const double d = observed[i] - expected[i];
        chi2 += d * d / expected[i];
        ++dof;
    }
    if (dof < 1) throw std::invalid_argument("chi_square_pvalue: not enough cells");
    return gamma_q(0.5 * dof, 0.5 * chi2);
}

} // namespace cclt

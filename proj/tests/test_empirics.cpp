#include <doctest.h>

#include <cmath>

#include "cclt/empirics.hpp"
#include "cclt/models.hpp"
#include "cclt/normal.hpp"
#include "cclt/transform.hpp"

using namespace cclt;

namespace {

// high-precision reference for Phi via 64-point Gauss-Legendre on [0, x]
long double phi_reference(long double x) {
    static const int n = 64;
    static long double nodes[64], weights[64];
    static bool init = false;
    if (!init) {
        // Newton on Legendre P_n over [-1,1]
        for (int i = 0; i < n; ++i) {
            long double t = std::cos(3.14159265358979323846L * (i + 0.75L) / (n + 0.5L));
            for (int it = 0; it < 100; ++it) {
                long double p0 = 1.0L, p1 = t;
                for (int k = 2; k <= n; ++k) {
                    const long double p2 = ((2.0L * k - 1.0L) * t * p1 - (k - 1.0L) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                const long double dp = n * (t * p1 - p0) / (t * t - 1.0L);
                const long double dt = p1 / dp;
                t -= dt;
                if (std::abs(dt) < 1e-19L) break;
            }
            nodes[i] = t;
            weights[i] = 2.0L / ((1.0L - t * t) * [&] {
                             long double p0 = 1.0L, p1 = t;
                             for (int k = 2; k <= n; ++k) {
                                 const long double p2 =
                                     ((2.0L * k - 1.0L) * t * p1 - (k - 1.0L) * p0) / k;
                                 p0 = p1;
                                 p1 = p2;
                             }
                             const long double dp = n * (t * p1 - p0) / (t * t - 1.0L);
                             return dp * dp;
                         }());
        }
        init = true;
    }
    long double acc = 0.0L;
    for (int i = 0; i < n; ++i) {
        const long double u = 0.5L * x * (nodes[i] + 1.0L);
        acc += weights[i] * std::exp(-0.5L * u * u);
    }
    acc *= 0.5L * x / std::sqrt(2.0L * 3.14159265358979323846L);
    return 0.5L + acc;
}

} // namespace

TEST_CASE("normal cdf matches the quadrature oracle at twenty reference points") {
    for (int i = 0; i < 10; ++i) {
        const double x = 0.5 * i;
        const long double ref = phi_reference(x);
        CHECK(std::abs(normal_cdf(x) - static_cast<double>(ref)) <= 1e-15);
        CHECK(std::abs(normal_cdf(-x) - static_cast<double>(1.0L - ref)) <= 1e-15);
    }
}

TEST_CASE("normal quantile inverts the cdf") {
    for (const double p : {1e-10, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-6}) {
        CHECK(std::abs(normal_cdf(normal_quantile(p)) - p) <= 1e-14 * std::max(p, 1.0 - p) + 1e-17);
    }
    CHECK_THROWS_AS((void)normal_quantile(-0.1), std::domain_error);
}

TEST_CASE("W1 against N(0,1): closed-form calibrations") {
    // point mass at zero: W1 = E|Z| = sqrt(2/pi)
    CHECK(w1_to_std_normal({0.0}) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-10));
    // exact normal quantiles at (i - 1/2)/n
    const std::size_t n = 10000;
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
        q[i] = normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    CHECK(w1_to_std_normal(q) < 5e-4);
    // translation lower bound
    std::vector<double> shifted = q;
    for (auto& v : shifted) v += 3.0;
    CHECK(w1_to_std_normal(shifted) >= 3.0 - w1_to_std_normal(q) - 1e-12);
    CHECK_THROWS_AS((void)w1_to_std_normal({}), std::invalid_argument);
}

TEST_CASE("W1 golden test: symmetric two-point mass against a quadrature oracle") {
    const double got = w1_to_std_normal({-1.0, 1.0});
    // midpoint rule on |F_n - Phi| over [-12, 12]
    const std::size_t cells = 2400000;
    long double acc = 0.0L;
    const long double lo = -12.0L, hi = 12.0L;
    const long double h = (hi - lo) / cells;
    for (std::size_t i = 0; i < cells; ++i) {
        const long double x = lo + h * (i + 0.5L);
        const long double fn = x < -1.0L ? 0.0L : (x < 1.0L ? 0.5L : 1.0L);
        acc += std::abs(fn - static_cast<long double>(normal_cdf(static_cast<double>(x)))) * h;
    }
    CHECK(got == doctest::Approx(static_cast<double>(acc)).epsilon(1e-10));
}

TEST_CASE("sliced W1: zero sample, exact normal sample, halving and rotation") {
    {
        Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(500, 2);
        CHECK(sliced_w1_to_std_normal(zeros) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-10));
    }
    Rng rng(606, 0);
    const std::size_t big = 100000;
    Eigen::MatrixXd sample(big, 2);
    for (std::size_t i = 0; i < big; ++i) {
        sample(i, 0) = rng.normal();
        sample(i, 1) = rng.normal();
    }
    const double d_big = sliced_w1_to_std_normal(sample);
    CHECK(d_big < 0.01);
    // bias halves from 1e4 to 4e4 points
    const double d1 = sliced_w1_to_std_normal(sample.topRows(10000));
    const double d4 = sliced_w1_to_std_normal(sample.topRows(40000));
    CHECK(d4 / d1 > 0.3);
    CHECK(d4 / d1 < 0.7);
    // seeded rotation leaves the distance unchanged up to direction noise
    const double angle = 1.234;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    Eigen::MatrixXd rotated = sample.topRows(20000) * rot.transpose();
    const double a = sliced_w1_to_std_normal(sample.topRows(20000));
    const double b = sliced_w1_to_std_normal(rotated);
    CHECK(std::abs(a - b) <= 0.005);
    CHECK_THROWS_AS((void)sliced_w1_to_std_normal(Eigen::MatrixXd(0, 2)), std::invalid_argument);
}

TEST_CASE("rate regression recovers exact power laws") {
    std::vector<std::pair<double, double>> pts;
    for (const double n : {64.0, 128.0, 256.0, 512.0})
        pts.emplace_back(n, 1.0 / std::sqrt(n));
    RateFit fit = rate_regression(pts);
    CHECK(fit.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fit.residual <= 1e-12);
    for (auto& [n, d] : pts) d = 3.7 / n;
    fit = rate_regression(pts);
    CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-10));
    pts.resize(3);
    CHECK_THROWS_AS((void)rate_regression(pts), std::invalid_argument);
    pts = {{1.0, 1.0}, {2.0, 0.5}, {3.0, 0.0}, {4.0, 0.1}};
    CHECK_THROWS_AS((void)rate_regression(pts), std::invalid_argument);
}

TEST_CASE("local limit check on exact binomial laws") {
    YLaw law{YLawKind::binomial, 100, 0.5, -50.0, {}};
    const LltReport rep = llt_check(law);
    CHECK(rep.sigma == doctest::Approx(5.0));
    CHECK(rep.eps_y > 0.0);
    CHECK(rep.eps_y < 0.01);
    // scaled density at the center: 1/sqrt(2 pi)
    CHECK(rep.sigma * normal_density(0.0, rep.sigma * rep.sigma) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * kPi)).epsilon(1e-12));
    // eps_Y decreases along n = 25, 100, 400
    double last = 1.0;
    for (const int n : {25, 100, 400}) {
        YLaw l{YLawKind::binomial, n, 0.5, -0.5 * n, {}};
        const double eps = llt_check(l).eps_y;
        CHECK(eps < last);
        last = eps;
    }
}

TEST_CASE("conditional sampling: sufficiency gives unit acceptance, identical seeds bit-identical") {
    const auto tm = make_transformed(pattern01_model(32, 0.5),
                                     TransformOptions{ScalingMode::declared, 0, 0, {}});
    SampleOptions so;
    so.target = 5000;
    so.seed = 99;
    const ConditionalSample a = sample_conditional(*tm, 0, so);
    CHECK(a.acceptance == 1.0);
    CHECK(a.w.rows() >= 5000);
    const ConditionalSample b = sample_conditional(*tm, 0, so);
    CHECK(a.w == b.w); // bit-identical
    so.workers = 4;
    const ConditionalSample c = sample_conditional(*tm, 0, so);
    CHECK(a.w == c.w); // worker count never changes results
    std::vector<double> va(a.w.col(0).data(), a.w.col(0).data() + a.w.rows());
    std::vector<double> vc(c.w.col(0).data(), c.w.col(0).data() + c.w.rows());
    CHECK(w1_to_std_normal(va) == w1_to_std_normal(vc));

    // rejection path: evenodd11 has no sufficient statistic
    const ModelPtr eo = evenodd11_model(16, 0.3);
    SampleOptions ro;
    ro.target = 2000;
    ro.seed = 7;
    const ConditionalSample r = sample_conditional(*eo, 0, ro);
    CHECK(r.acceptance > 0.0);
    CHECK(r.acceptance < 1.0);
    CHECK(r.w.rows() >= 1000);
}

TEST_CASE("rare conditioning events abort in the sampler too") {
    const ModelPtr eo = evenodd11_model(40, 0.5);
    SampleOptions so;
    so.target = 10;
    so.seed = 3;
    so.pilot = 1000;
    CHECK_THROWS_WITH_AS((void)sample_conditional(*eo, 20, so),
                         "sample_conditional: conditioning event too rare", std::runtime_error);
}

TEST_CASE("KS and chi-square self checks") {
    Rng rng(11, 0);
    std::vector<double> a(4000), b(4000), c(4000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.normal();
        b[i] = rng.normal();
        c[i] = rng.normal() + 0.5;
    }
    CHECK(ks_two_sample_pvalue(a, b) > 1e-3);
    CHECK(ks_two_sample_pvalue(a, c) < 1e-6);
    const std::vector<double> obs{48.0, 52.0, 100.0};
    const std::vector<double> expw{50.0, 50.0, 100.0};
    CHECK(chi_square_pvalue(obs, expw) > 0.5);
    const std::vector<double> bad{10.0, 90.0, 100.0};
    CHECK(chi_square_pvalue(bad, expw) < 1e-6);
}

#include <doctest.h>

#include <cmath>

#include "cclt/models.hpp"
#include "cclt/moments.hpp"
#include "cclt/oracle.hpp"
#include "cclt/transform.hpp"

using namespace cclt;

TEST_CASE("transform coefficients match the worked examples") {
    {
        const double p = 0.3, q = 0.7;
        const ModelPtr m = pattern01_model(20, p);
        const auto tm = make_transformed(m, TransformOptions{ScalingMode::declared, 0, 0, {}});
        const TransformCoefficients& tc = tm->coefficients();
        CHECK(tc.alpha == doctest::Approx((2.0 * p - 1.0) / (2.0 * p * q)).epsilon(1e-14));
        CHECK(tc.theta(0) == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(tc.a_mat(0, 0) == doctest::Approx(2.0 * tc.alpha).epsilon(1e-14)); // psi alpha
    }
    {
        // wedge-edge carries theta = -2(n-2), the sign that cancels the
        // conditional mean (the displayed change of variable has it flipped)
        const int n = 8;
        const auto tm = make_transformed(wedge_edge_model(n, 0.3));
        CHECK(tm->coefficients().theta(0) == doctest::Approx(-2.0 * (n - 2.0)).epsilon(1e-13));
        CHECK(tm->coefficients().lambda == doctest::Approx(1.0 / binom(n, 2)).epsilon(1e-14));
    }
    {
        // multivariate darts: A = (0, -1/2; -2, 0), theta = 0
        const auto tm = make_transformed(multivariate_darts_model(12));
        const Eigen::MatrixXd& a = tm->coefficients().a_mat;
        CHECK(a(0, 0) == doctest::Approx(0.0));
        CHECK(a(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
        CHECK(a(1, 0) == doctest::Approx(-2.0).epsilon(1e-14));
        CHECK(a(1, 1) == doctest::Approx(0.0));
        CHECK(tm->coefficients().theta.norm() == doctest::Approx(0.0));
    }
    {
        // triangle-wedge A from the verified Psi_pm, vanishing at p = 1/2
        const double p = 0.3, q = 0.7;
        const auto tm = make_transformed(triangle_wedge_model(8, p));
        const Eigen::MatrixXd& a = tm->coefficients().a_mat;
        const double twoq = 2.0 * p * q;
        CHECK(a(0, 0) == doctest::Approx(3.0 * (2.0 * p - 1.0) / twoq).epsilon(1e-13));
        CHECK(a(0, 1) == doctest::Approx(-2.0 * p * q / twoq).epsilon(1e-13));
        CHECK(a(1, 0) == doctest::Approx(0.0));
        CHECK(a(1, 1) == doctest::Approx(2.0 * (2.0 * p - 1.0) / twoq).epsilon(1e-13));
        // at p = 1/2 the scalar asymmetry vanishes, while A keeps the exact
        // (1,2) cross entry -2pq/(2Q) = -1
        const auto half = make_transformed(triangle_wedge_model(8, 0.5));
        CHECK(half->coefficients().alpha == doctest::Approx(0.0));
        CHECK(half->coefficients().a_mat(0, 1) == doctest::Approx(-1.0).epsilon(1e-13));
        CHECK(half->coefficients().a_mat(0, 0) == doctest::Approx(0.0));
        CHECK(half->coefficients().a_mat(1, 1) == doctest::Approx(0.0));
    }
}

TEST_CASE("univariate change of variable equals the d=1 multivariate formula") {
    // literal Prop-2.4 expression, retyped independently
    const double lam = 0.02, psi = 2.0, alpha = -0.8, theta = 2.0;
    const double ey2 = 30.0, ey3 = 4.0;
    TransformCoefficients tc;
    tc.lambda = lam;
    tc.alpha = alpha;
    tc.a_mat = Eigen::MatrixXd::Constant(1, 1, psi * alpha);
    tc.theta = Eigen::VectorXd::Constant(1, theta);
    tc.ey2 = ey2;
    tc.ey3 = ey3;
    Rng rng(5, 0);
    for (int t = 0; t < 100; ++t) {
        const double x = 3.0 * rng.normal();
        const double y = std::round(5.0 * rng.normal());
        const double direct = x + lam * psi * alpha * x * y + 0.5 * lam * theta * (y * y - ey2) +
                              lam * lam * (psi + 1.0) * alpha * theta / 3.0 * (y * y * y - ey3);
        CHECK(change_of_variable_uni(x, y, tc) == doctest::Approx(direct).epsilon(1e-14));
    }
}

TEST_CASE("a_plus = a_minus and b_plus = 0 reduce the transform to pure scaling") {
    const ModelPtr m = evenodd11_model(12, 0.3);
    const auto tm = make_transformed(m);
    CHECK(tm->coefficients().alpha == doctest::Approx(0.0));
    CHECK(tm->coefficients().theta.norm() == doctest::Approx(0.0));
    Rng rng(3, 1);
    const double sg = std::sqrt(m->contract().sigma_w2(0));
    for (int t = 0; t < 50; ++t) {
        ModelState s = tm->draw(rng);
        CHECK(s.w(0) == doctest::Approx(s.w_base(0) / sg).epsilon(1e-14));
    }
}

TEST_CASE("first-moment contract after the change of variable, exhaustively") {
    // enumerated M1(tilde) must equal -lambda((psi/2) W + R1(tilde)) pointwise,
    // with R1(tilde) from the displayed residual components
    struct Case {
        ModelPtr base;
        double tol;
    };
    const std::vector<Case> cases = {{pattern01_model(8, 0.5), 1e-12},
                                     {pattern01_model(10, 0.3), 1e-12},
                                     {evenodd11_model(8, 0.3), 1e-12}};
    for (const auto& cs : cases) {
        const auto tm = make_transformed(cs.base, TransformOptions{ScalingMode::declared, 0, 0, {}});
        const PairConstants& c = tm->contract().constants;
        const int n = static_cast<int>(cs.base->contract().y_law.trials);
        double worst = 0.0;
        for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
            ModelState s;
            s.cells = cells;
            tm->refresh(s);
            const MomentProfile prof = enumerated_profile(*tm, s);
            const TransformedResiduals tr = transformed_residuals_uni(*tm, s);
            const double want_p = -c.lambda * (0.5 * c.psi() * s.w(0) + tr.r1t_plus);
            const double want_m = -c.lambda * (0.5 * c.psi() * s.w(0) + tr.r1t_minus);
            worst = std::max({worst, std::abs(prof.m1_plus(0) - want_p),
                              std::abs(prof.m1_minus(0) - want_m)});
        });
        INFO(cs.base->contract().name);
        CHECK(worst <= cs.tol);
    }
    // wedge-edge, all graphs on five vertices
    {
        const auto tm =
            make_transformed(wedge_edge_model(5, 0.3), TransformOptions{ScalingMode::declared, 0, 0, {}});
        const PairConstants& c = tm->contract().constants;
        double worst = 0.0;
        for_all_graphs(5, [&](const std::vector<std::uint8_t>& cells) {
            ModelState s;
            s.cells = cells;
            tm->refresh(s);
            const MomentProfile prof = enumerated_profile(*tm, s);
            const TransformedResiduals tr = transformed_residuals_uni(*tm, s);
            worst = std::max(
                {worst,
                 std::abs(prof.m1_plus(0) + c.lambda * (0.5 * c.psi() * s.w(0) + tr.r1t_plus)),
                 std::abs(prof.m1_minus(0) + c.lambda * (0.5 * c.psi() * s.w(0) + tr.r1t_minus))});
        });
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("psi = 2 kills the leading transformed residual term") {
    const auto tm = make_transformed(pattern01_model(10, 0.3),
                                     TransformOptions{ScalingMode::declared, 0, 0, {}});
    Rng rng(9, 2);
    for (int t = 0; t < 20; ++t) {
        const ModelState s = tm->draw(rng);
        CHECK(transformed_residuals_uni(*tm, s).lead == doctest::Approx(0.0));
    }
}

TEST_CASE("transformed residual magnitude at n = 10 sits under the n^{-1/2} envelope") {
    const int n = 10;
    const auto tm = make_transformed(pattern01_model(n, 0.3),
                                     TransformOptions{ScalingMode::declared, 0, 0, {}});
    double sum_abs = 0.0, cnt = 0.0;
    for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
        ModelState s;
        s.cells = cells;
        tm->refresh(s);
        if (std::abs(s.y - 0.0) > 1e-9) return; // exact conditioning on Y = 0
        sum_abs += std::abs(transformed_residuals_uni(*tm, s).r1t_minus);
        cnt += 1.0;
    });
    const double value = sum_abs / cnt;
    CHECK(value > 0.0);
    CHECK(value <= 2.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("post-transform uncorrelatedness and unit scaling at n = 64") {
    struct Case {
        ModelPtr m;
    };
    for (const ModelPtr base : {pattern01_model(64, 0.5), evenodd11_model(64, 0.3),
                                wedge_edge_model(64, 0.5)}) {
        const auto tm = make_transformed(base, TransformOptions{ScalingMode::declared, 0, 0, {}});
        Rng rng(31, 3);
        const std::size_t ns = base->contract().name == "wedge-edge" ? 30000 : 100000;
        double sw = 0, sw2 = 0, sy = 0, sy2 = 0, swy = 0;
        for (std::size_t i = 0; i < ns; ++i) {
            const ModelState s = tm->draw(rng);
            const double w = s.w(0), y = s.y;
            sw += w;
            sw2 += w * w;
            sy += y;
            sy2 += y * y;
            swy += w * y;
        }
        const double nn = static_cast<double>(ns);
        const double vw = sw2 / nn - (sw / nn) * (sw / nn);
        const double vy = sy2 / nn - (sy / nn) * (sy / nn);
        const double corr = (swy / nn - (sw / nn) * (sy / nn)) / std::sqrt(vw * vy);
        INFO(base->contract().name);
        CHECK(std::abs(corr) <= 4.0 / std::sqrt(nn));
        CHECK(vw >= 0.9);
        CHECK(vw <= 1.1);
    }
}

TEST_CASE("monte-carlo scaling agrees with the declared scale where both exist") {
    const auto mc = make_transformed(pattern01_model(64, 0.5),
                                     TransformOptions{ScalingMode::monte_carlo, 200000, 71, {}});
    const auto decl = make_transformed(pattern01_model(64, 0.5),
                                       TransformOptions{ScalingMode::declared, 0, 0, {}});
    CHECK(mc->sigma()(0) == doctest::Approx(decl->sigma()(0)).epsilon(0.02));
    // the cache returns the identical vector on a second construction
    const auto mc2 = make_transformed(pattern01_model(64, 0.5),
                                      TransformOptions{ScalingMode::monte_carlo, 200000, 71, {}});
    CHECK(mc->sigma()(0) == mc2->sigma()(0));
}

TEST_CASE("conditional mean check: pattern01 and wedge-edge") {
    {
        const ModelPtr m = pattern01_model(8, 0.5);
        const ConditionalMeanReport rep = conditional_mean_check(*m, 0);
        CHECK(rep.mean_x == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
        // exhaustive conditional average over all C(8,4) = 70 sequences
        double sum = 0.0, cnt = 0.0;
        for_all_binary(8, [&](const std::vector<std::uint8_t>& cells) {
            ModelState s;
            s.cells = cells;
            m->refresh(s);
            if (std::abs(s.y) > 1e-9) return;
            sum += s.w(0);
            cnt += 1.0;
        });
        CHECK(cnt == 70.0);
        CHECK(sum / cnt == doctest::Approx(2.0 / 7.0).epsilon(1e-12));
        CHECK(rep.rel_discrepancy <= 1.5 / 8.0);
    }
    {
        const int n = 5;
        const ModelPtr m = wedge_edge_model(n, 0.5);
        const ConditionalMeanReport rep = conditional_mean_check(*m, 0);
        CHECK(rep.mean_x == doctest::Approx(-2.0 * 10.0 * 0.25 / 6.0).epsilon(1e-13)); // -5/6
        double sum = 0.0, cnt = 0.0;
        for_all_graphs(n, [&](const std::vector<std::uint8_t>& cells) {
            ModelState s;
            s.cells = cells;
            m->refresh(s);
            if (std::abs(s.y) > 1e-9) return;
            sum += s.w(0);
            cnt += 1.0;
        });
        CHECK(sum / cnt == doctest::Approx(-5.0 / 6.0).epsilon(1e-12));
        CHECK(rep.rel_discrepancy <= 2.0 / n);
    }
    CHECK_THROWS_AS((void)conditional_mean_check(*evenodd11_model(8, 0.3), 0), std::invalid_argument);
}

TEST_CASE("classic-route models refuse the change of variable") {
    CHECK_THROWS_AS((void)make_transformed(urn_model(8, 0.3, 0.3)), std::invalid_argument);
    CHECK_THROWS_AS((void)make_transformed(pattern01_swap_model(8, 4)), std::invalid_argument);
}

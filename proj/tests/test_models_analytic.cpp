#include <doctest.h>

#include <cmath>

#include "cclt/models.hpp"
#include "cclt/moments.hpp"
#include "cclt/oracle.hpp"

using namespace cclt;

namespace {

ModelState state_from_cells(const PairModel& m, const std::vector<std::uint8_t>& cells) {
    ModelState s;
    s.cells = cells;
    m.refresh(s);
    return s;
}

const AnalyticM01* as_m01(const PairModel& m) { return dynamic_cast<const AnalyticM01*>(&m); }

} // namespace

TEST_CASE("pattern01: closed-form moments equal exhaustive one-step averaging") {
    for (const int n : {6, 10, 14}) {
        for (const double p : {0.5, 0.3}) {
            const ModelPtr m = pattern01_model(n, p);
            double worst = 0.0;
            for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
                const ModelState s = state_from_cells(*m, cells);
                MomentProfile a;
                REQUIRE(m->analytic_profile(s, a));
                const MomentProfile e = enumerated_profile(*m, s);
                worst = std::max({worst, std::abs(a.m0_plus - e.m0_plus),
                                  std::abs(a.m0_minus - e.m0_minus),
                                  std::abs(a.m1_plus(0) - e.m1_plus(0)),
                                  std::abs(a.m1_minus(0) - e.m1_minus(0)),
                                  std::abs(a.m2_plus(0, 0) - e.m2_plus(0, 0)),
                                  std::abs(a.m2_minus(0, 0) - e.m2_minus(0, 0))});
            });
            INFO("n=" << n << " p=" << p);
            CHECK(worst <= 1e-12);
        }
    }
}

TEST_CASE("pattern01: M0 difference and the zero linearity remainder") {
    const int n = 10;
    const double p = 0.35;
    const ModelPtr m = pattern01_model(n, p);
    const PairConstants& c = m->contract().constants;
    double worst_diff = 0.0, worst_remainder = 0.0;
    for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
        const ModelState s = state_from_cells(*m, cells);
        const MomentProfile prof = enumerated_profile(*m, s);
        // M0,+ - M0,- = -lambda Y exactly
        worst_diff = std::max(worst_diff,
                              std::abs(prof.m0_plus - prof.m0_minus + c.lambda * s.y));
        // R = -Y - (R0,+ - R0,-)/lambda = 0 under the linear R0 form
        double r0p, r0m;
        m->r0(s, r0p, r0m);
        worst_remainder = std::max(worst_remainder, std::abs(-s.y - (r0p - r0m) / c.lambda));
    });
    CHECK(worst_diff <= 1e-12);
    CHECK(worst_remainder <= 1e-12);
}

TEST_CASE("evenodd11: exact first-moment linearity and state-function R0") {
    for (const int n : {6, 12}) {
        const ModelPtr m = evenodd11_model(n, 0.3);
        const PairConstants& c = m->contract().constants;
        const auto* a01 = as_m01(*m);
        REQUIRE(a01 != nullptr);
        double worst = 0.0, worst_r0 = 0.0, worst_diff = 0.0;
        for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
            const ModelState s = state_from_cells(*m, cells);
            const MomentProfile e = enumerated_profile(*m, s);
            double m0p, m0m;
            Eigen::VectorXd m1p, m1m;
            a01->analytic_m01(s, m0p, m0m, m1p, m1m);
            worst = std::max({worst, std::abs(m0p - e.m0_plus), std::abs(m0m - e.m0_minus),
                              std::abs(m1p(0) - e.m1_plus(0)), std::abs(m1m(0) - e.m1_minus(0)),
                              std::abs(e.m1_plus(0) + s.w(0) / n),
                              std::abs(e.m1_minus(0) + s.w(0) / n)});
            double r0p, r0m;
            m->r0(s, r0p, r0m);
            worst_r0 = std::max({worst_r0, std::abs(e.m0_plus - c.q - r0p),
                                 std::abs(e.m0_minus - c.q - r0m)});
            // R0,+ - R0,- = -lambda Y holds although R0 is not a function of Y
            worst_diff = std::max(worst_diff, std::abs(r0p - r0m + c.lambda * s.y));
        });
        CHECK(worst <= 1e-12);
        CHECK(worst_r0 <= 1e-12);
        CHECK(worst_diff <= 1e-12);
    }
}

TEST_CASE("evenodd11: sigma_X^2 = n p^2 q^2 and odd n rejected") {
    CHECK(evenodd11_model(16, 0.5)->contract().sigma_w2(0) == doctest::Approx(16.0 / 16.0));
    CHECK_THROWS_AS((void)evenodd11_model(9, 0.5), std::invalid_argument);
}

TEST_CASE("wedge-edge: closed-form M0/M1 equal exhaustive edge resampling averages") {
    for (const int n : {5, 6}) {
        for (const double p : {0.5, 0.3}) {
            const ModelPtr m = wedge_edge_model(n, p);
            const auto* a01 = as_m01(*m);
            REQUIRE(a01 != nullptr);
            double worst = 0.0;
            for_all_graphs(n, [&](const std::vector<std::uint8_t>& cells) {
                const ModelState s = state_from_cells(*m, cells);
                const MomentProfile e = enumerated_profile(*m, s);
                double m0p, m0m;
                Eigen::VectorXd m1p, m1m;
                a01->analytic_m01(s, m0p, m0m, m1p, m1m);
                worst = std::max({worst, std::abs(m0p - e.m0_plus), std::abs(m0m - e.m0_minus),
                                  std::abs(m1p(0) - e.m1_plus(0)), std::abs(m1m(0) - e.m1_minus(0))});
            });
            INFO("n=" << n << " p=" << p);
            CHECK(worst <= 1e-10);
        }
    }
}

TEST_CASE("wedge-edge: sigma_X^2 closed form at n=4, p=1/2") {
    // C(4,2) (n-2) p^2 q^2 = 6 * 2 * 1/16
    CHECK(wedge_edge_model(4, 0.5)->contract().sigma_w2(0) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("triangle-wedge: matrix first-moment contract verified exhaustively") {
    const int n = 5;
    for (const double p : {0.5, 0.35}) {
        const ModelPtr m = triangle_wedge_model(n, p);
        const auto* a01 = as_m01(*m);
        REQUIRE(a01 != nullptr);
        double worst = 0.0, worst_psd = 0.0;
        for_all_graphs(n, [&](const std::vector<std::uint8_t>& cells) {
            const ModelState s = state_from_cells(*m, cells);
            const MomentProfile e = enumerated_profile(*m, s);
            double m0p, m0m;
            Eigen::VectorXd m1p, m1m;
            a01->analytic_m01(s, m0p, m0m, m1p, m1m);
            worst = std::max({worst, (m1p - e.m1_plus).norm(), (m1m - e.m1_minus).norm(),
                              std::abs(m0p - e.m0_plus), std::abs(m0m - e.m0_minus)});
            // second-moment matrices are symmetric PSD
            for (const auto& m2 : {e.m2_plus, e.m2_minus}) {
                worst_psd = std::max(worst_psd, (m2 - m2.transpose()).norm());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m2);
                worst_psd = std::max(worst_psd, std::max(0.0, -es.eigenvalues().minCoeff()));
            }
        });
        INFO("p=" << p);
        CHECK(worst <= 1e-10);
        CHECK(worst_psd <= 1e-12);
    }
}

TEST_CASE("triangle-wedge: Psi_plus upper-left block is 3p") {
    const ModelPtr m = triangle_wedge_model(8, 0.5);
    CHECK(m->contract().constants.psi_plus(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    // b_plus = (0, -2(n-2) p q)
    CHECK(m->contract().constants.b_plus(0) == doctest::Approx(0.0));
    CHECK(m->contract().constants.b_plus(1) == doctest::Approx(-2.0 * 6.0 * 0.25));
}

TEST_CASE("urn: stay probability and first moments") {
    const int n = 9;
    const double p1 = 0.25, p2 = 0.35;
    const ModelPtr m = urn_model(n, p1, p2);
    Rng rng(11, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelState s = m->draw(rng);
        const MomentProfile e = enumerated_profile(*m, s);
        // P(V'=V | V,W) = 1 - p2 + (2 p2 - 1) V / n
        const double stay = 1.0 - e.m0_plus - e.m0_minus;
        CHECK(stay == doctest::Approx(1.0 - p2 + (2.0 * p2 - 1.0) * s.y / n).epsilon(1e-12));
        const auto* a01 = as_m01(*m);
        double m0p, m0m;
        Eigen::VectorXd m1p, m1m;
        a01->analytic_m01(s, m0p, m0m, m1p, m1m);
        CHECK(m0p == doctest::Approx(e.m0_plus).epsilon(1e-12));
        CHECK(m0m == doctest::Approx(e.m0_minus).epsilon(1e-12));
        CHECK(m1p(0) == doctest::Approx(e.m1_plus(0)).epsilon(1e-12));
        CHECK(std::abs(e.m1_minus(0)) <= 1e-14); // M1,- vanishes for the urn
    }
    CHECK_THROWS_AS((void)urn_model(5, 0.5, 0.6), std::invalid_argument);
}

TEST_CASE("urn: all balls in urn two forces W = 0") {
    const ModelPtr m = urn_model(2, 1.0 / 3, 1.0 / 3);
    ModelState s;
    s.cells = {1, 1};
    m->refresh(s);
    CHECK(s.y == doctest::Approx(2.0));
    CHECK(s.w(0) == doctest::Approx(0.0));
}

TEST_CASE("darts: zero-score states, moment identities, score validation") {
    const int n = 12;
    const double q = 0.4;
    const ModelPtr m = darts_model(n, q);
    ModelState s;
    s.cells.assign(n, 0); // every dart misses
    m->refresh(s);
    CHECK(s.w(0) == doctest::Approx(0.0));

    Rng rng(5, 6);
    const auto* a01 = as_m01(*m);
    for (int trial = 0; trial < 200; ++trial) {
        const ModelState st = m->draw(rng);
        const MomentProfile e = enumerated_profile(*m, st);
        double m0p, m0m;
        Eigen::VectorXd m1p, m1m;
        a01->analytic_m01(st, m0p, m0m, m1p, m1m);
        CHECK(m0p == doctest::Approx(e.m0_plus).epsilon(1e-12));
        CHECK(m0m == doctest::Approx(e.m0_minus).epsilon(1e-12));
        CHECK(m1p(0) == doctest::Approx(e.m1_plus(0)).epsilon(1e-12));
        CHECK(std::abs(e.m1_minus(0)) <= 1e-14);
    }
    // constant score: Y'=Y would force W'=W
    ScoreSpec bad;
    bad.length = {1.0};
    bad.value = {1.0};
    CHECK_THROWS_WITH_AS((void)darts_model(n, q, bad),
                         "darts: constant score rejected (Y'=Y would force W'=W)",
                         std::invalid_argument);
}

TEST_CASE("multivariate darts: Psi_pm matrices verified against enumeration") {
    const int n = 10;
    const ModelPtr m = multivariate_darts_model(n);
    const PairConstants& c = m->contract().constants;
    CHECK(c.psi_mat(0, 0) == doctest::Approx(0.5));
    CHECK(c.psi_mat(1, 1) == doctest::Approx(0.5));
    Rng rng(8, 7);
    for (int trial = 0; trial < 300; ++trial) {
        const ModelState s = m->draw(rng);
        const MomentProfile e = enumerated_profile(*m, s);
        const Eigen::VectorXd want_p = -(c.psi_plus * s.w) / n;
        const Eigen::VectorXd want_m = -(c.psi_minus * s.w) / n;
        CHECK((e.m1_plus - want_p).norm() <= 1e-12);
        CHECK((e.m1_minus - want_m).norm() <= 1e-12);
    }
}

TEST_CASE("multivariate darts: mean dY vanishes along the chain") {
    const int n = 50;
    const ModelPtr m = multivariate_darts_model(n);
    Rng rng(99, 8);
    ModelState s = m->draw(rng);
    double sum_dy = 0.0, sum_dy2 = 0.0;
    const std::size_t steps = 1000000;
    for (std::size_t i = 0; i < steps; ++i) {
        const double y0 = s.y;
        m->step(s, rng);
        const double dy = s.y - y0;
        sum_dy += dy;
        sum_dy2 += dy * dy;
    }
    const double mean = sum_dy / static_cast<double>(steps);
    const double se = std::sqrt(sum_dy2 / static_cast<double>(steps)) / std::sqrt(static_cast<double>(steps));
    CHECK(std::abs(mean) <= 5.0 * se);
}

TEST_CASE("toy model: constants and analytic profile") {
    // lambda = 2 p q / n
    CHECK(toy_model(100, 0.5, std::vector<double>(100, 0.0))->contract().constants.lambda ==
          doctest::Approx(0.005).epsilon(1e-15));
    {
        // eps must sum to zero
        std::vector<double> eps(4, 0.1);
        CHECK_THROWS_AS((void)toy_model(4, 0.5, eps), std::invalid_argument);
    }
    {
        // n=2, eps = (c, -c): the eps part of W is centered
        std::vector<double> eps{0.7, -0.7};
        const ModelPtr m = toy_model(2, 0.4, eps);
        Rng rng(3, 9);
        double sum = 0.0;
        const std::size_t ns = 200000;
        for (std::size_t i = 0; i < ns; ++i) {
            const ModelState s = m->draw(rng);
            sum += s.w(0) - (s.reals[0] + s.reals[1]);
        }
        CHECK(std::abs(sum / static_cast<double>(ns)) <= 4.0 * 0.7 / std::sqrt(static_cast<double>(ns)));
    }
    // analytic profile against a direct Monte-Carlo average of one-step deltas
    const int n = 8;
    const ModelPtr m = toy_model(n, 0.45, std::vector<double>(n, 0.0));
    Rng rng(21, 10);
    ModelState s = m->draw(rng);
    MomentProfile prof;
    REQUIRE(m->analytic_profile(s, prof));
    double m1p = 0.0, m0p = 0.0, m2p = 0.0;
    const std::size_t trials = 400000;
    for (std::size_t i = 0; i < trials; ++i) {
        ModelState t = s;
        m->step(t, rng);
        const double dy = t.y - s.y;
        if (dy > 0.5) {
            m0p += 1.0;
            m1p += t.w(0) - s.w(0);
            m2p += (t.w(0) - s.w(0)) * (t.w(0) - s.w(0));
        }
    }
    const double dn = static_cast<double>(trials);
    CHECK(std::abs(m0p / dn - prof.m0_plus) <= 4.0 * std::sqrt(0.25 / dn));
    CHECK(std::abs(m1p / dn - prof.m1_plus(0)) <= 5.0 * std::sqrt(2.0 / dn));
    CHECK(std::abs(m2p / dn - prof.m2_plus(0, 0)) <= 5.0 * std::sqrt(10.0 / dn));
}

TEST_CASE("toy model: second-moment sum concentrates at 2 lambda sigma_W^2") {
    const int n = 400;
    const double p = 0.5;
    const ModelPtr m = toy_model(n, p, std::vector<double>(n, 0.0));
    const double lam = m->contract().constants.lambda;
    const double sw2 = m->contract().sigma_w2(0);
    Rng rng(17, 11);
    double acc = 0.0;
    const int trials = 2000;
    for (int i = 0; i < trials; ++i) {
        MomentProfile prof;
        const ModelState s = m->draw(rng);
        REQUIRE(m->analytic_profile(s, prof));
        acc += prof.m2_plus(0, 0) + prof.m2_minus(0, 0);
    }
    acc /= static_cast<double>(trials);
    // M2,+ + M2,- = 2 lambda (sigma_W^2 + O(sqrt n)) per the toy computation
    CHECK(std::abs(acc - 2.0 * lam * sw2) <= 2.0 * lam * 10.0 * std::sqrt(static_cast<double>(n)));
}

TEST_CASE("pattern01 swap chain: exact linear drift with the displayed constant") {
    const int n = 8, mm = 4;
    const ModelPtr m = pattern01_swap_model(n, mm);
    const double lam = m->contract().constants.lambda;
    CHECK(lam == doctest::Approx(4.0 * 7.0 / 64.0).epsilon(1e-15));
    double worst = 0.0;
    for_all_binary(n, [&](const std::vector<std::uint8_t>& cells) {
        int ones = 0;
        for (auto c : cells) ones += c;
        if (ones != mm) return;
        const ModelState s = state_from_cells(*m, cells);
        double drift = 0.0;
        m->for_each_proposal(s, [&](double prob, const double* dw, int) { drift += prob * dw[0]; });
        worst = std::max(worst, std::abs(drift + lam * s.w(0)));
    });
    CHECK(worst <= 1e-12);
}

TEST_CASE("wedge swap chain: exact linear drift and degree-update probabilities") {
    const int n = 5, mm = 5;
    const ModelPtr m = wedge_edge_swap_model(n, mm);
    const double lam = m->contract().constants.lambda;
    const double nn = binom(n, 2);
    CHECK(lam == doctest::Approx(4.0 * (nn - 1.0) / (nn * nn)).epsilon(1e-14));
    double worst = 0.0;
    for_all_graphs(n, [&](const std::vector<std::uint8_t>& cells) {
        int edges = 0;
        for (auto c : cells) edges += c;
        if (edges != mm) return;
        const ModelState s = state_from_cells(*m, cells);
        double drift = 0.0;
        m->for_each_proposal(s, [&](double prob, const double* dw, int) { drift += prob * dw[0]; });
        worst = std::max(worst, std::abs(drift + lam * s.w(0)));
    });
    CHECK(worst <= 1e-12);

    // degree-update probabilities against a direct proposal count
    Rng rng(4, 12);
    const ModelState s = m->draw(rng);
    GraphStats gs = graph_stats(s.cells, n);
    (void)gs;
    std::vector<int> deg(n, 0);
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i)
            if (s.cells[edge_index(i, j)]) {
                ++deg[i];
                ++deg[j];
            }
    // count swaps that raise vertex 0's degree
    const int v = 0;
    double up_direct = 0.0;
    const std::size_t slots = static_cast<std::size_t>(nn);
    for (std::size_t e = 0; e < slots; ++e)
        for (std::size_t f = 0; f < slots; ++f) {
            if (s.cells[e] == s.cells[f]) continue;
            const std::size_t from = s.cells[e] ? e : f;
            const std::size_t to = s.cells[e] ? f : e;
            const auto [a, b] = edge_endpoints(from);
            const auto [c2, d2] = edge_endpoints(to);
            const int delta = ((c2 == v) || (d2 == v) ? 1 : 0) - ((a == v) || (b == v) ? 1 : 0);
            if (delta == 1) up_direct += 1.0 / (nn * nn);
        }
    double up, down;
    swap_chain_degree_probs(n, mm, deg[v], up, down);
    CHECK(up == doctest::Approx(up_direct).epsilon(1e-12));
}

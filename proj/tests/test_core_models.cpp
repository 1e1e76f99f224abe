#include <doctest.h>

#include <cmath>

#include "cclt/empirics.hpp"
#include "cclt/models.hpp"
#include "cclt/transform.hpp"

using namespace cclt;

namespace {

std::vector<ModelPtr> all_models() {
    return {pattern01_model(12, 0.5),  evenodd11_model(12, 0.3),
            wedge_edge_model(6, 0.5),  triangle_wedge_model(6, 0.5),
            urn_model(10, 1.0 / 3, 1.0 / 3), darts_model(10, 0.4),
            multivariate_darts_model(10), toy_model(10, 0.5, std::vector<double>(10, 0.0)),
            pattern01_swap_model(10, 5), wedge_edge_swap_model(5, 5)};
}

} // namespace

TEST_CASE("declared contracts match the worked examples") {
    {
        const auto d = model_contract(*pattern01_model(100, 0.5));
        CHECK(d.dim == 1);
        CHECK(d.zeta == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(d.lambda == doctest::Approx(0.01).epsilon(1e-15));
        CHECK(d.psi == doctest::Approx(2.0).epsilon(1e-15));
    }
    {
        const auto d = model_contract(*wedge_edge_model(20, 0.5));
        CHECK(d.lambda == doctest::Approx(1.0 / 190.0).epsilon(1e-15));
        CHECK(d.psi == doctest::Approx(2.0).epsilon(1e-15));
    }
    {
        const ModelPtr m = triangle_wedge_model(8, 0.5);
        CHECK(m->contract().dim == 2);
        const Eigen::MatrixXd psi = m->contract().constants.psi_mat;
        CHECK(psi(0, 0) == doctest::Approx(3.0));
        CHECK(psi(1, 1) == doctest::Approx(2.0));
        CHECK(psi(0, 1) == doctest::Approx(0.0));
        CHECK(psi(1, 0) == doctest::Approx(0.0));
    }
    CHECK_THROWS_AS((void)make_model("no-such-model", 10, 0.5), std::invalid_argument);
}

TEST_CASE("pair constants satisfy the declared identities exactly") {
    for (const auto& m : all_models()) {
        const PairConstants& c = m->contract().constants;
        CHECK(c.a_plus + c.a_minus == doctest::Approx(1.0).epsilon(1e-15));
        CHECK((c.b_plus + c.b_minus).norm() == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(std::abs(c.q - c.lambda * c.sigma_y2) <= 1e-15 * std::max(1.0, std::abs(c.q)));
        CHECK(c.lambda > 0.0);
        CHECK(c.lambda < 1.0);
        CHECK((c.psi_plus + c.psi_minus - c.psi_mat).norm() == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("every sampled transition keeps dY in {-1,0,1} and Y on the lattice") {
    Rng rng(2024, 0);
    for (const auto& m : all_models()) {
        const LatticeSpec& lat = m->contract().lattice;
        ModelState s = m->draw(rng);
        if (m->contract().y_law.kind != YLawKind::degenerate) REQUIRE(lat.contains(s.y));
        const std::size_t steps = 100000; // 1e6 total across the model zoo
        for (std::size_t i = 0; i < steps; ++i) {
            const double y0 = s.y;
            m->step(s, rng);
            const double dy = s.y - y0;
            REQUIRE(std::abs(dy - std::round(dy)) <= 1e-9);
            REQUIRE(std::abs(dy) <= 1.0 + 1e-9);
        }
        // the incremental statistic bookkeeping stays in sync with refresh
        ModelState fresh = s;
        m->refresh(fresh);
        CHECK((s.w - fresh.w).norm() <= 1e-7 * std::max(1.0, fresh.w.norm()));
        CHECK(s.y == doctest::Approx(fresh.y).epsilon(1e-12));
    }
}

TEST_CASE("one chain step preserves the stationary law (KS on W, chi-square on Y)") {
    const std::vector<ModelPtr> models = {pattern01_model(10, 0.4), evenodd11_model(10, 0.3),
                                          wedge_edge_model(5, 0.5), urn_model(8, 0.3, 0.4)};
    for (const auto& m : models) {
        Rng rng(77, 1);
        const std::size_t nsamp = 20000;
        std::vector<double> w_fresh, w_stepped;
        const YLaw& law = m->contract().y_law;
        std::vector<double> y_counts(law.trials + 1, 0.0);
        for (std::size_t i = 0; i < nsamp; ++i) {
            ModelState s = m->draw(rng);
            w_fresh.push_back(s.w(0));
            m->step(s, rng);
            // canonicalize through refresh so shared atoms compare bit-equal
            m->refresh(s);
            w_stepped.push_back(s.w(0));
            y_counts[static_cast<std::size_t>(law.count_of(s.y))] += 1.0;
        }
        CHECK(ks_two_sample_pvalue(w_fresh, w_stepped) > 1e-4);
        std::vector<double> observed, expect_kept;
        for (std::size_t c = 0; c < y_counts.size(); ++c) {
            const double e = law.pmf_at(static_cast<int>(c)) * static_cast<double>(nsamp);
            if (e >= 5.0) {
                observed.push_back(y_counts[c]);
                expect_kept.push_back(e);
            }
        }
        CHECK(chi_square_pvalue(observed, expect_kept) > 1e-4);
    }
}

TEST_CASE("declared sigma_w2 matches the sampled variance") {
    const std::vector<ModelPtr> models = {pattern01_model(64, 0.5), evenodd11_model(64, 0.3),
                                          wedge_edge_model(12, 0.5), triangle_wedge_model(12, 0.5),
                                          multivariate_darts_model(64), darts_model(64, 0.4),
                                          urn_model(64, 0.25, 0.35),
                                          toy_model(64, 0.5, std::vector<double>(64, 0.0)),
                                          pattern01_swap_model(16, 8), wedge_edge_swap_model(6, 7)};
    for (const auto& m : models) {
        Rng rng(5150, 2);
        const int d = m->contract().dim;
        Eigen::VectorXd s1 = Eigen::VectorXd::Zero(d), s2 = Eigen::VectorXd::Zero(d);
        const std::size_t nsamp = 40000;
        for (std::size_t i = 0; i < nsamp; ++i) {
            const ModelState s = m->draw(rng);
            s1 += s.w;
            s2 += s.w.cwiseProduct(s.w);
        }
        for (int c = 0; c < d; ++c) {
            const double mean = s1(c) / static_cast<double>(nsamp);
            const double var = s2(c) / static_cast<double>(nsamp) - mean * mean;
            const double declared = m->contract().sigma_w2(c);
            INFO(m->contract().name << " coord " << c << " var " << var << " declared " << declared);
            CHECK(std::abs(var - declared) <= 0.1 * declared);
        }
    }
}

TEST_CASE("W and Y are uncorrelated for every model") {
    for (const auto& m : all_models()) {
        if (m->contract().y_law.kind == YLawKind::degenerate) continue;
        Rng rng(31337, 3);
        const std::size_t nsamp = 40000;
        const int d = m->contract().dim;
        Eigen::VectorXd sw = Eigen::VectorXd::Zero(d), swy = Eigen::VectorXd::Zero(d);
        Eigen::VectorXd sw2 = Eigen::VectorXd::Zero(d);
        double sy = 0.0, sy2 = 0.0;
        for (std::size_t i = 0; i < nsamp; ++i) {
            const ModelState s = m->draw(rng);
            const double yc = s.y - m->contract().y_mean;
            sw += s.w;
            sw2 += s.w.cwiseProduct(s.w);
            swy += yc * s.w;
            sy += yc;
            sy2 += yc * yc;
        }
        const double nn = static_cast<double>(nsamp);
        for (int c = 0; c < d; ++c) {
            const double cov = swy(c) / nn - (sw(c) / nn) * (sy / nn);
            const double vw = sw2(c) / nn - (sw(c) / nn) * (sw(c) / nn);
            const double vy = sy2 / nn - (sy / nn) * (sy / nn);
            const double corr = cov / std::sqrt(vw * vy);
            INFO(m->contract().name << " coord " << c);
            CHECK(std::abs(corr) <= 4.0 / std::sqrt(nn));
        }
    }
}

#include "cclt/models.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cclt {

namespace {

int count_of_level(double y, double shift) { return static_cast<int>(std::llround(y - shift)); }

// uniform placement of m ones among n sites
void fill_subset(std::vector<std::uint8_t>& cells, int n, int m, Rng& rng) {
    std::vector<std::uint32_t> idx;
    std::fill(cells.begin(), cells.end(), 0);
    rng.sample_subset(static_cast<std::size_t>(n), static_cast<std::size_t>(m), idx);
    for (auto i : idx) cells[i] = 1;
}

// ---------------------------------------------------------------- pattern01

class Pattern01Model final : public PairModel, public AnalyticM01 {
public:
    Pattern01Model(int n, double p) : n_(n), p_(p), q_(1.0 - p) {
        if (n < 4) throw std::invalid_argument("pattern01: n >= 4 required");
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("pattern01: p in (0,1) required");
        contract_.name = "pattern01";
        contract_.dim = 1;
        const double shift = -static_cast<double>(n) * p;
        contract_.lattice.zeta = shift - std::floor(shift);
        contract_.constants = PairConstants::scalar(1.0 / n, n * p_ * q_, 2.0, p_, 2.0 * p_ * q_);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, n * p_ * p_ * q_ * q_);
        contract_.analytic_moments = true;
        contract_.log2_states = static_cast<double>(n);
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.y_law = YLaw{YLawKind::binomial, n, p, shift, {}};
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        for (auto& c : s.cells) c = rng.bernoulli(p_) ? 1 : 0;
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int m = count_of_level(y, contract_.y_law.shift);
        if (m < 0 || m > n_) return false;
        s.cells.resize(n_);
        fill_subset(s.cells, n_, m, rng);
        refresh(s);
        return true;
    }

    void refresh(ModelState& s) const override {
        long long v = 0, u = 0;
        for (int i = 0; i < n_; ++i) {
            v += s.cells[i];
            u += (1 - s.cells[i]) & s.cells[(i + 1) % n_];
        }
        const double y = static_cast<double>(v) - n_ * p_;
        const double x = static_cast<double>(u) - (1.0 - 2.0 * p_) * y - n_ * p_ * q_;
        s.w = Eigen::VectorXd::Constant(1, x);
        s.y = y;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nv = rng.bernoulli(p_) ? 1 : 0;
        if (nv == s.cells[i]) return;
        const int dy = nv ? 1 : -1;
        s.w(0) += -dy * (bar(s, i - 1) + bar(s, i + 1));
        s.y += dy;
        s.cells[i] = nv;
    }

    std::size_t proposal_count(const ModelState&) const override { return 2u * n_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double pr = 1.0 / n_;
        double dw[1];
        for (int i = 0; i < n_; ++i) {
            const double nb = bar(s, i - 1) + bar(s, i + 1);
            if (s.cells[i]) { // 1 -> 0 with prob q
                dw[0] = nb;
                f(pr * q_, dw, -1);
            } else { // 0 -> 1 with prob p
                dw[0] = -nb;
                f(pr * p_, dw, +1);
            }
            // resampling the same value keeps the state; dW = 0, dY = 0
            dw[0] = 0.0;
            f(pr * (s.cells[i] ? p_ : q_), dw, 0);
        }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        const double lam = contract_.constants.lambda;
        const double x = s.w(0), y = s.y;
        m0p = p_ * q_ - lam * p_ * y;
        m0m = p_ * q_ + lam * q_ * y;
        m1p = Eigen::VectorXd::Constant(1, -lam * (2.0 * p_ * x + 2.0 * p_ * q_ * y));
        m1m = Eigen::VectorXd::Constant(1, -lam * (2.0 * q_ * x - 2.0 * p_ * q_ * y));
    }

    bool analytic_profile(const ModelState& s, MomentProfile& prof) const override {
        analytic_m01(s, prof.m0_plus, prof.m0_minus, prof.m1_plus, prof.m1_minus);
        // second moments need the distance-2 pair sum and the centered triple
        // sum, both one cyclic scan
        double d2 = 0.0, t3 = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double l = bar(s, i - 1), r = bar(s, i + 1);
            d2 += l * r;
            t3 += l * bar(s, i) * r;
        }
        const double x = s.w(0), y = s.y;
        const double c = n_ * p_ * p_ * q_ * q_;
        const double m2p =
            (2.0 * c + 2.0 * p_ * (1.0 - 2.0 * p_) * x + 2.0 * p_ * q_ * (1.0 - 3.0 * p_) * y +
             2.0 * p_ * q_ * d2 - 2.0 * p_ * t3) / n_;
        const double m2m =
            (2.0 * c - 2.0 * q_ * (1.0 - 2.0 * p_) * x + 2.0 * p_ * q_ * (2.0 - 3.0 * p_) * y +
             2.0 * p_ * q_ * d2 + 2.0 * q_ * t3) / n_;
        prof.m2_plus = Eigen::MatrixXd::Constant(1, 1, m2p);
        prof.m2_minus = Eigen::MatrixXd::Constant(1, 1, m2m);
        prof.w = s.w;
        prof.y = s.y;
        return true;
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        const double lam = contract_.constants.lambda;
        r0p = -lam * p_ * s.y;
        r0m = lam * q_ * s.y;
    }

private:
    double bar(const ModelState& s, int i) const {
        return static_cast<double>(s.cells[(i % n_ + n_) % n_]) - p_;
    }
    int n_;
    double p_, q_;
};

// ---------------------------------------------------------------- evenodd11

// 1-based site i has success probability p for odd i, 1-p for even i;
// X = sum_i (-1)^i w_i w_{i+1} over the cycle
class EvenOdd11Model final : public PairModel, public AnalyticM01 {
public:
    EvenOdd11Model(int n, double p) : n_(n), p_(p), q_(1.0 - p) {
        if (n < 4 || n % 2 != 0) throw std::invalid_argument("evenodd11: even n >= 4 required");
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("evenodd11: p in (0,1) required");
        contract_.name = "evenodd11";
        contract_.dim = 1;
        contract_.lattice.zeta = (n % 2 == 0) ? 0.0 : 0.5;
        contract_.constants = PairConstants::scalar(1.0 / n, n * p_ * q_, 2.0, 0.5, 0.0);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, n * p_ * p_ * q_ * q_);
        contract_.log2_states = static_cast<double>(n);
        contract_.conditional_sampler = false; // Y is not sufficient here
        contract_.exact_linear_r0 = false;
        std::vector<double> probs(n);
        for (int i = 0; i < n; ++i) probs[i] = site_p(i);
        contract_.y_law = YLaw::poisson_binomial(probs, -0.5 * n);
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        for (int i = 0; i < n_; ++i) s.cells[i] = rng.bernoulli(site_p(i)) ? 1 : 0;
        refresh(s);
        return s;
    }

    void refresh(ModelState& s) const override {
        long long v = 0, x = 0;
        for (int i = 0; i < n_; ++i) {
            v += s.cells[i];
            if (s.cells[i] & s.cells[(i + 1) % n_]) x += sign(i);
        }
        s.w = Eigen::VectorXd::Constant(1, static_cast<double>(x));
        s.y = static_cast<double>(v) - 0.5 * n_;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nv = rng.bernoulli(site_p(i)) ? 1 : 0;
        if (nv == s.cells[i]) return;
        const double dwi = delta_x(s, i, nv);
        s.cells[i] = nv;
        s.w(0) += dwi;
        s.y += nv ? 1.0 : -1.0;
    }

    std::size_t proposal_count(const ModelState&) const override { return 2u * n_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double pr = 1.0 / n_;
        double dw[1];
        for (int i = 0; i < n_; ++i) {
            const double pi = site_p(i);
            const std::uint8_t nv = s.cells[i] ? 0 : 1;
            dw[0] = delta_x(s, i, nv);
            f(pr * (nv ? pi : 1.0 - pi), dw, nv ? +1 : -1);
            dw[0] = 0.0;
            f(pr * (s.cells[i] ? pi : 1.0 - pi), dw, 0);
        }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        double r0p, r0m;
        r0(s, r0p, r0m);
        m0p = p_ * q_ + r0p;
        m0m = p_ * q_ + r0m;
        m1p = Eigen::VectorXd::Constant(1, -s.w(0) / n_);
        m1m = m1p;
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        // -(1/n) sum p_i wbar_i and +(1/n) sum (1-p_i) wbar_i; not a function
        // of Y alone (Y is not sufficient for p in this model)
        double sp = 0.0, sq = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double pi = site_p(i);
            const double wb = static_cast<double>(s.cells[i]) - pi;
            sp += pi * wb;
            sq += (1.0 - pi) * wb;
        }
        r0p = -sp / n_;
        r0m = sq / n_;
    }

private:
    double site_p(int i) const { return (i % 2 == 0) ? p_ : q_; } // 0-based even = 1-based odd
    static int sign(int i) { return (i % 2 == 0) ? -1 : +1; }     // (-1)^{i+1} for 1-based i

    double delta_x(const ModelState& s, int i, std::uint8_t nv) const {
        const int l = (i - 1 + n_) % n_, r = (i + 1) % n_;
        const double dom = static_cast<double>(nv) - static_cast<double>(s.cells[i]);
        return dom * (sign(l) * s.cells[l] + sign(i) * s.cells[r]);
    }

    int n_;
    double p_, q_;
};

// --------------------------------------------------------------------- toy

class ToyModel final : public PairModel {
public:
    ToyModel(int n, double p, std::vector<double> eps) : n_(n), p_(p), q_(1.0 - p), eps_(std::move(eps)) {
        if (n < 2) throw std::invalid_argument("toy: n >= 2 required");
        if (static_cast<int>(eps_.size()) != n)
            throw std::invalid_argument("toy: eps sequence must have length n");
        double sum = 0.0, amax = 0.0;
        for (double e : eps_) { sum += e; amax = std::max(amax, std::abs(e)); }
        if (std::abs(sum) > 1e-9 * std::max(1.0, amax * n))
            throw std::invalid_argument("toy: eps must sum to zero");
        double eps2 = 0.0;
        for (double e : eps_) eps2 += e * e;
        contract_.name = "toy";
        contract_.dim = 1;
        contract_.lattice.zeta = [&] { const double s = -n * p; return s - std::floor(s); }();
        contract_.constants = PairConstants::scalar(2.0 * p_ * q_ / n, n * p_ * q_, 1.0, p_, 0.0);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, n + p_ * q_ * eps2);
        contract_.analytic_moments = true;
        contract_.finite_proposals = false; // resampled summands are continuous
        contract_.log2_states = std::numeric_limits<double>::infinity();
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = false; // M0 concentrates at pq, not at Q = 2p^2q^2
        contract_.y_law = YLaw{YLawKind::binomial, n, p, -static_cast<double>(n) * p, {}};
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        s.reals.resize(n_);
        for (int i = 0; i < n_; ++i) {
            s.cells[i] = rng.bernoulli(p_) ? 1 : 0;
            s.reals[i] = rng.normal();
        }
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int m = count_of_level(y, contract_.y_law.shift);
        if (m < 0 || m > n_) return false;
        s.cells.resize(n_);
        s.reals.resize(n_);
        fill_subset(s.cells, n_, m, rng);
        for (auto& x : s.reals) x = rng.normal();
        refresh(s);
        return true;
    }

    void refresh(ModelState& s) const override {
        double w = 0.0;
        long long v = 0;
        for (int i = 0; i < n_; ++i) {
            v += s.cells[i];
            w += s.reals[i] + eps_[i] * (static_cast<double>(s.cells[i]) - p_);
        }
        s.w = Eigen::VectorXd::Constant(1, w);
        s.y = static_cast<double>(v) - n_ * p_;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nv = rng.bernoulli(p_) ? 1 : 0;
        const double nx = rng.normal();
        s.w(0) += (nx - s.reals[i]) + eps_[i] * (static_cast<double>(nv) - static_cast<double>(s.cells[i]));
        s.y += static_cast<double>(nv) - static_cast<double>(s.cells[i]);
        s.cells[i] = nv;
        s.reals[i] = nx;
    }

    bool analytic_profile(const ModelState& s, MomentProfile& prof) const override {
        double m0p = 0.0, m0m = 0.0, m1p = 0.0, m1m = 0.0, m2p = 0.0, m2m = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double xi = s.reals[i];
            if (s.cells[i]) {
                m0m += q_;
                m1m += -q_ * (xi + eps_[i]);
                m2m += q_ * (1.0 + (xi + eps_[i]) * (xi + eps_[i]));
            } else {
                m0p += p_;
                m1p += p_ * (eps_[i] - xi);
                m2p += p_ * (1.0 + (eps_[i] - xi) * (eps_[i] - xi));
            }
        }
        prof.m0_plus = m0p / n_;
        prof.m0_minus = m0m / n_;
        prof.m1_plus = Eigen::VectorXd::Constant(1, m1p / n_);
        prof.m1_minus = Eigen::VectorXd::Constant(1, m1m / n_);
        prof.m2_plus = Eigen::MatrixXd::Constant(1, 1, m2p / n_);
        prof.m2_minus = Eigen::MatrixXd::Constant(1, 1, m2m / n_);
        prof.w = s.w;
        prof.y = s.y;
        return true;
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        MomentProfile prof;
        analytic_profile(s, prof);
        r0p = prof.m0_plus - contract_.constants.q;
        r0m = prof.m0_minus - contract_.constants.q;
    }

private:
    int n_;
    double p_, q_;
    std::vector<double> eps_;
};

// ----------------------------------------------------------- pattern01 swap

// Swap chain with ordered index pairs drawn with replacement; preserves the
// conditional law given V = m. w is the centered 11-count, and
// E(dw | state) = -4(n-1)/n^2 * w exactly.
class Pattern01SwapModel final : public PairModel {
public:
    Pattern01SwapModel(int n, int m) : n_(n), m_(m) {
        if (n < 4 || m < 0 || m > n) throw std::invalid_argument("pattern01-swap: need n >= 4, 0 <= m <= n");
        contract_.name = "pattern01-swap";
        contract_.dim = 1;
        contract_.lattice.zeta = 0.0;
        const double lam = 4.0 * (n - 1.0) / (static_cast<double>(n) * n);
        contract_.constants = PairConstants::scalar(lam, 0.0, 2.0, 0.5, 0.0);
        // Var(11-count | V=m) = m(m-1)(n-m)(n-m-1) / ((n-1)^2 (n-2)), exact on
        // the cycle (verified against full enumeration)
        contract_.sigma_w2 = Eigen::VectorXd::Constant(
            1, m * (m - 1.0) * (n - m) * (n - m - 1.0) / ((n - 1.0) * (n - 1.0) * (n - 2.0)));
        contract_.y_mean = m;
        contract_.lambda_classic = lam;
        contract_.log2_states = log_binom(n, m) / std::log(2.0);
        contract_.conditional_sampler = true;
        contract_.case_two = false; // dY = 0 always; classical machinery only
        contract_.y_law = YLaw{YLawKind::degenerate, m, 0.0, 0.0,
                               std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0)};
        contract_.y_law.pmf[static_cast<std::size_t>(m)] = 1.0;
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        fill_subset(s.cells, n_, m_, rng);
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        if (std::llround(y) != m_) return false;
        s = draw(rng);
        return true;
    }

    void refresh(ModelState& s) const override {
        long long x11 = 0;
        for (int i = 0; i < n_; ++i) x11 += s.cells[i] & s.cells[(i + 1) % n_];
        s.w = Eigen::VectorXd::Constant(1, static_cast<double>(x11) - mean_x11());
        s.y = m_;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const int j = static_cast<int>(rng.below(n_));
        if (s.cells[i] == s.cells[j]) return;
        s.w(0) += swap_delta(s, i, j);
        std::swap(s.cells[i], s.cells[j]);
    }

    std::size_t proposal_count(const ModelState&) const override {
        return static_cast<std::size_t>(n_) * n_;
    }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double pr = 1.0 / (static_cast<double>(n_) * n_);
        double dw[1];
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) {
                dw[0] = (s.cells[i] == s.cells[j]) ? 0.0 : swap_delta(s, i, j);
                f(pr, dw, 0);
            }
    }

private:
    double mean_x11() const { return static_cast<double>(m_) * (m_ - 1.0) / (n_ - 1.0); }

    // change of the 11-count when the values at i and j are exchanged
    double swap_delta(const ModelState& s, int i, int j) const {
        if (i == j || s.cells[i] == s.cells[j]) return 0.0;
        long long before = 0, after = 0;
        auto cell = [&](int k, bool swapped) -> int {
            k = (k % n_ + n_) % n_;
            if (swapped && k == i) return s.cells[j];
            if (swapped && k == j) return s.cells[i];
            return s.cells[k];
        };
        // only terms touching i or j can change
        const int ks[4] = {i - 1, i, j - 1, j};
        for (int t = 0; t < 4; ++t) {
            const int k = ks[t];
            bool dup = false;
            for (int u = 0; u < t; ++u)
                if (((ks[u] % n_) + n_) % n_ == ((k % n_) + n_) % n_) dup = true;
            if (dup) continue;
            before += cell(k, false) & cell(k + 1, false);
            after += cell(k, true) & cell(k + 1, true);
        }
        return static_cast<double>(after - before);
    }

    int n_, m_;
};

} // namespace

ModelPtr pattern01_model(int n, double p) { return std::make_shared<Pattern01Model>(n, p); }
ModelPtr evenodd11_model(int n, double p) { return std::make_shared<EvenOdd11Model>(n, p); }
ModelPtr toy_model(int n, double p, std::vector<double> eps) {
    return std::make_shared<ToyModel>(n, p, std::move(eps));
}
ModelPtr pattern01_swap_model(int n, int m) { return std::make_shared<Pattern01SwapModel>(n, m); }

} // namespace cclt

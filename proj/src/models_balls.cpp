#include "cclt/models.hpp"

#include <cmath>
#include <stdexcept>

namespace cclt {

ScoreSpec ScoreSpec::half_split(double q) {
    ScoreSpec s;
    const double v = 1.0 / std::sqrt(q);
    s.length = {0.5, 0.5};
    s.value = {v, -v};
    return s;
}

namespace {

// ---------------------------------------------------------------------- urn

// cells[i] in {0,1,2} for urns 1..3; Y = V, the raw count in urn 2
class UrnModel final : public PairModel, public AnalyticM01 {
public:
    UrnModel(int n, double p1, double p2) : n_(n), p1_(p1), p2_(p2), p3_(1.0 - p1 - p2) {
        if (!(p1 > 0.0 && p2 > 0.0 && p1 + p2 < 1.0))
            throw std::invalid_argument("urn: need p1, p2 > 0 and p1 + p2 < 1");
        if (n < 1) throw std::invalid_argument("urn: n >= 1 required");
        scale_ = std::sqrt(p1_ * p3_ / (1.0 - p2_)) / std::sqrt(static_cast<double>(n));
        contract_.name = "urn";
        contract_.dim = 1;
        contract_.lattice.zeta = 0.0;
        contract_.constants = PairConstants::scalar(1.0 / n, n * p2_ * (1.0 - p2_), 2.0, p2_, 0.0);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, 1.0);
        contract_.y_mean = n * p2_;
        contract_.lambda_classic = (1.0 - p2_) / n;
        contract_.log2_states = n * std::log2(3.0);
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.case_two = false; // M1,- vanishes; classical dY = 0 route only
        contract_.y_law = YLaw{YLawKind::binomial, n, p2_, 0.0, {}};
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        for (auto& c : s.cells) c = draw_urn(rng);
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int k = static_cast<int>(std::llround(y));
        if (k < 0 || k > n_) return false;
        s.cells.assign(n_, 0);
        std::vector<std::uint32_t> idx;
        rng.sample_subset(n_, k, idx);
        for (auto i : idx) s.cells[i] = 1;
        const double r1 = p1_ / (p1_ + p3_);
        for (auto& c : s.cells)
            if (c != 1) c = rng.bernoulli(r1) ? 0 : 2;
        refresh(s);
        return true;
    }

    void refresh(ModelState& s) const override {
        long long n1 = 0, n2 = 0, n3 = 0;
        for (auto c : s.cells) (c == 0 ? n1 : c == 1 ? n2 : n3)++;
        s.w = Eigen::VectorXd::Constant(1, scale_ * (n1 / p1_ - n3 / p3_));
        s.y = static_cast<double>(n2);
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nu = draw_urn(rng);
        s.w(0) += contrib(nu) - contrib(s.cells[i]);
        s.y += (nu == 1 ? 1.0 : 0.0) - (s.cells[i] == 1 ? 1.0 : 0.0);
        s.cells[i] = nu;
    }

    std::size_t proposal_count(const ModelState&) const override { return 3u * n_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double pr[3] = {p1_ / n_, p2_ / n_, p3_ / n_};
        double dw[1];
        for (int i = 0; i < n_; ++i) {
            const double base = contrib(s.cells[i]);
            const int y0 = s.cells[i] == 1 ? 1 : 0;
            for (std::uint8_t u = 0; u < 3; ++u) {
                dw[0] = contrib(u) - base;
                f(pr[u], dw, (u == 1 ? 1 : 0) - y0);
            }
        }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        const double v = s.y;
        m0p = p2_ * (n_ - v) / n_;
        m0m = (1.0 - p2_) * v / n_;
        m1p = Eigen::VectorXd::Constant(1, -p2_ / n_ * s.w(0));
        m1m = Eigen::VectorXd::Constant(1, 0.0);
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        const double lam = contract_.constants.lambda;
        const double yc = s.y - contract_.y_mean;
        r0p = -lam * p2_ * yc;
        r0m = lam * (1.0 - p2_) * yc;
    }

private:
    std::uint8_t draw_urn(Rng& rng) const {
        const double u = rng.uniform();
        return u < p1_ ? 0 : (u < p1_ + p2_ ? 1 : 2);
    }
    double contrib(std::uint8_t c) const {
        return c == 0 ? scale_ / p1_ : c == 2 ? -scale_ / p3_ : 0.0;
    }
    int n_;
    double p1_, p2_, p3_, scale_;
};

// -------------------------------------------------------------------- darts

// cells[i] = 0 for a miss, 1+s for a hit scored by segment s
class DartsModel final : public PairModel, public AnalyticM01 {
public:
    DartsModel(int n, double q, ScoreSpec score) : n_(n), q_(q), p_(1.0 - q), score_(std::move(score)) {
        if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("darts: q in (0,1) required");
        if (n < 1) throw std::invalid_argument("darts: n >= 1 required");
        if (score_.length.empty()) score_ = ScoreSpec::half_split(q_);
        validate_score();
        contract_.name = "darts";
        contract_.dim = 1;
        const double shift = -static_cast<double>(n) * p_;
        contract_.lattice.zeta = shift - std::floor(shift) == 1.0 ? 0.0 : shift - std::floor(shift);
        contract_.constants = PairConstants::scalar(1.0 / n, n * p_ * q_, 2.0, p_, 0.0);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, 1.0);
        contract_.lambda_classic = q_ / n;
        contract_.log2_states = n * std::log2(1.0 + score_.length.size());
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.case_two = false;
        contract_.y_law = YLaw{YLawKind::binomial, n, p_, shift, {}};
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        for (auto& c : s.cells) c = rng.bernoulli(q_) ? static_cast<std::uint8_t>(1 + seg(rng)) : 0;
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int misses = static_cast<int>(std::llround(y - contract_.y_law.shift));
        if (misses < 0 || misses > n_) return false;
        s.cells.assign(n_, 0);
        std::vector<std::uint32_t> idx;
        rng.sample_subset(n_, misses, idx);
        std::vector<bool> miss(n_, false);
        for (auto i : idx) miss[i] = true;
        for (int i = 0; i < n_; ++i)
            if (!miss[i]) s.cells[i] = static_cast<std::uint8_t>(1 + seg(rng));
        refresh(s);
        return true;
    }

    void refresh(ModelState& s) const override {
        double w = 0.0;
        long long misses = 0;
        for (auto c : s.cells) {
            if (c == 0) ++misses;
            else w += score_.value[c - 1];
        }
        s.w = Eigen::VectorXd::Constant(1, w / std::sqrt(static_cast<double>(n_)));
        s.y = static_cast<double>(misses) + contract_.y_law.shift;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nc = rng.bernoulli(q_) ? static_cast<std::uint8_t>(1 + seg(rng)) : 0;
        s.w(0) += (val(nc) - val(s.cells[i])) / std::sqrt(static_cast<double>(n_));
        s.y += (nc == 0 ? 1.0 : 0.0) - (s.cells[i] == 0 ? 1.0 : 0.0);
        s.cells[i] = nc;
    }

    std::size_t proposal_count(const ModelState&) const override {
        return n_ * (1u + score_.length.size());
    }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double rn = std::sqrt(static_cast<double>(n_));
        double dw[1];
        for (int i = 0; i < n_; ++i) {
            const double old = val(s.cells[i]);
            const int y0 = s.cells[i] == 0 ? 1 : 0;
            dw[0] = -old / rn; // new dart misses
            f(p_ / n_, dw, 1 - y0);
            for (std::size_t sgi = 0; sgi < score_.length.size(); ++sgi) {
                dw[0] = (score_.value[sgi] - old) / rn;
                f(q_ * score_.length[sgi] / n_, dw, -y0);
            }
        }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        const double misses = s.y - contract_.y_law.shift;
        m0p = p_ * (n_ - misses) / n_;
        m0m = q_ * misses / n_;
        m1p = Eigen::VectorXd::Constant(1, -p_ / n_ * s.w(0));
        m1m = Eigen::VectorXd::Constant(1, 0.0);
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        const double lam = contract_.constants.lambda;
        r0p = -lam * p_ * s.y;
        r0m = lam * q_ * s.y;
    }

private:
    void validate_score() {
        if (score_.length.size() != score_.value.size() || score_.value.empty())
            throw std::invalid_argument("darts: malformed score table");
        double len = 0.0, m1 = 0.0, m2 = 0.0;
        double lo = score_.value.front(), hi = lo;
        for (std::size_t i = 0; i < score_.length.size(); ++i) {
            if (score_.length[i] <= 0.0) throw std::invalid_argument("darts: segment lengths must be positive");
            len += score_.length[i];
            m1 += score_.length[i] * score_.value[i];
            m2 += score_.length[i] * score_.value[i] * score_.value[i];
            lo = std::min(lo, score_.value[i]);
            hi = std::max(hi, score_.value[i]);
        }
        if (std::abs(len - 1.0) > 1e-9) throw std::invalid_argument("darts: segment lengths must sum to 1");
        if (hi - lo == 0.0)
            throw std::invalid_argument(
                "darts: constant score rejected (Y'=Y would force W'=W)");
        if (std::abs(q_ * m1) > 1e-6) throw std::invalid_argument("darts: score must have zero mean on target");
        if (std::abs(q_ * m2 - 1.0) > 1e-6)
            throw std::invalid_argument("darts: score must have unit second moment on target");
    }

    std::size_t seg(Rng& rng) const {
        double u = rng.uniform();
        for (std::size_t i = 0; i + 1 < score_.length.size(); ++i) {
            if (u < score_.length[i]) return i;
            u -= score_.length[i];
        }
        return score_.length.size() - 1;
    }
    double val(std::uint8_t c) const { return c == 0 ? 0.0 : score_.value[c - 1]; }

    int n_;
    double q_, p_;
    ScoreSpec score_;
};

// -------------------------------------------------------- multivariate darts

// X = (sum S_i (V_i - 1/2), sum S_i) with Rademacher S_i, Bernoulli(1/2) V_i;
// a whole (S_I, V_I) pair is resampled per step
class MultiDartsModel final : public PairModel, public AnalyticM01 {
public:
    explicit MultiDartsModel(int n) : n_(n) {
        if (n < 2) throw std::invalid_argument("multi-darts: n >= 2 required");
        contract_.name = "multi-darts";
        contract_.dim = 2;
        const double shift = -0.5 * n;
        contract_.lattice.zeta = shift - std::floor(shift);
        PairConstants c;
        c.lambda = 1.0 / n;
        c.sigma_y2 = 0.25 * n;
        c.q = c.lambda * c.sigma_y2;
        c.a_plus = c.a_minus = 0.5;
        c.b_plus = Eigen::VectorXd::Zero(2);
        c.b_minus = Eigen::VectorXd::Zero(2);
        c.psi_plus.resize(2, 2);
        c.psi_plus << 0.25, -0.125, -0.5, 0.25;
        c.psi_minus.resize(2, 2);
        c.psi_minus << 0.25, 0.125, 0.5, 0.25;
        c.psi_mat = c.psi_plus + c.psi_minus;
        contract_.constants = std::move(c);
        contract_.sigma_w2 = Eigen::Vector2d(0.25 * n, static_cast<double>(n));
        contract_.log2_states = 2.0 * n;
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.y_law = YLaw{YLawKind::binomial, n, 0.5, shift, {}};
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(n_);
        s.reals.resize(n_);
        for (int i = 0; i < n_; ++i) {
            s.cells[i] = rng.bernoulli(0.5) ? 1 : 0;
            s.reals[i] = rng.bernoulli(0.5) ? 1.0 : -1.0;
        }
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int m = static_cast<int>(std::llround(y + 0.5 * n_));
        if (m < 0 || m > n_) return false;
        s.cells.assign(n_, 0);
        s.reals.resize(n_);
        std::vector<std::uint32_t> idx;
        rng.sample_subset(n_, m, idx);
        for (auto i : idx) s.cells[i] = 1;
        for (auto& x : s.reals) x = rng.bernoulli(0.5) ? 1.0 : -1.0;
        refresh(s);
        return true;
    }

    void refresh(ModelState& s) const override {
        double x1 = 0.0, x2 = 0.0;
        long long v = 0;
        for (int i = 0; i < n_; ++i) {
            v += s.cells[i];
            x1 += s.reals[i] * (static_cast<double>(s.cells[i]) - 0.5);
            x2 += s.reals[i];
        }
        s.w = Eigen::Vector2d(x1, x2);
        s.y = static_cast<double>(v) - 0.5 * n_;
    }

    void step(ModelState& s, Rng& rng) const override {
        const int i = static_cast<int>(rng.below(n_));
        const std::uint8_t nv = rng.bernoulli(0.5) ? 1 : 0;
        const double ns = rng.bernoulli(0.5) ? 1.0 : -1.0;
        s.w(0) += ns * (static_cast<double>(nv) - 0.5) - s.reals[i] * (static_cast<double>(s.cells[i]) - 0.5);
        s.w(1) += ns - s.reals[i];
        s.y += static_cast<double>(nv) - static_cast<double>(s.cells[i]);
        s.cells[i] = nv;
        s.reals[i] = ns;
    }

    std::size_t proposal_count(const ModelState&) const override { return 4u * n_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        const double pr = 0.25 / n_;
        double dw[2];
        for (int i = 0; i < n_; ++i) {
            const double s0 = s.reals[i];
            const double vb = static_cast<double>(s.cells[i]) - 0.5;
            for (int nv = 0; nv <= 1; ++nv)
                for (int sg = -1; sg <= 1; sg += 2) {
                    const double ns = static_cast<double>(sg);
                    dw[0] = ns * (nv - 0.5) - s0 * vb;
                    dw[1] = ns - s0;
                    f(pr, dw, nv - static_cast<int>(s.cells[i]));
                }
        }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        m0p = 0.25 - s.y / (2.0 * n_);
        m0m = 0.25 + s.y / (2.0 * n_);
        m1p = -(contract_.constants.psi_plus * s.w) / n_;
        m1m = -(contract_.constants.psi_minus * s.w) / n_;
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        r0p = -0.5 * s.y / n_;
        r0m = 0.5 * s.y / n_;
    }

private:
    int n_;
};

} // namespace

ModelPtr urn_model(int n, double p1, double p2) { return std::make_shared<UrnModel>(n, p1, p2); }
ModelPtr darts_model(int n, double q, const ScoreSpec& score) {
    return std::make_shared<DartsModel>(n, q, score);
}
ModelPtr multivariate_darts_model(int n) { return std::make_shared<MultiDartsModel>(n); }

} // namespace cclt

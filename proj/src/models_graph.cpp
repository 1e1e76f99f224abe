#include "cclt/models.hpp"

#include <cmath>
#include <stdexcept>

namespace cclt {

GraphStats graph_stats(const std::vector<std::uint8_t>& cells, int n) {
    GraphStats g;
    const int words = (n + 63) / 64;
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(n) * words, 0);
    std::vector<int> deg(n, 0);
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i)
            if (cells[edge_index(i, j)]) {
                ++g.edges;
                ++deg[i];
                ++deg[j];
                rows[static_cast<std::size_t>(i) * words + j / 64] |= 1ULL << (j % 64);
                rows[static_cast<std::size_t>(j) * words + i / 64] |= 1ULL << (i % 64);
            }
    for (int i = 0; i < n; ++i) g.wedges += static_cast<long long>(deg[i]) * (deg[i] - 1) / 2;
    long long t3 = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i)
            if (cells[edge_index(i, j)]) {
                long long common = 0;
                for (int wds = 0; wds < words; ++wds)
                    common += __builtin_popcountll(rows[static_cast<std::size_t>(i) * words + wds] &
                                                   rows[static_cast<std::size_t>(j) * words + wds]);
                t3 += common;
            }
    g.triangles = t3 / 3;
    return g;
}

void swap_chain_degree_probs(int n, int m, int d_i, double& up, double& down) {
    const double nn = binom(n, 2);
    up = 2.0 * (n - 1.0 - d_i) * (m - d_i) / (nn * nn);
    down = 2.0 * d_i * (nn - m - (n - 1.0 - d_i)) / (nn * nn);
}

namespace {

struct DegreeCache {
    std::vector<int> deg;
    void compute(const std::vector<std::uint8_t>& cells, int n) {
        deg.assign(n, 0);
        std::size_t e = 0;
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i, ++e)
                if (cells[e]) {
                    ++deg[i];
                    ++deg[j];
                }
    }
};

// shared plumbing for the G(n,p)-based models
class ErdosRenyiBase : public PairModel {
public:
    ErdosRenyiBase(int n, double p) : n_(n), p_(p), q_(1.0 - p), slots_(n * (n - 1) / 2) {
        if (n < 4) throw std::invalid_argument("graph models: n >= 4 required");
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("graph models: p in (0,1) required");
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.resize(slots_);
        for (auto& c : s.cells) c = rng.bernoulli(p_) ? 1 : 0;
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        const int m = static_cast<int>(std::llround(y - contract_.y_law.shift));
        if (m < 0 || m > static_cast<int>(slots_)) return false;
        s.cells.assign(slots_, 0);
        std::vector<std::uint32_t> idx;
        rng.sample_subset(slots_, static_cast<std::size_t>(m), idx);
        for (auto e : idx) s.cells[e] = 1;
        refresh(s);
        return true;
    }

    void step(ModelState& s, Rng& rng) const override {
        const std::size_t e = static_cast<std::size_t>(rng.below(slots_));
        const std::uint8_t nv = rng.bernoulli(p_) ? 1 : 0;
        if (nv == s.cells[e]) return;
        s.cells[e] = nv;
        refresh(s); // steps are for diagnostics only; keep them simple
    }

protected:
    int n_;
    double p_, q_;
    std::size_t slots_;
};

// ------------------------------------------------------- wedge given edges

// X = sum over wedges of centered edge products; single-slot edge Glauber
class WedgeEdgeModel final : public ErdosRenyiBase, public AnalyticM01 {
public:
    WedgeEdgeModel(int n, double p) : ErdosRenyiBase(n, p) {
        const double nn = static_cast<double>(slots_);
        contract_.name = "wedge-edge";
        contract_.dim = 1;
        const double shift = -nn * p_;
        contract_.lattice.zeta = shift - std::floor(shift);
        contract_.constants =
            PairConstants::scalar(1.0 / nn, nn * p_ * q_, 2.0, p_, -2.0 * (n_ - 2.0) * p_ * q_);
        contract_.sigma_w2 = Eigen::VectorXd::Constant(1, nn * (n_ - 2.0) * p_ * p_ * q_ * q_);
        contract_.log2_states = nn;
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.y_law = YLaw{YLawKind::binomial, static_cast<int>(slots_), p_, shift, {}};
    }

    void refresh(ModelState& s) const override {
        DegreeCache dc;
        dc.compute(s.cells, n_);
        long long edges = 0;
        for (auto c : s.cells) edges += c;
        double sum_db2 = 0.0;
        const double dbar_off = (n_ - 1.0) * p_;
        for (int v = 0; v < n_; ++v) {
            const double db = dc.deg[v] - dbar_off;
            sum_db2 += db * db;
        }
        const double nn = static_cast<double>(slots_);
        const double y = static_cast<double>(edges) - nn * p_;
        s.y = y;
        s.w = Eigen::VectorXd::Constant(1, 0.5 * sum_db2 - nn * p_ * q_ - (q_ - p_) * y);
    }

    std::size_t proposal_count(const ModelState&) const override { return 2u * slots_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        DegreeCache dc;
        dc.compute(s.cells, n_);
        const double dbar_off = (n_ - 1.0) * p_;
        const double pr = 1.0 / static_cast<double>(slots_);
        double dw[1];
        std::size_t e = 0;
        for (int j = 1; j < n_; ++j)
            for (int i = 0; i < j; ++i, ++e) {
                const double wbar = static_cast<double>(s.cells[e]) - p_;
                const double s_e = (dc.deg[i] - dbar_off) + (dc.deg[j] - dbar_off) - 2.0 * wbar;
                if (s.cells[e]) { // 1 -> 0
                    dw[0] = -s_e;
                    f(pr * q_, dw, -1);
                } else {
                    dw[0] = s_e;
                    f(pr * p_, dw, +1);
                }
                dw[0] = 0.0;
                f(pr * (s.cells[e] ? p_ : q_), dw, 0);
            }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        const double lam = contract_.constants.lambda;
        const double x = s.w(0), y = s.y;
        m0p = p_ * q_ - lam * p_ * y;
        m0m = p_ * q_ + lam * q_ * y;
        m1p = Eigen::VectorXd::Constant(1, -lam * (2.0 * p_ * x - 2.0 * (n_ - 2.0) * p_ * q_ * y));
        m1m = Eigen::VectorXd::Constant(1, -lam * (2.0 * q_ * x + 2.0 * (n_ - 2.0) * p_ * q_ * y));
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        const double lam = contract_.constants.lambda;
        r0p = -lam * p_ * s.y;
        r0m = lam * q_ * s.y;
    }
};

// ------------------------------------------------- (triangle, wedge) vector

class TriangleWedgeModel final : public ErdosRenyiBase, public AnalyticM01 {
public:
    TriangleWedgeModel(int n, double p) : ErdosRenyiBase(n, p) {
        const double nn = static_cast<double>(slots_);
        contract_.name = "triangle-wedge";
        contract_.dim = 2;
        const double shift = -nn * p_;
        contract_.lattice.zeta = shift - std::floor(shift);
        PairConstants c;
        c.lambda = 1.0 / nn;
        c.sigma_y2 = nn * p_ * q_;
        c.q = c.lambda * c.sigma_y2;
        c.a_plus = p_;
        c.a_minus = q_;
        c.b_plus = Eigen::Vector2d(0.0, -2.0 * (n_ - 2.0) * p_ * q_);
        c.b_minus = -c.b_plus;
        c.psi_plus.resize(2, 2);
        c.psi_plus << 3.0 * p_, -p_ * q_, 0.0, 2.0 * p_;
        c.psi_minus.resize(2, 2);
        c.psi_minus << 3.0 * q_, p_ * q_, 0.0, 2.0 * q_;
        c.psi_mat = c.psi_plus + c.psi_minus; // diag(3, 2)
        contract_.constants = std::move(c);
        const double pq = p_ * q_;
        contract_.sigma_w2 =
            Eigen::Vector2d(binom(n_, 3) * pq * pq * pq, nn * (n_ - 2.0) * pq * pq);
        contract_.log2_states = nn;
        contract_.conditional_sampler = true;
        contract_.exact_linear_r0 = true;
        contract_.y_law = YLaw{YLawKind::binomial, static_cast<int>(slots_), p_, shift, {}};
    }

    void refresh(ModelState& s) const override {
        const GraphStats g = graph_stats(s.cells, n_);
        const double nn = static_cast<double>(slots_);
        const double e = static_cast<double>(g.edges);
        const double u = static_cast<double>(g.wedges);
        const double t = static_cast<double>(g.triangles);
        const double t_tilde =
            t - p_ * u + p_ * p_ * (n_ - 2.0) * e - binom(n_, 3) * p_ * p_ * p_;
        const double u_tilde = u - 2.0 * p_ * (n_ - 2.0) * e + nn * (n_ - 2.0) * p_ * p_;
        s.w = Eigen::Vector2d(t_tilde, u_tilde);
        s.y = e - nn * p_;
    }

    std::size_t proposal_count(const ModelState&) const override { return 2u * slots_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        // per-slot deltas: dT~ = dwbar * t_e, dU~ = dwbar * s_e, with
        // t_e = sum_c wbar_ac wbar_bc and s_e = sum_c (wbar_ac + wbar_bc)
        DegreeCache dc;
        dc.compute(s.cells, n_);
        const int words = (n_ + 63) / 64;
        std::vector<std::uint64_t> rows(static_cast<std::size_t>(n_) * words, 0);
        std::size_t e = 0;
        for (int j = 1; j < n_; ++j)
            for (int i = 0; i < j; ++i, ++e)
                if (s.cells[e]) {
                    rows[static_cast<std::size_t>(i) * words + j / 64] |= 1ULL << (j % 64);
                    rows[static_cast<std::size_t>(j) * words + i / 64] |= 1ULL << (i % 64);
                }
        const double dbar_off = (n_ - 1.0) * p_;
        const double pr = 1.0 / static_cast<double>(slots_);
        double dw[2];
        e = 0;
        for (int j = 1; j < n_; ++j)
            for (int i = 0; i < j; ++i, ++e) {
                const double wbar = static_cast<double>(s.cells[e]) - p_;
                long long common = 0;
                for (int wds = 0; wds < words; ++wds)
                    common += __builtin_popcountll(rows[static_cast<std::size_t>(i) * words + wds] &
                                                   rows[static_cast<std::size_t>(j) * words + wds]);
                const double di = dc.deg[i] - s.cells[e];
                const double dj = dc.deg[j] - s.cells[e];
                const double t_e = static_cast<double>(common) - p_ * (di + dj) + (n_ - 2.0) * p_ * p_;
                const double s_e = (dc.deg[i] - dbar_off) + (dc.deg[j] - dbar_off) - 2.0 * wbar;
                if (s.cells[e]) {
                    dw[0] = -t_e;
                    dw[1] = -s_e;
                    f(pr * q_, dw, -1);
                } else {
                    dw[0] = t_e;
                    dw[1] = s_e;
                    f(pr * p_, dw, +1);
                }
                dw[0] = dw[1] = 0.0;
                f(pr * (s.cells[e] ? p_ : q_), dw, 0);
            }
    }

    void analytic_m01(const ModelState& s, double& m0p, double& m0m,
                      Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const override {
        const double lam = contract_.constants.lambda;
        m0p = p_ * q_ - lam * p_ * s.y;
        m0m = p_ * q_ + lam * q_ * s.y;
        m1p = -lam * (contract_.constants.psi_plus * s.w + contract_.constants.b_plus * s.y);
        m1m = -lam * (contract_.constants.psi_minus * s.w + contract_.constants.b_minus * s.y);
    }

    void r0(const ModelState& s, double& r0p, double& r0m) const override {
        const double lam = contract_.constants.lambda;
        r0p = -lam * p_ * s.y;
        r0m = lam * q_ * s.y;
    }
};

// ------------------------------------------------------------ wedge swap

// ordered slot pairs drawn with replacement, values exchanged; preserves
// G(n,m) and E(dw | state) = -4(N-1)/N^2 * w exactly
class WedgeSwapModel final : public PairModel {
public:
    WedgeSwapModel(int n, int m) : n_(n), m_(m), slots_(n * (n - 1) / 2) {
        if (n < 4 || m < 0 || m > static_cast<int>(slots_))
            throw std::invalid_argument("wedge-swap: need n >= 4, 0 <= m <= N");
        const double nn = static_cast<double>(slots_);
        contract_.name = "wedge-edge-swap";
        contract_.dim = 1;
        const double lam = 4.0 * (nn - 1.0) / (nn * nn);
        contract_.constants = PairConstants::scalar(lam, 0.0, 2.0, 0.5, 0.0);
        // Var(U | E=m) from hypergeometric edge moments: pairs of wedges share
        // 2, 1 or 0 edges (distinct wedges share at most one)
        {
            const double w_cnt = n * (n - 1.0) * (n - 2.0) / 2.0;
            const double s1 = nn * (n - 2.0) * (2.0 * n - 5.0); // unordered share-1 pairs
            auto mu = [&](int j) {
                double r = 1.0;
                for (int i = 0; i < j; ++i) r *= (m - i) / (nn - i);
                return m >= j ? r : 0.0;
            };
            const double eu = w_cnt * mu(2);
            const double eu2 = w_cnt * mu(2) + 2.0 * s1 * mu(3) +
                               (w_cnt * w_cnt - w_cnt - 2.0 * s1) * mu(4);
            contract_.sigma_w2 = Eigen::VectorXd::Constant(1, eu2 - eu * eu);
        }
        contract_.y_mean = m;
        contract_.lambda_classic = lam;
        contract_.log2_states = log_binom(static_cast<int>(slots_), m) / std::log(2.0);
        contract_.conditional_sampler = true;
        contract_.case_two = false;
        contract_.y_law = YLaw{YLawKind::degenerate, m, 0.0, 0.0,
                               std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0)};
        contract_.y_law.pmf[static_cast<std::size_t>(m)] = 1.0;
    }

    ModelState draw(Rng& rng) const override {
        ModelState s;
        s.cells.assign(slots_, 0);
        std::vector<std::uint32_t> idx;
        rng.sample_subset(slots_, static_cast<std::size_t>(m_), idx);
        for (auto e : idx) s.cells[e] = 1;
        refresh(s);
        return s;
    }

    bool draw_given_y(double y, ModelState& s, Rng& rng) const override {
        if (std::llround(y) != m_) return false;
        s = draw(rng);
        return true;
    }

    void refresh(ModelState& s) const override {
        DegreeCache dc;
        dc.compute(s.cells, n_);
        long long u = 0;
        for (int v = 0; v < n_; ++v) u += static_cast<long long>(dc.deg[v]) * (dc.deg[v] - 1) / 2;
        s.w = Eigen::VectorXd::Constant(1, static_cast<double>(u) - mean_u());
        s.y = m_;
    }

    void step(ModelState& s, Rng& rng) const override {
        const std::size_t e = static_cast<std::size_t>(rng.below(slots_));
        const std::size_t f2 = static_cast<std::size_t>(rng.below(slots_));
        if (s.cells[e] == s.cells[f2]) return;
        DegreeCache dc;
        dc.compute(s.cells, n_);
        s.w(0) += swap_delta_u(dc, e, f2, s.cells[e]);
        std::swap(s.cells[e], s.cells[f2]);
    }

    std::size_t proposal_count(const ModelState&) const override { return slots_ * slots_; }

    void for_each_proposal(const ModelState& s, const ProposalVisitor& f) const override {
        DegreeCache dc;
        dc.compute(s.cells, n_);
        const double pr = 1.0 / (static_cast<double>(slots_) * slots_);
        double dw[1];
        for (std::size_t e = 0; e < slots_; ++e)
            for (std::size_t g = 0; g < slots_; ++g) {
                dw[0] = (s.cells[e] == s.cells[g]) ? 0.0 : swap_delta_u(dc, e, g, s.cells[e]);
                f(pr, dw, 0);
            }
    }

private:
    double mean_u() const { return 2.0 * m_ * (m_ - 1.0) / (n_ + 1.0); }

    // wedge-count change when the (unequal) values at slots e, g are swapped
    double swap_delta_u(const DegreeCache& dc, std::size_t e, std::size_t g, bool e_present) const {
        const std::size_t from = e_present ? e : g; // present slot loses its edge
        const std::size_t to = e_present ? g : e;
        const auto [a, b] = edge_endpoints(from);
        const auto [c, d] = edge_endpoints(to);
        double delta = -(dc.deg[a] - 1.0) - (dc.deg[b] - 1.0);
        const double dc1 = dc.deg[c] - (c == a) - (c == b);
        const double dd1 = dc.deg[d] - (d == a) - (d == b);
        return delta + dc1 + dd1;
    }

    int n_, m_;
    std::size_t slots_;
};

} // namespace

ModelPtr wedge_edge_model(int n, double p) { return std::make_shared<WedgeEdgeModel>(n, p); }
ModelPtr triangle_wedge_model(int n, double p) { return std::make_shared<TriangleWedgeModel>(n, p); }
ModelPtr wedge_edge_swap_model(int n, int m) { return std::make_shared<WedgeSwapModel>(n, m); }

ModelPtr make_model(const std::string& name, int n, double p, const std::vector<double>& extra) {
    if (name == "pattern01") return pattern01_model(n, p);
    if (name == "evenodd11") return evenodd11_model(n, p);
    if (name == "wedge-edge") return wedge_edge_model(n, p);
    if (name == "triangle-wedge") return triangle_wedge_model(n, p);
    if (name == "urn") {
        const double p1 = extra.size() > 0 ? extra[0] : (1.0 - p) / 2.0;
        return urn_model(n, p1, p);
    }
    if (name == "darts") return darts_model(n, 1.0 - p);
    if (name == "multi-darts") return multivariate_darts_model(n);
    if (name == "toy") return toy_model(n, p, std::vector<double>(n, 0.0));
    throw std::invalid_argument("unknown model name: " + name);
}

} // namespace cclt

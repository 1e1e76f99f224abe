#include "cclt/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "cclt/models.hpp"
#include "cclt/parallel.hpp"
#include "cclt/ylaw.hpp"

namespace cclt {

namespace {

inline std::uint32_t gray(std::uint32_t i) { return i ^ (i >> 1); }

// cyclic pair contribution at (i, i+1) for the binary statistics
inline long long pair_term(BinaryStat stat, int i, int ci, int cj) {
    switch (stat) {
        case BinaryStat::ones: return 0;
        case BinaryStat::pattern01_u: return (1 - ci) & cj;
        case BinaryStat::x11: return ci & cj;
        case BinaryStat::evenodd_x: return (ci & cj) ? ((i % 2 == 0) ? -1 : +1) : 0;
    }
    return 0;
}

struct BinaryGray {
    int n;
    std::vector<std::uint8_t> cells;
    long long v = 0, s = 0;
    BinaryStat stat;

    void init(std::uint32_t word, BinaryStat st) {
        stat = st;
        cells.assign(n, 0);
        v = s = 0;
        for (int i = 0; i < n; ++i) cells[i] = (word >> i) & 1u;
        for (int i = 0; i < n; ++i) {
            v += cells[i];
            s += pair_term(stat, i, cells[i], cells[(i + 1) % n]);
        }
    }

    void flip(int b) {
        const int l = (b - 1 + n) % n, r = (b + 1) % n;
        s -= pair_term(stat, l, cells[l], cells[b]) + pair_term(stat, b, cells[b], cells[r]);
        cells[b] ^= 1;
        v += cells[b] ? 1 : -1;
        s += pair_term(stat, l, cells[l], cells[b]) + pair_term(stat, b, cells[b], cells[r]);
    }
};

} // namespace

LevelSums enumerate_binary(int n, BinaryStat stat, int workers) {
    if (n < 3 || n > 22) throw std::invalid_argument("enumerate_binary: 3 <= n <= 22 required");
    const std::uint64_t total = 1ULL << n;
    const std::size_t nblocks = workers > 1 ? 64 : 1;
    const std::uint64_t per = (total + nblocks - 1) / nblocks;

    auto blocks = parallel_blocks<LevelSums>(nblocks, workers, [&](std::size_t b) {
        LevelSums acc;
        acc.count.assign(n + 1, 0);
        acc.s1.assign(n + 1, 0.0L);
        acc.s2.assign(n + 1, 0.0L);
        const std::uint64_t lo = b * per, hi = std::min(total, lo + per);
        if (lo >= hi) return acc;
        BinaryGray g;
        g.n = n;
        g.init(gray(static_cast<std::uint32_t>(lo)), stat);
        for (std::uint64_t i = lo;; ++i) {
            acc.count[g.v]++;
            acc.s1[g.v] += static_cast<long double>(g.s);
            acc.s2[g.v] += static_cast<long double>(g.s) * g.s;
            if (i + 1 >= hi) break;
            g.flip(std::countr_zero(i + 1));
        }
        return acc;
    });
    LevelSums out = blocks[0];
    for (std::size_t b = 1; b < blocks.size(); ++b)
        for (int v = 0; v <= n; ++v) {
            out.count[v] += blocks[b].count[v];
            out.s1[v] += blocks[b].s1[v];
            out.s2[v] += blocks[b].s2[v];
        }
    return out;
}

WeightedLevels enumerate_binary_weighted(int n, const std::vector<double>& probs, BinaryStat stat) {
    if (n < 3 || n > 20) throw std::invalid_argument("enumerate_binary_weighted: 3 <= n <= 20");
    if (static_cast<int>(probs.size()) != n)
        throw std::invalid_argument("enumerate_binary_weighted: probs size mismatch");
    std::vector<long double> wsum(n + 1, 0.0L), s1(n + 1, 0.0L), s2(n + 1, 0.0L);
    BinaryGray g;
    g.n = n;
    g.init(0, stat);
    long double w = 1.0L;
    for (int i = 0; i < n; ++i) w *= (1.0L - probs[i]);
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t i = 0;; ++i) {
        wsum[g.v] += w;
        s1[g.v] += w * g.s;
        s2[g.v] += w * g.s * g.s;
        if (i + 1 >= total) break;
        const int b = std::countr_zero(i + 1);
        g.flip(b);
        // weight ratio for the flipped site
        w *= g.cells[b] ? static_cast<long double>(probs[b]) / (1.0L - probs[b])
                        : static_cast<long double>(1.0L - probs[b]) / probs[b];
    }
    WeightedLevels out;
    out.prob.resize(n + 1);
    out.mean.resize(n + 1);
    out.m2.resize(n + 1);
    for (int v = 0; v <= n; ++v) {
        out.prob[v] = static_cast<double>(wsum[v]);
        out.mean[v] = wsum[v] > 0.0L ? static_cast<double>(s1[v] / wsum[v]) : 0.0;
        out.m2[v] = wsum[v] > 0.0L ? static_cast<double>(s2[v] / wsum[v]) : 0.0;
    }
    return out;
}

namespace {

struct GraphGray {
    int n, slots;
    std::uint64_t g = 0;           // edge bitmap
    std::vector<std::uint64_t> row; // adjacency rows (n <= 8)
    std::vector<int> deg;
    long long e = 0, u = 0, t = 0;

    void init(int nv, std::uint64_t word) {
        n = nv;
        slots = nv * (nv - 1) / 2;
        g = 0;
        row.assign(n, 0);
        deg.assign(n, 0);
        e = u = t = 0;
        for (int b = 0; b < slots; ++b)
            if ((word >> b) & 1ULL) flip(b);
    }

    void flip(int b) {
        const auto [a, c] = edge_endpoints(static_cast<std::size_t>(b));
        const bool adding = !((g >> b) & 1ULL);
        const long long common =
            static_cast<long long>(__builtin_popcountll(row[a] & row[c]));
        if (adding) {
            u += deg[a] + deg[c];
            t += common;
            ++deg[a];
            ++deg[c];
            ++e;
            row[a] |= 1ULL << c;
            row[c] |= 1ULL << a;
            g |= 1ULL << b;
        } else {
            --deg[a];
            --deg[c];
            --e;
            row[a] &= ~(1ULL << c);
            row[c] &= ~(1ULL << a);
            g &= ~(1ULL << b);
            u -= deg[a] + deg[c];
            t -= common;
        }
    }
};

} // namespace

GraphLevelSums enumerate_graphs(int n, int workers) {
    if (n < 3 || n > 8) throw std::invalid_argument("enumerate_graphs: 3 <= n <= 8 (N <= 28) required");
    const int slots = n * (n - 1) / 2;
    const std::uint64_t total = 1ULL << slots;
    const std::size_t nblocks = workers > 1 ? 256 : 1;
    const std::uint64_t per = (total + nblocks - 1) / nblocks;

    auto blocks = parallel_blocks<GraphLevelSums>(nblocks, workers, [&](std::size_t blk) {
        GraphLevelSums acc;
        acc.count.assign(slots + 1, 0);
        acc.su.assign(slots + 1, 0.0L);
        acc.su2.assign(slots + 1, 0.0L);
        acc.st.assign(slots + 1, 0.0L);
        acc.st2.assign(slots + 1, 0.0L);
        acc.sut.assign(slots + 1, 0.0L);
        const std::uint64_t lo = blk * per, hi = std::min(total, lo + per);
        if (lo >= hi) return acc;
        GraphGray gg;
        gg.init(n, gray(static_cast<std::uint32_t>(lo)));
        for (std::uint64_t i = lo;; ++i) {
            acc.count[gg.e]++;
            const long double u = gg.u, t = gg.t;
            acc.su[gg.e] += u;
            acc.su2[gg.e] += u * u;
            acc.st[gg.e] += t;
            acc.st2[gg.e] += t * t;
            acc.sut[gg.e] += u * t;
            if (i + 1 >= hi) break;
            gg.flip(std::countr_zero(i + 1));
        }
        return acc;
    });
    GraphLevelSums out = blocks[0];
    for (std::size_t b = 1; b < blocks.size(); ++b)
        for (int m = 0; m <= slots; ++m) {
            out.count[m] += blocks[b].count[m];
            out.su[m] += blocks[b].su[m];
            out.su2[m] += blocks[b].su2[m];
            out.st[m] += blocks[b].st[m];
            out.st2[m] += blocks[b].st2[m];
            out.sut[m] += blocks[b].sut[m];
        }
    return out;
}

void for_all_binary(int n, const std::function<void(const std::vector<std::uint8_t>&)>& visit) {
    if (n < 3 || n > 24) throw std::invalid_argument("for_all_binary: n too large");
    BinaryGray g;
    g.n = n;
    g.init(0, BinaryStat::ones);
    const std::uint64_t total = 1ULL << n;
    for (std::uint64_t i = 0;; ++i) {
        visit(g.cells);
        if (i + 1 >= total) break;
        g.flip(std::countr_zero(i + 1));
    }
}

void for_all_graphs(int n, const std::function<void(const std::vector<std::uint8_t>&)>& visit) {
    if (n < 3 || n > 8) throw std::invalid_argument("for_all_graphs: n <= 8 required");
    const int slots = n * (n - 1) / 2;
    std::vector<std::uint8_t> cells(slots, 0);
    const std::uint64_t total = 1ULL << slots;
    for (std::uint64_t i = 0;; ++i) {
        visit(cells);
        if (i + 1 >= total) break;
        cells[std::countr_zero(i + 1)] ^= 1;
    }
}

UrnConditional urn_conditional(int n, double p1, double p2, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("urn_conditional: k outside 0..n");
    (void)p1; // the conditional mean vanishes for every p1
    const int r = n - k;
    // given V = k the other balls are iid urn 1 with probability p1/(p1+p3)
    UrnConditional out;
    out.mean_w = 0.0; // exact for all k: rho/p1 - (1-rho)/p3 = 0
    out.var_w = static_cast<double>(r) / (static_cast<double>(n) * (1.0 - p2));
    return out;
}

UrnConditional urn_conditional_enumerated(int n, double p1, double p2, int k) {
    if (n > 12) throw std::invalid_argument("urn_conditional_enumerated: n <= 12 required");
    const double p3 = 1.0 - p1 - p2;
    const double scale = std::sqrt(p1 * p3 / (1.0 - p2) / static_cast<double>(n));
    long double wsum = 0.0L, s1 = 0.0L, s2 = 0.0L;
    std::vector<int> urn(n, 0);
    const double pr[3] = {p1, p2, p3};
    for (;;) {
        int v = 0;
        long double w = 1.0L;
        double stat = 0.0;
        for (int i = 0; i < n; ++i) {
            w *= pr[urn[i]];
            if (urn[i] == 1) ++v;
            else stat += urn[i] == 0 ? scale / p1 : -scale / p3;
        }
        if (v == k) {
            wsum += w;
            s1 += w * stat;
            s2 += w * stat * stat;
        }
        int pos = 0;
        while (pos < n && urn[pos] == 2) urn[pos++] = 0;
        if (pos == n) break;
        ++urn[pos];
    }
    UrnConditional out;
    out.mean_w = static_cast<double>(s1 / wsum);
    out.var_w = static_cast<double>(s2 / wsum - (s1 / wsum) * (s1 / wsum));
    return out;
}

DecompositionCheck exact_decomposition_check(int n, double p, const SubgraphSpec& h) {
    if (n > 7) throw std::invalid_argument("exact_decomposition_check: n <= 7 required");
    const SubgraphDecomposition dec = subgraph_decomposition(n, p, h);
    const int slots = n * (n - 1) / 2;
    const double q = 1.0 - p;
    const double nn = slots;

    std::vector<long double> sum_rh(slots + 1, 0.0L), sum_rh2(slots + 1, 0.0L);
    double max_abs = 0.0;

    GraphGray gg;
    gg.init(n, 0);
    const std::uint64_t total = 1ULL << slots;
    for (std::uint64_t i = 0;; ++i) {
        const double e = static_cast<double>(gg.e);
        const double u = static_cast<double>(gg.u);
        const double t = static_cast<double>(gg.t);
        const double t_tilde = t - p * u + p * p * (n - 2.0) * e - binom(n, 3) * p * p * p;
        const double u_tilde = u - 2.0 * p * (n - 2.0) * e + nn * (n - 2.0) * p * p;
        long long hc = 0;
        for (const auto mask : dec.masks)
            if ((gg.g & mask) == mask) ++hc;
        const double hhat = static_cast<double>(hc) - dec.edge_slope * e;
        const double rh = (hhat - dec.mean_hhat) - dec.coef_t * t_tilde - dec.coef_u * u_tilde;
        sum_rh[gg.e] += rh;
        sum_rh2[gg.e] += static_cast<long double>(rh) * rh;
        max_abs = std::max(max_abs, std::abs(rh));
        if (i + 1 >= total) break;
        gg.flip(std::countr_zero(i + 1));
    }
    long double er = 0.0L, er2 = 0.0L;
    for (int m = 0; m <= slots; ++m) {
        const long double w = std::pow(static_cast<long double>(p), m) *
                              std::pow(static_cast<long double>(q), slots - m);
        er += w * sum_rh[m];
        er2 += w * sum_rh2[m];
    }
    DecompositionCheck out;
    out.er_h = static_cast<double>(er);
    out.er_h2 = static_cast<double>(er2);
    out.var_hhat = dec.var_hhat;
    out.order_ratio = out.er_h2 / (out.var_hhat / static_cast<double>(n));
    out.max_abs_rh = max_abs;
    return out;
}

} // namespace cclt

#include "cclt/subgraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cclt/models.hpp"
#include "cclt/ylaw.hpp"

namespace cclt {

void SubgraphSpec::validate() const {
    if (v < 2 || v > 8) throw std::invalid_argument("subgraph: 2 <= v <= 8 required");
    std::vector<int> deg(v, 0);
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= v || b >= v)
            throw std::invalid_argument("subgraph: malformed edge");
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) throw std::invalid_argument("subgraph: duplicate edge");
        ++deg[a];
        ++deg[b];
    }
    for (int d : deg)
        if (d == 0) throw std::invalid_argument("subgraph: isolated vertex");
}

SubgraphSpec SubgraphSpec::triangle() { return {3, {{0, 1}, {1, 2}, {2, 0}}}; }
SubgraphSpec SubgraphSpec::wedge() { return {3, {{0, 1}, {0, 2}}}; }
SubgraphSpec SubgraphSpec::k4() {
    return {4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
}
SubgraphSpec SubgraphSpec::p4() { return {4, {{0, 1}, {1, 2}, {2, 3}}}; }
SubgraphSpec SubgraphSpec::c4() { return {4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}}; }

SubgraphSpec SubgraphSpec::named(const std::string& name) {
    if (name == "triangle") return triangle();
    if (name == "wedge") return wedge();
    if (name == "k4") return k4();
    if (name == "p4") return p4();
    if (name == "c4") return c4();
    throw std::invalid_argument("unknown subgraph name: " + name);
}

namespace {

std::uint64_t edge_mask_of(const SubgraphSpec& h, const std::vector<int>& phi) {
    std::uint64_t mask = 0;
    for (auto [a, b] : h.edges) mask |= 1ULL << edge_index(phi[a], phi[b]);
    return mask;
}

// enumerate injective vertex maps of H into [n] with simple degree pruning,
// invoking cb on the image edge mask
template <class F>
void for_each_embedding(const SubgraphSpec& h, int n, F&& cb) {
    h.validate();
    if (h.v > n) return;
    if (n > 11) throw std::invalid_argument("subgraph embedding: n <= 11 (64 edge slots) supported");
    std::vector<int> phi(h.v, -1);
    std::vector<char> used(n, 0);
    std::vector<std::vector<int>> back_edges(h.v);
    for (auto [a, b] : h.edges) back_edges[std::max(a, b)].push_back(std::min(a, b));
    auto rec = [&](auto&& self, int depth) -> void {
        if (depth == h.v) {
            cb(static_cast<const std::vector<int>&>(phi));
            return;
        }
        for (int cand = 0; cand < n; ++cand) {
            if (used[cand]) continue;
            phi[depth] = cand;
            used[cand] = 1;
            self(self, depth + 1);
            used[cand] = 0;
        }
        phi[depth] = -1;
    };
    rec(rec, 0);
}

} // namespace

long long automorphism_count(const SubgraphSpec& h) {
    h.validate();
    std::vector<int> perm(h.v);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<std::pair<int, int>> edge_set;
    for (auto [a, b] : h.edges) edge_set.insert(std::minmax(a, b));
    long long count = 0;
    do {
        bool ok = true;
        for (auto [a, b] : h.edges)
            if (!edge_set.count(std::minmax(perm[a], perm[b]))) {
                ok = false;
                break;
            }
        if (ok) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

std::vector<std::uint64_t> copy_masks(const SubgraphSpec& h, int n) {
    std::set<std::uint64_t> masks;
    for_each_embedding(h, n, [&](const std::vector<int>& phi) { masks.insert(edge_mask_of(h, phi)); });
    return {masks.begin(), masks.end()};
}

long long copies_in_complete(const SubgraphSpec& h, int n) {
    // embeddings / automorphisms; avoids materializing masks for larger n
    if (n <= 11) return static_cast<long long>(copy_masks(h, n).size());
    double falling = 1.0;
    for (int i = 0; i < h.v; ++i) falling *= (n - i);
    return static_cast<long long>(std::llround(falling / static_cast<double>(automorphism_count(h))));
}

long long ext_n(const SubgraphSpec& hprime, const SubgraphSpec& h, int n) {
    hprime.validate();
    h.validate();
    if (hprime.v > h.v || hprime.m() > h.m()) return 0;
    // canonical copy of H' on the first vertices of K_n
    std::uint64_t fixed = 0;
    for (auto [a, b] : hprime.edges) fixed |= 1ULL << edge_index(a, b);
    long long hits = 0;
    for_each_embedding(h, n, [&](const std::vector<int>& phi) {
        const std::uint64_t mask = edge_mask_of(h, phi);
        if ((mask & fixed) == fixed) ++hits;
    });
    return hits / automorphism_count(h);
}

double SubgraphDecomposition::h_count(const std::vector<std::uint8_t>& cells) const {
    std::uint64_t g = 0;
    for (std::size_t e = 0; e < cells.size(); ++e)
        if (cells[e]) g |= 1ULL << e;
    long long cnt = 0;
    for (const auto mask : masks)
        if ((g & mask) == mask) ++cnt;
    return static_cast<double>(cnt);
}

double SubgraphDecomposition::r_h(const std::vector<std::uint8_t>& cells) const {
    const GraphStats g = graph_stats(cells, n);
    const double nn = binom(n, 2);
    const double e = static_cast<double>(g.edges);
    const double u = static_cast<double>(g.wedges);
    const double t = static_cast<double>(g.triangles);
    const double t_tilde = t - p * u + p * p * (n - 2.0) * e - binom(n, 3) * p * p * p;
    const double u_tilde = u - 2.0 * p * (n - 2.0) * e + nn * (n - 2.0) * p * p;
    const double hhat = h_count(cells) - edge_slope * e;
    return (hhat - mean_hhat) - coef_t * t_tilde - coef_u * u_tilde;
}

SubgraphDecomposition subgraph_decomposition(int n, double p, const SubgraphSpec& h) {
    h.validate();
    if (n < h.v) throw std::invalid_argument("subgraph_decomposition: n < v(H)");
    if (n > 11) throw std::invalid_argument("subgraph_decomposition: n <= 11 supported");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("subgraph_decomposition: p in (0,1)");
    SubgraphDecomposition d;
    d.h = h;
    d.n = n;
    d.p = p;
    d.masks = copy_masks(h, n);
    d.copies = static_cast<long long>(d.masks.size());
    const double q = 1.0 - p;
    const int m = h.m();
    const double nn = binom(n, 2);
    const double pm = std::pow(p, m);
    d.sigma_he = m * pm * q * static_cast<double>(d.copies);
    d.edge_slope = d.sigma_he / (nn * p * q);
    d.mean_h = static_cast<double>(d.copies) * pm;
    d.mean_hhat = d.mean_h - d.edge_slope * nn * p;
    d.ext_t = ext_n(SubgraphSpec::triangle(), h, n);
    d.ext_u = ext_n(SubgraphSpec::wedge(), h, n);
    d.coef_t = std::pow(p, m - 3) * static_cast<double>(d.ext_t);
    d.coef_u = std::pow(p, m - 2) * static_cast<double>(d.ext_u);
    if (m < 3) throw std::invalid_argument("subgraph_decomposition: H needs at least 3 edges");

    // Var(H) by exact pairwise covariances over copies, then decorrelate E
    double var_h = 0.0;
    const double p2m = pm * pm;
    for (std::size_t i = 0; i < d.masks.size(); ++i)
        for (std::size_t j = 0; j < d.masks.size(); ++j) {
            const int shared = __builtin_popcountll(d.masks[i] & d.masks[j]);
            if (shared == 0) continue;
            var_h += std::pow(p, 2 * m - shared) - p2m;
        }
    d.var_hhat = var_h - d.sigma_he * d.sigma_he / (nn * p * q);
    d.sigma_t = std::sqrt(binom(n, 3)) * std::pow(p * q, 1.5);
    d.sigma_u = std::sqrt(nn * (n - 2.0)) * p * q;
    const double sigma_hhat = std::sqrt(std::max(d.var_hhat, 0.0));
    d.rho1 = d.coef_t * d.sigma_t / sigma_hhat;
    d.rho2 = d.coef_u * d.sigma_u / sigma_hhat;
    return d;
}

} // namespace cclt

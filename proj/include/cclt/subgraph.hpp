#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cclt/core.hpp"

namespace cclt {

// a finite simple graph on v <= 8 vertices, no isolated vertices
struct SubgraphSpec {
    int v = 0;
    std::vector<std::pair<int, int>> edges;

    int m() const { return static_cast<int>(edges.size()); }
    void validate() const;

    static SubgraphSpec triangle();
    static SubgraphSpec wedge();
    static SubgraphSpec k4();
    static SubgraphSpec p4();  // path on 4 vertices
    static SubgraphSpec c4();  // 4-cycle
    static SubgraphSpec named(const std::string& name);
};

// number of vertex automorphisms of H that preserve its edge set
long long automorphism_count(const SubgraphSpec& h);

// number of copies of H (as edge subsets) in K_n
long long copies_in_complete(const SubgraphSpec& h, int n);

// extension count: the number of copies of H in K_n containing one fixed
// canonical copy of Hprime
long long ext_n(const SubgraphSpec& hprime, const SubgraphSpec& h, int n);

// all copies of H in K_n as edge bitmasks over the N = C(n,2) slots
std::vector<std::uint64_t> copy_masks(const SubgraphSpec& h, int n);

// The exact second-order decomposition of the edge-decorrelated count:
// Hhat - E Hhat = p^{m-3} ext(T,H) * T~ + p^{m-2} ext(V,H) * U~ + R_H.
struct SubgraphDecomposition {
    SubgraphSpec h;
    int n = 0;
    double p = 0.0;
    long long copies = 0;        // |S|
    double sigma_he = 0.0;       // cov(H, E) = m p^m q |S|
    double edge_slope = 0.0;     // sigma_he / sigma_E^2
    double mean_h = 0.0;         // E H = |S| p^m
    double mean_hhat = 0.0;
    long long ext_t = 0, ext_u = 0;
    double coef_t = 0.0, coef_u = 0.0; // with the p-power factors
    double var_hhat = 0.0;       // exact
    double sigma_t = 0.0, sigma_u = 0.0;
    double rho1 = 0.0, rho2 = 0.0;

    // pathwise values on a concrete edge configuration
    double h_count(const std::vector<std::uint8_t>& cells) const;
    double r_h(const std::vector<std::uint8_t>& cells) const;

    std::vector<std::uint64_t> masks; // copy masks, for counting
};

SubgraphDecomposition subgraph_decomposition(int n, double p, const SubgraphSpec& h);

} // namespace cclt

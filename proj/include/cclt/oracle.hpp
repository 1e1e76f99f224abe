#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cclt/subgraph.hpp"

namespace cclt {

// statistics supported by the binary enumerator
enum class BinaryStat {
    ones,        // V
    pattern01_u, // number of 01 patterns on the cycle
    x11,         // number of 11 patterns on the cycle
    evenodd_x    // signed 11 count, (-1)^{i+1} convention of the two-species model
};

// Uniform-conditional sums by the level v = (number of ones). The statistic is
// integer valued, so count/s1/s2 are exact; conditional laws given V = v do
// not depend on p.
struct LevelSums {
    std::vector<unsigned long long> count;
    std::vector<long double> s1, s2;

    double mean(int v) const { return static_cast<double>(s1[v] / count[v]); }
    double var(int v) const {
        const long double c = count[v];
        return static_cast<double>(s2[v] / c - (s1[v] / c) * (s1[v] / c));
    }
};

// iterate all 2^n states in Gray order with O(1) statistic updates
LevelSums enumerate_binary(int n, BinaryStat stat, int workers = 1);

// weighted enumeration for inhomogeneous site probabilities (evenodd model)
struct WeightedLevels {
    std::vector<double> prob;  // P(V = v)
    std::vector<double> mean;  // E(stat | V = v)
    std::vector<double> m2;    // E(stat^2 | V = v)
};
WeightedLevels enumerate_binary_weighted(int n, const std::vector<double>& probs, BinaryStat stat);

// graphs on n vertices by edge count m: exact sums of wedge and triangle counts
struct GraphLevelSums {
    std::vector<unsigned long long> count;
    std::vector<long double> su, su2, st, st2, sut;

    double mean_u(int m) const { return static_cast<double>(su[m] / count[m]); }
    double mean_t(int m) const { return static_cast<double>(st[m] / count[m]); }
    double var_u(int m) const {
        const long double c = count[m];
        return static_cast<double>(su2[m] / c - (su[m] / c) * (su[m] / c));
    }
};
GraphLevelSums enumerate_graphs(int n, int workers = 1);

// visit every binary configuration (small n); cells mutated in Gray order
void for_all_binary(int n, const std::function<void(const std::vector<std::uint8_t>&)>& visit);
// visit every graph configuration on N = C(n,2) slots
void for_all_graphs(int n, const std::function<void(const std::vector<std::uint8_t>&)>& visit);

// exact conditional law of the urn statistic W given V = k (trinomial closed form)
struct UrnConditional {
    double mean_w = 0.0;
    double var_w = 0.0;
};
UrnConditional urn_conditional(int n, double p1, double p2, int k);
// the same by direct 3^n enumeration (n <= 12)
UrnConditional urn_conditional_enumerated(int n, double p1, double p2, int k);

// pathwise verification of the exact second-order decomposition
struct DecompositionCheck {
    double er_h = 0.0;       // exact E R_H, zero in theory
    double er_h2 = 0.0;      // exact E R_H^2
    double var_hhat = 0.0;   // exact Var(Hhat)
    double order_ratio = 0.0;  // E R_H^2 / (Var(Hhat) / n)
    double max_abs_rh = 0.0;
};
DecompositionCheck exact_decomposition_check(int n, double p, const SubgraphSpec& h);

} // namespace cclt

#pragma once

#include "cclt/core.hpp"

namespace cclt {

// flat edge-slot indexing, (i,j) -> j(j-1)/2 + i for i < j
inline std::size_t edge_index(std::size_t i, std::size_t j) {
    if (i > j) std::swap(i, j);
    return j * (j - 1) / 2 + i;
}
inline std::pair<std::uint32_t, std::uint32_t> edge_endpoints(std::size_t idx) {
    std::size_t j = static_cast<std::size_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0);
    while (j * (j - 1) / 2 > idx) --j;
    while ((j + 1) * j / 2 <= idx) ++j;
    return {static_cast<std::uint32_t>(idx - j * (j - 1) / 2), static_cast<std::uint32_t>(j)};
}

struct BinarySequenceConfig {
    int n = 0;
    std::vector<double> probs; // per-site Bernoulli p_i
    bool cyclic = true;
};

struct GraphConfig {
    int n = 0;
    double p = 0.5;
};

// piecewise-constant score on the target, segments of given lengths summing to 1
struct ScoreSpec {
    std::vector<double> length; // fractions of the target area
    std::vector<double> value;
    // zero mean / unit second moment on a target of area q, split in halves
    static ScoreSpec half_split(double q);
};

// models with closed-form first-moment structure expose these
class AnalyticM01 {
public:
    virtual ~AnalyticM01() = default;
    virtual void analytic_m01(const ModelState&, double& m0p, double& m0m,
                              Eigen::VectorXd& m1p, Eigen::VectorXd& m1m) const = 0;
};

// --- binary-sequence models ---------------------------------------------
// X = U - (1-2p)Y - npq (equivalently -sum of centered adjacent products),
// Y = V - np, Glauber single-site resampling
ModelPtr pattern01_model(int n, double p);
// X = sum (-1)^i w_i w_{i+1} with alternating site probabilities p, 1-p
ModelPtr evenodd11_model(int n, double p);
// W = sum X_i + sum eps_i (w_i - p), full-site resampling
ModelPtr toy_model(int n, double p, std::vector<double> eps);
// swap chain on sequences with exactly m ones; w = (11-count) - m(m-1)/(n-1)
ModelPtr pattern01_swap_model(int n, int m);

// --- urn / darts models --------------------------------------------------
ModelPtr urn_model(int n, double p1, double p2);
ModelPtr darts_model(int n, double q, const ScoreSpec& score = {});
// d = 2, X = (sum S_i (V_i - 1/2), sum S_i), Rademacher scores
ModelPtr multivariate_darts_model(int n);

// --- random-graph models -------------------------------------------------
// X = sum over wedges of centered-edge products, Y = E - Np, edge Glauber
ModelPtr wedge_edge_model(int n, double p);
// d = 2, X = (T~, U~) of centered triangle / wedge sums
ModelPtr triangle_wedge_model(int n, double p);
// swap chain on G(n,m); w = U - 2m(m-1)/(n+1)
ModelPtr wedge_edge_swap_model(int n, int m);

ModelPtr make_model(const std::string& name, int n, double p,
                    const std::vector<double>& extra = {});

// G(n,m)-style degree-update probabilities of the edge swap chain:
// P(d_i -> d_i + 1) and P(d_i -> d_i - 1) for the declared chain convention
// (ordered pair of distinct slots, values swapped).
void swap_chain_degree_probs(int n, int m, int d_i, double& up, double& down);

// exact graph statistics from an edge bitmap (n small, bits = N slots)
struct GraphStats {
    long long edges = 0;
    long long wedges = 0;
    long long triangles = 0;
};
GraphStats graph_stats(const std::vector<std::uint8_t>& cells, int n);

} // namespace cclt

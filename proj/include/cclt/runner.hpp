#pragma once

#include <map>
#include <string>
#include <vector>

#include "cclt/core.hpp"

namespace cclt {

// one CLI invocation; flags and config-file keys share these names
struct RunConfig {
    std::string subcommand;
    std::string model = "pattern01";
    int n = 256;
    double p = 0.5;
    long long k = 0;
    std::uint64_t seed = 1;
    std::size_t samples = 20000;
    std::string theorem = "t23";
    std::string out = ".";
    std::string format = "csv";
    int workers = 1;
    std::vector<int> ns;          // sizes for the rate experiment
    std::string subgraph = "triangle";
    double p1 = 0.0;              // urn extra; 0 = (1-p)/2 default

    void apply(const std::map<std::string, std::string>& kv);
    std::map<std::string, std::string> echo() const;
};

struct RunResult {
    std::map<std::string, double> metrics;
    std::vector<std::string> files;
    std::string summary;
};

RunResult run(const RunConfig& config);

// W1 (or sliced W1) of the conditioned statistic plus a batch stderr
struct DistanceResult {
    double distance = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};
DistanceResult conditioned_distance(const std::string& model, int n, double p, long long k,
                                    std::size_t samples, std::uint64_t seed, int workers);

// full pipeline: build model, transform when applicable, estimate residuals,
// evaluate the named theorem bound
BoundReport bound_pipeline(const RunConfig& config, ResidualSummary* summary_out = nullptr);

} // namespace cclt

#pragma once

#include <map>
#include <string>
#include <vector>

#include "cclt/core.hpp"

namespace cclt {

// shortest round-trip decimal form; deterministic across runs
std::string format_number(double x);

// RFC-4180 CSV: fields quoted when they contain comma, quote or newline
class CsvWriter {
public:
    void row(const std::vector<std::string>& fields);
    const std::string& body() const { return body_; }

private:
    std::string body_;
};

// flat key=value config file, one pair per line, '#' comments
std::map<std::string, std::string> parse_config_file(const std::string& path);

std::string bound_report_json(const BoundReport& rep);
std::string residual_summary_json(const ResidualSummary& s);

void write_text_file(const std::string& path, const std::string& content);

// manifest: config echo, seed, version, wall time (the only timestamped file)
void write_manifest(const std::string& path, const std::map<std::string, std::string>& config,
                    double wall_seconds);

} // namespace cclt

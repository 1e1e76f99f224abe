#include "cclt/io.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cclt {

std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) body_ += ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n\r") != std::string::npos) {
            body_ += '"';
            for (char c : f) {
                if (c == '"') body_ += '"';
                body_ += c;
            }
            body_ += '"';
        } else {
            body_ += f;
        }
    }
    body_ += "\r\n";
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) out[key] = value;
    }
    return out;
}

std::string bound_report_json(const BoundReport& rep) {
    nlohmann::ordered_json j;
    j["theorem"] = rep.theorem;
    nlohmann::ordered_json terms;
    for (const auto& [name, value] : rep.terms) terms[name] = value;
    j["terms"] = terms;
    j["total"] = rep.total;
    if (!rep.note.empty()) j["note"] = rep.note;
    return j.dump(2);
}

namespace {

nlohmann::ordered_json mwe(const MeanWithError& m) {
    nlohmann::ordered_json j;
    j["mean"] = m.mean;
    j["stderr"] = m.stderr_;
    j["n"] = m.n;
    return j;
}

} // namespace

std::string residual_summary_json(const ResidualSummary& s) {
    nlohmann::ordered_json j;
    j["k"] = s.k;
    j["p_k"] = s.p_k;
    j["p_km1"] = s.p_km1;
    j["r_k"] = s.r_k;
    j["r_k_exact"] = s.r_k_exact;
    j["abs_R1_minus_at_k"] = mwe(s.abs_r1_minus_at_k);
    j["abs_R1_plus_at_km1"] = mwe(s.abs_r1_plus_at_km1);
    j["abs_R2_minus_at_k"] = mwe(s.abs_r2_minus_at_k);
    j["abs_R2_plus_at_km1"] = mwe(s.abs_r2_plus_at_km1);
    j["C_hat_w_part"] = mwe(s.c_hat_w_part);
    j["C_hat_r0_part"] = mwe(s.c_hat_r0_part);
    j["D_hat"] = mwe(s.d_hat);
    j["E_hat"] = mwe(s.e_hat);
    j["E_hat4"] = mwe(s.e_hat4);
    j["E_hat3"] = mwe(s.e_hat3);
    j["W_norm2"] = mwe(s.w_norm2);
    j["uncond_R1_diff"] = mwe(s.uncond_r1_diff);
    j["uncond_R2_diff"] = mwe(s.uncond_r2_diff);
    j["uncond_dW3"] = mwe(s.uncond_dw3);
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

void write_manifest(const std::string& path, const std::map<std::string, std::string>& config,
                    double wall_seconds) {
    std::ostringstream out;
    out << "tool=cclt 0.1.0\n";
    const auto now = std::chrono::system_clock::now();
    out << "timestamp_unix=" << std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()
        << "\n";
    out << "wall_seconds=" << format_number(wall_seconds) << "\n";
    for (const auto& [k, v] : config) out << k << "=" << v << "\n";
    write_text_file(path, out.str());
}

} // namespace cclt

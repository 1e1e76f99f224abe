#include <CLI11.hpp>
#include <iostream>

#include "cclt/io.hpp"
#include "cclt/runner.hpp"

namespace {

// flags override config-file values; both use the same key names
void add_common(CLI::App* cmd, cclt::RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "flat key=value config file");
    cmd->add_option("--model", cfg.model,
                    "pattern01 | evenodd11 | wedge-edge | triangle-wedge | urn | darts | "
                    "multi-darts | toy | pattern01-swap | wedge-edge-swap");
    cmd->add_option("--n", cfg.n, "instance size (sites / vertices)");
    cmd->add_option("--p", cfg.p, "success probability");
    cmd->add_option("--p1", cfg.p1, "urn: probability of urn 1");
    cmd->add_option("--k", cfg.k, "lattice index; the level is y = zeta + k");
    cmd->add_option("--seed", cfg.seed, "64-bit master seed");
    cmd->add_option("--samples", cfg.samples, "Monte-Carlo sample target");
    cmd->add_option("--theorem", cfg.theorem,
                    "t11 | t13 | t21 | t21avg | l22 | t23 | t31-4mom | t31-3mom | l51 | t16");
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--format", cfg.format, "csv | json");
    cmd->add_option("--workers", cfg.workers, "worker threads (never affects results)");
    cmd->add_option("--subgraph", cfg.subgraph, "triangle | wedge | k4 | p4 | c4");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"conditional limit theorem toolkit: models, moments, bounds, experiments"};
    app.require_subcommand(1);

    cclt::RunConfig cfg;
    std::string config_path;
    std::string ns_list;

    auto* rate = app.add_subcommand("rate", "W1 distance vs n with a log-log slope fit");
    add_common(rate, cfg, config_path);
    rate->add_option("--ns", ns_list, "comma-separated instance sizes, e.g. 64,128,256");

    for (const char* name : {"distance", "bound", "oracle-check", "verify-assumptions", "llt", "decompose"}) {
        auto* cmd = app.add_subcommand(
            name, std::string("run the ") + name + " experiment");
        add_common(cmd, cfg, config_path);
    }

    CLI11_PARSE(app, argc, argv);
    auto* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();

    try {
        if (!config_path.empty()) {
            // config first, then re-apply explicit flags so flags win
            cclt::RunConfig file_cfg;
            file_cfg.subcommand = cfg.subcommand;
            file_cfg.apply(cclt::parse_config_file(config_path));
            const cclt::RunConfig flag_cfg = cfg;
            cfg = file_cfg;
            for (const auto* opt : sub->get_options()) {
                if (opt->count() == 0) continue;
                const std::string name = opt->get_name();
                if (name == "--model") cfg.model = flag_cfg.model;
                else if (name == "--n") cfg.n = flag_cfg.n;
                else if (name == "--p") cfg.p = flag_cfg.p;
                else if (name == "--p1") cfg.p1 = flag_cfg.p1;
                else if (name == "--k") cfg.k = flag_cfg.k;
                else if (name == "--seed") cfg.seed = flag_cfg.seed;
                else if (name == "--samples") cfg.samples = flag_cfg.samples;
                else if (name == "--theorem") cfg.theorem = flag_cfg.theorem;
                else if (name == "--out") cfg.out = flag_cfg.out;
                else if (name == "--format") cfg.format = flag_cfg.format;
                else if (name == "--workers") cfg.workers = flag_cfg.workers;
                else if (name == "--subgraph") cfg.subgraph = flag_cfg.subgraph;
            }
        }
        if (!ns_list.empty()) {
            cfg.ns.clear();
            std::map<std::string, std::string> kv{{"ns", ns_list}};
            cfg.apply(kv);
        }
        const cclt::RunResult res = cclt::run(cfg);
        std::cout << res.summary << "\n";
        for (const auto& f : res.files) std::cout << "wrote " << f << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

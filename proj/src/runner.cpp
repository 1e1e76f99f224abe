#include "cclt/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "cclt/bounds.hpp"
#include "cclt/empirics.hpp"
#include "cclt/io.hpp"
#include "cclt/models.hpp"
#include "cclt/moments.hpp"
#include "cclt/normal.hpp"
#include "cclt/oracle.hpp"
#include "cclt/parallel.hpp"
#include "cclt/subgraph.hpp"
#include "cclt/transform.hpp"
#include "cclt/ylaw.hpp"

namespace cclt {

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoi(item));
    }
    return out;
}

ModelPtr build_base(const RunConfig& c) {
    std::vector<double> extra;
    if (c.model == "urn" && c.p1 > 0.0) extra.push_back(c.p1);
    return make_model(c.model, c.n, c.p, extra);
}

// transformed when the model carries the Y-indexed contract, raw otherwise
ModelPtr build_experiment_model(const RunConfig& c) {
    ModelPtr base = build_base(c);
    if (base->contract().case_two) return make_transformed(base);
    return base;
}

// batch stderr for a W1 estimate: sd of per-batch distances / sqrt(B)
double batch_stderr_w1(const Eigen::MatrixXd& w, int batches) {
    const std::size_t m = static_cast<std::size_t>(w.rows());
    const std::size_t per = m / static_cast<std::size_t>(batches);
    if (per < 50) return 0.0;
    double s = 0.0, s2 = 0.0;
    for (int b = 0; b < batches; ++b) {
        std::vector<double> chunk(per);
        for (std::size_t i = 0; i < per; ++i) chunk[i] = w(b * per + i, 0);
        const double d = w1_to_std_normal(std::move(chunk));
        s += d;
        s2 += d * d;
    }
    const double bb = batches;
    const double var = std::max(0.0, (s2 - s * s / bb) / (bb - 1.0));
    return std::sqrt(var / bb);
}

} // namespace

DistanceResult conditioned_distance(const std::string& model, int n, double p, long long k,
                                    std::size_t samples, std::uint64_t seed, int workers) {
    RunConfig c;
    c.model = model;
    c.n = n;
    c.p = p;
    c.k = k;
    ModelPtr m = build_experiment_model(c);
    SampleOptions so;
    so.target = samples;
    so.seed = seed;
    so.workers = workers;
    const ConditionalSample cs = sample_conditional(*m, k, so);
    DistanceResult out;
    out.samples = static_cast<std::size_t>(cs.w.rows());
    if (m->contract().dim == 1) {
        std::vector<double> v(cs.w.col(0).data(), cs.w.col(0).data() + cs.w.rows());
        out.distance = w1_to_std_normal(std::move(v));
        out.stderr_ = batch_stderr_w1(cs.w, 20);
    } else {
        SlicedOptions sl;
        sl.seed = seed ^ 0xa5a5a5a5ULL;
        out.distance = sliced_w1_to_std_normal(cs.w, sl);
        // crude batch stderr over row blocks
        const int batches = 10;
        const std::size_t per = out.samples / batches;
        if (per >= 100) {
            double s = 0.0, s2 = 0.0;
            for (int b = 0; b < batches; ++b) {
                const double d = sliced_w1_to_std_normal(cs.w.middleRows(b * per, per), sl);
                s += d;
                s2 += d * d;
            }
            const double bb = batches;
            out.stderr_ = std::sqrt(std::max(0.0, (s2 - s * s / bb) / (bb - 1.0)) / bb);
        }
    }
    return out;
}

namespace {

// classical-route (Thm 1.1) inputs: residuals of the dY = 0 sub-chain for
// urn/darts, of the whole chain for the swap models
BoundReport classic_bound(const RunConfig& c) {
    ModelPtr model;
    if (c.model == "pattern01-swap")
        model = pattern01_swap_model(c.n, static_cast<int>(std::llround(c.p * c.n)));
    else if (c.model == "wedge-edge-swap")
        model = wedge_edge_swap_model(
            c.n, static_cast<int>(std::llround(c.p * binom(c.n, 2))));
    else
        model = build_base(c);
    const ModelContract& mc = model->contract();
    if (mc.dim != 1) throw std::invalid_argument("bound t11: univariate models only");
    const double lam = mc.lambda_classic > 0.0 ? mc.lambda_classic : mc.constants.lambda;
    const double sg = std::sqrt(mc.sigma_w2(0));
    const bool swap_chain = !mc.case_two && mc.y_law.kind == YLawKind::degenerate;

    const std::size_t nblocks = 64;
    const std::size_t per_block = (c.samples + nblocks - 1) / nblocks;
    struct Acc {
        double r1 = 0, r2 = 0, dw3 = 0;
        std::size_t n = 0;
    };
    auto blocks = parallel_blocks<Acc>(nblocks, c.workers, [&](std::size_t b) {
        Rng rng(c.seed, 13000033ULL + b);
        Acc acc;
        for (std::size_t i = 0; i < per_block; ++i) {
            const ModelState s = model->draw(rng);
            double m1 = 0.0, m2 = 0.0, m3 = 0.0;
            model->for_each_proposal(s, [&](double prob, const double* dw, int dy) {
                if (!swap_chain && dy != 0) return; // condition on Y' = Y
                const double d = dw[0] / sg;
                m1 += prob * d;
                m2 += prob * d * d;
                m3 += prob * std::abs(d) * d * d;
            });
            const double w = s.w(0) / sg;
            acc.r1 += std::abs(-m1 / lam - w);
            acc.r2 += std::abs(m2 / (2.0 * lam) - 1.0);
            acc.dw3 += m3;
            ++acc.n;
        }
        return acc;
    });
    Acc total;
    for (const auto& b : blocks) {
        total.r1 += b.r1;
        total.r2 += b.r2;
        total.dw3 += b.dw3;
        total.n += b.n;
    }
    const double dn = static_cast<double>(total.n);
    return bound_t11(total.r1 / dn, total.r2 / dn, total.dw3 / dn, lam);
}

} // namespace

BoundReport bound_pipeline(const RunConfig& c, ResidualSummary* summary_out) {
    if (c.theorem == "t11") return classic_bound(c);

    ModelPtr model = build_experiment_model(c);
    const ModelContract& mc = model->contract();
    if (!mc.case_two)
        throw std::invalid_argument("bound " + c.theorem + ": model " + c.model +
                                    " only supports the classical route (t11)");
    SummaryOptions so;
    so.samples = c.samples;
    so.seed = c.seed;
    so.workers = c.workers;
    const ResidualSummary summary = estimate_residual_summary(*model, c.k, so);
    if (summary_out) *summary_out = summary;
    const PairConstants& pc = mc.constants;

    if (c.theorem == "t21") return bound_t21(summary, pc, false);
    if (c.theorem == "t21avg") return bound_t21(summary, pc, true);
    if (c.theorem == "l22") return bound_l22(summary, pc);
    if (c.theorem == "t23") return bound_t23(summary, pc);
    if (c.theorem == "l51")
        return bound_l51(summary, static_cast<double>(mc.dim), pc.q);
    if (c.theorem == "t31" || c.theorem == "t31-4mom")
        return bound_t31(summary, Eigen::MatrixXd::Identity(mc.dim, mc.dim), pc,
                         MultiVariant::fourth_moment);
    if (c.theorem == "t31-3mom")
        return bound_t31(summary, Eigen::MatrixXd::Identity(mc.dim, mc.dim), pc,
                         MultiVariant::third_moment);
    if (c.theorem == "t13") {
        // unconditional multivariate bound on the transformed statistic
        BoundReport rep = bound_t13(summary.uncond_r1_diff.mean, summary.uncond_r2_diff.mean, 1.0,
                                    summary.w_norm2.mean, summary.e_hat4.mean,
                                    static_cast<double>(mc.dim));
        return rep;
    }
    if (c.theorem == "t16") {
        const LltReport llt = llt_check(mc.y_law);
        // R1 = 0 and R2 = (1/lambda)|P(dY=1|Y) - P(dY=1)| from the linear R0 form
        const double sigma = llt.sigma;
        double r2_mean = 0.0, r2_abs_y = 0.0, r2_sup = 0.0;
        if (mc.exact_linear_r0) {
            // |R0,+|/lambda = a+ |Y - EY|
            const double mean_count = mc.y_law.mean_count();
            for (int cc = 0; cc <= mc.y_law.trials; ++cc) {
                const double pr = mc.y_law.pmf_at(cc);
                const double yc = std::abs(cc - mean_count) * pc.a_plus;
                r2_mean += pr * yc;
                r2_abs_y += pr * yc * std::abs(cc - mean_count);
                r2_sup = std::max(r2_sup, pr * yc);
            }
        }
        return bound_t16_llt(sigma, 0.0, r2_mean, r2_abs_y, r2_sup, llt.sup_pmf, 1.0);
    }
    throw std::invalid_argument("unknown theorem tag: " + c.theorem);
}

void RunConfig::apply(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        if (key == "subcommand") subcommand = value;
        else if (key == "model") model = value;
        else if (key == "n") n = std::stoi(value);
        else if (key == "p") p = std::stod(value);
        else if (key == "k") k = std::stoll(value);
        else if (key == "seed") seed = std::stoull(value);
        else if (key == "samples") samples = static_cast<std::size_t>(std::stoull(value));
        else if (key == "theorem") theorem = value;
        else if (key == "out") out = value;
        else if (key == "format") format = value;
        else if (key == "workers") workers = std::stoi(value);
        else if (key == "ns") ns = parse_int_list(value);
        else if (key == "subgraph") subgraph = value;
        else if (key == "p1") p1 = std::stod(value);
        else throw std::invalid_argument("unknown config key: " + key);
    }
}

std::map<std::string, std::string> RunConfig::echo() const {
    std::map<std::string, std::string> kv;
    kv["subcommand"] = subcommand;
    kv["model"] = model;
    kv["n"] = std::to_string(n);
    kv["p"] = format_number(p);
    kv["k"] = std::to_string(k);
    kv["seed"] = std::to_string(seed);
    kv["samples"] = std::to_string(samples);
    kv["theorem"] = theorem;
    kv["out"] = out;
    kv["format"] = format;
    kv["workers"] = std::to_string(workers);
    if (!ns.empty()) {
        std::string s;
        for (std::size_t i = 0; i < ns.size(); ++i) s += (i ? "," : "") + std::to_string(ns[i]);
        kv["ns"] = s;
    }
    kv["subgraph"] = subgraph;
    if (p1 > 0.0) kv["p1"] = format_number(p1);
    return kv;
}

namespace {

RunResult run_rate(const RunConfig& c) {
    if (c.ns.size() < 4)
        throw std::invalid_argument("rate: need at least 4 sizes in --ns");
    CsvWriter csv;
    csv.row({"model", "n", "k", "samples", "distance", "stderr", "bound_total", "seed"});
    std::vector<std::pair<double, double>> points;
    for (int n : c.ns) {
        DistanceResult d = conditioned_distance(c.model, n, c.p, c.k, c.samples, c.seed, c.workers);
        points.emplace_back(static_cast<double>(n), d.distance);
        csv.row({c.model, std::to_string(n), std::to_string(c.k), std::to_string(d.samples),
                 format_number(d.distance), format_number(d.stderr_), "", std::to_string(c.seed)});
    }
    const RateFit fit = rate_regression(points);
    RunResult res;
    res.metrics["slope"] = fit.slope;
    res.metrics["intercept"] = fit.intercept;
    res.metrics["fit_residual"] = fit.residual;
    std::filesystem::create_directories(c.out);
    const std::string path = c.out + "/rate.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    std::ostringstream sum;
    sum << "rate: slope=" << format_number(fit.slope) << " intercept=" << format_number(fit.intercept);
    res.summary = sum.str();
    return res;
}

RunResult run_distance(const RunConfig& c) {
    DistanceResult d = conditioned_distance(c.model, c.n, c.p, c.k, c.samples, c.seed, c.workers);
    CsvWriter csv;
    csv.row({"model", "n", "k", "samples", "distance", "stderr", "bound_total", "seed"});
    csv.row({c.model, std::to_string(c.n), std::to_string(c.k), std::to_string(d.samples),
             format_number(d.distance), format_number(d.stderr_), "", std::to_string(c.seed)});
    RunResult res;
    res.metrics["distance"] = d.distance;
    res.metrics["stderr"] = d.stderr_;
    std::filesystem::create_directories(c.out);
    const std::string path = c.out + "/distance.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    res.summary = "distance=" + format_number(d.distance) + " stderr=" + format_number(d.stderr_);
    return res;
}

RunResult run_bound(const RunConfig& c) {
    ResidualSummary summary;
    const BoundReport rep = bound_pipeline(c, &summary);
    RunResult res;
    res.metrics["total"] = rep.total;
    for (const auto& [name, value] : rep.terms) res.metrics[name] = value;
    std::filesystem::create_directories(c.out);
    const std::string path = c.out + "/bound.json";
    write_text_file(path, bound_report_json(rep));
    res.files.push_back(path);
    if (c.theorem != "t11" && c.theorem != "t16") {
        const std::string spath = c.out + "/residual_summary.json";
        write_text_file(spath, residual_summary_json(summary));
        res.files.push_back(spath);
    }
    res.summary = rep.theorem + " total=" + format_number(rep.total);
    return res;
}

RunResult run_oracle_check(const RunConfig& c) {
    RunResult res;
    CsvWriter csv;
    double max_err = 0.0;
    if (c.model == "pattern01" || c.model == "pattern01-swap") {
        if (c.n > 22) throw std::invalid_argument("oracle-check: n <= 22 for binary enumeration");
        const LevelSums tab = enumerate_binary(c.n, BinaryStat::pattern01_u, c.workers);
        csv.row({"m", "oracle_mean", "closed_form_mean", "oracle_var", "closed_form_var"});
        for (int m = 0; m <= c.n; ++m) {
            const double mean = tab.mean(m);
            const double closed = static_cast<double>(m) * (c.n - m) / (c.n - 1.0);
            const double var = tab.var(m);
            // corrected conditional variance on the cycle (see the oracle tests)
            const double closed_var = m * (m - 1.0) * (c.n - m) * (c.n - m - 1.0) /
                                      ((c.n - 1.0) * (c.n - 1.0) * (c.n - 2.0));
            max_err = std::max({max_err, std::abs(mean - closed), std::abs(var - closed_var)});
            csv.row({std::to_string(m), format_number(mean), format_number(closed),
                     format_number(var), format_number(closed_var)});
        }
    } else if (c.model == "wedge-edge" || c.model == "wedge-edge-swap") {
        if (c.n > 8) throw std::invalid_argument("oracle-check: n <= 8 for graph enumeration");
        const GraphLevelSums tab = enumerate_graphs(c.n, c.workers);
        csv.row({"m", "oracle_mean_U", "closed_form_mean_U"});
        const int slots = c.n * (c.n - 1) / 2;
        for (int m = 0; m <= slots; ++m) {
            const double mean = tab.mean_u(m);
            const double closed = 2.0 * m * (m - 1.0) / (c.n + 1.0);
            max_err = std::max(max_err, std::abs(mean - closed));
            csv.row({std::to_string(m), format_number(mean), format_number(closed)});
        }
    } else if (c.model == "urn") {
        const double p1 = c.p1 > 0.0 ? c.p1 : (1.0 - c.p) / 2.0;
        csv.row({"k", "closed_mean", "enumerated_mean", "closed_var", "enumerated_var"});
        for (int k = 0; k <= c.n; ++k) {
            const UrnConditional a = urn_conditional(c.n, p1, c.p, k);
            const UrnConditional b = urn_conditional_enumerated(c.n, p1, c.p, k);
            max_err = std::max({max_err, std::abs(a.mean_w - b.mean_w), std::abs(a.var_w - b.var_w)});
            csv.row({std::to_string(k), format_number(a.mean_w), format_number(b.mean_w),
                     format_number(a.var_w), format_number(b.var_w)});
        }
    } else {
        throw std::invalid_argument("oracle-check: unsupported model " + c.model);
    }
    res.metrics["max_abs_error"] = max_err;
    std::filesystem::create_directories(c.out);
    const std::string path = c.out + "/oracle_check.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    res.summary = "oracle-check max_abs_error=" + format_number(max_err);
    return res;
}

RunResult run_verify_assumptions(const RunConfig& c) {
    ModelPtr base = build_base(c);
    const ModelContract& mc = base->contract();
    RunResult res;
    Rng rng(c.seed, 3);
    // dY range and lattice membership over sampled transitions
    std::size_t bad_dy = 0, bad_lattice = 0;
    ModelState s = base->draw(rng);
    for (std::size_t i = 0; i < c.samples; ++i) {
        const double y0 = s.y;
        base->step(s, rng);
        const double dy = s.y - y0;
        if (std::abs(dy) > 1.0 + 1e-9 || std::abs(dy - std::round(dy)) > 1e-9) ++bad_dy;
        if (!mc.lattice.contains(s.y)) ++bad_lattice;
    }
    res.metrics["bad_dy"] = static_cast<double>(bad_dy);
    res.metrics["bad_lattice"] = static_cast<double>(bad_lattice);
    res.metrics["a_sum_err"] = std::abs(mc.constants.a_plus + mc.constants.a_minus - 1.0);
    res.metrics["b_sum_err"] = (mc.constants.b_plus + mc.constants.b_minus).norm();
    // R0 declaration against enumerated moments on fresh draws
    double max_r0_gap = 0.0;
    if (mc.finite_proposals) {
        for (int i = 0; i < 50; ++i) {
            const ModelState st = base->draw(rng);
            const MomentProfile prof = enumerated_profile(*base, st);
            double r0p, r0m;
            base->r0(st, r0p, r0m);
            max_r0_gap = std::max({max_r0_gap, std::abs(prof.m0_plus - mc.constants.q - r0p),
                                   std::abs(prof.m0_minus - mc.constants.q - r0m)});
        }
    }
    res.metrics["max_r0_gap"] = max_r0_gap;
    if (mc.case_two && mc.dim == 1 && mc.finite_proposals) {
        ThetaOptions to;
        to.samples = std::min<std::size_t>(c.samples, 20000);
        to.seed = c.seed;
        const MeanWithError th = theta_diagnostic(*base, c.k, StepFunction::point, to);
        res.metrics["theta_mean"] = th.mean;
        res.metrics["theta_stderr"] = th.stderr_;
    }
    std::filesystem::create_directories(c.out);
    CsvWriter csv;
    csv.row({"metric", "value"});
    for (const auto& [k2, v] : res.metrics) csv.row({k2, format_number(v)});
    const std::string path = c.out + "/verify_assumptions.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    res.summary = "verify-assumptions max_r0_gap=" + format_number(max_r0_gap);
    return res;
}

RunResult run_llt(const RunConfig& c) {
    ModelPtr base = build_base(c);
    const ModelContract& mc = base->contract();
    if (!mc.y_law.exact() || mc.y_law.kind == YLawKind::degenerate)
        throw std::invalid_argument("llt: model has no exact lattice law");
    const LltReport rep = llt_check(mc.y_law);
    RunResult res;
    res.metrics["sigma"] = rep.sigma;
    res.metrics["eps_y"] = rep.eps_y;
    res.metrics["sup_pmf"] = rep.sup_pmf;
    const double y_k = mc.lattice.point(c.k);
    const double pk = mc.y_law.prob_y(y_k), pkm1 = mc.y_law.prob_y(y_k - 1.0);
    if (pk > 0.0 && pkm1 > 0.0) {
        const double exact = std::abs(1.0 - pkm1 / pk);
        const double envelope = llt_ratio_bound(rep.eps_y, c.k, rep.sigma);
        res.metrics["ratio_gap_exact"] = exact;
        res.metrics["ratio_gap_envelope"] = envelope;
        res.metrics["implied_constant"] = envelope > 0.0 ? exact / envelope : 0.0;
    }
    std::filesystem::create_directories(c.out);
    CsvWriter csv;
    csv.row({"metric", "value"});
    for (const auto& [k2, v] : res.metrics) csv.row({k2, format_number(v)});
    const std::string path = c.out + "/llt.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    res.summary = "llt eps_y=" + format_number(rep.eps_y);
    return res;
}

RunResult run_decompose(const RunConfig& c) {
    const SubgraphSpec h = SubgraphSpec::named(c.subgraph);
    const SubgraphDecomposition dec = subgraph_decomposition(c.n, c.p, h);
    RunResult res;
    res.metrics["copies"] = static_cast<double>(dec.copies);
    res.metrics["ext_t"] = static_cast<double>(dec.ext_t);
    res.metrics["ext_u"] = static_cast<double>(dec.ext_u);
    res.metrics["coef_t"] = dec.coef_t;
    res.metrics["coef_u"] = dec.coef_u;
    res.metrics["var_hhat"] = dec.var_hhat;
    res.metrics["rho1"] = dec.rho1;
    res.metrics["rho2"] = dec.rho2;
    if (c.n <= 7) {
        const DecompositionCheck chk = exact_decomposition_check(c.n, c.p, h);
        res.metrics["er_h"] = chk.er_h;
        res.metrics["er_h2"] = chk.er_h2;
        res.metrics["order_ratio"] = chk.order_ratio;
        res.metrics["max_abs_rh"] = chk.max_abs_rh;
    }
    std::filesystem::create_directories(c.out);
    CsvWriter csv;
    csv.row({"metric", "value"});
    for (const auto& [k2, v] : res.metrics) csv.row({k2, format_number(v)});
    const std::string path = c.out + "/decompose.csv";
    write_text_file(path, csv.body());
    res.files.push_back(path);
    res.summary = "decompose rho1=" + format_number(dec.rho1) + " rho2=" + format_number(dec.rho2);
    return res;
}

} // namespace

RunResult run(const RunConfig& c) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult res;
    if (c.subcommand == "rate") res = run_rate(c);
    else if (c.subcommand == "distance") res = run_distance(c);
    else if (c.subcommand == "bound") res = run_bound(c);
    else if (c.subcommand == "oracle-check") res = run_oracle_check(c);
    else if (c.subcommand == "verify-assumptions") res = run_verify_assumptions(c);
    else if (c.subcommand == "llt") res = run_llt(c);
    else if (c.subcommand == "decompose") res = run_decompose(c);
    else throw std::invalid_argument("unknown subcommand: " + c.subcommand);
    const auto t1 = std::chrono::steady_clock::now();
    const double wall = std::chrono::duration<double>(t1 - t0).count();
    std::filesystem::create_directories(c.out);
    write_manifest(c.out + "/manifest.txt", c.echo(), wall);
    res.files.push_back(c.out + "/manifest.txt");
    return res;
}

} // namespace cclt

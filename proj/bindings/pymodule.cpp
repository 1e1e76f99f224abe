#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cclt/bounds.hpp"
#include "cclt/empirics.hpp"
#include "cclt/models.hpp"
#include "cclt/moments.hpp"
#include "cclt/oracle.hpp"
#include "cclt/runner.hpp"
#include "cclt/subgraph.hpp"
#include "cclt/transform.hpp"

namespace py = pybind11;
using namespace cclt;

namespace {

py::dict report_to_dict(const BoundReport& rep) {
    py::dict d;
    d["theorem"] = rep.theorem;
    py::dict terms;
    for (const auto& [name, value] : rep.terms) terms[py::str(name)] = value;
    d["terms"] = terms;
    d["total"] = rep.total;
    return d;
}

py::dict mwe_to_dict(const MeanWithError& m) {
    py::dict d;
    d["mean"] = m.mean;
    d["stderr"] = m.stderr_;
    d["n"] = m.n;
    return d;
}

py::dict summary_to_dict(const ResidualSummary& s) {
    py::dict d;
    d["k"] = s.k;
    d["p_k"] = s.p_k;
    d["p_km1"] = s.p_km1;
    d["r_k"] = s.r_k;
    d["abs_R1_minus_at_k"] = mwe_to_dict(s.abs_r1_minus_at_k);
    d["abs_R1_plus_at_km1"] = mwe_to_dict(s.abs_r1_plus_at_km1);
    d["abs_R2_minus_at_k"] = mwe_to_dict(s.abs_r2_minus_at_k);
    d["abs_R2_plus_at_km1"] = mwe_to_dict(s.abs_r2_plus_at_km1);
    d["D_hat"] = mwe_to_dict(s.d_hat);
    d["E_hat"] = mwe_to_dict(s.e_hat);
    return d;
}

ModelPtr model_from_args(const std::string& name, int n, double p, bool transformed) {
    ModelPtr m = make_model(name, n, p);
    if (transformed) m = make_transformed(m);
    return m;
}

} // namespace

PYBIND11_MODULE(_cclt, m) {
    m.doc() = "exchangeable-pair models, conditional moments and Wasserstein bounds";

    py::class_<PairModel, ModelPtr>(m, "Model")
        .def_property_readonly("name", [](const PairModel& self) { return self.contract().name; })
        .def_property_readonly("dim", [](const PairModel& self) { return self.contract().dim; })
        .def("contract",
             [](const PairModel& self) {
                 const ContractDescriptor d = model_contract(self);
                 py::dict out;
                 out["name"] = d.name;
                 out["dim"] = d.dim;
                 out["zeta"] = d.zeta;
                 out["lambda"] = d.lambda;
                 out["psi"] = d.psi;
                 out["Q"] = d.q;
                 out["analytic_moments"] = d.analytic_moments;
                 out["enumeration_feasible"] = d.enumeration_feasible;
                 out["log2_states"] = d.log2_states;
                 out["conditional_sampler"] = d.conditional_sampler;
                 return out;
             })
        .def("sample_w",
             [](const PairModel& self, std::size_t count, std::uint64_t seed) {
                 Rng rng(seed, 0);
                 Eigen::MatrixXd w(count, self.contract().dim);
                 for (std::size_t i = 0; i < count; ++i) {
                     const ModelState s = self.draw(rng);
                     w.row(i) = s.w.transpose();
                 }
                 return w;
             },
             py::arg("count"), py::arg("seed") = 1);

    m.def("make_model", &model_from_args, py::arg("name"), py::arg("n"), py::arg("p") = 0.5,
          py::arg("transformed") = false);

    m.def(
        "sample_conditional",
        [](const ModelPtr& model, long long k, std::size_t target, std::uint64_t seed, int workers) {
            SampleOptions so;
            so.target = target;
            so.seed = seed;
            so.workers = workers;
            const ConditionalSample cs = sample_conditional(*model, k, so);
            py::dict out;
            out["w"] = cs.w;
            out["k"] = cs.k;
            out["acceptance"] = cs.acceptance;
            return out;
        },
        py::arg("model"), py::arg("k") = 0, py::arg("target") = 10000, py::arg("seed") = 1,
        py::arg("workers") = 1);

    m.def(
        "residual_summary",
        [](const ModelPtr& model, long long k, std::size_t samples, std::uint64_t seed, int workers) {
            SummaryOptions so;
            so.samples = samples;
            so.seed = seed;
            so.workers = workers;
            return summary_to_dict(estimate_residual_summary(*model, k, so));
        },
        py::arg("model"), py::arg("k") = 0, py::arg("samples") = 20000, py::arg("seed") = 1,
        py::arg("workers") = 1);

    m.def("w1_to_std_normal", [](std::vector<double> v) { return w1_to_std_normal(std::move(v)); });
    m.def(
        "sliced_w1_to_std_normal",
        [](const Eigen::MatrixXd& sample, int directions, std::uint64_t seed) {
            SlicedOptions so;
            so.directions = directions;
            so.seed = seed;
            return sliced_w1_to_std_normal(sample, so);
        },
        py::arg("sample"), py::arg("directions") = 64, py::arg("seed") = 9);
    m.def("rate_regression", [](const std::vector<std::pair<double, double>>& pts) {
        const RateFit f = rate_regression(pts);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["residual"] = f.residual;
        return d;
    });

    m.def("bound_t11", [](double r1, double r2, double dw3, double lam) {
        return report_to_dict(bound_t11(r1, r2, dw3, lam));
    });
    m.def("bound_t13", [](double r, double g, double op, double mx, double mixed, double tr) {
        return report_to_dict(bound_t13(r, g, op, mx, mixed, tr));
    });
    m.def(
        "bound",
        [](const std::string& model, const std::string& theorem, int n, double p, long long k,
           std::size_t samples, std::uint64_t seed, int workers) {
            RunConfig cfg;
            cfg.model = model;
            cfg.theorem = theorem;
            cfg.n = n;
            cfg.p = p;
            cfg.k = k;
            cfg.samples = samples;
            cfg.seed = seed;
            cfg.workers = workers;
            return report_to_dict(bound_pipeline(cfg));
        },
        py::arg("model"), py::arg("theorem") = "t23", py::arg("n") = 256, py::arg("p") = 0.5,
        py::arg("k") = 0, py::arg("samples") = 20000, py::arg("seed") = 1, py::arg("workers") = 1);

    m.def("llt_ratio_bound", &llt_ratio_bound, py::arg("eps_y"), py::arg("k"), py::arg("sigma_y"));
    m.def("holder_bound", &holder_bound, py::arg("norm_p"), py::arg("prob"), py::arg("p") = 8.0);

    m.def("stein_constants", [] {
        const SteinConstants& c = stein_constants();
        py::dict d;
        d["c2"] = c.c2;
        d["c3"] = c.c3;
        d["abs_z_mean"] = c.abs_z_mean;
        d["pi_over_8_quarter"] = c.pi_over_8_quarter;
        return d;
    });

    m.def(
        "conditioned_distance",
        [](const std::string& model, int n, double p, long long k, std::size_t samples,
           std::uint64_t seed, int workers) {
            const DistanceResult d = conditioned_distance(model, n, p, k, samples, seed, workers);
            py::dict out;
            out["distance"] = d.distance;
            out["stderr"] = d.stderr_;
            out["samples"] = d.samples;
            return out;
        },
        py::arg("model"), py::arg("n"), py::arg("p") = 0.5, py::arg("k") = 0,
        py::arg("samples") = 20000, py::arg("seed") = 1, py::arg("workers") = 1);

    m.def("ext_n", [](const std::string& hprime, const std::string& h, int n) {
        return ext_n(SubgraphSpec::named(hprime), SubgraphSpec::named(h), n);
    });
    m.def("subgraph_decomposition", [](int n, double p, const std::string& h) {
        const SubgraphDecomposition d = subgraph_decomposition(n, p, SubgraphSpec::named(h));
        py::dict out;
        out["copies"] = d.copies;
        out["ext_t"] = d.ext_t;
        out["ext_u"] = d.ext_u;
        out["coef_t"] = d.coef_t;
        out["coef_u"] = d.coef_u;
        out["var_hhat"] = d.var_hhat;
        out["rho1"] = d.rho1;
        out["rho2"] = d.rho2;
        return out;
    });

    m.def("pattern01_conditional_mean", [](int n, int m) {
        const LevelSums t = enumerate_binary(n, BinaryStat::pattern01_u, 1);
        return t.mean(m);
    });
}

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cclt/rng.hpp"
#include "cclt/ylaw.hpp"

namespace cclt {

// Y lives on zeta + Z with span 1.
struct LatticeSpec {
    double zeta = 0.0;
    bool contains(double y, double tol = 1e-9) const {
        const double t = y - zeta;
        return std::abs(t - std::round(t)) <= tol;
    }
    // k-th lattice point, y = zeta + k
    double point(long long k) const { return zeta + static_cast<double>(k); }
};

// Exchangeable-pair constants shared by the bound formulas. For d = 1 the
// matrices are 1x1 and psi() reads the scalar.
struct PairConstants {
    double lambda = 0.0;   // in (0,1)
    double sigma_y2 = 0.0; // Var(Y)
    double q = 0.0;        // Q = lambda * sigma_y2
    double a_plus = 0.5, a_minus = 0.5;  // a+ + a- = 1
    Eigen::VectorXd b_plus, b_minus;     // b+ + b- = 0
    Eigen::MatrixXd psi_plus, psi_minus; // Psi = psi_plus + psi_minus
    Eigen::MatrixXd psi_mat;

    double psi() const { return psi_mat(0, 0); }
    int dim() const { return static_cast<int>(psi_mat.rows()); }

    static PairConstants scalar(double lambda, double sigma_y2, double psi,
                                double a_plus, double b_plus_val);
};

// Full configuration of one sampled model instance plus the derived (W, Y).
// `cells` holds discrete occupancy (bits / urn ids / dart segments), `reals`
// continuous marks (toy summands). Models interpret their own layout.
struct ModelState {
    std::vector<std::uint8_t> cells;
    std::vector<double> reals;
    Eigen::VectorXd w;
    double y = 0.0;
    Eigen::VectorXd w_base; // pre-transform statistic, maintained by wrappers
};

struct PairStep {
    Eigen::VectorXd delta_w;
    int delta_y = 0; // in {-1, 0, +1}
};

// Conditional moments M_{l,±}(W,Y) = E((dW)^l 1{dY=±1} | state). The second
// moments are full d x d matrices E(dW dW^T 1{dY=±1} | state).
struct MomentProfile {
    double m0_plus = 0.0, m0_minus = 0.0;
    Eigen::VectorXd m1_plus, m1_minus;
    Eigen::MatrixXd m2_plus, m2_minus;
    Eigen::VectorXd w;
    double y = 0.0;
};

struct MeanWithError {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

// Everything the theorem-level bound evaluators consume, with per-term
// Monte-Carlo standard errors. Conditional levels: k and k-1 on the lattice.
struct ResidualSummary {
    double k = 0.0;          // lattice value of the level Y = k
    double p_k = 0.0, p_km1 = 0.0;
    double r_k = 0.0;        // P(Y=k-1)/P(Y=k)
    bool r_k_exact = false;

    MeanWithError abs_r1_minus_at_k;  // E(|R1,-| | Y=k)        (multi: |Psi^-1 R1,-|)
    MeanWithError abs_r1_plus_at_km1; // E(|R1,+| | Y=k-1)
    MeanWithError abs_r2_minus_at_k;  // E(|R2,-| | Y=k)        (multi: ||Psi^-1 G2,-||_HS)
    MeanWithError abs_r2_plus_at_km1;
    MeanWithError c_hat_w_part;  // E(|W| (|R0,+|+|R0,-|) | Y in {k-1,k})
    MeanWithError c_hat_r0_part; // E(|R0,+|+|R0,-| | Y in {k-1,k})
    MeanWithError d_hat;   // E(|dW| | Y in {k-1,k})
    MeanWithError e_hat;   // E(|dW|^3 | Y in {k-1,k})
    MeanWithError e_hat4;  // E(|(l Psi)^-1 dW| |dW|^3 | Y in {k-1,k})
    MeanWithError e_hat3;  // E(|(l Psi)^-1 dW| |dW|^2 | Y in {k-1,k})
    MeanWithError w_norm2; // E(|W|^2 | Y in {k-1,k})
    MeanWithError w_mean;  // E(W_1 | Y=k), diagnostic

    // unconditional pieces for the Thm 2.1 evaluator
    MeanWithError uncond_r1_diff; // E|R1,+ - R1,-|
    MeanWithError uncond_r2_diff; // E|R2,+ - R2,-|
    MeanWithError uncond_dw3;     // E|dW|^3

    double c_hat(double z_mean) const { return c_hat_w_part.mean + z_mean * c_hat_r0_part.mean; }
};

// Per-term bound breakdown; total is the sum of the terms.
struct BoundReport {
    std::string theorem;
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;
    std::string note;

    void add(const std::string& name, double value) {
        terms.emplace_back(name, value);
        total += value;
    }
    double term(const std::string& name) const;
};

// Declared capabilities and constants of a concrete model.
struct ModelContract {
    std::string name;
    int dim = 1;
    LatticeSpec lattice;
    PairConstants constants;
    Eigen::VectorXd sigma_w2;           // declared Var of each W coordinate
    double y_mean = 0.0;                // EY (0 for centered statistics)
    double lambda_classic = 0.0;        // λ of the dY = 0 sub-chain, when meaningful
    bool analytic_moments = false;      // analytic M_{l,±}(state) available
    bool finite_proposals = true;       // proposal set enumerable per state
    double log2_states = 0.0;           // enumeration feasibility hint
    bool conditional_sampler = false;   // exact sampler of (state | Y=k)
    bool exact_linear_r0 = false;       // R0,± = ∓ lambda a± (Y - EY) exactly
    bool case_two = true;               // pair suitable for the Y-indexed machinery
    YLaw y_law;
};

// visitor args: proposal probability, dW (dim doubles), dY
using ProposalVisitor = std::function<void(double, const double*, int)>;

class PairModel {
public:
    virtual ~PairModel() = default;

    const ModelContract& contract() const { return contract_; }

    // stationary draw (product measure, no burn-in needed)
    virtual ModelState draw(Rng& rng) const = 0;
    // one chain transition in place (keeps w, y in sync)
    virtual void step(ModelState& state, Rng& rng) const = 0;
    // recompute w, y from the configuration
    virtual void refresh(ModelState& state) const = 0;
    // exact conditional draw given Y = y; false when no sufficiency
    virtual bool draw_given_y(double /*y*/, ModelState& /*state*/, Rng& /*rng*/) const { return false; }

    virtual std::size_t proposal_count(const ModelState&) const { return 0; }
    virtual void for_each_proposal(const ModelState&, const ProposalVisitor&) const;

    // exact per-state conditional moments from closed forms, if declared
    virtual bool analytic_profile(const ModelState&, MomentProfile&) const { return false; }
    // exact R0,± as state functions; defaults to M0,± - Q via enumeration
    virtual void r0(const ModelState& state, double& r0_plus, double& r0_minus) const;

protected:
    ModelContract contract_;
};

using ModelPtr = std::shared_ptr<const PairModel>;

// Declared capabilities echo, spec'd as the model_contract operation.
struct ContractDescriptor {
    std::string name;
    int dim;
    double zeta;
    double lambda;
    double psi;
    double q;
    bool analytic_moments;
    bool enumeration_feasible;
    double log2_states;
    bool conditional_sampler;
};

ContractDescriptor model_contract(const PairModel& model);

} // namespace cclt

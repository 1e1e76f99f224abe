#pragma once

#include "cclt/core.hpp"
#include "cclt/moments.hpp"

namespace cclt {

// coefficients of the symmetrizing change of variable
// w0 = x + l A x y + (l/2) theta (y^2 - EY^2) + (l^2/3)(A + a I) theta (y^3 - EY^3)
struct TransformCoefficients {
    double lambda = 0.0;
    double alpha = 0.0;          // (a+ - a-) / 2Q
    Eigen::MatrixXd a_mat;       // (Psi+ - Psi-) / 2Q; scalar psi*alpha for d = 1
    Eigen::VectorXd theta;       // b+ / Q
    double ey2 = 0.0, ey3 = 0.0; // central moments of Y

    static TransformCoefficients from_constants(const PairConstants& c, double ey2, double ey3);
};

Eigen::VectorXd change_of_variable(const Eigen::VectorXd& x, double y_centered,
                                   const TransformCoefficients& tc);
// univariate convenience
double change_of_variable_uni(double x, double y_centered, const TransformCoefficients& tc);

enum class ScalingMode { automatic, declared, monte_carlo, explicit_sigma };

struct TransformOptions {
    ScalingMode scaling = ScalingMode::automatic;
    std::size_t mc_samples = 1000000;
    std::uint64_t mc_seed = 20240601;
    Eigen::VectorXd sigma; // for explicit_sigma
};

// A PairModel wrapper exposing W = W0 / sigma_{W0} with the symmetric
// first-moment contract restored. Y dynamics are untouched.
class TransformedModel final : public PairModel {
public:
    TransformedModel(ModelPtr base, const TransformOptions& opts);

    const TransformCoefficients& coefficients() const { return tc_; }
    const Eigen::VectorXd& sigma() const { return sigma_; }
    const ModelPtr& base() const { return base_; }

    ModelState draw(Rng& rng) const override;
    void step(ModelState& state, Rng& rng) const override;
    void refresh(ModelState& state) const override;
    bool draw_given_y(double y, ModelState& state, Rng& rng) const override;
    std::size_t proposal_count(const ModelState& s) const override { return base_->proposal_count(s); }
    void for_each_proposal(const ModelState&, const ProposalVisitor&) const override;
    void r0(const ModelState& state, double& r0p, double& r0m) const override {
        base_->r0(state, r0p, r0m);
    }

private:
    void apply(ModelState& state) const;
    ModelPtr base_;
    TransformCoefficients tc_;
    Eigen::VectorXd sigma_;
};

std::shared_ptr<const TransformedModel> make_transformed(ModelPtr base,
                                                         const TransformOptions& opts = {});

// per-state residual components of the transformed first-moment contract
struct TransformedResiduals {
    double eps0_plus = 0, eps0_minus = 0;
    double eps1_plus = 0, eps1_minus = 0;
    double eps2_plus = 0, eps2_minus = 0;
    double eps3_plus = 0, eps3_minus = 0;
    double lead = 0;               // (l theta / 2)(1 - psi/2) (Y^2 - EY^2) / sigma
    double r1t_plus = 0, r1t_minus = 0; // lead + sum eps / sigma
};

// evaluates the displayed residual decomposition for a univariate transformed
// model at one state (uses the base model's asymmetric-contract residuals)
TransformedResiduals transformed_residuals_uni(const TransformedModel& model,
                                               const ModelState& state);

struct ConditionalMeanReport {
    double k = 0.0;
    double mean_x = 0.0;          // closed-form E(X | Y=k)
    double mean_after_xy = 0.0;   // E(X + l psi a X Y | Y=k)
    double correction = 0.0;      // quadratic + cubic terms of the change of variable
    double residual = 0.0;        // mean_after_xy + correction = E(W0 | Y=k) up to scaling
    double rel_discrepancy = 0.0; // |residual| / max(|mean_after_xy|, 1e-12)
};

// closed-form conditional-mean cancellation check; pattern01 and wedge-edge only
ConditionalMeanReport conditional_mean_check(const PairModel& model, long long k);

} // namespace cclt

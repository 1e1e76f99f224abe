#include "cclt/core.hpp"

#include <stdexcept>

namespace cclt {

PairConstants PairConstants::scalar(double lambda, double sigma_y2, double psi,
                                    double a_plus, double b_plus_val) {
    PairConstants c;
    c.lambda = lambda;
    c.sigma_y2 = sigma_y2;
    c.q = lambda * sigma_y2;
    c.a_plus = a_plus;
    c.a_minus = 1.0 - a_plus;
    c.b_plus = Eigen::VectorXd::Constant(1, b_plus_val);
    c.b_minus = -c.b_plus;
    c.psi_mat = Eigen::MatrixXd::Constant(1, 1, psi);
    c.psi_plus = Eigen::MatrixXd::Constant(1, 1, a_plus * psi);
    c.psi_minus = Eigen::MatrixXd::Constant(1, 1, (1.0 - a_plus) * psi);
    return c;
}

double BoundReport::term(const std::string& name) const {
    for (const auto& [k, v] : terms)
        if (k == name) return v;
    throw std::out_of_range("BoundReport: no term named " + name);
}

void PairModel::for_each_proposal(const ModelState&, const ProposalVisitor&) const {
    throw std::logic_error(contract_.name + ": proposal set not finitely enumerable");
}

void PairModel::r0(const ModelState& state, double& r0_plus, double& r0_minus) const {
    const double q = contract_.constants.q;
    MomentProfile prof;
    if (analytic_profile(state, prof)) {
        r0_plus = prof.m0_plus - q;
        r0_minus = prof.m0_minus - q;
        return;
    }
    double m0p = 0.0, m0m = 0.0;
    for_each_proposal(state, [&](double prob, const double*, int dy) {
        if (dy > 0) m0p += prob;
        else if (dy < 0) m0m += prob;
    });
    r0_plus = m0p - q;
    r0_minus = m0m - q;
}

ContractDescriptor model_contract(const PairModel& model) {
    const ModelContract& c = model.contract();
    ContractDescriptor d;
    d.name = c.name;
    d.dim = c.dim;
    d.zeta = c.lattice.zeta;
    d.lambda = c.constants.lambda;
    d.psi = c.constants.psi();
    d.q = c.constants.q;
    d.analytic_moments = c.analytic_moments;
    d.log2_states = c.log2_states;
    d.enumeration_feasible = c.finite_proposals && c.log2_states <= 28.0;
    d.conditional_sampler = c.conditional_sampler;
    return d;
}

} // namespace cclt

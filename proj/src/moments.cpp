#include "cclt/moments.hpp"

#include <cmath>
#include <stdexcept>

#include "cclt/parallel.hpp"

namespace cclt {

namespace {

struct Acc {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        sum2 += x * x;
        ++n;
    }
    void merge(const Acc& o) {
        sum += o.sum;
        sum2 += o.sum2;
        n += o.n;
    }
    MeanWithError stats() const {
        MeanWithError m;
        m.n = n;
        if (n == 0) return m;
        m.mean = sum / static_cast<double>(n);
        if (n > 1) {
            const double var = std::max(0.0, (sum2 - sum * sum / static_cast<double>(n)) /
                                                 static_cast<double>(n - 1));
            m.stderr_ = std::sqrt(var / static_cast<double>(n));
        }
        return m;
    }
};

MeanWithError mix_two(const MeanWithError& a, double wa, const MeanWithError& b, double wb) {
    MeanWithError m;
    m.mean = wa * a.mean + wb * b.mean;
    m.stderr_ = std::sqrt(wa * wa * a.stderr_ * a.stderr_ + wb * wb * b.stderr_ * b.stderr_);
    m.n = a.n + b.n;
    return m;
}

} // namespace

MomentProfile enumerated_profile(const PairModel& model, const ModelState& state) {
    const int d = model.contract().dim;
    MomentProfile prof;
    prof.m1_plus = Eigen::VectorXd::Zero(d);
    prof.m1_minus = Eigen::VectorXd::Zero(d);
    prof.m2_plus = Eigen::MatrixXd::Zero(d, d);
    prof.m2_minus = Eigen::MatrixXd::Zero(d, d);
    prof.w = state.w;
    prof.y = state.y;
    model.for_each_proposal(state, [&](double prob, const double* dw, int dy) {
        if (dy == 0) return;
        Eigen::Map<const Eigen::VectorXd> v(dw, d);
        if (dy > 0) {
            prof.m0_plus += prob;
            prof.m1_plus.noalias() += prob * v;
            prof.m2_plus.noalias() += prob * v * v.transpose();
        } else {
            prof.m0_minus += prob;
            prof.m1_minus.noalias() += prob * v;
            prof.m2_minus.noalias() += prob * v * v.transpose();
        }
    });
    return prof;
}

MomentProfile exact_moments(const PairModel& model, const ModelState& state) {
    MomentProfile prof;
    if (model.analytic_profile(state, prof)) return prof;
    return enumerated_profile(model, state);
}

ResidualParts residuals_from_profile(const MomentProfile& prof, const PairConstants& constants,
                                     const Eigen::VectorXd& sigma_w2) {
    const double lam = constants.lambda;
    if (!(lam > 0.0)) throw std::invalid_argument("residuals_from_profile: lambda must be positive");
    ResidualParts r;
    r.r0_plus = prof.m0_plus - constants.q;
    r.r0_minus = prof.m0_minus - constants.q;
    r.r1_plus = -prof.m1_plus / lam - 0.5 * constants.psi_mat * prof.w;
    r.r1_minus = -prof.m1_minus / lam - 0.5 * constants.psi_mat * prof.w;
    r.r1_plus_asym = -prof.m1_plus / lam - constants.psi_plus * prof.w - constants.b_plus * prof.y;
    r.r1_minus_asym = -prof.m1_minus / lam - constants.psi_minus * prof.w - constants.b_minus * prof.y;
    const Eigen::MatrixXd sigma = sigma_w2.asDiagonal();
    r.gamma2_plus = prof.m2_plus / lam - constants.psi_mat * sigma;
    r.gamma2_minus = prof.m2_minus / lam - constants.psi_mat * sigma;
    r.r2_plus = prof.m2_plus(0, 0) / (lam * sigma_w2(0)) - constants.psi();
    r.r2_minus = prof.m2_minus(0, 0) / (lam * sigma_w2(0)) - constants.psi();
    return r;
}

StateFunctionals collect_state_functionals(const PairModel& model, const ModelState& state) {
    const int d = model.contract().dim;
    const PairConstants& c = model.contract().constants;
    StateFunctionals out;
    out.prof.m1_plus = Eigen::VectorXd::Zero(d);
    out.prof.m1_minus = Eigen::VectorXd::Zero(d);
    out.prof.m2_plus = Eigen::MatrixXd::Zero(d, d);
    out.prof.m2_minus = Eigen::MatrixXd::Zero(d, d);
    out.prof.w = state.w;
    out.prof.y = state.y;
    const Eigen::MatrixXd psi_inv = c.psi_mat.inverse();
    model.for_each_proposal(state, [&](double prob, const double* dw, int dy) {
        Eigen::Map<const Eigen::VectorXd> v(dw, d);
        const double nv = v.norm();
        if (nv > 0.0) {
            const double lam_norm = (psi_inv * v).norm() / c.lambda;
            out.abs_dw += prob * nv;
            out.abs_dw3 += prob * nv * nv * nv;
            out.lam_dw3 += prob * lam_norm * nv * nv;
            out.lam_dw4 += prob * lam_norm * nv * nv * nv;
        }
        if (dy == 0) return;
        if (dy > 0) {
            out.prof.m0_plus += prob;
            out.prof.m1_plus.noalias() += prob * v;
            out.prof.m2_plus.noalias() += prob * v * v.transpose();
        } else {
            out.prof.m0_minus += prob;
            out.prof.m1_minus.noalias() += prob * v;
            out.prof.m2_minus.noalias() += prob * v * v.transpose();
        }
    });
    return out;
}

namespace {

// everything accumulated per conditioning level
struct LevelAcc {
    Acc abs_r1_plus, abs_r1_minus, abs_r2_plus, abs_r2_minus;
    Acc c_w, c_r0, d_hat, e_hat, e_hat4, e_hat3, w_norm2, w_mean;
    void merge(const LevelAcc& o) {
        abs_r1_plus.merge(o.abs_r1_plus);
        abs_r1_minus.merge(o.abs_r1_minus);
        abs_r2_plus.merge(o.abs_r2_plus);
        abs_r2_minus.merge(o.abs_r2_minus);
        c_w.merge(o.c_w);
        c_r0.merge(o.c_r0);
        d_hat.merge(o.d_hat);
        e_hat.merge(o.e_hat);
        e_hat4.merge(o.e_hat4);
        e_hat3.merge(o.e_hat3);
        w_norm2.merge(o.w_norm2);
        w_mean.merge(o.w_mean);
    }
};

struct UncondAcc {
    Acc r1_diff, r2_diff, dw3;
    void merge(const UncondAcc& o) {
        r1_diff.merge(o.r1_diff);
        r2_diff.merge(o.r2_diff);
        dw3.merge(o.dw3);
    }
};

void accumulate_state(const PairModel& model, const ModelState& state, LevelAcc& acc) {
    const ModelContract& mc = model.contract();
    const StateFunctionals fx = collect_state_functionals(model, state);
    const ResidualParts parts = residuals_from_profile(fx.prof, mc.constants, mc.sigma_w2);
    const Eigen::MatrixXd psi_inv = mc.constants.psi_mat.inverse();
    if (mc.dim == 1) {
        acc.abs_r1_plus.add(std::abs(parts.r1_plus(0)));
        acc.abs_r1_minus.add(std::abs(parts.r1_minus(0)));
        acc.abs_r2_plus.add(std::abs(parts.r2_plus));
        acc.abs_r2_minus.add(std::abs(parts.r2_minus));
    } else {
        acc.abs_r1_plus.add((psi_inv * parts.r1_plus).norm());
        acc.abs_r1_minus.add((psi_inv * parts.r1_minus).norm());
        acc.abs_r2_plus.add((psi_inv * parts.gamma2_plus).norm()); // Frobenius = HS
        acc.abs_r2_minus.add((psi_inv * parts.gamma2_minus).norm());
    }
    double r0p, r0m;
    model.r0(state, r0p, r0m);
    const double wn = state.w.norm();
    acc.c_w.add(wn * (std::abs(r0p) + std::abs(r0m)));
    acc.c_r0.add(std::abs(r0p) + std::abs(r0m));
    acc.d_hat.add(fx.abs_dw);
    acc.e_hat.add(fx.abs_dw3);
    acc.e_hat4.add(fx.lam_dw4);
    acc.e_hat3.add(fx.lam_dw3);
    acc.w_norm2.add(wn * wn);
    acc.w_mean.add(state.w(0));
}

} // namespace

ResidualSummary estimate_residual_summary(const PairModel& model, long long k,
                                          const SummaryOptions& opts) {
    const ModelContract& mc = model.contract();
    ResidualSummary out;
    out.k = mc.lattice.point(k);
    const double y_k = out.k;
    const double y_km1 = y_k - 1.0;

    const bool exact_law = mc.y_law.exact() && mc.y_law.kind != YLawKind::degenerate;
    if (exact_law) {
        out.p_k = mc.y_law.prob_y(y_k);
        out.p_km1 = mc.y_law.prob_y(y_km1);
        if (!(out.p_k > 0.0) || !(out.p_km1 > 0.0))
            throw std::invalid_argument("estimate_residual_summary: P(Y=k) and P(Y=k-1) must be positive");
        out.r_k = out.p_km1 / out.p_k;
        out.r_k_exact = (mc.y_law.kind == YLawKind::binomial);
    }

    const std::size_t nblocks = 64;
    const std::size_t per_block = (opts.samples + nblocks - 1) / nblocks;

    LevelAcc at_k, at_km1;
    double trials_total = 0.0, hits_k = 0.0, hits_km1 = 0.0;

    if (mc.conditional_sampler) {
        for (int level = 0; level < 2; ++level) {
            const double y = level == 0 ? y_k : y_km1;
            auto blocks = parallel_blocks<LevelAcc>(nblocks, opts.workers, [&](std::size_t b) {
                Rng rng(opts.seed, (level + 1) * 1000003ULL + b);
                LevelAcc acc;
                ModelState s;
                for (std::size_t i = 0; i < per_block; ++i) {
                    if (!model.draw_given_y(y, s, rng))
                        throw std::invalid_argument("estimate_residual_summary: level off support");
                    accumulate_state(model, s, acc);
                }
                return acc;
            });
            LevelAcc& tgt = level == 0 ? at_k : at_km1;
            for (const auto& b : blocks) tgt.merge(b);
        }
    } else {
        // rejection with a pilot-sized main run
        Rng pilot_rng(opts.seed, 999331ULL);
        std::size_t pilot_hits = 0;
        for (std::size_t i = 0; i < opts.pilot; ++i) {
            ModelState s = model.draw(pilot_rng);
            const double d1 = std::abs(s.y - y_k), d2 = std::abs(s.y - y_km1);
            if (d1 < 1e-9 || d2 < 1e-9) ++pilot_hits;
        }
        const double acc_rate = static_cast<double>(pilot_hits) / static_cast<double>(opts.pilot);
        if (acc_rate < opts.min_acceptance)
            throw std::runtime_error("estimate_residual_summary: conditioning event too rare");
        const std::size_t want = std::max<std::size_t>(2 * opts.samples, 2000);
        const std::size_t trials = static_cast<std::size_t>(1.3 * static_cast<double>(want) / acc_rate) + opts.pilot;
        const std::size_t per_trial_block = (trials + nblocks - 1) / nblocks;

        struct RejBlock {
            LevelAcc at_k, at_km1;
            double trials = 0.0, hits_k = 0.0, hits_km1 = 0.0;
        };
        auto blocks = parallel_blocks<RejBlock>(nblocks, opts.workers, [&](std::size_t b) {
            Rng rng(opts.seed, 7000003ULL + b);
            RejBlock rb;
            for (std::size_t i = 0; i < per_trial_block; ++i) {
                ModelState s = model.draw(rng);
                rb.trials += 1.0;
                if (std::abs(s.y - y_k) < 1e-9) {
                    rb.hits_k += 1.0;
                    accumulate_state(model, s, rb.at_k);
                } else if (std::abs(s.y - y_km1) < 1e-9) {
                    rb.hits_km1 += 1.0;
                    accumulate_state(model, s, rb.at_km1);
                }
            }
            return rb;
        });
        for (const auto& b : blocks) {
            at_k.merge(b.at_k);
            at_km1.merge(b.at_km1);
            trials_total += b.trials;
            hits_k += b.hits_k;
            hits_km1 += b.hits_km1;
        }
        if (!exact_law) {
            out.p_k = hits_k / trials_total;
            out.p_km1 = hits_km1 / trials_total;
            if (hits_k == 0.0 || hits_km1 == 0.0)
                throw std::runtime_error("estimate_residual_summary: conditioning event too rare");
            out.r_k = out.p_km1 / out.p_k;
        }
    }

    // exact or estimated mixture weights for the union level {k-1, k}
    const double wk = out.p_k / (out.p_k + out.p_km1);
    const double wkm1 = 1.0 - wk;

    out.abs_r1_minus_at_k = at_k.abs_r1_minus.stats();
    out.abs_r1_plus_at_km1 = at_km1.abs_r1_plus.stats();
    out.abs_r2_minus_at_k = at_k.abs_r2_minus.stats();
    out.abs_r2_plus_at_km1 = at_km1.abs_r2_plus.stats();
    out.c_hat_w_part = mix_two(at_k.c_w.stats(), wk, at_km1.c_w.stats(), wkm1);
    out.c_hat_r0_part = mix_two(at_k.c_r0.stats(), wk, at_km1.c_r0.stats(), wkm1);
    out.d_hat = mix_two(at_k.d_hat.stats(), wk, at_km1.d_hat.stats(), wkm1);
    out.e_hat = mix_two(at_k.e_hat.stats(), wk, at_km1.e_hat.stats(), wkm1);
    out.e_hat4 = mix_two(at_k.e_hat4.stats(), wk, at_km1.e_hat4.stats(), wkm1);
    out.e_hat3 = mix_two(at_k.e_hat3.stats(), wk, at_km1.e_hat3.stats(), wkm1);
    out.w_norm2 = mix_two(at_k.w_norm2.stats(), wk, at_km1.w_norm2.stats(), wkm1);
    out.w_mean = at_k.w_mean.stats();

    // unconditional pieces (Thm 2.1 style C, D, E)
    const std::size_t un = opts.unconditional ? opts.unconditional : std::max<std::size_t>(opts.samples / 4, 1000);
    const std::size_t un_per_block = (un + nblocks - 1) / nblocks;
    auto ublocks = parallel_blocks<UncondAcc>(nblocks, opts.workers, [&](std::size_t b) {
        Rng rng(opts.seed, 3000017ULL + b);
        UncondAcc acc;
        for (std::size_t i = 0; i < un_per_block; ++i) {
            const ModelState s = model.draw(rng);
            const StateFunctionals fx = collect_state_functionals(model, s);
            const ResidualParts parts = residuals_from_profile(fx.prof, mc.constants, mc.sigma_w2);
            if (mc.dim == 1) {
                acc.r1_diff.add(std::abs(parts.r1_plus(0) - parts.r1_minus(0)));
                acc.r2_diff.add(std::abs(parts.r2_plus - parts.r2_minus));
            } else {
                acc.r1_diff.add((parts.r1_plus - parts.r1_minus).norm());
                acc.r2_diff.add((parts.gamma2_plus - parts.gamma2_minus).norm());
            }
            acc.dw3.add(fx.abs_dw3);
        }
        return acc;
    });
    UncondAcc uacc;
    for (const auto& b : ublocks) uacc.merge(b);
    out.uncond_r1_diff = uacc.r1_diff.stats();
    out.uncond_r2_diff = uacc.r2_diff.stats();
    out.uncond_dw3 = uacc.dw3.stats();
    return out;
}

MeanWithError theta_diagnostic(const PairModel& model, long long k, StepFunction g,
                               const ThetaOptions& opts) {
    const ModelContract& mc = model.contract();
    if (mc.dim != 1) throw std::invalid_argument("theta_diagnostic: univariate models only");
    const double y_k = mc.lattice.point(k);
    const double scale = std::sqrt(mc.sigma_w2(0));

    auto g_fn = [g](long long y) -> double {
        if (g == StepFunction::point) return y == 0 ? 1.0 : 0.0;
        return y <= 0 ? ((y % 2) == 0 ? 1.0 : -1.0) : 0.0;
    };
    // f = sin, F = -cos: bounded with bounded derivatives
    auto theta_at = [&](const ModelState& s) {
        const double w = s.w(0) / scale;
        const long long rel = std::llround(s.y - y_k);
        double th = 0.0;
        model.for_each_proposal(s, [&](double prob, const double* dw, int dy) {
            if (dy == 0) return;
            const double fw = std::cos(w) - std::cos(w + dw[0] / scale);
            th += prob * fw * (dy > 0 ? g_fn(rel + 1) : g_fn(rel));
        });
        return th;
    };

    Acc acc;
    if (opts.stationary) {
        Rng rng(opts.seed, 17);
        for (std::size_t i = 0; i < opts.samples; ++i) acc.add(theta_at(model.draw(rng)));
    } else {
        Rng rng(opts.seed, 17);
        ModelState s = model.draw(rng);
        std::fill(s.cells.begin(), s.cells.end(), 0);
        std::fill(s.reals.begin(), s.reals.end(), 0.0);
        model.refresh(s);
        for (std::size_t i = 0; i < opts.samples; ++i) {
            acc.add(theta_at(s));
            model.step(s, rng);
        }
    }
    return acc.stats();
}

double holder_bound(double norm_p, double prob, double p) {
    if (!(prob > 0.0)) throw std::invalid_argument("holder_bound: probability must be positive");
    return norm_p / std::pow(prob, 1.0 / p);
}

} // namespace cclt

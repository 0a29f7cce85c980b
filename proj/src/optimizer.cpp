#include "lrbs/optimizer.hpp"

#include <cmath>

#include "lrbs/error.hpp"

namespace lrbs {

namespace {

struct FullStep {
    SvtResult prox;
    double eta_used;
    double smooth_at_next; // l(m_next), already paid for by the search
};

// Shared by the public backtracking_step and the training loop.
FullStep search_step(const LossContext& ctx, const Matrix& q, double eta, double lambda,
                     double shrink) {
    if (!(eta > 0.0))
        throw ValidationError("backtracking_step: eta must be positive");
    if (!(shrink > 0.0) || !(shrink < 1.0))
        throw ValidationError("backtracking_step: shrink must be in (0, 1)");
    if (lambda < 0.0)
        throw ValidationError("backtracking_step: lambda must be nonnegative");

    const Matrix grad = gradient_smooth(ctx, q);
    const double l_q = objective_smooth(ctx, q);
    // Absolute slack for the comparison; near a fixed point both sides
    // agree to rounding and the raw inequality can flip by one ulp.
    const double slack = 1e-12 * std::max(1.0, std::abs(l_q));

    while (true) {
        SvtResult prox = svt_full(q - eta * grad, lambda * eta);
        const Matrix diff = prox.value - q;
        const double l_next = objective_smooth(ctx, prox.value);
        const double bound =
            l_q + grad.cwiseProduct(diff).sum() + diff.squaredNorm() / (2.0 * eta);
        if (l_next <= bound + slack)
            return {std::move(prox), eta, l_next};
        eta *= shrink;
        if (eta < kEtaFloor)
            throw NumericalError("backtracking_step: step size underflow below 1e-15; "
                                 "the majorization test never passed");
    }
}

} // namespace

void validate(const TrainConfig& cfg) {
    if (cfg.lambda < 0.0)
        throw ValidationError("TrainConfig: lambda must be nonnegative");
    if (cfg.max_iters <= 0)
        throw ValidationError("TrainConfig: max_iters must be positive");
    if (!(cfg.rel_tol > 0.0))
        throw ValidationError("TrainConfig: rel_tol must be positive");
    if (!(cfg.eta0 > 0.0))
        throw ValidationError("TrainConfig: eta0 must be positive");
    if (!(cfg.backtrack_shrink > 0.0) || !(cfg.backtrack_shrink < 1.0))
        throw ValidationError("TrainConfig: backtrack_shrink must be in (0, 1)");
}

double momentum_next(double alpha) {
    if (alpha < 1.0)
        throw ValidationError("momentum_next: alpha must be >= 1");
    return (1.0 + std::sqrt(1.0 + 4.0 * alpha * alpha)) / 2.0;
}

StepResult backtracking_step(const LossContext& ctx, const Matrix& q, double eta,
                             double lambda, double shrink) {
    FullStep s = search_step(ctx, q, eta, lambda, shrink);
    return {std::move(s.prox.value), s.eta_used};
}

TrainResult train(const LossContext& ctx, const TrainConfig& cfg) {
    validate(cfg);

    const Index d1 = ctx.dim_x();
    const Index d2 = ctx.dim_z();
    Matrix q = Matrix::Zero(d1, d2);
    Matrix m_prev = q;
    double alpha = 1.0;
    double eta = cfg.eta0;

    TrainResult out;
    double f_prev = objective_smooth(ctx, m_prev); // nuclear norm of 0 is 0
    out.trace.push_back({1, f_prev, f_prev, 0.0, cfg.eta0, 0.0, 0});

    Matrix best = m_prev;
    double best_obj = f_prev;

    for (int t = 1; t <= cfg.max_iters; ++t) {
        FullStep step = search_step(ctx, q, eta, cfg.lambda, cfg.backtrack_shrink);
        const Matrix& m_next = step.prox.value;
        const double nuclear = step.prox.nuclear();
        const double obj = step.smooth_at_next + cfg.lambda * nuclear;
        if (!std::isfinite(obj))
            throw NumericalError("train: objective became non-finite at iteration " +
                                 std::to_string(t));

        const double alpha_next = momentum_next(alpha);
        const double beta = (alpha - 1.0) / alpha_next;
        q = m_next + beta * (m_next - m_prev);

        out.trace.push_back({t + 1, obj, step.smooth_at_next, nuclear, step.eta_used, beta,
                             static_cast<int>(step.prox.rank())});
        if (obj < best_obj) {
            best_obj = obj;
            best = m_next;
        }

        const double rel = std::abs(obj - f_prev) / std::max(1.0, std::abs(f_prev));
        m_prev = m_next;
        f_prev = obj;
        alpha = alpha_next;
        eta = step.eta_used * kEtaGrowth;
        if (rel < cfg.rel_tol) {
            out.converged = true;
            break;
        }
    }

    out.model.m = std::move(best);
    out.model.lambda = cfg.lambda;
    out.model.metadata = {"dim_x=" + std::to_string(d1), "dim_z=" + std::to_string(d2),
                          "lambda=" + std::to_string(cfg.lambda),
                          "seed=" + std::to_string(cfg.seed)};
    return out;
}

TrainResult train(const LabeledModality& x_mod, const LabeledModality& z_mod,
                  const TrainConfig& cfg) {
    return train(make_context(x_mod, z_mod), cfg);
}

TrainResult train_pipeline(const LabeledModality& x_mod, const LabeledModality& z_mod,
                           const TrainConfig& cfg, std::optional<double> pca_energy) {
    validate_modality(x_mod, "train: x modality");
    validate_modality(z_mod, "train: z modality");
    if (!pca_energy)
        return train(x_mod, z_mod, cfg);

    PcaProjection px = pca_fit(x_mod.features, *pca_energy);
    PcaProjection pz = pca_fit(z_mod.features, *pca_energy);
    LabeledModality xr{pca_apply(px, x_mod.features), x_mod.labels};
    LabeledModality zr{pca_apply(pz, z_mod.features), z_mod.labels};
    TrainResult out = train(xr, zr, cfg);
    out.model.pca_x = std::move(px);
    out.model.pca_z = std::move(pz);
    out.model.metadata.push_back("pca_energy=" + std::to_string(*pca_energy));
    return out;
}

} // namespace lrbs

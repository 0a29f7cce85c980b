#include "lrbs/loss.hpp"

#include <cmath>

#include "lrbs/error.hpp"

namespace lrbs {

namespace {

void check_context(const LossContext& ctx) {
    if (ctx.x.cols() != ctx.sup.y.rows() || ctx.z.cols() != ctx.sup.y.cols())
        throw ValidationError("loss: supervision is " + std::to_string(ctx.sup.y.rows()) +
                              "x" + std::to_string(ctx.sup.y.cols()) + " but features give " +
                              std::to_string(ctx.x.cols()) + "x" + std::to_string(ctx.z.cols()) +
                              " pairs");
    if (ctx.sup.w.rows() != ctx.sup.y.rows() || ctx.sup.w.cols() != ctx.sup.y.cols())
        throw ValidationError("loss: sign and weight matrices differ in shape");
}

void check_model_shape(const LossContext& ctx, const Matrix& m, const char* who) {
    if (m.rows() != ctx.dim_x() || m.cols() != ctx.dim_z())
        throw ValidationError(std::string(who) + ": M is " + std::to_string(m.rows()) + "x" +
                              std::to_string(m.cols()) + ", expected " +
                              std::to_string(ctx.dim_x()) + "x" + std::to_string(ctx.dim_z()));
}

} // namespace

LossContext make_context(const LabeledModality& a, const LabeledModality& b) {
    PairSupervision sup = build_supervision(a, b);
    return {a.features, b.features, std::move(sup)};
}

double softplus(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
    if (t >= 0.0)
        return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double objective_smooth(const LossContext& ctx, const Matrix& m) {
    check_context(ctx);
    check_model_shape(ctx, m, "objective_smooth");
    // Scores for the full pair grid, materialized once.
    Matrix margin = -(ctx.sup.y.array() * (ctx.x.transpose() * m * ctx.z).array());
    double total = 0.0;
    for (Index j = 0; j < margin.cols(); ++j)
        for (Index i = 0; i < margin.rows(); ++i)
            total += ctx.sup.w(i, j) * softplus(margin(i, j));
    return total;
}

double objective_full(const LossContext& ctx, const Matrix& m, double lambda) {
    if (lambda < 0.0)
        throw ValidationError("objective_full: lambda must be nonnegative");
    return objective_smooth(ctx, m) + lambda * nuclear_norm(m);
}

Matrix gradient_smooth(const LossContext& ctx, const Matrix& q) {
    check_context(ctx);
    check_model_shape(ctx, q, "gradient_smooth");
    Matrix scores = ctx.x.transpose() * q * ctx.z;
    // T_ij = w_ij y_ij sigmoid(-y_ij s_ij); sigmoid handles both tails.
    Matrix t(scores.rows(), scores.cols());
    for (Index j = 0; j < scores.cols(); ++j)
        for (Index i = 0; i < scores.rows(); ++i)
            t(i, j) = ctx.sup.w(i, j) * ctx.sup.y(i, j) *
                      sigmoid(-ctx.sup.y(i, j) * scores(i, j));
    return -(ctx.x * t * ctx.z.transpose());
}

} // namespace lrbs

#pragma once

#include "lrbs/pairs.hpp"

namespace lrbs {

/// Everything the weighted logistic pair loss needs: the two feature
/// matrices and the sign/weight supervision over their cross pairs.
struct LossContext {
    Matrix x; ///< d1 x m
    Matrix z; ///< d2 x n
    PairSupervision sup;

    Index dim_x() const { return x.rows(); }
    Index dim_z() const { return z.rows(); }
};

/// Build a context from two labeled modalities (derives the supervision).
LossContext make_context(const LabeledModality& a, const LabeledModality& b);

/// log(1 + exp(t)) without overflow: max(t, 0) + log1p(exp(-|t|)).
double softplus(double t);

/// 1 / (1 + exp(-t)) evaluated in the non-overflowing branch.
double sigmoid(double t);

/// Weighted logistic loss: sum_ij w_ij * softplus(-y_ij * x_i^T M z_j).
double objective_smooth(const LossContext& ctx, const Matrix& m);

/// Smooth loss plus lambda times the nuclear norm of m.
double objective_full(const LossContext& ctx, const Matrix& m, double lambda);

/// Gradient of the smooth loss at q: -X T Z^T with
/// T_ij = w_ij * y_ij / (1 + exp(y_ij * x_i^T Q z_j)).
Matrix gradient_smooth(const LossContext& ctx, const Matrix& q);

} // namespace lrbs

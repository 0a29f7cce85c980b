#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lrbs/loss.hpp"
#include "lrbs/prox.hpp"

namespace lrbs {

/// Accepted steps grow the next trial step by this factor.
inline constexpr double kEtaGrowth = 1.1;

/// Step sizes below this abort the line search as a numerical failure.
inline constexpr double kEtaFloor = 1e-15;

struct TrainConfig {
    double lambda = 0.0;           ///< nuclear-norm weight, >= 0
    int max_iters = 500;           ///< > 0
    double rel_tol = 1e-6;         ///< relative objective change, > 0
    double eta0 = 1.0;             ///< initial step size, > 0
    double backtrack_shrink = 0.5; ///< in (0, 1)
    std::uint64_t seed = 0;        ///< recorded in metadata; the loop itself
                                   ///< has no randomness
};

void validate(const TrainConfig& cfg);

/// One record per iterate M_t. Row 1 is the zero initialization; the row
/// for t >= 2 carries the step size that produced M_t and the momentum
/// weight used right after to form the next search point.
struct TraceRow {
    int iter;
    double objective; ///< f(M_t) = smooth + lambda * nuclear
    double smooth;    ///< l(M_t)
    double nuclear;   ///< ||M_t||_*
    double eta;
    double momentum;
    int rank;
};

using TrainTrace = std::vector<TraceRow>;

/// The learned bilinear matrix plus the projections needed to score raw
/// features, and free-form provenance strings.
struct SimilarityModel {
    Matrix m; ///< d1 x d2 in the (possibly PCA-reduced) feature dimensions
    std::optional<PcaProjection> pca_x;
    std::optional<PcaProjection> pca_z;
    double lambda = 0.0;
    std::vector<std::string> metadata;
};

/// Momentum recursion: alpha -> (1 + sqrt(1 + 4 alpha^2)) / 2.
double momentum_next(double alpha);

struct StepResult {
    Matrix m_next;
    double eta_used;
};

/// One proximal gradient step from q with backtracking: shrink eta until
///   l(m_next) <= l(q) + <grad l(q), m_next - q> + ||m_next - q||_F^2 / (2 eta)
/// where m_next = svt(q - eta * grad l(q), lambda * eta).
StepResult backtracking_step(const LossContext& ctx, const Matrix& q, double eta,
                             double lambda, double shrink);

struct TrainResult {
    SimilarityModel model; ///< best-objective iterate
    TrainTrace trace;
    bool converged = false;
};

/// Accelerated proximal gradient on a prebuilt loss context.
TrainResult train(const LossContext& ctx, const TrainConfig& cfg);

/// Convenience overload: derives the pair supervision from the labels.
TrainResult train(const LabeledModality& x_mod, const LabeledModality& z_mod,
                  const TrainConfig& cfg);

/// Full training pipeline: optionally fit energy-threshold PCA on each
/// modality (training data only), project, train, and attach the
/// projections to the returned model.
TrainResult train_pipeline(const LabeledModality& x_mod, const LabeledModality& z_mod,
                           const TrainConfig& cfg, std::optional<double> pca_energy);

} // namespace lrbs

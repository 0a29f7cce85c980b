#pragma once

#include "lrbs/linalg.hpp"

namespace lrbs {

/// Boundary guard for classifying sigma - gamma as zero.
inline constexpr double kSvtGuard = 1e-12;

/// SVT output together with its (already thresholded) singular values,
/// so callers can read off the nuclear norm and rank without another SVD.
struct SvtResult {
    Matrix value;
    Vector singular_values; ///< positive entries only, nonincreasing

    Index rank() const { return singular_values.size(); }
    double nuclear() const { return singular_values.sum(); }
};

/// Proximal operator of gamma * ||.||_* : shrink every singular value by
/// gamma and clip at zero, U max(Sigma - gamma, 0) V^T.
SvtResult svt_full(const Matrix& l, double gamma);

Matrix svt(const Matrix& l, double gamma);

/// Subgradient residuals for a candidate minimizer of
/// (1/2) ||M - L||_F^2 + gamma ||M||_*.
/// With U0, V0 the singular spaces of the candidate and
/// S = (L - candidate)/gamma - U0 V0^T, optimality requires
/// U0^T S = 0, S V0 = 0 and ||S||_2 <= 1.
struct SvtOptimality {
    bool pass;
    double left_residual;  ///< ||U0^T S||_F
    double right_residual; ///< ||S V0||_F
    double spectral_norm;  ///< ||S||_2
};

SvtOptimality check_svt_optimality(const Matrix& l, double gamma, const Matrix& candidate,
                                   double tol = 1e-6);

} // namespace lrbs

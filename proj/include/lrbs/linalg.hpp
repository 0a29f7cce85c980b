#pragma once

#include <Eigen/Dense>

namespace lrbs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Singular values below kRankTolerance * sigma_max are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

/// Thin SVD truncated to numerical rank r.
struct SvdResult {
    Matrix u;     ///< d1 x r, orthonormal columns
    Vector sigma; ///< length r, positive, nonincreasing
    Matrix v;     ///< d2 x r, orthonormal columns

    Index rank() const { return sigma.size(); }
    Matrix reconstruct() const { return u * sigma.asDiagonal() * v.transpose(); }
};

/// Thin SVD of a dense matrix. Rejects non-finite input.
SvdResult svd(const Matrix& a);

/// Sum of singular values.
double nuclear_norm(const Matrix& a);

/// Number of singular values above the relative rank tolerance.
Index numerical_rank(const Matrix& a);

/// Mean-centered principal component basis truncated at an energy fraction.
struct PcaProjection {
    Vector mean;            ///< per-dimension sample mean
    Matrix basis;           ///< input-dim x k, orthonormal columns
    double retained_energy; ///< achieved eigenvalue fraction, >= the request

    Index input_dim() const { return mean.size(); }
    Index components() const { return basis.cols(); }
};

/// Fit a PCA on x (one sample per column). k is the smallest component
/// count whose cumulative eigenvalue fraction reaches `energy`.
PcaProjection pca_fit(const Matrix& x, double energy);

/// Project samples (columns of x) onto the basis: basis^T (x - mean).
Matrix pca_apply(const PcaProjection& p, const Matrix& x);

} // namespace lrbs

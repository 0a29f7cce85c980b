#include "lrbs/linalg.hpp"

#include <Eigen/SVD>

#include "lrbs/error.hpp"

namespace lrbs {

SvdResult svd(const Matrix& a) {
    if (!a.allFinite())
        throw ValidationError("svd: input contains NaN or Inf");
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = dec.singularValues();
    const double cutoff = s.size() > 0 ? kRankTolerance * s(0) : 0.0;
    Index r = 0;
    while (r < s.size() && s(r) > cutoff)
        ++r;
    return {dec.matrixU().leftCols(r), s.head(r), dec.matrixV().leftCols(r)};
}

double nuclear_norm(const Matrix& a) {
    if (!a.allFinite())
        throw ValidationError("nuclear_norm: input contains NaN or Inf");
    return Eigen::BDCSVD<Matrix>(a).singularValues().sum();
}

Index numerical_rank(const Matrix& a) { return svd(a).rank(); }

PcaProjection pca_fit(const Matrix& x, double energy) {
    if (x.cols() < 2)
        throw ValidationError("pca_fit: need at least 2 samples");
    if (!(energy > 0.0) || energy > 1.0)
        throw ValidationError("pca_fit: energy must be in (0, 1]");

    Vector mean = x.rowwise().mean();
    Matrix centered = x.colwise() - mean;
    SvdResult dec = svd(centered);
    if (dec.rank() == 0)
        throw ValidationError("pca_fit: data has zero variance");

    // Eigenvalues of the sample covariance are sigma^2 / (n - 1); the
    // common 1/(n-1) factor cancels in the energy fractions.
    Vector eig = dec.sigma.array().square();
    const double total = eig.sum();
    Index k = dec.rank();
    double retained = 1.0; // everything kept if the threshold is never reached
    double cum = 0.0;
    for (Index i = 0; i < eig.size(); ++i) {
        cum += eig(i);
        if (cum / total >= energy) {
            k = i + 1;
            retained = cum / total;
            break;
        }
    }
    return {std::move(mean), dec.u.leftCols(k), retained};
}

Matrix pca_apply(const PcaProjection& p, const Matrix& x) {
    if (x.rows() != p.mean.size())
        throw ValidationError("pca_apply: sample dimension " + std::to_string(x.rows()) +
                              " does not match projection dimension " +
                              std::to_string(p.mean.size()));
    return p.basis.transpose() * (x.colwise() - p.mean);
}

} // namespace lrbs

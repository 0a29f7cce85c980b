#include "lrbs/prox.hpp"

#include <Eigen/SVD>

#include "lrbs/error.hpp"

namespace lrbs {

SvtResult svt_full(const Matrix& l, double gamma) {
    if (gamma < 0.0)
        throw ValidationError("svt: gamma must be nonnegative");
    SvdResult dec = svd(l);
    // Keep sigma strictly above gamma; values within the guard of the
    // threshold vanish anyway.
    Index keep = 0;
    while (keep < dec.rank() && dec.sigma(keep) - gamma > kSvtGuard)
        ++keep;
    Vector shrunk = dec.sigma.head(keep).array() - gamma;
    Matrix value = keep > 0 ? Matrix(dec.u.leftCols(keep) * shrunk.asDiagonal() *
                                     dec.v.leftCols(keep).transpose())
                            : Matrix::Zero(l.rows(), l.cols());
    return {std::move(value), std::move(shrunk)};
}

Matrix svt(const Matrix& l, double gamma) { return svt_full(l, gamma).value; }

SvtOptimality check_svt_optimality(const Matrix& l, double gamma, const Matrix& candidate,
                                   double tol) {
    if (!(gamma > 0.0))
        throw ValidationError("check_svt_optimality: gamma must be positive");
    if (candidate.rows() != l.rows() || candidate.cols() != l.cols())
        throw ValidationError("check_svt_optimality: candidate is " +
                              std::to_string(candidate.rows()) + "x" +
                              std::to_string(candidate.cols()) + ", expected " +
                              std::to_string(l.rows()) + "x" + std::to_string(l.cols()));

    SvdResult dec = svd(candidate);
    const Matrix& u0 = dec.u;
    const Matrix& v0 = dec.v;
    Matrix s = (l - candidate) / gamma - u0 * v0.transpose();

    const double left = (u0.transpose() * s).norm();
    const double right = (s * v0).norm();
    double spectral = 0.0;
    if (s.size() > 0) {
        Eigen::BDCSVD<Matrix> sdec(s);
        if (sdec.singularValues().size() > 0)
            spectral = sdec.singularValues()(0);
    }
    const bool pass = left <= tol && right <= tol && spectral <= 1.0 + tol;
    return {pass, left, right, spectral};
}

} // namespace lrbs

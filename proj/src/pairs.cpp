#include "lrbs/pairs.hpp"

#include "lrbs/error.hpp"

namespace lrbs {

void validate_modality(const LabeledModality& m, const std::string& name) {
    if (m.features.cols() == 0)
        throw ValidationError(name + ": modality has no samples");
    if (static_cast<Index>(m.labels.size()) != m.features.cols())
        throw ValidationError(name + ": " + std::to_string(m.features.cols()) +
                              " feature columns but " + std::to_string(m.labels.size()) +
                              " labels");
    if (!m.features.allFinite())
        throw ValidationError(name + ": features contain NaN or Inf");
}

PairSupervision build_supervision(const std::vector<int>& a_labels,
                                  const std::vector<int>& b_labels) {
    if (a_labels.empty() || b_labels.empty())
        throw ValidationError("build_supervision: empty label sequence");

    const Index m = static_cast<Index>(a_labels.size());
    const Index n = static_cast<Index>(b_labels.size());
    Matrix y(m, n);
    long positives = 0;
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) {
            const bool match = a_labels[i] == b_labels[j];
            y(i, j) = match ? 1.0 : -1.0;
            positives += match;
        }
    const long negatives = static_cast<long>(m) * n - positives;

    if (positives == 0)
        throw ValidationError("build_supervision: no positive pairs "
                              "(the modalities share no class label)");
    if (negatives == 0)
        throw ValidationError("build_supervision: no negative pairs "
                              "(every cross-modal pair is similar)");

    const double wpos = 1.0 / static_cast<double>(positives);
    const double wneg = 1.0 / static_cast<double>(negatives);
    Matrix w = (y.array() > 0).select(Matrix::Constant(m, n, wpos),
                                      Matrix::Constant(m, n, wneg));
    return {std::move(y), std::move(w), positives, negatives};
}

PairSupervision build_supervision(const LabeledModality& a, const LabeledModality& b) {
    validate_modality(a, "build_supervision: first modality");
    validate_modality(b, "build_supervision: second modality");
    return build_supervision(a.labels, b.labels);
}

} // namespace lrbs

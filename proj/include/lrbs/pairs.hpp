#pragma once

#include <string>
#include <vector>

#include "lrbs/linalg.hpp"

namespace lrbs {

/// A feature matrix (one sample per column) with a class label per sample.
struct LabeledModality {
    Matrix features;         ///< dim x count
    std::vector<int> labels; ///< length count
};

/// Throws ValidationError unless the modality is well formed (nonempty,
/// finite features, one label per column). `name` prefixes diagnostics.
void validate_modality(const LabeledModality& m, const std::string& name);

/// Sign matrix Y and weight matrix W over the full m x n cross-pair grid.
/// y(i,j) = +1 when the labels match (a must-link pair), -1 otherwise.
/// Positive pairs all carry weight 1/positives, negative pairs 1/negatives,
/// so each side contributes unit total mass.
struct PairSupervision {
    Matrix y; ///< m x n, entries exactly +1 or -1
    Matrix w; ///< m x n, nonnegative
    long positives = 0;
    long negatives = 0;
};

/// Build supervision from two label sequences. Rejects degenerate cases
/// where either side is empty (all pairs similar or all dissimilar).
PairSupervision build_supervision(const std::vector<int>& a_labels,
                                  const std::vector<int>& b_labels);

PairSupervision build_supervision(const LabeledModality& a, const LabeledModality& b);

} // namespace lrbs

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lrbs/optimizer.hpp"

namespace lrbs {

/// Which modality issues the queries. The score is x^T M z either way.
enum class Direction { x_queries_z, z_queries_x };

/// Bilinear scores of every query against every gallery item, applying the
/// model's stored PCA projections to raw features when present. Row i,
/// column j is the score of query i against gallery item j.
Matrix score_all(const SimilarityModel& model, const Matrix& queries, const Matrix& gallery,
                 Direction direction);

/// One query's gallery ordering by descending score; score ties break by
/// ascending gallery index.
struct RankedRetrieval {
    int query_index;
    std::vector<int> ranked_gallery; ///< permutation of 0..N-1
    std::vector<int> relevance;      ///< 1 where labels match, per position
};

RankedRetrieval rank_one(int query_index, const Vector& scores, int query_label,
                         const std::vector<int>& gallery_labels);

/// Rank every row of a score matrix.
std::vector<RankedRetrieval> rank_all(const Matrix& scores,
                                      const std::vector<int>& query_labels,
                                      const std::vector<int>& gallery_labels);

/// AveP over the full ranked list: (1/T) sum_r P(r) rel(r), where T is the
/// number of relevant items. Returns 0 when nothing is relevant.
double average_precision(const std::vector<int>& relevance);

double mean_average_precision(const std::vector<RankedRetrieval>& retrievals);

/// Recall levels used for the averaged precision-recall curve.
std::vector<double> recall_grid();

/// Interpolated precision (max precision at recall >= level) averaged over
/// queries, on the fixed recall grid. Queries with no relevant items are
/// skipped; they still count in MAP.
std::vector<std::pair<double, double>>
precision_recall_curve(const std::vector<RankedRetrieval>& retrievals);

/// Mean precision of the top-r items for each requested scope r.
std::vector<std::pair<int, double>>
precision_scope_curve(const std::vector<RankedRetrieval>& retrievals,
                      const std::vector<int>& scopes);

/// 1, 2, 5, 10, 20, 50, ... capped at the gallery size, which is always
/// included so the curve ends at the class prior.
std::vector<int> default_scopes(Index gallery_size);

struct MetricReport {
    double map = 0.0;
    std::vector<double> per_query_ap;
    std::vector<std::pair<double, double>> pr_curve; ///< (recall, precision)
    std::vector<std::pair<int, double>> scope_curve; ///< (scope, precision)
};

/// Rank, then compute every metric in one pass.
MetricReport evaluate(const Matrix& scores, const std::vector<int>& query_labels,
                      const std::vector<int>& gallery_labels, const std::vector<int>& scopes);

/// JSON object with keys map, per_query_ap, pr_curve, scope_curve.
std::string report_to_json(const MetricReport& report);

/// Two-column CSV with a header line.
std::string curve_to_csv(const std::vector<std::pair<double, double>>& curve,
                         const std::string& x_name, const std::string& y_name);
std::string curve_to_csv(const std::vector<std::pair<int, double>>& curve,
                         const std::string& x_name, const std::string& y_name);

} // namespace lrbs

#include "lrbs/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "lrbs/error.hpp"

namespace lrbs {

namespace {

Matrix maybe_project(const std::optional<PcaProjection>& p, const Matrix& features,
                     const char* side) {
    if (!p)
        return features;
    if (features.rows() != p->input_dim())
        throw ValidationError(std::string("score_all: ") + side + " features have dimension " +
                              std::to_string(features.rows()) + " but the model's projection expects " +
                              std::to_string(p->input_dim()));
    return pca_apply(*p, features);
}

void check_score_dims(const SimilarityModel& model, const Matrix& xs, const Matrix& zs) {
    if (xs.rows() != model.m.rows() || zs.rows() != model.m.cols())
        throw ValidationError("score_all: M is " + std::to_string(model.m.rows()) + "x" +
                              std::to_string(model.m.cols()) + " but features give " +
                              std::to_string(xs.rows()) + " / " + std::to_string(zs.rows()) +
                              " dimensions");
}

} // namespace

Matrix score_all(const SimilarityModel& model, const Matrix& queries, const Matrix& gallery,
                 Direction direction) {
    if (direction == Direction::x_queries_z) {
        Matrix xq = maybe_project(model.pca_x, queries, "query");
        Matrix zg = maybe_project(model.pca_z, gallery, "gallery");
        check_score_dims(model, xq, zg);
        return xq.transpose() * model.m * zg;
    }
    Matrix zq = maybe_project(model.pca_z, queries, "query");
    Matrix xg = maybe_project(model.pca_x, gallery, "gallery");
    check_score_dims(model, xg, zq);
    return zq.transpose() * model.m.transpose() * xg;
}

RankedRetrieval rank_one(int query_index, const Vector& scores, int query_label,
                         const std::vector<int>& gallery_labels) {
    if (static_cast<Index>(gallery_labels.size()) != scores.size())
        throw ValidationError("rank_one: " + std::to_string(scores.size()) + " scores but " +
                              std::to_string(gallery_labels.size()) + " gallery labels");
    std::vector<int> order(gallery_labels.size());
    std::iota(order.begin(), order.end(), 0);
    // stable_sort keeps ascending-index order among tied scores.
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return scores(a) > scores(b); });
    std::vector<int> rel(order.size());
    for (std::size_t r = 0; r < order.size(); ++r)
        rel[r] = gallery_labels[order[r]] == query_label ? 1 : 0;
    return {query_index, std::move(order), std::move(rel)};
}

std::vector<RankedRetrieval> rank_all(const Matrix& scores,
                                      const std::vector<int>& query_labels,
                                      const std::vector<int>& gallery_labels) {
    if (static_cast<Index>(query_labels.size()) != scores.rows())
        throw ValidationError("rank_all: " + std::to_string(scores.rows()) +
                              " score rows but " + std::to_string(query_labels.size()) +
                              " query labels");
    std::vector<RankedRetrieval> out;
    out.reserve(query_labels.size());
    for (Index i = 0; i < scores.rows(); ++i)
        out.push_back(rank_one(static_cast<int>(i), scores.row(i).transpose(),
                               query_labels[i], gallery_labels));
    return out;
}

double average_precision(const std::vector<int>& relevance) {
    if (relevance.empty())
        throw ValidationError("average_precision: empty relevance sequence");
    long hits = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < relevance.size(); ++r) {
        if (relevance[r]) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    if (hits == 0)
        return 0.0;
    return sum / static_cast<double>(hits);
}

double mean_average_precision(const std::vector<RankedRetrieval>& retrievals) {
    if (retrievals.empty())
        throw ValidationError("mean_average_precision: no retrievals");
    double sum = 0.0;
    for (const auto& r : retrievals)
        sum += average_precision(r.relevance);
    return sum / static_cast<double>(retrievals.size());
}

std::vector<double> recall_grid() {
    std::vector<double> grid(20);
    for (int i = 0; i < 20; ++i)
        grid[i] = static_cast<double>(i + 1) / 20.0;
    return grid;
}

std::vector<std::pair<double, double>>
precision_recall_curve(const std::vector<RankedRetrieval>& retrievals) {
    if (retrievals.empty())
        throw ValidationError("precision_recall_curve: no retrievals");
    const std::vector<double> grid = recall_grid();
    std::vector<double> acc(grid.size(), 0.0);
    long counted = 0;

    for (const auto& ret : retrievals) {
        const std::size_t n = ret.relevance.size();
        const long total = std::accumulate(ret.relevance.begin(), ret.relevance.end(), 0L);
        if (total == 0)
            continue; // recall undefined; the query still counts in MAP
        ++counted;

        std::vector<double> prec(n), recall(n);
        long hits = 0;
        for (std::size_t r = 0; r < n; ++r) {
            hits += ret.relevance[r];
            prec[r] = static_cast<double>(hits) / static_cast<double>(r + 1);
            recall[r] = static_cast<double>(hits) / static_cast<double>(total);
        }
        // Interpolated precision: max precision at any position with
        // recall at or beyond the level.
        std::vector<double> max_from(n);
        double running = 0.0;
        for (std::size_t r = n; r-- > 0;) {
            running = std::max(running, prec[r]);
            max_from[r] = running;
        }
        std::size_t pos = 0;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            while (pos < n && recall[pos] < grid[g])
                ++pos;
            // recall reaches exactly 1.0 at the last relevant item
            acc[g] += max_from[std::min(pos, n - 1)];
        }
    }

    if (counted == 0)
        throw ValidationError("precision_recall_curve: every query has zero relevant items");
    std::vector<std::pair<double, double>> curve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g)
        curve[g] = {grid[g], acc[g] / static_cast<double>(counted)};
    return curve;
}

std::vector<std::pair<int, double>>
precision_scope_curve(const std::vector<RankedRetrieval>& retrievals,
                      const std::vector<int>& scopes) {
    if (retrievals.empty())
        throw ValidationError("precision_scope_curve: no retrievals");
    if (scopes.empty())
        throw ValidationError("precision_scope_curve: no scopes requested");
    const std::size_t n = retrievals.front().relevance.size();
    for (int s : scopes)
        if (s <= 0 || static_cast<std::size_t>(s) > n)
            throw ValidationError("precision_scope_curve: scope " + std::to_string(s) +
                                  " outside [1, " + std::to_string(n) + "]");

    std::vector<std::pair<int, double>> curve;
    curve.reserve(scopes.size());
    for (int s : scopes) {
        double acc = 0.0;
        for (const auto& ret : retrievals) {
            long hits = 0;
            for (int r = 0; r < s; ++r)
                hits += ret.relevance[r];
            acc += static_cast<double>(hits) / static_cast<double>(s);
        }
        curve.emplace_back(s, acc / static_cast<double>(retrievals.size()));
    }
    return curve;
}

std::vector<int> default_scopes(Index gallery_size) {
    if (gallery_size <= 0)
        throw ValidationError("default_scopes: gallery is empty");
    std::vector<int> scopes;
    for (long base = 1; base <= gallery_size; base *= 10)
        for (int mult : {1, 2, 5}) {
            const long scope = base * mult;
            if (scope <= gallery_size) scopes.push_back(static_cast<int>(scope));
        }
    if (scopes.empty() || scopes.back() != gallery_size)
        scopes.push_back(static_cast<int>(gallery_size));
    return scopes;
}

MetricReport evaluate(const Matrix& scores, const std::vector<int>& query_labels,
                      const std::vector<int>& gallery_labels, const std::vector<int>& scopes) {
    std::vector<RankedRetrieval> ranked = rank_all(scores, query_labels, gallery_labels);
    MetricReport report;
    report.per_query_ap.reserve(ranked.size());
    for (const auto& r : ranked)
        report.per_query_ap.push_back(average_precision(r.relevance));
    report.map = std::accumulate(report.per_query_ap.begin(), report.per_query_ap.end(), 0.0) /
                 static_cast<double>(report.per_query_ap.size());
    report.pr_curve = precision_recall_curve(ranked);
    report.scope_curve = precision_scope_curve(ranked, scopes);
    return report;
}

std::string report_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["map"] = report.map;
    j["per_query_ap"] = report.per_query_ap;
    j["pr_curve"] = nlohmann::json::array();
    for (const auto& [recall, precision] : report.pr_curve)
        j["pr_curve"].push_back({recall, precision});
    j["scope_curve"] = nlohmann::json::array();
    for (const auto& [scope, precision] : report.scope_curve)
        j["scope_curve"].push_back({scope, precision});
    return j.dump(2);
}

namespace {

std::string format_row(double x, double y) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", x, y);
    return buf;
}

} // namespace

std::string curve_to_csv(const std::vector<std::pair<double, double>>& curve,
                         const std::string& x_name, const std::string& y_name) {
    std::string out = x_name + "," + y_name + "\n";
    for (const auto& [x, y] : curve)
        out += format_row(x, y);
    return out;
}

std::string curve_to_csv(const std::vector<std::pair<int, double>>& curve,
                         const std::string& x_name, const std::string& y_name) {
    std::string out = x_name + "," + y_name + "\n";
    for (const auto& [x, y] : curve) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%d,%.17g\n", x, y);
        out += buf;
    }
    return out;
}

} // namespace lrbs

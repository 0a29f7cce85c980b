#include <doctest.h>

#include <random>
#include <vector>

#include "lrbs/error.hpp"
#include "lrbs/pairs.hpp"

using namespace lrbs;

TEST_SUITE("pairs") {

TEST_CASE("labels agree gives +1, disagree gives -1") {
    PairSupervision s = build_supervision({0, 1}, {1, 0, 0});
    REQUIRE(s.y.rows() == 2);
    REQUIRE(s.y.cols() == 3);
    CHECK(s.y(0, 0) == -1.0);
    CHECK(s.y(0, 1) == 1.0);
    CHECK(s.y(0, 2) == 1.0);
    CHECK(s.y(1, 0) == 1.0);
    CHECK(s.y(1, 1) == -1.0);
    CHECK(s.y(1, 2) == -1.0);
    CHECK(s.positives == 3);
    CHECK(s.negatives == 3);
}

TEST_CASE("weights are inverse class-balance counts") {
    // 2x3 grid with 2 positives and 4 negatives.
    PairSupervision s = build_supervision({0, 1}, {0, 2, 2});
    CHECK(s.positives == 1);
    CHECK(s.negatives == 5);
    for (Index i = 0; i < 2; ++i)
        for (Index j = 0; j < 3; ++j) {
            const double expected = s.y(i, j) > 0 ? 1.0 / 1.0 : 1.0 / 5.0;
            CHECK(s.w(i, j) == doctest::Approx(expected).epsilon(1e-15));
        }
}

TEST_CASE("positive weights sum to one and negative weights sum to one") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> lab(0, 3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> a(8), b(11);
        for (auto& v : a) v = lab(rng);
        for (auto& v : b) v = lab(rng);
        PairSupervision s;
        try {
            s = build_supervision(a, b);
        } catch (const ValidationError&) {
            continue; // degenerate draw: all-same or all-different labels
        }
        double pos_mass = 0.0, neg_mass = 0.0;
        for (Index i = 0; i < s.y.rows(); ++i)
            for (Index j = 0; j < s.y.cols(); ++j)
                (s.y(i, j) > 0 ? pos_mass : neg_mass) += s.w(i, j);
        CHECK(pos_mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(neg_mass == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("supervision is invariant to relabeling") {
    std::vector<int> a{0, 1, 2, 1};
    std::vector<int> b{2, 0, 1};
    // Bijective relabel 0->7, 1->3, 2->5.
    auto relabel = [](int v) { return v == 0 ? 7 : v == 1 ? 3 : 5; };
    std::vector<int> a2, b2;
    for (int v : a) a2.push_back(relabel(v));
    for (int v : b) b2.push_back(relabel(v));

    PairSupervision s1 = build_supervision(a, b);
    PairSupervision s2 = build_supervision(a2, b2);
    CHECK((s1.y - s2.y).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((s1.w - s2.w).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("swapping the sides transposes the supervision") {
    std::vector<int> a{0, 1, 2, 1};
    std::vector<int> b{2, 0, 1};
    PairSupervision s = build_supervision(a, b);
    PairSupervision t = build_supervision(b, a);
    CHECK((s.y.transpose() - t.y).lpNorm<Eigen::Infinity>() == 0.0);
    CHECK((s.w.transpose() - t.w).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("pair counts add up to the grid size") {
    PairSupervision s = build_supervision({0, 0, 1, 2}, {1, 2, 0, 0, 1});
    CHECK(s.positives + s.negatives == s.y.rows() * s.y.cols());
}

TEST_CASE("all-matching labels are rejected") {
    CHECK_THROWS_AS(build_supervision({3, 3}, {3, 3, 3}), ValidationError);
    CHECK_THROWS_WITH_AS(build_supervision({1, 1}, {1}),
                         doctest::Contains("no negative"), ValidationError);
}

TEST_CASE("fully-disjoint labels are rejected") {
    CHECK_THROWS_WITH_AS(build_supervision({0, 1}, {2, 3}),
                         doctest::Contains("no positive"), ValidationError);
}

TEST_CASE("empty label lists are rejected") {
    CHECK_THROWS_AS(build_supervision({}, {0, 1}), ValidationError);
    CHECK_THROWS_AS(build_supervision({0, 1}, {}), ValidationError);
}

TEST_CASE("modality validation catches shape mismatches") {
    LabeledModality m;
    m.features = Matrix::Zero(3, 4);
    m.labels = {0, 1, 0}; // 3 labels for 4 samples
    CHECK_THROWS_AS(validate_modality(m, "probe"), ValidationError);
    m.labels = {0, 1, 0, 1};
    CHECK_NOTHROW(validate_modality(m, "probe"));
}

TEST_CASE("modality validation catches non-finite features") {
    LabeledModality m;
    m.features = Matrix::Zero(2, 2);
    m.features(1, 1) = std::numeric_limits<double>::infinity();
    m.labels = {0, 1};
    CHECK_THROWS_AS(validate_modality(m, "probe"), ValidationError);
}

} // TEST_SUITE

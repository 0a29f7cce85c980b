#include <doctest.h>

#include <cmath>
#include <random>

#include "lrbs/error.hpp"
#include "lrbs/loss.hpp"
#include "test_helpers.hpp"

using namespace lrbs;
using lrbs::testing::randn;

namespace {

LossContext random_context(std::mt19937_64& rng, Index d1, Index d2, Index m, Index n) {
    std::uniform_int_distribution<int> lab(0, 2);
    std::vector<int> la(static_cast<std::size_t>(m)), lb(static_cast<std::size_t>(n));
    for (;;) {
        for (auto& v : la) v = lab(rng);
        for (auto& v : lb) v = lab(rng);
        try {
            LabeledModality mx{randn(rng, d1, m), la};
            LabeledModality mz{randn(rng, d2, n), lb};
            return make_context(mx, mz);
        } catch (const ValidationError&) {
            continue; // retry until both pair classes are present
        }
    }
}

// Scalar reference implementation: nothing shared with the production code
// beyond the supervision grid itself.
double loss_by_hand(const LossContext& ctx, const Matrix& m) {
    double total = 0.0;
    for (Index i = 0; i < ctx.sup.y.rows(); ++i)
        for (Index j = 0; j < ctx.sup.y.cols(); ++j) {
            const double s = ctx.x.col(i).dot(m * ctx.z.col(j));
            total += ctx.sup.w(i, j) * std::log(1.0 + std::exp(-ctx.sup.y(i, j) * s));
        }
    return total;
}

} // namespace

TEST_SUITE("loss") {

TEST_CASE("softplus matches log(1+exp) in the safe range") {
    for (double t : {-20.0, -3.0, -0.5, 0.0, 0.5, 3.0, 20.0})
        CHECK(softplus(t) == doctest::Approx(std::log1p(std::exp(t))).epsilon(1e-14));
}

TEST_CASE("softplus stays finite where the naive form overflows") {
    CHECK(std::isfinite(softplus(800.0)));
    CHECK(softplus(800.0) == doctest::Approx(800.0).epsilon(1e-15));
    CHECK(softplus(-800.0) == doctest::Approx(0.0));
    CHECK(softplus(-800.0) >= 0.0);
}

TEST_CASE("sigmoid is stable and symmetric") {
    CHECK(sigmoid(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(sigmoid(800.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sigmoid(-800.0) >= 0.0);
    CHECK(sigmoid(-800.0) < 1e-100);
    for (double t : {-7.0, -1.3, 0.2, 4.5})
        CHECK(sigmoid(t) + sigmoid(-t) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("the zero matrix scores 2 log 2") {
    std::mt19937_64 rng(3);
    LossContext ctx = random_context(rng, 5, 4, 7, 6);
    const double at_zero = objective_smooth(ctx, Matrix::Zero(5, 4));
    CHECK(at_zero == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("vectorized loss matches the scalar double loop") {
    std::mt19937_64 rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        LossContext ctx = random_context(rng, 4, 6, 5, 8);
        Matrix m = randn(rng, 4, 6);
        CHECK(objective_smooth(ctx, m) ==
              doctest::Approx(loss_by_hand(ctx, m)).epsilon(1e-12));
    }
}

TEST_CASE("loss is positive and decreases toward a separating matrix") {
    std::mt19937_64 rng(15);
    LossContext ctx = random_context(rng, 3, 3, 6, 6);
    Matrix m = randn(rng, 3, 3);
    CHECK(objective_smooth(ctx, m) > 0.0);

    // Following the negative gradient a short way must not increase the loss.
    Matrix g = gradient_smooth(ctx, m);
    const double before = objective_smooth(ctx, m);
    const double after = objective_smooth(ctx, m - 1e-4 * g);
    CHECK(after <= before + 1e-12);
}

TEST_CASE("gradient matches central finite differences") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 5; ++rep) {
        LossContext ctx = random_context(rng, 4, 3, 6, 5);
        Matrix m = randn(rng, 4, 3);
        Matrix g = gradient_smooth(ctx, m);
        const double h = 1e-6;
        for (Index r = 0; r < m.rows(); ++r)
            for (Index c = 0; c < m.cols(); ++c) {
                Matrix up = m, down = m;
                up(r, c) += h;
                down(r, c) -= h;
                const double fd =
                    (objective_smooth(ctx, up) - objective_smooth(ctx, down)) / (2.0 * h);
                CHECK(g(r, c) == doctest::Approx(fd).epsilon(1e-5));
            }
    }
}

TEST_CASE("gradient vanishes only where the weighted pulls balance") {
    // One positive and one negative pair with symmetric features: at m = 0
    // the positive pull and negative push cancel exactly.
    LabeledModality mx{Matrix::Ones(2, 1), {0}};
    Matrix zf(2, 2);
    zf << 1.0, 1.0,
          0.0, 0.0;
    LabeledModality mz{zf, {0, 1}};
    LossContext ctx = make_context(mx, mz);
    Matrix g = gradient_smooth(ctx, Matrix::Zero(2, 2));
    CHECK(g.lpNorm<Eigen::Infinity>() < 1e-15);
}

TEST_CASE("full objective adds the scaled nuclear norm") {
    std::mt19937_64 rng(27);
    LossContext ctx = random_context(rng, 4, 4, 5, 5);
    Matrix m = randn(rng, 4, 4);
    const double lambda = 0.37;
    CHECK(objective_full(ctx, m, lambda) ==
          doctest::Approx(objective_smooth(ctx, m) + lambda * nuclear_norm(m)).epsilon(1e-12));
}

TEST_CASE("negative regularization weight is rejected") {
    std::mt19937_64 rng(33);
    LossContext ctx = random_context(rng, 3, 3, 4, 4);
    CHECK_THROWS_AS(objective_full(ctx, Matrix::Zero(3, 3), -0.1), ValidationError);
}

TEST_CASE("dimension mismatches are rejected") {
    std::mt19937_64 rng(39);
    LossContext ctx = random_context(rng, 4, 3, 5, 5);
    CHECK_THROWS_AS(objective_smooth(ctx, Matrix::Zero(3, 4)), ValidationError);
    CHECK_THROWS_AS(gradient_smooth(ctx, Matrix::Zero(4, 4)), ValidationError);
}

} // TEST_SUITE

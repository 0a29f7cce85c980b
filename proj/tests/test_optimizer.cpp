#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lrbs/data.hpp"
#include "lrbs/error.hpp"
#include "lrbs/optimizer.hpp"
#include "test_helpers.hpp"

using namespace lrbs;
using lrbs::testing::randn;

namespace {

LossContext small_context(std::mt19937_64& rng, Index d1 = 4, Index d2 = 3) {
    std::vector<int> la{0, 0, 1, 1, 2};
    std::vector<int> lb{0, 1, 1, 2, 2, 0};
    LabeledModality mx{randn(rng, d1, static_cast<Index>(la.size())), la};
    LabeledModality mz{randn(rng, d2, static_cast<Index>(lb.size())), lb};
    return make_context(mx, mz);
}

} // namespace

TEST_SUITE("optimizer") {

TEST_CASE("momentum sequence starts at the golden ratio") {
    const double a1 = 1.0;
    const double a2 = momentum_next(a1);
    CHECK(a2 == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-15));
    // First extrapolation weight is therefore zero.
    CHECK((a1 - 1.0) / a2 == 0.0);
    // The sequence grows roughly linearly: alpha_t ~ t/2.
    double a = 1.0;
    for (int t = 0; t < 100; ++t) a = momentum_next(a);
    CHECK(a > 50.0);
    CHECK(a < 52.0);
}

TEST_CASE("momentum rejects values below one") {
    CHECK_THROWS_AS(momentum_next(0.5), ValidationError);
}

TEST_CASE("a backtracking step never raises the objective from zero") {
    std::mt19937_64 rng(3);
    LossContext ctx = small_context(rng);
    Matrix q = Matrix::Zero(4, 3);
    const double lambda = 1e-2;
    StepResult step = backtracking_step(ctx, q, 1.0, lambda, 0.5);
    CHECK(step.eta_used > 0.0);
    CHECK(step.eta_used <= 1.0);
    CHECK(objective_full(ctx, step.m_next, lambda) <= objective_full(ctx, q, lambda) + 1e-12);
}

TEST_CASE("the accepted step satisfies the quadratic upper bound") {
    std::mt19937_64 rng(5);
    LossContext ctx = small_context(rng);
    Matrix q = randn(rng, 4, 3);
    StepResult step = backtracking_step(ctx, q, 4.0, 0.05, 0.5);
    Matrix g = gradient_smooth(ctx, q);
    Matrix diff = step.m_next - q;
    const double bound = objective_smooth(ctx, q) + (g.array() * diff.array()).sum() +
                         diff.squaredNorm() / (2.0 * step.eta_used);
    CHECK(objective_smooth(ctx, step.m_next) <= bound + 1e-9);
}

TEST_CASE("training converges on an easy problem") {
    std::mt19937_64 rng(7);
    LossContext ctx = small_context(rng);
    TrainConfig cfg;
    cfg.lambda = 1e-2;
    cfg.max_iters = 800;
    cfg.rel_tol = 1e-9;
    TrainResult r = train(ctx, cfg);
    CHECK(r.converged);
    CHECK(r.trace.size() >= 2);
    CHECK(r.trace.size() <= 801);

    // Trace row 1 is the zero start.
    CHECK(r.trace.front().iter == 1);
    CHECK(r.trace.front().objective == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
    CHECK(r.trace.front().rank == 0);
    CHECK(r.trace.front().momentum == 0.0);

    // Returned model matches the best traced objective.
    double best = r.trace.front().objective;
    for (const TraceRow& row : r.trace) best = std::min(best, row.objective);
    CHECK(objective_full(ctx, r.model.m, cfg.lambda) == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("trace rows are internally consistent") {
    std::mt19937_64 rng(9);
    LossContext ctx = small_context(rng);
    TrainConfig cfg;
    cfg.lambda = 5e-2;
    cfg.max_iters = 60;
    TrainResult r = train(ctx, cfg);
    int expected_iter = 1;
    for (const TraceRow& row : r.trace) {
        CHECK(row.iter == expected_iter++);
        CHECK(row.objective ==
              doctest::Approx(row.smooth + cfg.lambda * row.nuclear).epsilon(1e-12));
        CHECK(row.eta > 0.0);
        CHECK(row.momentum >= 0.0);
        CHECK(row.momentum < 1.0);
        CHECK(row.rank >= 0);
    }
    // Second row's momentum weight is (alpha_1 - 1)/alpha_2 = 0.
    CHECK(r.trace[1].momentum == 0.0);
}

TEST_CASE("identical configs give bitwise-identical runs") {
    std::mt19937_64 rng(11);
    LossContext ctx = small_context(rng);
    TrainConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_iters = 80;
    TrainResult a = train(ctx, cfg);
    TrainResult b = train(ctx, cfg);
    REQUIRE(a.trace.size() == b.trace.size());
    CHECK((a.model.m - b.model.m).lpNorm<Eigen::Infinity>() == 0.0);
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].objective == b.trace[i].objective);
        CHECK(a.trace[i].eta == b.trace[i].eta);
    }
}

TEST_CASE("heavier regularization cannot raise the learned rank") {
    std::mt19937_64 rng(13);
    LossContext ctx = small_context(rng, 6, 5);
    TrainConfig weak;
    weak.lambda = 1e-3;
    weak.max_iters = 300;
    TrainConfig strong = weak;
    strong.lambda = 5e-1;
    Index rank_weak = numerical_rank(train(ctx, weak).model.m);
    Index rank_strong = numerical_rank(train(ctx, strong).model.m);
    CHECK(rank_strong <= rank_weak);
}

TEST_CASE("an overwhelming penalty pins the model at zero") {
    std::mt19937_64 rng(15);
    LossContext ctx = small_context(rng);
    TrainConfig cfg;
    cfg.lambda = 1e6;
    cfg.max_iters = 50;
    TrainResult r = train(ctx, cfg);
    CHECK(r.model.m.lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(validate(cfg));
    TrainConfig bad = cfg;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = cfg;
    bad.max_iters = 0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = cfg;
    bad.rel_tol = 0.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = cfg;
    bad.eta0 = -0.5;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = cfg;
    bad.backtrack_shrink = 1.0;
    CHECK_THROWS_AS(validate(bad), ValidationError);
}

TEST_CASE("pipeline attaches per-modality projections") {
    SyntheticSpec spec;
    spec.classes = 3;
    spec.latent_dim = 2;
    spec.dim_x = 10;
    spec.dim_z = 8;
    spec.per_class_train = 6;
    spec.per_class_test = 2;
    spec.seed = 99;
    DatasetBundle data = generate_synthetic(spec);

    TrainConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_iters = 120;
    TrainResult r = train_pipeline(data.train_x, data.train_z, cfg, 0.95);
    REQUIRE(r.model.pca_x.has_value());
    REQUIRE(r.model.pca_z.has_value());
    CHECK(r.model.pca_x->input_dim() == 10);
    CHECK(r.model.pca_z->input_dim() == 8);
    CHECK(r.model.m.rows() == r.model.pca_x->components());
    CHECK(r.model.m.cols() == r.model.pca_z->components());
    CHECK(r.model.lambda == cfg.lambda);

    bool found = false;
    for (const std::string& s : r.model.metadata)
        if (s.find("pca_energy") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("pipeline without projection keeps raw dimensions") {
    SyntheticSpec spec;
    spec.classes = 3;
    spec.latent_dim = 2;
    spec.dim_x = 7;
    spec.dim_z = 6;
    spec.per_class_train = 5;
    spec.per_class_test = 2;
    spec.seed = 101;
    DatasetBundle data = generate_synthetic(spec);

    TrainConfig cfg;
    cfg.lambda = 1e-3;
    cfg.max_iters = 60;
    TrainResult r = train_pipeline(data.train_x, data.train_z, cfg, std::nullopt);
    CHECK_FALSE(r.model.pca_x.has_value());
    CHECK_FALSE(r.model.pca_z.has_value());
    CHECK(r.model.m.rows() == 7);
    CHECK(r.model.m.cols() == 6);
}

TEST_CASE("momentum beats plain proximal descent on iteration count") {
    std::mt19937_64 rng(17);
    LossContext ctx = small_context(rng, 6, 5);
    const double lambda = 1e-3;

    // Plain descent: same step rule, no extrapolation.
    Matrix m = Matrix::Zero(6, 5);
    double eta = 1.0;
    const int iters = 120;
    for (int t = 0; t < iters; ++t) {
        StepResult s = backtracking_step(ctx, m, eta, lambda, 0.5);
        m = s.m_next;
        eta = s.eta_used * kEtaGrowth;
    }
    const double plain = objective_full(ctx, m, lambda);

    TrainConfig cfg;
    cfg.lambda = lambda;
    cfg.max_iters = iters;
    cfg.rel_tol = 1e-15;
    const double accelerated = objective_full(ctx, train(ctx, cfg).model.m, lambda);
    CHECK(accelerated <= plain + 1e-10);
}

} // TEST_SUITE

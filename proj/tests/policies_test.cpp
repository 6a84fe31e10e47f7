// Copyright 2026 The hybridbo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// =============================================================================


#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include <hybridbo/benchmarks.hpp>
#include <hybridbo/policies.hpp>

namespace {

using namespace hybridbo;

Point p1(double a) { return Point::Constant(1, a); }
Point p2(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

GpPosterior random_gp(std::uint64_t seed, Index d, int n, double width)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ObservationSet obs(d, BoxDomain::cube(d, 0.0, 1.0));
    while (obs.size() < n) {
        Point x(d);
        for (Index j = 0; j < d; ++j)
            x(j) = unit(rng);
        if (!obs.contains(x, 0.05))
            obs.add(x, std::cos(4.0 * x.sum()) + 0.2 * unit(rng));
    }
    return fit(obs, {width, 1e-10});
}

PolicyConfig config_for(const Benchmark& b, std::uint64_t seed)
{
    PolicyConfig cfg;
    const bool small = b.dimension() <= 3;
    cfg.init_points = small ? 2 : 5;
    cfg.budget = small ? 15 : 30;
    cfg.epsilon = small ? 0.02 : 0.2;
    cfg.optimizer = OptimizerConfig::defaults_for(b.dimension());
    cfg.optimizer.grid_candidates = 300 * static_cast<int>(b.dimension());
    cfg.kernel = b.kernel();
    cfg.seed = seed;
    return cfg;
}

TEST(EstimateOutput, StrategyValues)
{
    const auto gp = fit(ObservationSet({p1(0.1), p1(0.9)}, {0.2, 0.7}), {0.02, 1e-10});
    Rng rng(1);
    EXPECT_EQ(estimate_output(EstimatorKind::incumbent(), gp, p1(0.5), std::nullopt, rng), 0.7);
    EXPECT_NEAR(estimate_output(EstimatorKind::inflated(0.1), gp, p1(0.5), std::nullopt, rng), 0.77, 1e-15);
    EXPECT_EQ(estimate_output(EstimatorKind::incumbent_min(), gp, p1(0.5), std::nullopt, rng), 0.2);
    EXPECT_NEAR(estimate_output(EstimatorKind::posterior_mean(), gp, p1(0.1), std::nullopt, rng), 0.2, 1e-8);
    EXPECT_EQ(estimate_output(EstimatorKind::global_max(), gp, p1(0.5), 3.0, rng), 3.0);
    EXPECT_THROW(estimate_output(EstimatorKind::global_max(), gp, p1(0.5), std::nullopt, rng), std::invalid_argument);
    for (int i = 0; i < 100; ++i) {
        const double v = estimate_output(EstimatorKind::uniform_random(), gp, p1(0.5), std::nullopt, rng);
        EXPECT_GE(v, 0.2);
        EXPECT_LE(v, 0.7);
    }
}

TEST(EstimatorKind, ParsesNames)
{
    for (const auto* name : {"max", "ymax", "inflated", "mean", "ymin", "random"})
        EXPECT_EQ(EstimatorKind::parse(name).name(), name);
    EXPECT_THROW(EstimatorKind::parse("median"), std::invalid_argument);
    EXPECT_THROW(EstimatorKind::inflated(-0.5).validate(), std::invalid_argument);
}

TEST(PolicyConfig, Validates)
{
    PolicyConfig cfg;
    cfg.max_batch = 20;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.max_batch = 5;
    cfg.epsilon = -1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(HybridBatchStep, ZeroEpsilonIsSequential)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto gp = random_gp(s, 2, 4, 0.05);
        PolicyConfig cfg;
        cfg.epsilon = 0.0;
        cfg.optimizer = OptimizerConfig::defaults_for(2);
        cfg.optimizer.seed = s;
        Rng rng(s);
        EXPECT_EQ(hybrid_batch_step(gp, cfg, box, 15, rng).size(), 1u);
    }
}

TEST(HybridBatchStep, InfiniteEpsilonMatchesMeanConstantLiar)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    for (std::uint64_t s = 0; s < 5; ++s) {
        const auto gp = random_gp(40 + s, 2, 5, 0.05);
        PolicyConfig cfg;
        cfg.epsilon = std::numeric_limits<double>::infinity();
        cfg.estimator = EstimatorKind::posterior_mean();
        cfg.optimizer = OptimizerConfig::defaults_for(2);
        cfg.optimizer.seed = 7 * s;
        Rng r1(s), r2(s);
        const auto hybrid = hybrid_batch_step(gp, cfg, box, 15, r1);
        const auto cl = constant_liar_batch(gp, cfg.max_batch, EstimatorKind::posterior_mean(), box, cfg.optimizer,
                                            std::nullopt, r2);
        ASSERT_EQ(hybrid.size(), 5u);
        ASSERT_EQ(cl.size(), 5u);
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_EQ(hybrid.points[i], cl.points[i]);
            EXPECT_EQ(hybrid.simulated_outputs[i], cl.simulated_outputs[i]);
        }
    }
}

TEST(HybridBatchStep, FirstPointIsSequentialChoice)
{
    const auto box = BoxDomain::cube(3, 0.0, 1.0);
    const auto gp = random_gp(3, 3, 6, 0.1);
    PolicyConfig cfg;
    cfg.epsilon = 10.0;
    cfg.optimizer = OptimizerConfig::defaults_for(3);
    cfg.optimizer.seed = 12;
    Rng rng(0);
    EXPECT_EQ(hybrid_batch_step(gp, cfg, box, 15, rng).points.front(), sequential_ei_step(gp, box, cfg.optimizer));
}

TEST(HybridBatchStep, RespectsRemainingBudget)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    const auto gp = random_gp(8, 2, 4, 0.05);
    PolicyConfig cfg;
    cfg.epsilon = std::numeric_limits<double>::infinity();
    cfg.optimizer = OptimizerConfig::defaults_for(2);
    Rng rng(0);
    EXPECT_EQ(hybrid_batch_step(gp, cfg, box, 2, rng).size(), 2u);
    EXPECT_THROW(hybrid_batch_step(gp, cfg, box, 0, rng), std::invalid_argument);
}

TEST(HybridBatchStep, GuardLogRecordsEveryEvaluation)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    const auto gp = random_gp(9, 2, 4, 0.05);
    PolicyConfig cfg;
    cfg.epsilon = 0.05;
    cfg.optimizer = OptimizerConfig::defaults_for(2);
    Rng rng(0);
    std::vector<GuardEvaluation> log;
    const auto draft = hybrid_batch_step(gp, cfg, box, 15, rng, std::nullopt, &log, 3);
    ASSERT_FALSE(log.empty());
    std::size_t admitted = 0;
    for (const auto& g : log) {
        EXPECT_EQ(g.wall_iteration, 3);
        EXPECT_NEAR(g.lhs, g.gamma * (g.theta + g.bias), 1e-15);
        EXPECT_EQ(g.admitted, g.lhs <= cfg.epsilon);
        EXPECT_LE(g.bias, 1e-10);
        admitted += g.admitted ? 1 : 0;
    }
    EXPECT_EQ(draft.size(), admitted + 1);
}

TEST(ConstantLiar, SinglePointIsSequentialStep)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    const auto gp = random_gp(10, 2, 4, 0.05);
    OptimizerConfig opt = OptimizerConfig::defaults_for(2);
    opt.seed = 3;
    Rng rng(0);
    const auto draft = constant_liar_batch(gp, 1, EstimatorKind::incumbent(), box, opt, std::nullopt, rng);
    ASSERT_EQ(draft.size(), 1u);
    EXPECT_EQ(draft.points[0], sequential_ei_step(gp, box, opt));
    EXPECT_THROW(constant_liar_batch(gp, 0, EstimatorKind::incumbent(), box, opt, std::nullopt, rng),
                 std::invalid_argument);
}

// Grid oracle (2e5 points): x0 = 0.710075, second point 0.671995 under the
// lie M = 2 and 0.900585 under y_min.
TEST(ConstantLiar, LieValueSetsSecondPointDistance)
{
    const auto box = BoxDomain::cube(1, 0.0, 1.0);
    const auto gp = fit(ObservationSet({p1(0.2), p1(0.8)}, {0.3, 0.5}), {0.01, 1e-10});
    OptimizerConfig opt = OptimizerConfig::defaults_for(1);
    opt.seed = 1;
    Rng r1(0), r2(0);
    const auto high = constant_liar_batch(gp, 2, EstimatorKind::global_max(), box, opt, 2.0, r1);
    const auto low = constant_liar_batch(gp, 2, EstimatorKind::incumbent_min(), box, opt, 2.0, r2);
    EXPECT_EQ(high.points[0], low.points[0]);
    EXPECT_NEAR(high.points[0](0), 0.710075, 1e-4);
    EXPECT_NEAR(high.points[1](0), 0.671995, 1e-4);
    EXPECT_NEAR(low.points[1](0), 0.900585, 1e-4);
    EXPECT_EQ(high.simulated_outputs[1], 2.0);
    EXPECT_EQ(low.simulated_outputs[1], 0.3);
}

TEST(ConstantLiar, DraftsDistinctPoints)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    const auto gp = random_gp(11, 2, 3, 0.02);
    OptimizerConfig opt = OptimizerConfig::defaults_for(2);
    for (const auto& lie : {EstimatorKind::incumbent(), EstimatorKind::incumbent_min(), EstimatorKind::posterior_mean(),
                            EstimatorKind::inflated(0.1)}) {
        Rng rng(0);
        const auto d = constant_liar_batch(gp, 5, lie, box, opt, std::nullopt, rng);
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                EXPECT_GT((d.points[i] - d.points[j]).norm(), kDuplicateTolerance);
    }
}

TEST(RunPolicy, RandomPolicyIsFullySequential)
{
    const auto b = benchmarks::by_name("cosines");
    auto cfg = config_for(b, 4);
    const auto t = run_policy(b.evaluate, PolicySpec::random(), cfg, b.domain, b.global_max);
    EXPECT_EQ(t.total_wall_iterations, cfg.budget);
    EXPECT_EQ(t.speedup, 0.0);
    EXPECT_EQ(t.samples(), cfg.budget);
}

TEST(RunPolicy, SpeedupIsOneMinusWallOverBudget)
{
    const auto b = benchmarks::by_name("rosenbrock");
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto t = run_policy(b.evaluate, PolicySpec::hybrid(), config_for(b, s), b.domain, b.global_max);
        EXPECT_DOUBLE_EQ(t.speedup, 1.0 - t.total_wall_iterations / 15.0);
        EXPECT_LE(t.speedup, 0.8 + 1e-12);
    }
}

TEST(RunPolicy, BudgetConservationAndMonotoneRegret)
{
    const auto b = benchmarks::by_name("hartman3");
    const std::vector<PolicySpec> policies = {PolicySpec::hybrid(), PolicySpec::sequential(), PolicySpec::random(),
                                              PolicySpec::constant_liar(5, EstimatorKind::posterior_mean()),
                                              PolicySpec::constant_liar(4, EstimatorKind::incumbent())};
    for (const auto& policy : policies) {
        auto cfg = config_for(b, 21);
        cfg.epsilon = 0.5;
        const auto t = run_policy(b.evaluate, policy, cfg, b.domain, b.global_max);
        EXPECT_EQ(t.samples(), cfg.budget) << policy.name();
        EXPECT_EQ(static_cast<int>(t.regret_after_each_sample.size()), cfg.budget);
        EXPECT_EQ(static_cast<int>(t.initial.size()), cfg.init_points);
        int remaining = cfg.budget;
        const int cap = policy.kind == PolicySpec::Kind::ConstantLiar ? policy.k : cfg.max_batch;
        for (int size : t.batch_sizes()) {
            EXPECT_GE(size, 1);
            EXPECT_LE(size, std::min(cap, remaining));
            remaining -= size;
        }
        for (std::size_t i = 1; i < t.regret_after_each_sample.size(); ++i)
            EXPECT_LE(t.regret_after_each_sample[i], t.regret_after_each_sample[i - 1]);
        EXPECT_GE(t.final_regret(), -1e-9);
        EXPECT_LE(t.speedup, 0.8 + 1e-12);
    }
}

TEST(RunPolicy, InfiniteEpsilonHybridEqualsMeanConstantLiarRun)
{
    const auto b = benchmarks::by_name("cosines");
    auto cfg = config_for(b, 8);
    cfg.epsilon = std::numeric_limits<double>::infinity();
    const auto h = run_policy(b.evaluate, PolicySpec::hybrid(), cfg, b.domain, b.global_max);
    const auto c = run_policy(b.evaluate, PolicySpec::constant_liar(5, EstimatorKind::posterior_mean()), cfg, b.domain,
                              b.global_max);
    ASSERT_EQ(h.iterations.size(), c.iterations.size());
    for (std::size_t w = 0; w < h.iterations.size(); ++w) {
        ASSERT_EQ(h.iterations[w].size(), c.iterations[w].size());
        for (std::size_t i = 0; i < h.iterations[w].size(); ++i)
            EXPECT_EQ(h.iterations[w][i].x, c.iterations[w][i].x);
    }
}

// Rebuilds the posterior in front of every wall iteration of a trace.
std::vector<GpPosterior> replay_posteriors(const RunTrace& t, const BoxDomain& box, const KernelConfig& kernel)
{
    std::vector<GpPosterior> out;
    ObservationSet obs(box.dim(), box);
    for (const auto& s : t.initial)
        obs.add(s.x, s.y_true);
    for (const auto& batch : t.iterations) {
        out.push_back(fit(obs, kernel));
        for (const auto& s : batch)
            obs.add(s.x, s.y_true);
    }
    return out;
}

TEST(RunPolicy, FirstPointOfEveryBatchIsSequentialChoice)
{
    const auto b = benchmarks::by_name("hartman3");
    const auto cfg = config_for(b, 5);
    const auto t = run_policy(b.evaluate, PolicySpec::hybrid(), cfg, b.domain, b.global_max);
    const auto posteriors = replay_posteriors(t, b.domain, cfg.kernel);
    const auto opt = run_optimizer(cfg);
    for (std::size_t w = 0; w < posteriors.size(); ++w)
        EXPECT_EQ(t.iterations[w].front().x, sequential_ei_step(posteriors[w], b.domain, opt)) << "wall " << w;
}

TEST(RunPolicy, AdmittedPointsSurviveLargerEpsilon)
{
    const auto b = benchmarks::by_name("cosines");
    auto cfg = config_for(b, 6);
    const auto t = run_policy(b.evaluate, PolicySpec::hybrid(), cfg, b.domain, b.global_max);
    const auto posteriors = replay_posteriors(t, b.domain, cfg.kernel);
    PolicyConfig step = cfg;
    step.optimizer = run_optimizer(cfg);
    int remaining = cfg.budget;
    for (std::size_t w = 0; w < posteriors.size(); ++w) {
        Rng r1(0), r2(0);
        step.epsilon = cfg.epsilon;
        const auto small = hybrid_batch_step(posteriors[w], step, b.domain, remaining, r1);
        step.epsilon = 4.0 * cfg.epsilon;
        const auto large = hybrid_batch_step(posteriors[w], step, b.domain, remaining, r2);
        ASSERT_LE(small.size(), large.size());
        for (std::size_t i = 0; i < small.size(); ++i)
            EXPECT_EQ(small.points[i], large.points[i]);
        EXPECT_EQ(small.size(), t.iterations[w].size());
        remaining -= static_cast<int>(t.iterations[w].size());
    }
}

TEST(RunPolicy, MeanEstimatorKeepsBiasAtZero)
{
    const auto b = benchmarks::by_name("hartman3");
    const auto t = run_policy(b.evaluate, PolicySpec::hybrid(), config_for(b, 2), b.domain, b.global_max);
    ASSERT_FALSE(t.guards.empty());
    for (const auto& g : t.guards)
        EXPECT_LE(g.bias, 1e-10);
}

TEST(RunPolicy, ObjectiveFailureAbortsWithPartialTrace)
{
    const auto box = BoxDomain::cube(2, 0.0, 1.0);
    int calls = 0;
    const Objective f = [&](const Point& x) {
        if (++calls == 4)
            throw std::runtime_error("instrument offline");
        return x.sum();
    };
    PolicyConfig cfg;
    cfg.kernel = {0.02, 1e-10};
    try {
        run_policy(f, PolicySpec::sequential(), cfg, box, 2.0);
        FAIL() << "expected RunAborted";
    } catch (const RunAborted& e) {
        EXPECT_EQ(e.partial().initial.size(), 2u);
        EXPECT_EQ(e.partial().samples(), 1);
    }
}

TEST(RunPolicy, DeterministicForFixedSeed)
{
    const auto b = benchmarks::by_name("rosenbrock");
    const auto a = run_policy(b.evaluate, PolicySpec::hybrid(), config_for(b, 77), b.domain, b.global_max);
    const auto c = run_policy(b.evaluate, PolicySpec::hybrid(), config_for(b, 77), b.domain, b.global_max);
    EXPECT_EQ(a.regret_after_each_sample, c.regret_after_each_sample);
    EXPECT_EQ(a.batch_sizes(), c.batch_sizes());
}

TEST(PolicySpec, Names)
{
    EXPECT_EQ(PolicySpec::hybrid().name(EstimatorKind::incumbent_min()), "hybrid-ymin");
    EXPECT_EQ(PolicySpec::sequential().name(), "sequential");
    EXPECT_EQ(PolicySpec::constant_liar(5, EstimatorKind::global_max()).name(), "cl-max-k5");
}

} // namespace

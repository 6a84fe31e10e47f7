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
#include <random>
#include <vector>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <hybridbo/gp.hpp>

namespace {

using namespace hybridbo;

Point p1(double a) { return Point::Constant(1, a); }
Point p2(double a, double b) { return Point(Eigen::Vector2d(a, b)); }

// Independent posterior: dense LU solve on K + jI.
PosteriorPrediction dense_posterior(const std::vector<Point>& xs, const std::vector<double>& ys, const Point& z,
                                    double width, double jitter = 1e-10)
{
    const auto n = static_cast<Index>(xs.size());
    Matrix k(n, n);
    Vector c(n), y(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j)
            k(i, j) = std::exp(-(xs[i] - xs[j]).squaredNorm() / width);
        k(i, i) += jitter;
        c(i) = std::exp(-(xs[i] - z).squaredNorm() / width);
        y(i) = ys[i];
    }
    Eigen::FullPivLU<Matrix> lu(k);
    return {c.dot(lu.solve(y)), 1.0 - c.dot(lu.solve(c))};
}

struct Instance {
    std::vector<Point> xs;
    std::vector<double> ys;
    GpPosterior gp;
};

Instance random_instance(std::uint64_t seed, Index d, int n, double width)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Instance inst;
    ObservationSet obs(d);
    while (static_cast<int>(inst.xs.size()) < n) {
        Point x(d);
        for (Index j = 0; j < d; ++j)
            x(j) = unit(rng);
        if (obs.contains(x, 0.05))
            continue;
        const double y = std::sin(5.0 * x.sum()) + 0.3 * unit(rng);
        obs.add(x, y);
        inst.xs.push_back(x);
        inst.ys.push_back(y);
    }
    inst.gp = fit(obs, {width, 1e-10});
    return inst;
}

TEST(Kernel, MatchesClosedForm)
{
    const KernelConfig unit{1.0, 0.0};
    EXPECT_EQ(kernel_eval(p2(0.3, 0.1), p2(0.3, 0.1), unit), 1.0);
    EXPECT_NEAR(kernel_eval(p1(0.0), p1(1.0), unit), 0.36787944117144233, 1e-15);
    EXPECT_NEAR(kernel_eval(p2(0, 0), p2(0.3, 0.4), {0.05, 0.0}), 0.0067379469990854671, 1e-15);
    EXPECT_EQ(kernel_eval(p2(0.1, 0.2), p2(0.7, 0.3), unit), kernel_eval(p2(0.7, 0.3), p2(0.1, 0.2), unit));
    EXPECT_THROW(kernel_eval(p1(0.0), p2(0, 0), unit), std::invalid_argument);
}

TEST(KernelConfig, Validates)
{
    EXPECT_THROW((KernelConfig{0.0, 1e-10}).validate(), std::invalid_argument);
    EXPECT_THROW((KernelConfig{1.0, 1e-5}).validate(), std::invalid_argument);
    EXPECT_NO_THROW((KernelConfig{1.0, 0.0}).validate());
}

TEST(ObservationSet, RejectsInvalidPoints)
{
    ObservationSet obs(2, BoxDomain::cube(2, 0.0, 1.0));
    obs.add(p2(0.5, 0.5), 1.0);
    EXPECT_THROW(obs.add(p2(0.5, 0.5), 2.0), std::invalid_argument);
    EXPECT_THROW(obs.add(p2(1.5, 0.5), 2.0), std::invalid_argument);
    EXPECT_THROW(obs.add(p1(0.5), 2.0), std::invalid_argument);
    EXPECT_THROW(obs.add(p2(0.1, 0.1), std::nan("")), std::invalid_argument);
    obs.add(p2(0.5, 0.5 + 1e-9), 3.0);
    EXPECT_EQ(obs.size(), 2);
    EXPECT_EQ(obs.best(), 3.0);
    EXPECT_EQ(obs.worst(), 1.0);
}

TEST(Fit, SingleObservationInterpolates)
{
    const auto gp = fit(ObservationSet({p1(0.5)}, {2.0}), {1.0, 1e-10});
    const auto p = gp.predict(p1(0.5));
    EXPECT_NEAR(p.mean, 2.0, 1e-9);
    EXPECT_NEAR(p.variance, 0.0, 1e-9);
}

TEST(Fit, DistantObservationsReturnOwnValues)
{
    const auto gp = fit(ObservationSet({p1(0.0), p1(10.0)}, {1.5, -0.5}), {0.1, 1e-10});
    EXPECT_NEAR(gp.predict(p1(0.0)).mean, 1.5, 1e-8);
    EXPECT_NEAR(gp.predict(p1(10.0)).mean, -0.5, 1e-8);
}

TEST(Fit, TwoPointHandInverse)
{
    // mean = e^{-1/4} / (1 + e^{-1}), variance = 1 - 2 e^{-1/2} / (1 + e^{-1}).
    const auto gp = fit(ObservationSet({p1(0.0), p1(1.0)}, {0.0, 1.0}), {1.0, 1e-10});
    const auto p = gp.predict(p1(0.5));
    EXPECT_NEAR(p.mean, 0.56934899350811600874, 1e-8);
    EXPECT_NEAR(p.variance, 0.11318111602992609134, 1e-8);
}

TEST(Fit, EmptyObservationsRejected)
{
    EXPECT_THROW(fit(ObservationSet(2), {1.0, 1e-10}), std::invalid_argument);
}

TEST(Predict, FarFromDataRecoversPrior)
{
    const auto gp = fit(ObservationSet({p1(0.0), p1(0.2)}, {1.0, 2.0}), {0.01, 1e-10});
    const auto p = gp.predict(p1(5.0));
    EXPECT_EQ(p.mean, 0.0);
    EXPECT_EQ(p.variance, 1.0);
}

TEST(Predict, MatchesDenseSolve)
{
    const auto inst = random_instance(11, 2, 3, 0.3);
    for (const Point z : {p2(0.2, 0.9), p2(0.5, 0.5), p2(0.95, 0.05)}) {
        const auto ours = inst.gp.predict(z);
        const auto oracle = dense_posterior(inst.xs, inst.ys, z, 0.3);
        EXPECT_NEAR(ours.mean, oracle.mean, 1e-10);
        EXPECT_NEAR(ours.variance, oracle.variance, 1e-10);
    }
}

TEST(Predict, VarianceBoundsAtObservations)
{
    const auto inst = random_instance(4, 3, 12, 0.2);
    for (std::size_t i = 0; i < inst.xs.size(); ++i) {
        const auto p = inst.gp.predict(inst.xs[i]);
        EXPECT_NEAR(p.mean, inst.ys[i], 1e-6);
        EXPECT_GE(p.variance, 0.0);
        EXPECT_LE(p.variance, 1e-6);
    }
}

TEST(PredictMany, AgreesWithSingleQueries)
{
    const auto inst = random_instance(8, 2, 6, 0.1);
    Matrix zs(2, 3);
    zs << 0.1, 0.4, 0.9, 0.2, 0.8, 0.3;
    Vector mean, var;
    inst.gp.predict_many(zs, mean, var);
    for (Index i = 0; i < 3; ++i) {
        const auto p = inst.gp.predict(zs.col(i));
        EXPECT_NEAR(mean(i), p.mean, 1e-13);
        EXPECT_NEAR(var(i), p.variance, 1e-13);
    }
}

TEST(PredictWithDraft, EmptyDraftIsBasePosterior)
{
    const auto inst = random_instance(2, 2, 5, 0.1);
    const auto a = predict_with_draft(inst.gp, BatchDraft{}, p2(0.3, 0.3));
    const auto b = inst.gp.predict(p2(0.3, 0.3));
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
}

TEST(PredictWithDraft, SimulatingThePosteriorMeanLeavesMeanUnchanged)
{
    const auto inst = random_instance(3, 2, 5, 0.1);
    const Point x1 = p2(0.45, 0.55);
    BatchDraft draft;
    draft.add(x1, inst.gp.predict(x1).mean);
    for (const Point z : {p2(0.4, 0.6), p2(0.1, 0.1)})
        EXPECT_NEAR(predict_with_draft(inst.gp, draft, z).mean, inst.gp.predict(z).mean, 1e-10);
}

TEST(PredictWithDraft, VarianceMatchesRefit)
{
    const auto inst = random_instance(5, 2, 6, 0.15);
    BatchDraft draft;
    draft.add(p2(0.33, 0.71), 0.4);
    draft.add(p2(0.81, 0.12), -1.2);
    const Point z = p2(0.5, 0.5);
    auto xs = inst.xs;
    auto ys = inst.ys;
    xs.insert(xs.end(), draft.points.begin(), draft.points.end());
    ys.insert(ys.end(), draft.simulated_outputs.begin(), draft.simulated_outputs.end());
    const auto oracle = dense_posterior(xs, ys, z, 0.15);
    const auto ours = predict_with_draft(inst.gp, draft, z);
    EXPECT_NEAR(ours.variance, oracle.variance, 1e-10);
    EXPECT_NEAR(ours.mean, oracle.mean, 1e-8);
}

TEST(PredictWithDraft, VarianceIgnoresSimulatedOutputs)
{
    const auto inst = random_instance(6, 3, 8, 0.3);
    const std::vector<Point> x = {Point::Constant(3, 0.2), Point::Constant(3, 0.6)};
    const DraftPosterior a(inst.gp, x, std::vector<double>{0.0, 0.0});
    const DraftPosterior b(inst.gp, x, std::vector<double>{5.0, -3.0});
    for (const Point z : {Point::Constant(3, 0.3), Point::Constant(3, 0.9)})
        EXPECT_EQ(a.predict(z).variance, b.predict(z).variance);
}

TEST(DraftPosterior, RejectsDuplicates)
{
    const auto inst = random_instance(7, 1, 3, 0.1);
    EXPECT_THROW(DraftPosterior(inst.gp, {inst.xs[0]}), std::invalid_argument);
    EXPECT_THROW(DraftPosterior(inst.gp, {p1(0.123), p1(0.123)}), std::invalid_argument);
}

TEST(DeltaVariance, FarQueryGainsNothing)
{
    const auto gp = fit(ObservationSet({p1(0.0)}, {1.0}), {0.01, 1e-10});
    EXPECT_NEAR(delta_variance(gp, {p1(0.5)}, p1(9.0)), 0.0, 1e-15);
}

TEST(DeltaVariance, SelfQueryRemovesAllVariance)
{
    const auto inst = random_instance(9, 1, 4, 0.05);
    const Point x = p1(0.777);
    EXPECT_NEAR(delta_variance(inst.gp, {x}, x), inst.gp.predict(x).variance, 1e-9);
}

TEST(DeltaVariance, MatchesRefitIn1D)
{
    const auto inst = random_instance(12, 1, 4, 0.05);
    const std::vector<Point> x = {p1(0.31), p1(0.62)};
    const Point z = p1(0.5);
    auto xs = inst.xs;
    auto ys = inst.ys;
    xs.insert(xs.end(), x.begin(), x.end());
    ys.insert(ys.end(), {0.0, 0.0});
    const double expected = inst.gp.predict(z).variance - dense_posterior(xs, ys, z, 0.05).variance;
    EXPECT_NEAR(delta_variance(inst.gp, x, z), expected, 1e-8);
}

TEST(DeltaVariance, NeverNegative)
{
    Rng rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const auto inst = random_instance(100 + t, 2, 6, 0.05 + 0.2 * unit(rng));
        const std::vector<Point> x = {p2(unit(rng), unit(rng)), p2(unit(rng), unit(rng))};
        if (inst.gp.observations().contains(x[0], 1e-3) || inst.gp.observations().contains(x[1], 1e-3))
            continue;
        EXPECT_GE(delta_variance(inst.gp, x, p2(unit(rng), unit(rng))), -1e-10);
    }
}

TEST(DeltaVariance, OnlyFactorsTheDraftBlock)
{
    const auto inst = random_instance(13, 2, 15, 0.1);
    const std::vector<Point> x = {p2(0.05, 0.95), p2(0.5, 0.02), p2(0.97, 0.5)};
    auto& stats = linalg::factorization_stats();
    stats.reset();
    const DraftPosterior model(inst.gp, x);
    for (int i = 0; i < 10; ++i)
        model.delta_variance(p2(0.1 * i, 0.5));
    EXPECT_EQ(stats.count, 1u);
    EXPECT_EQ(stats.largest, 3);
}

TEST(DeltaVariance, EmptyBatchRejected)
{
    const auto inst = random_instance(1, 1, 2, 0.1);
    EXPECT_THROW(delta_variance(inst.gp, {}, p1(0.5)), std::invalid_argument);
    EXPECT_THROW(gamma(inst.gp, {}, p1(0.5)), std::invalid_argument);
    EXPECT_THROW(theta(inst.gp, {}), std::invalid_argument);
}

TEST(Gamma, FarQueryIsZero)
{
    const auto gp = fit(ObservationSet({p1(0.0)}, {1.0}), {0.01, 1e-10});
    EXPECT_NEAR(gamma(gp, {p1(0.5)}, p1(9.0)), 0.0, 1e-15);
}

TEST(Gamma, SinglePointClosedForm)
{
    const auto inst = random_instance(14, 2, 5, 0.2);
    const Point x1 = p2(0.42, 0.17);
    const Point z = p2(0.5, 0.3);
    // Posterior covariance by dense solves, divided by the posterior variance at x1.
    const auto n = static_cast<Index>(inst.xs.size());
    Matrix k(n, n);
    Vector cz(n), cx(n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j)
            k(i, j) = std::exp(-(inst.xs[i] - inst.xs[j]).squaredNorm() / 0.2) + (i == j ? 1e-10 : 0.0);
        cz(i) = std::exp(-(inst.xs[i] - z).squaredNorm() / 0.2);
        cx(i) = std::exp(-(inst.xs[i] - x1).squaredNorm() / 0.2);
    }
    Eigen::FullPivLU<Matrix> lu(k);
    const double cov = std::exp(-(z - x1).squaredNorm() / 0.2) - cz.dot(lu.solve(cx));
    const double var = 1.0 + 1e-10 - cx.dot(lu.solve(cx));
    EXPECT_NEAR(gamma(inst.gp, {x1}, z), std::abs(cov) / var, 1e-8);
}

TEST(Gamma, BoundsMeanShiftForRandomOutcomes)
{
    const auto inst = random_instance(15, 2, 6, 0.2);
    const std::vector<Point> x = {p2(0.21, 0.33), p2(0.74, 0.66)};
    const Point z = p2(0.4, 0.5);
    const double g = gamma(inst.gp, x, z);
    Rng rng(2);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const std::vector<double> y = {normal(rng), normal(rng)};
        const std::vector<double> y_hat = {normal(rng), normal(rng)};
        auto xs = inst.xs;
        xs.insert(xs.end(), x.begin(), x.end());
        auto ys_true = inst.ys, ys_sim = inst.ys;
        ys_true.insert(ys_true.end(), y.begin(), y.end());
        ys_sim.insert(ys_sim.end(), y_hat.begin(), y_hat.end());
        const double diff = dense_posterior(xs, ys_true, z, 0.2).mean - dense_posterior(xs, ys_sim, z, 0.2).mean;
        const double gap = std::hypot(y[0] - y_hat[0], y[1] - y_hat[1]);
        EXPECT_LE(std::abs(diff), g * gap * (1 + 1e-6) + 1e-9);
    }
}

TEST(Theta, ObservedPointsHaveNoSpread)
{
    const auto inst = random_instance(16, 2, 4, 0.1);
    EXPECT_NEAR(theta(inst.gp, {inst.xs[0], inst.xs[1]}), 0.0, 1e-4);
}

TEST(Theta, FarPointsAddPriorVariances)
{
    const auto gp = fit(ObservationSet({p1(0.0)}, {1.0}), {0.01, 1e-10});
    EXPECT_NEAR(theta(gp, {p1(5.0)}), 1.0, 1e-15);
    EXPECT_NEAR(theta(gp, {p1(5.0), p1(7.0)}), std::sqrt(2.0), 1e-15);
}

TEST(ContinuationLhs, MeanSimulationDropsBiasTerm)
{
    const auto inst = random_instance(17, 2, 5, 0.2);
    const Point x1 = p2(0.3, 0.8);
    const Point z = p2(0.35, 0.7);
    BatchDraft draft;
    draft.add(x1, inst.gp.predict(x1).mean);
    const double expected = gamma(inst.gp, {x1}, z) * theta(inst.gp, {x1});
    EXPECT_NEAR(continuation_lhs(inst.gp, draft, z), expected, 1e-14);
}

TEST(ContinuationLhs, FarQueryIsZero)
{
    const auto gp = fit(ObservationSet({p1(0.0)}, {1.0}), {0.01, 1e-10});
    BatchDraft draft;
    draft.add(p1(0.5), 3.0);
    EXPECT_NEAR(continuation_lhs(gp, draft, p1(9.0)), 0.0, 1e-15);
    EXPECT_THROW(continuation_lhs(gp, BatchDraft{}, p1(9.0)), std::invalid_argument);
}

TEST(ContinuationLhs, NeverBelowGammaTheta)
{
    Rng rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const auto inst = random_instance(200 + t, 2, 5, 0.1);
        BatchDraft draft;
        draft.add(p2(unit(rng), unit(rng)), 4.0 * unit(rng) - 2.0);
        draft.add(p2(unit(rng), unit(rng)), 4.0 * unit(rng) - 2.0);
        if (inst.gp.observations().contains(draft.points[0], 1e-3)
            || inst.gp.observations().contains(draft.points[1], 1e-3)
            || (draft.points[0] - draft.points[1]).norm() < 1e-3)
            continue;
        const Point z = p2(unit(rng), unit(rng));
        EXPECT_GE(continuation_lhs(inst.gp, draft, z), gamma(inst.gp, draft.points, z) * theta(inst.gp, draft.points));
    }
}

TEST(DraftPosterior, IncrementalVarianceMatchesRefitSweep)
{
    // Well separated inputs keep the refit well conditioned.
    Rng rng(33);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const Index d = 1 + t % 6;
        const auto inst = random_instance(500 + t, d, 2 + t % 10, 0.02 * static_cast<double>(d));
        std::vector<Point> x;
        while (x.size() < static_cast<std::size_t>(1 + t % 5)) {
            Point c(d);
            for (Index j = 0; j < d; ++j)
                c(j) = unit(rng);
            bool close = inst.gp.observations().contains(c, 0.05);
            for (const auto& q : x)
                close = close || (q - c).norm() < 0.05;
            if (!close)
                x.push_back(c);
        }
        Point z(d);
        for (Index j = 0; j < d; ++j)
            z(j) = unit(rng);
        auto xs = inst.xs;
        auto ys = inst.ys;
        xs.insert(xs.end(), x.begin(), x.end());
        ys.resize(xs.size(), 0.0);
        const double base = inst.gp.predict(z).variance;
        const double oracle = base - dense_posterior(xs, ys, z, inst.gp.kernel().width).variance;
        EXPECT_NEAR(delta_variance(inst.gp, x, z), oracle, 1e-8 * std::max(1.0, base));
    }
}

} // namespace

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

#ifndef HYBRIDBO_POLICIES_HPP
#define HYBRIDBO_POLICIES_HPP

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <hybridbo/acquisition.hpp>
#include <hybridbo/domain.hpp>
#include <hybridbo/gp.hpp>

namespace hybridbo {

/// How a drafted point's outcome is simulated before it is observed.
struct EstimatorKind {
    enum class Kind {
        GlobalMax,         // M, the known optimum
        Incumbent,         // y_max
        InflatedIncumbent, // (1 + zeta) y_max
        PosteriorMean,     // mu_{x|O}
        IncumbentMin,      // y_min
        UniformRandom,     // U[y_min, y_max]
    };

    Kind kind = Kind::PosteriorMean;
    double zeta = 0.1;

    static EstimatorKind global_max() { return {Kind::GlobalMax}; }
    static EstimatorKind incumbent() { return {Kind::Incumbent}; }
    static EstimatorKind inflated(double zeta = 0.1) { return {Kind::InflatedIncumbent, zeta}; }
    static EstimatorKind posterior_mean() { return {Kind::PosteriorMean}; }
    static EstimatorKind incumbent_min() { return {Kind::IncumbentMin}; }
    static EstimatorKind uniform_random() { return {Kind::UniformRandom}; }

    std::string name() const
    {
        switch (kind) {
        case Kind::GlobalMax: return "max";
        case Kind::Incumbent: return "ymax";
        case Kind::InflatedIncumbent: return "inflated";
        case Kind::PosteriorMean: return "mean";
        case Kind::IncumbentMin: return "ymin";
        case Kind::UniformRandom: return "random";
        }
        return "unknown";
    }

    static EstimatorKind parse(const std::string& s, double zeta = 0.1)
    {
        if (s == "max" || s == "M")
            return global_max();
        if (s == "ymax")
            return incumbent();
        if (s == "inflated")
            return inflated(zeta);
        if (s == "mean" || s == "mu")
            return posterior_mean();
        if (s == "ymin")
            return incumbent_min();
        if (s == "random")
            return uniform_random();
        throw std::invalid_argument("unknown estimator '" + s + "' (expected max|ymax|inflated|mean|ymin|random)");
    }

    void validate() const
    {
        if (kind == Kind::InflatedIncumbent && !(zeta >= 0.0))
            throw std::invalid_argument("EstimatorKind: zeta must be >= 0");
    }
};

inline double estimate_output(const EstimatorKind& est, const GpPosterior& gp, const Point& x,
                              std::optional<double> known_max, Rng& rng)
{
    using K = EstimatorKind::Kind;
    switch (est.kind) {
    case K::GlobalMax:
        if (!known_max)
            throw std::invalid_argument("estimate_output: GlobalMax needs the known maximum");
        return *known_max;
    case K::Incumbent:
        return gp.observations().best();
    case K::InflatedIncumbent:
        return (1.0 + est.zeta) * gp.observations().best();
    case K::PosteriorMean:
        return gp.predict(x).mean;
    case K::IncumbentMin:
        return gp.observations().worst();
    case K::UniformRandom: {
        const double lo = gp.observations().worst();
        const double hi = gp.observations().best();
        if (lo == hi)
            return lo;
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    }
    throw std::logic_error("estimate_output: unhandled estimator");
}

/// Algorithm inputs shared by every policy.
struct PolicyConfig {
    int budget = 15;    // n_l, experiments after the initial design
    int max_batch = 5;  // n_b
    double epsilon = 0.02;
    EstimatorKind estimator;
    int init_points = 2;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    KernelConfig kernel;

    void validate() const
    {
        if (budget < 1 || max_batch < 1 || init_points < 1)
            throw std::invalid_argument("PolicyConfig: budget, max_batch and init_points must be >= 1");
        if (max_batch > budget)
            throw std::invalid_argument("PolicyConfig: max_batch must not exceed budget");
        if (!(epsilon >= 0.0))
            throw std::invalid_argument("PolicyConfig: epsilon must be >= 0");
        estimator.validate();
        optimizer.validate();
        kernel.validate();
    }
};

/// One evaluation of the stopping criterion inside a hybrid step.
struct GuardEvaluation {
    int wall_iteration = 0;
    std::size_t draft_size = 0;
    double gamma = 0.0;
    double theta = 0.0;
    double bias = 0.0;
    double lhs = 0.0;
    bool admitted = false;
};

namespace detail {

/// Seed for the maximize call that picks the point following `stage`
/// already-known inputs (observed plus drafted). Depending only on the
/// model state keeps every policy's first choice at a state identical.
inline OptimizerConfig stage_optimizer(const OptimizerConfig& base, std::size_t stage)
{
    OptimizerConfig cfg = base;
    cfg.seed = splitmix64(base.seed ^ splitmix64(static_cast<std::uint64_t>(stage) + 0x5bd1e995ULL));
    return cfg;
}

struct Proposal {
    Point point;
    ExpectedImprovementObjective objective;
};

inline Proposal propose(const GpPosterior& gp, const BatchDraft& draft, const BoxDomain& domain,
                        const OptimizerConfig& optimizer)
{
    ExpectedImprovementObjective objective(gp, draft);
    const auto cfg = stage_optimizer(optimizer, static_cast<std::size_t>(gp.size()) + draft.size());
    Point x = maximize(objective, domain, cfg);
    return {std::move(x), std::move(objective)};
}

} // namespace detail

/// argmax EI (empty draft) or argmax simulated EI given the draft.
inline Point propose_next(const GpPosterior& gp, const BatchDraft& draft, const BoxDomain& domain,
                          const OptimizerConfig& optimizer)
{
    return detail::propose(gp, draft, domain, optimizer).point;
}

inline Point sequential_ei_step(const GpPosterior& gp, const BoxDomain& domain, const OptimizerConfig& optimizer)
{
    return propose_next(gp, BatchDraft{}, domain, optimizer);
}

/// One wall iteration of Hybrid Batch EI. The first point maximizes EI;
/// each later candidate z maximizes simulated EI given the draft and is
/// admitted while gamma_z (theta + ||y_hat - mu||) <= epsilon, the draft is
/// below max_batch and budget remains.
inline BatchDraft hybrid_batch_step(const GpPosterior& gp, const PolicyConfig& cfg, const BoxDomain& domain,
                                    int remaining, Rng& rng, std::optional<double> known_max = std::nullopt,
                                    std::vector<GuardEvaluation>* guard_log = nullptr, int wall_iteration = 0)
{
    if (remaining < 1)
        throw std::invalid_argument("hybrid_batch_step: remaining budget must be >= 1");
    BatchDraft draft;
    Point first = propose_next(gp, draft, domain, cfg.optimizer);
    draft.add(first, estimate_output(cfg.estimator, gp, first, known_max, rng));
    --remaining;

    while (remaining > 0 && static_cast<int>(draft.size()) < cfg.max_batch) {
        auto next = detail::propose(gp, draft, domain, cfg.optimizer);
        const DraftPosterior& model = next.objective.model();
        GuardEvaluation g;
        g.wall_iteration = wall_iteration;
        g.draft_size = draft.size();
        g.gamma = model.gamma(next.point);
        g.theta = model.theta();
        g.bias = model.bias();
        g.lhs = g.gamma * (g.theta + g.bias);
        g.admitted = g.lhs <= cfg.epsilon;
        if (guard_log)
            guard_log->push_back(g);
        if (!g.admitted)
            break;
        const double y_hat = estimate_output(cfg.estimator, gp, next.point, known_max, rng);
        draft.add(std::move(next.point), y_hat);
        --remaining;
    }
    return draft;
}

/// Greedy batch of k points, each simulated with the constant `lie`.
/// With lie = PosteriorMean this is the mu-Constant batch.
inline BatchDraft constant_liar_batch(const GpPosterior& gp, int k, const EstimatorKind& lie,
                                      const BoxDomain& domain, const OptimizerConfig& optimizer,
                                      std::optional<double> known_max, Rng& rng)
{
    if (k < 1)
        throw std::invalid_argument("constant_liar_batch: k must be >= 1");
    BatchDraft draft;
    for (int i = 0; i < k; ++i) {
        Point x = propose_next(gp, draft, domain, optimizer);
        const double y_hat = estimate_output(lie, gp, x, known_max, rng);
        draft.add(std::move(x), y_hat);
    }
    return draft;
}

struct PolicySpec {
    enum class Kind { Hybrid, SequentialEI, ConstantLiar, Random };

    Kind kind = Kind::Hybrid;
    int k = 5;          // constant liar batch size
    EstimatorKind lie;  // constant liar value

    static PolicySpec hybrid() { return {Kind::Hybrid}; }
    static PolicySpec sequential() { return {Kind::SequentialEI}; }
    static PolicySpec random() { return {Kind::Random}; }
    static PolicySpec constant_liar(int k, EstimatorKind lie) { return {Kind::ConstantLiar, k, lie}; }

    std::string name(const EstimatorKind& hybrid_estimator = {}) const
    {
        switch (kind) {
        case Kind::Hybrid: return "hybrid-" + hybrid_estimator.name();
        case Kind::SequentialEI: return "sequential";
        case Kind::ConstantLiar: return "cl-" + lie.name() + "-k" + std::to_string(k);
        case Kind::Random: return "random";
        }
        return "unknown";
    }
};

struct TraceSample {
    Point x;
    double y_true = 0.0;
    std::optional<double> y_simulated;
    double incumbent = 0.0;
    double regret = 0.0;
};

struct RunTrace {
    std::vector<TraceSample> initial;
    std::vector<std::vector<TraceSample>> iterations;
    std::vector<double> regret_after_each_sample; // one entry per policy sample
    int total_wall_iterations = 0;
    double speedup = 0.0;
    std::vector<GuardEvaluation> guards;

    std::vector<int> batch_sizes() const
    {
        std::vector<int> out;
        out.reserve(iterations.size());
        for (const auto& b : iterations)
            out.push_back(static_cast<int>(b.size()));
        return out;
    }

    int samples() const
    {
        int n = 0;
        for (const auto& b : iterations)
            n += static_cast<int>(b.size());
        return n;
    }

    double final_regret() const
    {
        if (!regret_after_each_sample.empty())
            return regret_after_each_sample.back();
        if (!initial.empty())
            return initial.back().regret;
        return std::numeric_limits<double>::quiet_NaN();
    }
};

/// Thrown when the objective fails mid-run; carries what was recorded so far.
class RunAborted : public std::runtime_error {
public:
    RunAborted(const std::string& what, RunTrace partial)
        : std::runtime_error(what), partial_(std::move(partial))
    {
    }
    const RunTrace& partial() const { return partial_; }

private:
    RunTrace partial_;
};

using Objective = std::function<double(const Point&)>;

/// Optimizer settings a run uses: cfg.optimizer reseeded from the run seed.
inline OptimizerConfig run_optimizer(const PolicyConfig& cfg)
{
    OptimizerConfig optimizer = cfg.optimizer;
    optimizer.seed = detail::splitmix64(cfg.optimizer.seed ^ detail::splitmix64(cfg.seed ^ 0xa5a5a5a5ULL));
    return optimizer;
}

/// Runs one policy from a seeded uniform initial design until the budget
/// is spent. Each wall iteration evaluates its whole batch; simulated
/// outputs never enter the observation set. Regret is measured against
/// known_max; the y_hat = M estimator sees estimator_max when given.
inline RunTrace run_policy(const Objective& f, const PolicySpec& policy, const PolicyConfig& cfg,
                           const BoxDomain& domain, double known_max,
                           std::optional<double> estimator_max = std::nullopt)
{
    const double m_hat = estimator_max.value_or(known_max);
    cfg.validate();
    if (policy.kind == PolicySpec::Kind::ConstantLiar && (policy.k < 1 || policy.k > cfg.budget))
        throw std::invalid_argument("run_policy: constant liar k must lie in [1, budget]");

    Rng rng(detail::splitmix64(cfg.seed));
    const OptimizerConfig optimizer = run_optimizer(cfg);
    PolicyConfig run_cfg = cfg;
    run_cfg.optimizer = optimizer;

    RunTrace trace;
    ObservationSet obs(domain.dim(), domain);
    double incumbent = -std::numeric_limits<double>::infinity();

    auto evaluate = [&](const Point& x) {
        double y;
        try {
            y = f(x);
        } catch (const std::exception& e) {
            throw RunAborted(std::string("objective evaluation failed: ") + e.what(), trace);
        }
        if (!std::isfinite(y))
            throw RunAborted("objective returned a non-finite value", trace);
        return y;
    };

    for (int i = 0; i < cfg.init_points; ++i) {
        Point x = domain.sample_uniform(rng);
        const double y = evaluate(x);
        obs.add(x, y);
        incumbent = std::max(incumbent, y);
        trace.initial.push_back({std::move(x), y, std::nullopt, incumbent, known_max - incumbent});
    }

    int remaining = cfg.budget;
    int wall = 0;
    while (remaining > 0) {
        ++wall;
        BatchDraft draft;
        switch (policy.kind) {
        case PolicySpec::Kind::Random:
            draft.add(domain.sample_uniform(rng), std::numeric_limits<double>::quiet_NaN());
            break;
        case PolicySpec::Kind::SequentialEI: {
            const auto gp = fit(obs, cfg.kernel);
            draft.add(sequential_ei_step(gp, domain, optimizer), std::numeric_limits<double>::quiet_NaN());
            break;
        }
        case PolicySpec::Kind::ConstantLiar: {
            const auto gp = fit(obs, cfg.kernel);
            draft = constant_liar_batch(gp, std::min(policy.k, remaining), policy.lie, domain, optimizer,
                                        m_hat, rng);
            break;
        }
        case PolicySpec::Kind::Hybrid: {
            const auto gp = fit(obs, cfg.kernel);
            draft = hybrid_batch_step(gp, run_cfg, domain, remaining, rng, m_hat, &trace.guards, wall);
            break;
        }
        }

        std::vector<TraceSample> batch;
        // Evaluate the whole batch before any outcome is recorded.
        std::vector<double> ys;
        for (const auto& x : draft.points)
            ys.push_back(evaluate(x));
        for (std::size_t i = 0; i < draft.size(); ++i) {
            obs.add(draft.points[i], ys[i]);
            incumbent = std::max(incumbent, ys[i]);
            std::optional<double> sim;
            if (policy.kind == PolicySpec::Kind::Hybrid || policy.kind == PolicySpec::Kind::ConstantLiar)
                sim = draft.simulated_outputs[i];
            batch.push_back({draft.points[i], ys[i], sim, incumbent, known_max - incumbent});
            trace.regret_after_each_sample.push_back(known_max - incumbent);
        }
        remaining -= static_cast<int>(draft.size());
        trace.iterations.push_back(std::move(batch));
    }

    trace.total_wall_iterations = wall;
    trace.speedup = 1.0 - static_cast<double>(wall) / static_cast<double>(cfg.budget);
    return trace;
}

} // namespace hybridbo

#endif

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

#ifndef HYBRIDBO_ACQUISITION_HPP
#define HYBRIDBO_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include <hybridbo/domain.hpp>
#include <hybridbo/gp.hpp>

namespace hybridbo {

inline constexpr double kSigmaFloor = 1e-12;

inline double normal_pdf(double u)
{
    static constexpr double inv_sqrt_2pi = 0.39894228040143267794;
    return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

inline double normal_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

/// (-u Phi(-u) + phi(u)) sigma with u = (incumbent - mean) / sigma. Below the
/// sigma floor the degenerate limit max(mean - incumbent, 0) is returned.
inline double expected_improvement(double mean, double variance, double incumbent)
{
    const double sigma = std::sqrt(std::max(variance, 0.0));
    if (sigma < kSigmaFloor)
        return std::max(mean - incumbent, 0.0);
    const double u = (incumbent - mean) / sigma;
    return std::max(0.0, (-u * normal_cdf(-u) + normal_pdf(u)) * sigma);
}

inline double ei(const GpPosterior& gp, const Point& z, double y_max)
{
    const auto p = gp.predict(z);
    return expected_improvement(p.mean, p.variance, y_max);
}

/// Incumbent used once simulated outputs enter the model.
inline double draft_incumbent(double y_max, const std::vector<double>& simulated)
{
    double inc = y_max;
    for (double y : simulated)
        inc = std::max(inc, y);
    return inc;
}

/// EI after conditioning on the draft: drafted mean and variance, incumbent
/// max(y_max, max y_hat).
inline double ei_hat(const GpPosterior& gp, const BatchDraft& draft, const Point& z, double y_max)
{
    const auto p = DraftPosterior(gp, draft).predict(z);
    return expected_improvement(p.mean, p.variance, draft_incumbent(y_max, draft.simulated_outputs));
}

/// EI (empty draft) or simulated EI over a fixed posterior, usable as a
/// maximize() objective. Points within kDuplicateTolerance of an observed or
/// drafted input score -1 so they are never re-proposed.
class ExpectedImprovementObjective {
public:
    ExpectedImprovementObjective(const GpPosterior& gp, const BatchDraft& draft)
        : model_(gp, draft),
          incumbent_(draft_incumbent(gp.observations().best(), draft.simulated_outputs))
    {
        const Index n = gp.size();
        const Index m = static_cast<Index>(draft.size());
        taken_.resize(gp.dim(), n + m);
        taken_.leftCols(n) = gp.observations().inputs();
        for (Index j = 0; j < m; ++j)
            taken_.col(n + j) = draft.points[static_cast<std::size_t>(j)];
    }

    explicit ExpectedImprovementObjective(const GpPosterior& gp)
        : ExpectedImprovementObjective(gp, BatchDraft{})
    {
    }

    double operator()(const Point& z) const
    {
        if (is_taken(z))
            return -1.0;
        const auto p = model_.predict(z);
        return expected_improvement(p.mean, p.variance, incumbent_);
    }

    Vector evaluate_many(const Matrix& zs) const
    {
        Vector mean, var;
        model_.predict_many(zs, mean, var);
        Vector out(zs.cols());
        for (Index i = 0; i < zs.cols(); ++i)
            out(i) = is_taken(zs.col(i)) ? -1.0 : expected_improvement(mean(i), var(i), incumbent_);
        return out;
    }

    double incumbent() const { return incumbent_; }
    const DraftPosterior& model() const { return model_; }

private:
    bool is_taken(const Point& z) const
    {
        for (Index i = 0; i < taken_.cols(); ++i)
            if ((taken_.col(i) - z).squaredNorm() <= kDuplicateTolerance * kDuplicateTolerance)
                return true;
        return false;
    }

    DraftPosterior model_;
    double incumbent_;
    Matrix taken_;
};

/// Budget for the derivative-free acquisition maximizer.
struct OptimizerConfig {
    int grid_candidates = 2000;
    int multistarts = 10;
    int local_steps = 50;
    std::uint64_t seed = 0;

    static OptimizerConfig defaults_for(Index dim)
    {
        OptimizerConfig cfg;
        cfg.grid_candidates = 2000 * static_cast<int>(dim);
        return cfg;
    }

    void validate() const
    {
        if (grid_candidates < 1 || multistarts < 1 || local_steps < 1)
            throw std::invalid_argument("OptimizerConfig: all counts must be >= 1");
    }
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::vector<int> first_primes(std::size_t count)
{
    std::vector<int> primes;
    for (int c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > c)
                break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime)
            primes.push_back(c);
    }
    return primes;
}

inline double radical_inverse(std::uint64_t i, int base)
{
    const double inv = 1.0 / base;
    double f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
        f *= inv;
    }
    return r;
}

} // namespace detail

/// Halton points with a seeded Cranley-Patterson rotation, mapped to a box.
/// Returns a d x count matrix, one candidate per column.
inline Matrix scrambled_halton(const BoxDomain& domain, std::size_t count, std::uint64_t seed,
                               std::size_t offset = 0)
{
    const Index d = domain.dim();
    const auto primes = detail::first_primes(static_cast<std::size_t>(d));
    Rng rng(detail::splitmix64(seed));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector shift(d);
    for (Index j = 0; j < d; ++j)
        shift(j) = unit(rng);

    Matrix out(d, static_cast<Index>(count));
    const Point side = domain.side_lengths();
    for (std::size_t i = 0; i < count; ++i) {
        for (Index j = 0; j < d; ++j) {
            double u = detail::radical_inverse(offset + i + 1, primes[static_cast<std::size_t>(j)]) + shift(j);
            u -= std::floor(u);
            out(j, static_cast<Index>(i)) = domain.lower()(j) + u * side(j);
        }
    }
    return out;
}

template <typename F>
concept ScalarObjective = requires(const F& f, const Point& x) {
    { f(x) } -> std::convertible_to<double>;
};

template <typename F>
concept BatchObjective = ScalarObjective<F> && requires(const F& f, const Matrix& xs) {
    { f.evaluate_many(xs) } -> std::convertible_to<Vector>;
};

struct MaximizeResult {
    Point point;
    double value = 0.0;
    std::size_t evaluations = 0;
    double resolution = 0.0; // final compass step norm behind the returned point
};

/// Deterministic global maximization over a box: a scrambled Halton sweep of
/// cfg.grid_candidates points, then compass (coordinate pattern) search from
/// the cfg.multistarts best candidates. Only strict improvements replace the
/// incumbent, so ties go to the earliest evaluated point.
template <ScalarObjective F>
MaximizeResult maximize_with_value(const F& objective, const BoxDomain& domain, const OptimizerConfig& cfg)
{
    cfg.validate();
    const Index d = domain.dim();
    const auto n_cand = static_cast<std::size_t>(cfg.grid_candidates);
    const Matrix cands = scrambled_halton(domain, n_cand, cfg.seed);

    Vector values(static_cast<Index>(n_cand));
    if constexpr (BatchObjective<F>) {
        constexpr Index chunk = 1024;
        for (Index s = 0; s < cands.cols(); s += chunk) {
            const Index len = std::min(chunk, cands.cols() - s);
            values.segment(s, len) = objective.evaluate_many(cands.middleCols(s, len));
        }
    } else {
        for (Index i = 0; i < cands.cols(); ++i)
            values(i) = objective(Point(cands.col(i)));
    }
    MaximizeResult best;
    best.evaluations = n_cand;
    Index best_idx = 0;
    for (Index i = 1; i < values.size(); ++i)
        if (values(i) > values(best_idx))
            best_idx = i;
    best.point = cands.col(best_idx);
    best.value = values(best_idx);

    std::vector<Index> order(n_cand);
    std::iota(order.begin(), order.end(), Index{0});
    const std::size_t n_starts = std::min<std::size_t>(static_cast<std::size_t>(cfg.multistarts), n_cand);
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_starts), order.end(),
                      [&](Index a, Index b) {
                          if (values(a) != values(b))
                              return values(a) > values(b);
                          return a < b;
                      });

    const Point side = domain.side_lengths();
    const double per_axis = std::ceil(std::pow(static_cast<double>(n_cand), 1.0 / static_cast<double>(d)));
    const Point initial_step = side / std::max(per_axis, 1.0);
    best.resolution = initial_step.norm();

    for (std::size_t s = 0; s < n_starts; ++s) {
        Point x = cands.col(order[s]);
        double fx = values(order[s]);
        Point step = initial_step;
        for (int it = 0; it < cfg.local_steps; ++it) {
            Point best_probe;
            double best_probe_value = fx;
            bool improved = false;
            for (Index j = 0; j < d; ++j) {
                for (double dir : {1.0, -1.0}) {
                    Point probe = x;
                    probe(j) += dir * step(j);
                    probe = domain.clamp(probe);
                    if (probe(j) == x(j))
                        continue;
                    const double fp = objective(probe);
                    ++best.evaluations;
                    if (fp > best_probe_value) {
                        best_probe_value = fp;
                        best_probe = std::move(probe);
                        improved = true;
                    }
                }
            }
            if (improved) {
                x = std::move(best_probe);
                fx = best_probe_value;
            } else {
                step *= 0.5;
            }
        }
        // The first start is the best candidate itself.
        if (fx > best.value || (s == 0 && fx >= best.value)) {
            best.value = fx;
            best.point = x;
            best.resolution = step.norm();
        }
    }
    best.point = domain.clamp(best.point);
    return best;
}

template <ScalarObjective F>
Point maximize(const F& objective, const BoxDomain& domain, const OptimizerConfig& cfg)
{
    return maximize_with_value(objective, domain, cfg).point;
}

} // namespace hybridbo

#endif

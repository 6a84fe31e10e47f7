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

#ifndef HYBRIDBO_THEORY_CHECKS_HPP
#define HYBRIDBO_THEORY_CHECKS_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <hybridbo/acquisition.hpp>
#include <hybridbo/gp.hpp>

namespace hybridbo {

/// Outcome of a bound sweep. Each row compares lhs <= rhs; a row is a
/// violation when rhs > 1e-12 and lhs / rhs exceeds 1 + 1e-6. Rows whose
/// assumptions fail are recorded with valid = false and only counted as
/// skipped.
struct BoundReport {
    struct Row {
        std::size_t instance = 0;
        double lhs = 0.0;
        double rhs = 0.0;
        bool valid = true;
    };

    static constexpr double kRhsFloor = 1e-12;
    static constexpr double kRatioSlack = 1e-6;

    std::string name;
    std::size_t instances = 0;
    std::size_t violations = 0;
    std::size_t skipped = 0;
    double max_ratio = 0.0;
    std::vector<Row> rows;

    void record(std::size_t instance, double lhs, double rhs, bool valid = true)
    {
        rows.push_back({instance, lhs, rhs, valid});
        ++instances;
        if (!valid) {
            ++skipped;
            return;
        }
        if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
            ++violations;
            return;
        }
        if (rhs > kRhsFloor) {
            const double ratio = lhs / rhs;
            max_ratio = std::max(max_ratio, ratio);
            if (ratio > 1.0 + kRatioSlack)
                ++violations;
        }
    }

    void merge(const BoundReport& other)
    {
        for (const auto& r : other.rows)
            record(r.instance, r.lhs, r.rhs, r.valid);
    }

    std::size_t valid_count() const { return instances - skipped; }
    bool passed() const { return violations == 0; }

    std::string summary() const
    {
        std::ostringstream os;
        os << name << ": rows=" << instances << " valid=" << valid_count() << " skipped=" << skipped
           << " violations=" << violations << " max_ratio=" << std::setprecision(6) << max_ratio;
        return os.str();
    }

    void write_csv(const std::filesystem::path& path) const
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << "instance,lhs,rhs,valid\n" << std::setprecision(17);
        for (const auto& r : rows)
            out << r.instance << ',' << r.lhs << ',' << r.rhs << ',' << (r.valid ? 1 : 0) << '\n';
    }
};

namespace theory {

/// GP over [0,1]^dim with outputs drawn jointly from the prior.
struct GpInstance {
    GpPosterior gp;
    BoxDomain domain;
};

inline Point uniform_point(const BoxDomain& domain, Rng& rng) { return domain.sample_uniform(rng); }

inline Vector standard_normals(Index n, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = normal(rng);
    return v;
}

/// Widths are log-uniform in [0.01, 0.1] * dim, bracketing the
/// 0.01 * (sum of side lengths) default.
inline GpInstance random_instance(Rng& rng, Index dim, Index n_obs)
{
    const BoxDomain domain = BoxDomain::cube(dim, 0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    KernelConfig kernel;
    kernel.width = 0.01 * static_cast<double>(dim) * std::pow(10.0, unit(rng));

    std::vector<Point> xs;
    while (static_cast<Index>(xs.size()) < n_obs) {
        Point x = uniform_point(domain, rng);
        bool dup = false;
        for (const auto& p : xs)
            dup = dup || (p - x).norm() < 1e-6;
        if (!dup)
            xs.push_back(std::move(x));
    }
    Matrix inputs(dim, n_obs);
    for (Index i = 0; i < n_obs; ++i)
        inputs.col(i) = xs[static_cast<std::size_t>(i)];
    const auto prior = linalg::SpdFactor::compute(kernel_matrix(inputs, inputs, kernel), 1e-8);
    const Vector ys = prior.lower() * standard_normals(n_obs, rng);

    ObservationSet obs(dim, domain);
    for (Index i = 0; i < n_obs; ++i)
        obs.add(xs[static_cast<std::size_t>(i)], ys(i));
    return {fit(std::move(obs), kernel), domain};
}

/// Independent route for drafted quantities: a full fit on O plus (x, y).
inline GpPosterior refit_with(const GpPosterior& gp, const std::vector<Point>& x, const std::vector<double>& y)
{
    ObservationSet obs = gp.observations();
    for (std::size_t i = 0; i < x.size(); ++i)
        obs.add(x[i], y[i]);
    return fit(std::move(obs), gp.kernel());
}

/// Weights w with mu(z) = w . [y_O; y_x] for a refit posterior.
inline Vector refit_mean_weights(const GpPosterior& refit, const Point& z)
{
    return refit.factor().solve(refit.cross_kernel(z));
}

/// Instances compared against a refit must keep the augmented Gram matrix
/// below this condition number; both routes lose ~eps * cond otherwise.
inline constexpr double kMaxRefitCondition = 1e6;

inline double augmented_condition(const GpPosterior& gp, const std::vector<Point>& x)
{
    const Index n = gp.size();
    Matrix all(gp.dim(), n + static_cast<Index>(x.size()));
    all.leftCols(n) = gp.observations().inputs();
    for (std::size_t j = 0; j < x.size(); ++j)
        all.col(n + static_cast<Index>(j)) = x[j];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(kernel_matrix(all, all, gp.kernel()), Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    return lo > 0.0 ? eig.eigenvalues().maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

inline Point near_point(const Point& centre, double scale, const BoxDomain& domain, Rng& rng)
{
    return domain.clamp(centre + scale * standard_normals(centre.size(), rng));
}

/// Uniform sample from the ball of the given radius (not clipped).
inline Point point_in_ball(const Point& centre, double radius, Rng& rng)
{
    Vector dir = standard_normals(centre.size(), rng);
    dir /= dir.norm();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r = radius * std::pow(unit(rng), 1.0 / static_cast<double>(centre.size()));
    return centre + r * dir;
}

} // namespace theory

struct Lemma1Check {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// |EI with the true y1 - EI with y1_hat| at z against
/// 1/2 (1 + sigma_{z|O} / sigma_{x1|O}) |y1_hat - y1|.
inline Lemma1Check check_lemma1(const GpPosterior& gp, const Point& x1, double y1_true, double y1_hat,
                                const Point& z)
{
    const double sigma_x1 = gp.predict(x1).stddev();
    if (!(sigma_x1 > 1e-10))
        throw std::invalid_argument("check_lemma1: posterior variance at x1 is degenerate");
    const double y_max = gp.observations().best();
    BatchDraft truth, simulated;
    truth.add(x1, y1_true);
    simulated.add(x1, y1_hat);
    const double ei_true = ei_hat(gp, truth, z, y_max);
    const double ei_sim = ei_hat(gp, simulated, z, y_max);
    const double sigma_z = gp.predict(z).stddev();
    return {std::abs(ei_true - ei_sim), 0.5 * (1.0 + sigma_z / sigma_x1) * std::abs(y1_hat - y1_true)};
}

struct Theorem3Check {
    double lhs = 0.0;
    double rhs = 0.0;
    bool valid = false;
    Point x2;      // argmax of simulated EI
    Point x2_star; // argmax of EI with the true outcome
    double sigma_min = 0.0;
    std::vector<double> singular_profile; // smallest singular value at each segment sample
    bool boundary = false;                // a maximizer sits on the box boundary
};

namespace detail {

/// Central-difference Hessian with per-coordinate steps h.
template <typename F>
Matrix fd_hessian(const F& f, const Point& x, const Vector& h)
{
    const Index d = x.size();
    Matrix hess(d, d);
    const double f0 = f(x);
    for (Index i = 0; i < d; ++i) {
        Point p = x, m = x;
        p(i) += h(i);
        m(i) -= h(i);
        hess(i, i) = (f(p) - 2.0 * f0 + f(m)) / (h(i) * h(i));
        for (Index j = 0; j < i; ++j) {
            Point pp = x, pm = x, mp = x, mm = x;
            pp(i) += h(i), pp(j) += h(j);
            pm(i) += h(i), pm(j) -= h(j);
            mp(i) -= h(i), mp(j) += h(j);
            mm(i) -= h(i), mm(j) -= h(j);
            hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h(i) * h(j));
        }
    }
    return hess;
}

inline double smallest_singular_value(const Matrix& m)
{
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues().minCoeff();
}

} // namespace detail

/// Samples along the x2 -- x2* segment used to bound the Hessian.
inline constexpr int kTheorem3SegmentSamples = 11;

/// Distance between the simulated-EI and true-EI maximizers against the
/// curvature bound. Sigma_min is the smallest singular value of the
/// finite-difference Hessian of simulated EI, minimized over 11 equispaced
/// points of the segment. A sample whose Hessian changes by more than 1e-3
/// (relative) between steps 1e-4 and 1e-5 of the box side is unreliable
/// and invalidates the instance, as do Sigma_min < 1e-8 and separations
/// below the optimizer's final resolution. The bound needs both maximizers
/// to be stationary, so a maximizer on the box boundary is also skipped.
inline Theorem3Check check_theorem3(const GpPosterior& gp, const Point& x1, double y1_true, double y1_hat,
                                    const BoxDomain& domain, const OptimizerConfig& cfg)
{
    const double sigma_x1 = gp.predict(x1).stddev();
    if (!(sigma_x1 > 1e-10))
        throw std::invalid_argument("check_theorem3: posterior variance at x1 is degenerate");
    BatchDraft truth, simulated;
    truth.add(x1, y1_true);
    simulated.add(x1, y1_hat);
    const ExpectedImprovementObjective ei_sim(gp, simulated);
    const ExpectedImprovementObjective ei_true(gp, truth);
    const auto best_sim = maximize_with_value(ei_sim, domain, cfg);
    const auto best_true = maximize_with_value(ei_true, domain, cfg);

    Theorem3Check out;
    out.x2 = best_sim.point;
    out.x2_star = best_true.point;
    const double sep = (out.x2_star - out.x2).norm();
    out.lhs = sep * sep;

    const Point side = domain.side_lengths();
    const Vector h1 = 1e-4 * side;
    const Vector h2 = 1e-5 * side;
    // Unmasked simulated EI: the Hessian probe may pass close to x1.
    const DraftPosterior model(gp, simulated);
    const double incumbent = draft_incumbent(gp.observations().best(), simulated.simulated_outputs);
    auto f = [&](const Point& z) {
        const auto p = model.predict(z);
        return expected_improvement(p.mean, p.variance, incumbent);
    };

    bool reliable = true;
    out.sigma_min = std::numeric_limits<double>::infinity();
    for (int s = 0; s < kTheorem3SegmentSamples; ++s) {
        const double t = static_cast<double>(s) / (kTheorem3SegmentSamples - 1);
        const Point p = domain.clamp(out.x2 + t * (out.x2_star - out.x2));
        const Matrix ha = detail::fd_hessian(f, p, h1);
        const Matrix hb = detail::fd_hessian(f, p, h2);
        if ((ha - hb).norm() > 1e-3 * std::max(1.0, ha.norm()))
            reliable = false;
        const double sv = detail::smallest_singular_value(ha);
        out.singular_profile.push_back(sv);
        out.sigma_min = std::min(out.sigma_min, sv);
        if (sep == 0.0)
            break;
    }

    const double sigma_x2 = gp.predict(out.x2).stddev();
    const double sigma_x2s = gp.predict(out.x2_star).stddev();
    out.rhs = 2.0 / out.sigma_min * (1.0 + std::max(sigma_x2, sigma_x2s) / sigma_x1) * std::abs(y1_hat - y1_true);

    const double resolution = 2.0 * std::max(best_sim.resolution, best_true.resolution);
    const bool optimizer_dominated = sep > 0.0 && sep <= resolution;
    const auto near_face = [&](const Point& p) {
        for (Index j = 0; j < p.size(); ++j) {
            const double tol = std::max(resolution, 1e-9 * side(j));
            if (p(j) - domain.lower()(j) <= tol || domain.upper()(j) - p(j) <= tol)
                return true;
        }
        return false;
    };
    out.boundary = near_face(out.x2) || near_face(out.x2_star);
    out.valid = reliable && out.sigma_min >= 1e-8 && !optimizer_dominated && !out.boundary
                && std::isfinite(out.rhs);
    return out;
}

namespace detail {

/// sqrt(n) ||A^{-1} B^T||_2 and sigma_{x1|O} for a single drafted point.
struct SpherePieces {
    double projection_term = 0.0;
    double sigma = 0.0;
    double n = 0.0;
    double projection_norm = 0.0;
};

inline SpherePieces sphere_pieces(const GpPosterior& gp, const Point& x1)
{
    const Vector w = gp.factor().solve(gp.cross_kernel(x1));
    SpherePieces s;
    s.n = static_cast<double>(gp.size());
    s.projection_norm = w.norm();
    s.projection_term = std::sqrt(s.n) * s.projection_norm;
    s.sigma = gp.predict(x1).stddev();
    return s;
}

} // namespace detail

/// Squared radius -l ln(sqrt(n) ||A^{-1}B^T|| + sigma_{x1|O} sqrt(eps)) of
/// the ball around x1 inside which the variance drop is at least eps, or
/// nullopt when the log argument is outside (0, 1) and the ball is empty.
inline std::optional<double> corollary2_radius(const GpPosterior& gp, const Point& x1, double epsilon)
{
    if (!(epsilon >= 0.0))
        return std::nullopt;
    const auto s = detail::sphere_pieces(gp, x1);
    const double arg = s.projection_term + s.sigma * std::sqrt(epsilon);
    if (!(arg > 0.0) || !(arg < 1.0))
        return std::nullopt;
    return -gp.kernel().width * std::log(arg);
}

/// Squared radius -l ln sqrt(pi eps^2 / (2 sigma^6) - n ||A^{-1}B^T||^2),
/// transcribed as stated; nullopt when the root argument is outside (0, 1).
inline std::optional<double> corollary3_radius(const GpPosterior& gp, const Point& x1, double epsilon)
{
    if (!(epsilon >= 0.0))
        return std::nullopt;
    const auto s = detail::sphere_pieces(gp, x1);
    const double sigma6 = std::pow(s.sigma, 6);
    if (!(sigma6 > 0.0))
        return std::nullopt;
    const double arg = std::numbers::pi * epsilon * epsilon / (2.0 * sigma6) - s.n * s.projection_norm * s.projection_norm;
    if (!(arg > 0.0) || !(arg < 1.0))
        return std::nullopt;
    return -gp.kernel().width * std::log(std::sqrt(arg));
}

/// Knobs shared by the sweeps; defaults match the verification suite.
struct SweepConfig {
    std::uint64_t seed = 20260101;
    std::size_t instances = 1000;
    std::size_t mc_samples = 100000;
    std::size_t points_per_instance = 20;
    bool corrupt_theorem1 = false; // negative control for the verify driver
};

namespace theory {

inline Rng sweep_rng(std::uint64_t seed, std::uint64_t salt)
{
    return Rng(hybridbo::detail::splitmix64(seed ^ hybridbo::detail::splitmix64(salt)));
}

template <typename T>
T uniform_int(Rng& rng, T lo, T hi)
{
    return std::uniform_int_distribution<T>(lo, hi)(rng);
}

/// Query point: half the time near a drafted point, otherwise anywhere.
inline Point query_point(const std::vector<Point>& x, const GpInstance& inst, Rng& rng)
{
    std::bernoulli_distribution coin(0.5);
    if (coin(rng)) {
        const auto& c = x[uniform_int<std::size_t>(rng, 0, x.size() - 1)];
        return near_point(c, std::sqrt(inst.gp.kernel().width), inst.domain, rng);
    }
    return uniform_point(inst.domain, rng);
}

inline std::vector<Point> fresh_points(const GpInstance& inst, std::size_t m, Rng& rng)
{
    std::vector<Point> x;
    while (x.size() < m) {
        Point p = uniform_point(inst.domain, rng);
        bool clash = inst.gp.observations().contains(p, 1e-6);
        for (const auto& q : x)
            clash = clash || (q - p).norm() < 1e-6;
        if (!clash)
            x.push_back(std::move(p));
    }
    return x;
}

/// Incremental variance drop against a full refit, |diff| <= 1e-8 max(1, sigma^2).
inline BoundReport sweep_theorem1(const SweepConfig& cfg)
{
    BoundReport rep;
    rep.name = "theorem1";
    Rng rng = sweep_rng(cfg.seed, 1);
    for (std::size_t i = 0; rep.valid_count() < cfg.instances; ++i) {
        const Index d = uniform_int<Index>(rng, 1, 6);
        const Index n = uniform_int<Index>(rng, 2, 20);
        const std::size_t m = uniform_int<std::size_t>(rng, 1, 5);
        const auto inst = random_instance(rng, d, n);
        const auto x = fresh_points(inst, m, rng);
        const Point z = query_point(x, inst, rng);
        if (augmented_condition(inst.gp, x) > kMaxRefitCondition) {
            rep.record(i, 0.0, 0.0, false);
            continue;
        }

        double incremental = DraftPosterior(inst.gp, x).delta_variance(z);
        if (cfg.corrupt_theorem1)
            incremental += 1e-3;
        const double base = inst.gp.predict(z).variance;
        const auto refit = refit_with(inst.gp, x, std::vector<double>(m, 0.0));
        const double direct = base - refit.predict(z).variance;
        rep.record(i, std::abs(incremental - direct), 1e-8 * std::max(1.0, base));
    }
    return rep;
}

/// Exact identity mu_{z|O,x}(y) - mu_{z|O,x}(y_hat) = g D (y - y_hat) plus
/// both norm bounds, each over random y and y_hat. Rows come in triples:
/// identity residual, first bound, second bound. The bounds carry the
/// identity's 1e-8 tolerance as absolute slack (a single drafted point
/// makes them equalities).
inline BoundReport sweep_theorem2(const SweepConfig& cfg, BoundReport* identity = nullptr)
{
    BoundReport rep;
    rep.name = "theorem2";
    BoundReport ident;
    ident.name = "theorem2-identity";
    Rng rng = sweep_rng(cfg.seed, 2);
    for (std::size_t i = 0; ident.valid_count() < cfg.instances; ++i) {
        const Index d = uniform_int<Index>(rng, 1, 6);
        const Index n = uniform_int<Index>(rng, 2, 20);
        const std::size_t m = uniform_int<std::size_t>(rng, 1, 5);
        const auto inst = random_instance(rng, d, n);
        const auto x = fresh_points(inst, m, rng);
        const Point z = query_point(x, inst, rng);
        if (augmented_condition(inst.gp, x) > kMaxRefitCondition) {
            ident.record(i, 0.0, 0.0, false);
            continue;
        }

        const DraftPosterior model(inst.gp, x);
        const auto q = model.query(z);
        const double gamma = q.dg.norm();
        const Vector mu_x = model.marginal_means();
        const Vector y = mu_x + 2.0 * standard_normals(static_cast<Index>(m), rng);
        const Vector y_hat = mu_x + 2.0 * standard_normals(static_cast<Index>(m), rng);

        const auto as_vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        const double mu_true = refit_with(inst.gp, x, as_vec(y)).predict(z).mean;
        const double mu_sim = refit_with(inst.gp, x, as_vec(y_hat)).predict(z).mean;
        const double mu_base = q.base.mean;

        const double predicted = q.dg.dot(y - y_hat);
        const double tol = 1e-8 * std::max(1.0, (y - y_hat).norm());
        ident.record(i, std::abs((mu_true - mu_sim) - predicted), tol);
        rep.record(i, std::abs(mu_true - mu_sim), gamma * (y - y_hat).norm() + tol);
        rep.record(i, std::abs(mu_true - mu_base), gamma * (y - mu_x).norm() + tol);
    }
    if (identity)
        *identity = ident;
    rep.merge(ident);
    return rep;
}

/// Monte-Carlo E|mu_{z|O,x} - mu_{z|O}| with y drawn jointly from the
/// posterior at x, against gamma theta + 3 standard errors. The drafted
/// mean comes from refit weights, not the incremental identity.
inline BoundReport sweep_corollary1(const SweepConfig& cfg)
{
    BoundReport rep;
    rep.name = "corollary1";
    Rng rng = sweep_rng(cfg.seed, 3);
    for (std::size_t i = 0; rep.valid_count() < cfg.instances; ++i) {
        const Index d = uniform_int<Index>(rng, 1, 6);
        const Index n = uniform_int<Index>(rng, 2, 20);
        const std::size_t m = uniform_int<std::size_t>(rng, 1, 5);
        const auto inst = random_instance(rng, d, n);
        const auto x = fresh_points(inst, m, rng);
        const Point z = query_point(x, inst, rng);
        if (augmented_condition(inst.gp, x) > kMaxRefitCondition) {
            rep.record(i, 0.0, 0.0, false);
            continue;
        }

        const DraftPosterior model(inst.gp, x);
        const double gamma = model.gamma(z);
        const double theta = model.theta();
        const double mu_base = inst.gp.predict(z).mean;

        // Joint posterior covariance at x under O.
        const Matrix xm = model.points();
        const Matrix v = inst.gp.factor().half_solve(kernel_matrix(inst.gp.observations().inputs(), xm, inst.gp.kernel()));
        const Matrix cov = kernel_matrix(xm, xm, inst.gp.kernel()) - v.transpose() * v;
        const auto chol = linalg::SpdFactor::compute(cov, 1e-10);
        const Matrix lower = chol.lower();

        const auto refit = refit_with(inst.gp, x, std::vector<double>(m, 0.0));
        const Vector w = refit_mean_weights(refit, z);
        const Vector w_obs = w.head(n);
        const Vector w_x = w.tail(static_cast<Index>(m));
        const double fixed = w_obs.dot(inst.gp.observations().outputs());

        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t s = 0; s < cfg.mc_samples; ++s) {
            const Vector y = model.marginal_means() + lower * standard_normals(static_cast<Index>(m), rng);
            const double diff = std::abs(fixed + w_x.dot(y) - mu_base);
            sum += diff;
            sum_sq += diff * diff;
        }
        const double ns = static_cast<double>(cfg.mc_samples);
        const double mean = sum / ns;
        const double var = std::max(0.0, sum_sq / ns - mean * mean);
        const double stderr_ = std::sqrt(var / ns);
        rep.record(i, mean, gamma * theta + 3.0 * stderr_);
    }
    return rep;
}

/// |EI - simulated EI| against the simulated-EI gap bound over random 1-3 D
/// instances with |O| in 2..10.
inline BoundReport sweep_lemma1(const SweepConfig& cfg)
{
    BoundReport rep;
    rep.name = "lemma1";
    Rng rng = sweep_rng(cfg.seed, 4);
    std::size_t i = 0;
    while (rep.instances < cfg.instances) {
        const Index d = uniform_int<Index>(rng, 1, 3);
        const Index n = uniform_int<Index>(rng, 2, 10);
        const auto inst = random_instance(rng, d, n);
        const Point x1 = fresh_points(inst, 1, rng).front();
        const auto p1 = inst.gp.predict(x1);
        if (!(p1.stddev() > 1e-10))
            continue;
        const double y1 = p1.mean + p1.stddev() * standard_normals(1, rng)(0);
        const double y1_hat = y1 + std::exp(std::uniform_real_distribution<double>(-7.0, 1.0)(rng))
                                       * standard_normals(1, rng)(0);
        const Point z = query_point({x1}, inst, rng);
        const auto c = check_lemma1(inst.gp, x1, y1, y1_hat, z);
        rep.record(i++, c.lhs, c.rhs);
    }
    return rep;
}

/// 2-D sweep of the second-point displacement bound; x1 is the EI
/// maximizer and y1_hat = y1 + N(0, 1e-3^2).
inline BoundReport sweep_theorem3(const SweepConfig& cfg, std::size_t min_valid = 200)
{
    BoundReport rep;
    rep.name = "theorem3";
    Rng rng = sweep_rng(cfg.seed, 5);
    OptimizerConfig opt = OptimizerConfig::defaults_for(2);
    opt.local_steps = 200;
    std::size_t i = 0;
    while (rep.valid_count() < min_valid && rep.instances < cfg.instances) {
        const Index n = uniform_int<Index>(rng, 2, 10);
        const auto inst = random_instance(rng, 2, n);
        opt.seed = rng();
        const Point x1 = maximize(ExpectedImprovementObjective(inst.gp), inst.domain, opt);
        const auto p1 = inst.gp.predict(x1);
        if (!(p1.stddev() > 1e-5))
            continue;
        const double y1 = p1.mean + p1.stddev() * standard_normals(1, rng)(0);
        const double y1_hat = y1 + 1e-3 * standard_normals(1, rng)(0);
        const auto c = check_theorem3(inst.gp, x1, y1, y1_hat, inst.domain, opt);
        rep.record(i++, c.lhs, c.rhs, c.valid);
    }
    return rep;
}

/// Variance drop at sampled z inside the variance-drop ball must reach eps.
/// Rows compare eps (lhs) with the drop (rhs); degenerate balls are skipped.
inline BoundReport sweep_corollary2(const SweepConfig& cfg)
{
    BoundReport rep;
    rep.name = "corollary2";
    Rng rng = sweep_rng(cfg.seed, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        const Index d = uniform_int<Index>(rng, 1, 3);
        const Index n = uniform_int<Index>(rng, 2, 10);
        const auto inst = random_instance(rng, d, n);
        const Point x1 = fresh_points(inst, 1, rng).front();
        const auto pieces = detail::sphere_pieces(inst.gp, x1);
        double eps = 0.0;
        if (pieces.projection_term < 1.0 && pieces.sigma > 0.0) {
            const double eps_max = std::pow((1.0 - pieces.projection_term) / pieces.sigma, 2);
            eps = eps_max * unit(rng);
        }
        const auto r2 = corollary2_radius(inst.gp, x1, eps);
        if (!r2 || eps <= 0.0) {
            rep.record(i, 0.0, 0.0, false);
            continue;
        }
        const DraftPosterior model(inst.gp, std::vector<Point>{x1});
        for (std::size_t k = 0; k < cfg.points_per_instance; ++k) {
            const Point z = theory::point_in_ball(x1, std::sqrt(*r2), rng);
            rep.record(i, eps, model.delta_variance(z));
        }
    }
    return rep;
}

/// Monte-Carlo E|mu_{z|O,x1} - mu_hat_{z|O,x1}| at sampled z inside the
/// mean-shift ball (y1 ~ N(mu_{x1|O}, sigma^2), y1_hat = mu_{x1|O}),
/// required to reach eps - 3 standard errors. Rows compare
/// eps - 3 se (lhs) with the estimate (rhs).
inline BoundReport sweep_corollary3(const SweepConfig& cfg)
{
    BoundReport rep;
    rep.name = "corollary3";
    Rng rng = sweep_rng(cfg.seed, 7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t i = 0; i < cfg.instances; ++i) {
        const Index d = uniform_int<Index>(rng, 1, 3);
        const Index n = uniform_int<Index>(rng, 2, 10);
        const auto inst = random_instance(rng, d, n);
        const Point x1 = fresh_points(inst, 1, rng).front();
        const auto pieces = detail::sphere_pieces(inst.gp, x1);
        const double s6 = std::pow(pieces.sigma, 6);
        const double base = pieces.n * pieces.projection_norm * pieces.projection_norm;
        // eps with pi eps^2 / (2 s6) - base uniform over (0, 1).
        const double target = base + unit(rng);
        const double eps = std::sqrt(2.0 * s6 * target / std::numbers::pi);
        const auto r2 = corollary3_radius(inst.gp, x1, eps);
        if (!r2) {
            rep.record(i, 0.0, 0.0, false);
            continue;
        }
        const auto p1 = inst.gp.predict(x1);
        const auto refit = refit_with(inst.gp, {x1}, {0.0});
        for (std::size_t k = 0; k < cfg.points_per_instance; ++k) {
            const Point z = theory::point_in_ball(x1, std::sqrt(*r2), rng);
            const double w_x = refit_mean_weights(refit, z)(n);
            double sum = 0.0, sum_sq = 0.0;
            for (std::size_t s = 0; s < cfg.mc_samples; ++s) {
                const double diff = std::abs(w_x * p1.stddev() * normal(rng));
                sum += diff;
                sum_sq += diff * diff;
            }
            const double ns = static_cast<double>(cfg.mc_samples);
            const double mean = sum / ns;
            const double se = std::sqrt(std::max(0.0, sum_sq / ns - mean * mean) / ns);
            rep.record(i, eps - 3.0 * se, mean);
        }
    }
    return rep;
}

} // namespace theory
} // namespace hybridbo

#endif

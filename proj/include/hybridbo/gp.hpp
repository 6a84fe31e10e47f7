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

#ifndef HYBRIDBO_GP_HPP
#define HYBRIDBO_GP_HPP

#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <hybridbo/domain.hpp>
#include <hybridbo/linalg.hpp>

namespace hybridbo {

/// Gaussian kernel k(a, b) = exp(-||a - b||^2 / width), plus the diagonal
/// jitter added to the Gram matrix of the observed inputs.
struct KernelConfig {
    double width = 1.0;
    double jitter = linalg::kMinJitter;

    void validate() const
    {
        if (!(width > 0.0) || !std::isfinite(width))
            throw std::invalid_argument("KernelConfig: width must be positive");
        if (!(jitter >= 0.0) || jitter > linalg::kMaxJitter)
            throw std::invalid_argument("KernelConfig: jitter must lie in [0, 1e-6]");
    }
};

inline double kernel_eval(const Point& a, const Point& b, const KernelConfig& cfg)
{
    if (a.size() != b.size())
        throw std::invalid_argument("kernel_eval: dimension mismatch ("
                                    + std::to_string(a.size()) + " vs "
                                    + std::to_string(b.size()) + ")");
    return std::exp(-(a - b).squaredNorm() / cfg.width);
}

/// K(i, j) = k(a.col(i), b.col(j)); inputs are stored one point per column.
inline Matrix kernel_matrix(const Matrix& a, const Matrix& b, const KernelConfig& cfg)
{
    if (a.rows() != b.rows())
        throw std::invalid_argument("kernel_matrix: dimension mismatch");
    Matrix k(a.cols(), b.cols());
    for (Index j = 0; j < b.cols(); ++j)
        for (Index i = 0; i < a.cols(); ++i)
            k(i, j) = std::exp(-(a.col(i) - b.col(j)).squaredNorm() / cfg.width);
    return k;
}

inline Vector kernel_column(const Matrix& a, const Point& z, const KernelConfig& cfg)
{
    if (a.rows() != z.size())
        throw std::invalid_argument("kernel_column: dimension mismatch");
    Vector k(a.cols());
    for (Index i = 0; i < a.cols(); ++i)
        k(i) = std::exp(-(a.col(i) - z).squaredNorm() / cfg.width);
    return k;
}

/// Finalized (input, true output) pairs. Inputs are kept one per column.
class ObservationSet {
public:
    ObservationSet() = default;
    explicit ObservationSet(Index dim, std::optional<BoxDomain> domain = std::nullopt)
        : inputs_(dim, 0), domain_(std::move(domain))
    {
        if (domain_ && domain_->dim() != dim)
            throw std::invalid_argument("ObservationSet: domain dimension mismatch");
    }

    ObservationSet(const std::vector<Point>& xs, const std::vector<double>& ys,
                   std::optional<BoxDomain> domain = std::nullopt)
    {
        if (xs.size() != ys.size())
            throw std::invalid_argument("ObservationSet: inputs and outputs differ in length");
        if (xs.empty())
            throw std::invalid_argument("ObservationSet: cannot infer dimension from no inputs");
        *this = ObservationSet(xs.front().size(), std::move(domain));
        for (std::size_t i = 0; i < xs.size(); ++i)
            add(xs[i], ys[i]);
    }

    void add(const Point& x, double y)
    {
        if (x.size() != dim())
            throw std::invalid_argument("ObservationSet: dimension mismatch");
        if (!std::isfinite(y) || !x.allFinite())
            throw std::invalid_argument("ObservationSet: non-finite observation");
        if (domain_ && !domain_->contains(x))
            throw std::invalid_argument("ObservationSet: input outside the domain");
        if (contains(x))
            throw std::invalid_argument("ObservationSet: duplicate input");
        inputs_.conservativeResize(Eigen::NoChange, inputs_.cols() + 1);
        inputs_.col(inputs_.cols() - 1) = x;
        outputs_.conservativeResize(outputs_.size() + 1);
        outputs_(outputs_.size() - 1) = y;
    }

    ObservationSet with(const Point& x, double y) const
    {
        ObservationSet copy = *this;
        copy.add(x, y);
        return copy;
    }

    bool contains(const Point& x, double tol = kDuplicateTolerance) const
    {
        for (Index i = 0; i < inputs_.cols(); ++i)
            if ((inputs_.col(i) - x).norm() <= tol)
                return true;
        return false;
    }

    Index dim() const { return inputs_.rows(); }
    Index size() const { return inputs_.cols(); }
    bool empty() const { return inputs_.cols() == 0; }
    const Matrix& inputs() const { return inputs_; }
    const Vector& outputs() const { return outputs_; }
    Point input(Index i) const { return inputs_.col(i); }
    double output(Index i) const { return outputs_(i); }
    const std::optional<BoxDomain>& domain() const { return domain_; }

    double best() const
    {
        if (empty())
            throw std::logic_error("ObservationSet: no observations");
        return outputs_.maxCoeff();
    }
    double worst() const
    {
        if (empty())
            throw std::logic_error("ObservationSet: no observations");
        return outputs_.minCoeff();
    }

private:
    Matrix inputs_;
    Vector outputs_;
    std::optional<BoxDomain> domain_;
};

struct PosteriorPrediction {
    double mean = 0.0;
    double variance = 1.0;

    double stddev() const { return std::sqrt(variance); }
};

namespace detail {

// Round-off can push a variance slightly below zero or above the prior.
inline double clamp_variance(double v)
{
    if (v < 0.0)
        return 0.0;
    return v > 1.0 ? 1.0 : v;
}

} // namespace detail

/// Noise-free GP posterior over an ObservationSet with a zero-mean prior.
/// Immutable; copies share the cached factorization.
class GpPosterior {
public:
    GpPosterior() = default;

    static GpPosterior fit(ObservationSet obs, const KernelConfig& cfg)
    {
        cfg.validate();
        if (obs.empty())
            throw std::invalid_argument("fit: empty observation set");
        auto state = std::make_shared<State>();
        const Matrix gram = kernel_matrix(obs.inputs(), obs.inputs(), cfg);
        state->factor = linalg::SpdFactor::compute(gram, cfg.jitter);
        state->weights = state->factor.solve(obs.outputs());
        state->observations = std::move(obs);
        state->kernel = cfg;
        GpPosterior gp;
        gp.state_ = std::move(state);
        return gp;
    }

    PosteriorPrediction predict(const Point& z) const
    {
        const Vector c = cross_kernel(z);
        const Vector v = factor().half_solve(c);
        return {c.dot(weights()), detail::clamp_variance(1.0 - v.squaredNorm())};
    }

    /// Column-wise predictions for z stored one point per column.
    void predict_many(const Matrix& zs, Vector& mean, Vector& variance) const
    {
        const Matrix c = kernel_matrix(observations().inputs(), zs, kernel());
        mean = c.transpose() * weights();
        const Matrix v = factor().half_solve(c);
        variance = (1.0 - v.colwise().squaredNorm().array()).matrix().transpose();
        for (Index i = 0; i < variance.size(); ++i)
            variance(i) = detail::clamp_variance(variance(i));
    }

    /// k(x_O, z)
    Vector cross_kernel(const Point& z) const
    {
        return kernel_column(observations().inputs(), z, kernel());
    }

    const ObservationSet& observations() const { return checked().observations; }
    const KernelConfig& kernel() const { return checked().kernel; }
    const linalg::SpdFactor& factor() const { return checked().factor; }
    /// A^{-1} y_O
    const Vector& weights() const { return checked().weights; }
    /// Jitter actually used by the factorization (after any escalation).
    double jitter() const { return factor().jitter(); }
    Index dim() const { return observations().dim(); }
    Index size() const { return observations().size(); }
    bool valid() const { return state_ != nullptr; }

private:
    struct State {
        ObservationSet observations;
        KernelConfig kernel;
        linalg::SpdFactor factor;
        Vector weights;
    };

    const State& checked() const
    {
        if (!state_)
            throw std::logic_error("GpPosterior: used before fit");
        return *state_;
    }

    std::shared_ptr<const State> state_;
};

inline GpPosterior fit(ObservationSet obs, const KernelConfig& cfg)
{
    return GpPosterior::fit(std::move(obs), cfg);
}

inline PosteriorPrediction predict(const GpPosterior& gp, const Point& z) { return gp.predict(z); }

/// The in-progress batch: drafted points with simulated outputs.
struct BatchDraft {
    std::vector<Point> points;
    std::vector<double> simulated_outputs;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    void add(Point x, double y_hat)
    {
        points.push_back(std::move(x));
        simulated_outputs.push_back(y_hat);
    }

    bool contains(const Point& x, double tol = kDuplicateTolerance) const
    {
        for (const auto& p : points)
            if (p.size() == x.size() && (p - x).norm() <= tol)
                return true;
        return false;
    }
};

/// Posterior over O augmented with drafted points, built incrementally from
/// the cached factorization of k(x_O, x_O). With B = k(x, x_O) and
/// S = k(x, x) - B A^{-1} B^T (so D = S^{-1}), each query z costs one
/// triangular solve against A plus an m x m solve against S.
///
/// The drafted variance never depends on the simulated outputs; the mean
/// shift is g^T D (y_hat - mu_x) with g = k(x, z) - B A^{-1} k(x_O, z).
class DraftPosterior {
public:
    /// Per-query decomposition of the drafted prediction.
    struct Query {
        PosteriorPrediction base;    // under O only
        PosteriorPrediction drafted; // under O plus the draft
        Vector g;                    // k(z, x) - C A^{-1} B^T
        Vector dg;                   // D g
    };

    DraftPosterior(GpPosterior gp, const std::vector<Point>& points,
                   std::optional<std::vector<double>> simulated = std::nullopt)
        : gp_(std::move(gp))
    {
        const Index m = static_cast<Index>(points.size());
        const Index d = gp_.dim();
        points_.resize(d, m);
        for (Index j = 0; j < m; ++j) {
            const Point& p = points[static_cast<std::size_t>(j)];
            if (p.size() != d)
                throw std::invalid_argument("DraftPosterior: dimension mismatch");
            if (gp_.observations().contains(p))
                throw std::invalid_argument("DraftPosterior: drafted point coincides with an observation");
            for (Index i = 0; i < j; ++i)
                if ((points_.col(i) - p).norm() <= kDuplicateTolerance)
                    throw std::invalid_argument("DraftPosterior: duplicate drafted point");
            points_.col(j) = p;
        }

        if (m == 0) {
            simulated_ = Vector(0);
            marginal_means_ = Vector(0);
            marginal_variances_ = Vector(0);
            beta_ = Vector(0);
            return;
        }

        const Matrix bt = kernel_matrix(gp_.observations().inputs(), points_, gp_.kernel()); // n x m
        v_ = gp_.factor().half_solve(bt);                                                      // L^{-1} B^T
        const Matrix s = kernel_matrix(points_, points_, gp_.kernel()) - v_.transpose() * v_;
        schur_ = linalg::SpdFactor::compute(s, gp_.jitter());

        marginal_means_ = bt.transpose() * gp_.weights();
        marginal_variances_ = (1.0 - v_.colwise().squaredNorm().array()).matrix().transpose();
        for (Index i = 0; i < m; ++i)
            marginal_variances_(i) = detail::clamp_variance(marginal_variances_(i));

        if (simulated) {
            if (static_cast<Index>(simulated->size()) != m)
                throw std::invalid_argument("DraftPosterior: simulated outputs differ in length from points");
            simulated_ = Eigen::Map<const Vector>(simulated->data(), m);
        } else {
            simulated_ = marginal_means_;
        }
        beta_ = schur_.solve(simulated_ - marginal_means_);
    }

    DraftPosterior(GpPosterior gp, const BatchDraft& draft)
        : DraftPosterior(std::move(gp), draft.points, draft.simulated_outputs)
    {
    }

    Query query(const Point& z) const
    {
        Query q;
        const Vector c = gp_.cross_kernel(z);
        const Vector v = gp_.factor().half_solve(c);
        q.base = {c.dot(gp_.weights()), detail::clamp_variance(1.0 - v.squaredNorm())};
        if (size() == 0) {
            q.drafted = q.base;
            q.g = Vector(0);
            q.dg = Vector(0);
            return q;
        }
        q.g = kernel_column(points_, z, gp_.kernel()) - v_.transpose() * v;
        q.dg = schur_.solve(q.g);
        q.drafted.mean = q.base.mean + q.g.dot(beta_);
        q.drafted.variance = detail::clamp_variance(q.base.variance - q.g.dot(q.dg));
        return q;
    }

    PosteriorPrediction predict(const Point& z) const { return query(z).drafted; }

    void predict_many(const Matrix& zs, Vector& mean, Vector& variance) const
    {
        const Matrix c = kernel_matrix(gp_.observations().inputs(), zs, gp_.kernel());
        const Matrix v = gp_.factor().half_solve(c);
        mean = c.transpose() * gp_.weights();
        variance = (1.0 - v.colwise().squaredNorm().array()).matrix().transpose();
        if (size() > 0) {
            const Matrix g = kernel_matrix(points_, zs, gp_.kernel()) - v_.transpose() * v;
            const Matrix dg = schur_.solve(g);
            mean += g.transpose() * beta_;
            variance -= g.cwiseProduct(dg).colwise().sum().transpose();
        }
        for (Index i = 0; i < variance.size(); ++i)
            variance(i) = detail::clamp_variance(variance(i));
    }

    /// sigma^2_{z|O} - sigma^2_{z|O,x}, unclamped.
    double delta_variance(const Point& z) const
    {
        const Query q = query(z);
        return size() == 0 ? 0.0 : q.g.dot(q.dg);
    }

    /// ||(k(z,x) - C A^{-1} B^T) D||_2
    double gamma(const Point& z) const
    {
        if (size() == 0)
            return 0.0;
        return query(z).dg.norm();
    }

    /// sqrt of the summed marginal variances of the drafted points under O.
    double theta() const { return std::sqrt(marginal_variances_.sum()); }

    /// ||y_hat - mu_{x|O}||_2
    double bias() const { return (simulated_ - marginal_means_).norm(); }

    double continuation_lhs(const Point& z) const { return gamma(z) * (theta() + bias()); }

    Index size() const { return points_.cols(); }
    const GpPosterior& base() const { return gp_; }
    const Matrix& points() const { return points_; }
    const Vector& marginal_means() const { return marginal_means_; }
    const Vector& marginal_variances() const { return marginal_variances_; }
    const Vector& simulated_outputs() const { return simulated_; }

    /// D = S^{-1}, materialized; only meant for diagnostics and checks.
    Matrix schur_inverse() const
    {
        return schur_.solve(Matrix::Identity(size(), size()));
    }

    /// A^{-1} B^T (n x m).
    Matrix projection() const { return gp_.factor().half_solve_transposed(v_); }

private:
    GpPosterior gp_;
    Matrix points_;
    Matrix v_;                  // L^{-1} B^T
    linalg::SpdFactor schur_;
    Vector simulated_;
    Vector marginal_means_;
    Vector marginal_variances_;
    Vector beta_;               // D (y_hat - mu_x)
};

inline PosteriorPrediction predict_with_draft(const GpPosterior& gp, const BatchDraft& draft, const Point& z)
{
    return DraftPosterior(gp, draft).predict(z);
}

inline double delta_variance(const GpPosterior& gp, const std::vector<Point>& x, const Point& z)
{
    if (x.empty())
        throw std::invalid_argument("delta_variance: empty batch");
    return DraftPosterior(gp, x).delta_variance(z);
}

inline double gamma(const GpPosterior& gp, const std::vector<Point>& x, const Point& z)
{
    if (x.empty())
        throw std::invalid_argument("gamma: empty batch");
    return DraftPosterior(gp, x).gamma(z);
}

/// Marginal variances only; unlike delta_variance this needs no
/// factorization beyond the cached one.
inline double theta(const GpPosterior& gp, const std::vector<Point>& x)
{
    if (x.empty())
        throw std::invalid_argument("theta: empty batch");
    double total = 0.0;
    for (const auto& p : x)
        total += gp.predict(p).variance;
    return std::sqrt(total);
}

inline double continuation_lhs(const GpPosterior& gp, const BatchDraft& draft, const Point& z)
{
    if (draft.empty())
        throw std::invalid_argument("continuation_lhs: empty draft");
    return DraftPosterior(gp, draft).continuation_lhs(z);
}

} // namespace hybridbo

#endif

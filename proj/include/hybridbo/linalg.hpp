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

#ifndef HYBRIDBO_LINALG_HPP
#define HYBRIDBO_LINALG_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace hybridbo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;
using Index = Eigen::Index;

/// Raised when a Gram matrix (or a Schur complement of one) cannot be
/// factored even after the largest admissible diagonal jitter.
class ConditioningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace linalg {

inline constexpr double kMinJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-6;

/// Per-thread counters over every SPD factorization performed. Tests use
/// these to check that incremental updates never refactor the full system.
struct FactorizationStats {
    std::size_t count = 0;
    Index largest = 0;

    void reset() { *this = FactorizationStats{}; }
};

inline FactorizationStats& factorization_stats()
{
    thread_local FactorizationStats stats;
    return stats;
}

/// Cholesky factorization of a symmetric positive-definite matrix plus
/// diagonal jitter. Every linear solve in the library goes through this
/// type so that the incremental and refit routes round the same way.
///
/// The requested jitter is tried first; on failure it escalates to
/// kMinJitter and then tenfold, and gives up once it would exceed kMaxJitter.
/// A pivot that collapses below a tenth of the jitter counts as a failure,
/// since in exact arithmetic every pivot of (K + jI) is at least j.
class SpdFactor {
public:
    SpdFactor() = default;

    static SpdFactor compute(const Matrix& a, double jitter)
    {
        if (a.rows() != a.cols())
            throw std::invalid_argument("SpdFactor: matrix is not square");
        if (jitter < 0.0 || jitter > kMaxJitter)
            throw std::invalid_argument("SpdFactor: jitter outside [0, 1e-6]");

        auto& stats = factorization_stats();
        ++stats.count;
        if (a.rows() > stats.largest)
            stats.largest = a.rows();

        double j = jitter;
        for (;;) {
            SpdFactor f;
            Matrix shifted = a;
            shifted.diagonal().array() += j;
            f.llt_.compute(shifted);
            f.jitter_ = j;
            if (f.llt_.info() == Eigen::Success && f.pivots_ok())
                return f;
            const double next = j < kMinJitter ? kMinJitter : j * 10.0;
            if (next > kMaxJitter * (1.0 + 1e-9))
                throw ConditioningError("SPD factorization failed at jitter "
                                        + std::to_string(j) + " (dimension "
                                        + std::to_string(a.rows()) + ")");
            j = next;
        }
    }

    Index size() const { return llt_.rows(); }
    double jitter() const { return jitter_; }

    template <typename Derived>
    Matrix solve(const Eigen::MatrixBase<Derived>& b) const
    {
        return llt_.solve(b);
    }

    /// L^{-1} b, with L the lower Cholesky factor.
    template <typename Derived>
    Matrix half_solve(const Eigen::MatrixBase<Derived>& b) const
    {
        return llt_.matrixL().solve(b);
    }

    /// L^{-T} b.
    template <typename Derived>
    Matrix half_solve_transposed(const Eigen::MatrixBase<Derived>& b) const
    {
        return llt_.matrixU().solve(b);
    }

    Matrix lower() const { return llt_.matrixL(); }

private:
    bool pivots_ok() const
    {
        const double floor = jitter_ > 0.0 ? 0.1 * jitter_ : 0.0;
        const auto& lu = llt_.matrixLLT();
        for (Index i = 0; i < lu.rows(); ++i) {
            const double p = lu(i, i) * lu(i, i);
            if (!(p > floor))
                return false;
        }
        return true;
    }

    Eigen::LLT<Matrix> llt_;
    double jitter_ = 0.0;
};

} // namespace linalg
} // namespace hybridbo

#endif

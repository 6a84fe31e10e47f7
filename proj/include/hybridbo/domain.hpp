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

#ifndef HYBRIDBO_DOMAIN_HPP
#define HYBRIDBO_DOMAIN_HPP

#include <random>
#include <stdexcept>

#include <hybridbo/linalg.hpp>

namespace hybridbo {

/// Points closer than this (Euclidean) are treated as the same input.
inline constexpr double kDuplicateTolerance = 1e-12;

using Rng = std::mt19937_64;

/// Axis-aligned box [lower, upper] in R^d.
class BoxDomain {
public:
    BoxDomain() = default;

    BoxDomain(Point lower, Point upper) : lower_(std::move(lower)), upper_(std::move(upper))
    {
        if (lower_.size() != upper_.size() || lower_.size() == 0)
            throw std::invalid_argument("BoxDomain: bounds must share a positive dimension");
        for (Index i = 0; i < lower_.size(); ++i)
            if (!(lower_(i) < upper_(i)))
                throw std::invalid_argument("BoxDomain: lower must be < upper in every coordinate");
    }

    /// [lo, hi]^dim
    static BoxDomain cube(Index dim, double lo, double hi)
    {
        return BoxDomain(Point::Constant(dim, lo), Point::Constant(dim, hi));
    }

    Index dim() const { return lower_.size(); }
    const Point& lower() const { return lower_; }
    const Point& upper() const { return upper_; }
    Point side_lengths() const { return upper_ - lower_; }

    bool contains(const Point& x, double slack = 1e-12) const
    {
        if (x.size() != dim())
            return false;
        for (Index i = 0; i < dim(); ++i)
            if (x(i) < lower_(i) - slack || x(i) > upper_(i) + slack)
                return false;
        return true;
    }

    Point clamp(const Point& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

    /// Maps u in [0,1]^d to the box.
    Point from_unit(const Point& u) const
    {
        return lower_ + u.cwiseProduct(upper_ - lower_);
    }

    Point sample_uniform(Rng& rng) const
    {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        Point u(dim());
        for (Index i = 0; i < dim(); ++i)
            u(i) = unit(rng);
        return from_unit(u);
    }

private:
    Point lower_;
    Point upper_;
};

} // namespace hybridbo

#endif

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

#ifndef HYBRIDBO_BENCHMARKS_HPP
#define HYBRIDBO_BENCHMARKS_HPP

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include <hybridbo/acquisition.hpp>
#include <hybridbo/domain.hpp>
#include <hybridbo/gp.hpp>
#include <hybridbo/policies.hpp>

namespace hybridbo {

/// A maximization test problem with its box and known optimum M.
struct Benchmark {
    std::string name;
    BoxDomain domain;
    Objective evaluate;
    double global_max = 0.0;
    double kernel_width = 0.0;
    std::optional<Point> argmax;
    std::optional<double> data_max; // tabulated surrogates: largest tabulated output
    std::string note;

    Index dimension() const { return domain.dim(); }
    /// Value handed to the y_hat = M estimator.
    double estimator_max() const { return data_max.value_or(global_max); }
    KernelConfig kernel() const { return {kernel_width, linalg::kMinJitter}; }
};

/// 0.01 times the summed side lengths of the box.
inline double default_kernel_width(const BoxDomain& domain) { return 0.01 * domain.side_lengths().sum(); }

namespace benchmarks {

namespace detail {

inline void require_in_box(const Point& x, const BoxDomain& box, const char* who)
{
    if (!box.contains(x))
        throw std::domain_error(std::string(who) + ": input outside the benchmark box");
}

// Dixon-Szego tables.
inline constexpr std::array<double, 4> kHartmanWeights = {1.0, 1.2, 3.0, 3.2};

inline constexpr std::array<std::array<double, 3>, 4> kHartman3A = {{
    {3.0, 10.0, 30.0},
    {0.1, 10.0, 35.0},
    {3.0, 10.0, 30.0},
    {0.1, 10.0, 35.0},
}};

inline constexpr std::array<std::array<double, 3>, 4> kHartman3P = {{
    {0.3689, 0.1170, 0.2673},
    {0.4699, 0.4387, 0.7470},
    {0.1091, 0.8732, 0.5547},
    {0.0381, 0.5743, 0.8828},
}};

inline constexpr std::array<std::array<double, 6>, 4> kHartman6A = {{
    {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
    {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
    {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
    {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
}};

inline constexpr std::array<std::array<double, 6>, 4> kHartman6P = {{
    {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
    {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
    {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
    {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
}};

inline constexpr std::array<double, 10> kShekelOmega = {0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};

// B(j, i): coordinate j of centre i.
inline constexpr std::array<std::array<double, 10>, 4> kShekelB = {{
    {4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0},
    {4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6},
    {4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0},
    {4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6},
}};

template <std::size_t D>
double hartman_impl(const Point& x, const std::array<std::array<double, D>, 4>& a,
                    const std::array<std::array<double, D>, 4>& p)
{
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double inner = 0.0;
        for (std::size_t j = 0; j < D; ++j) {
            const double diff = x(static_cast<Index>(j)) - p[i][j];
            inner += a[i][j] * diff * diff;
        }
        total += kHartmanWeights[i] * std::exp(-inner);
    }
    return total;
}

} // namespace detail

inline BoxDomain cosines_box() { return BoxDomain::cube(2, 0.0, 1.0); }
inline BoxDomain rosenbrock_box() { return BoxDomain::cube(2, 0.0, 1.0); }
inline BoxDomain hartman_box(int variant) { return BoxDomain::cube(variant, 0.0, 1.0); }
inline BoxDomain shekel_box() { return BoxDomain::cube(4, 3.0, 6.0); }
inline BoxDomain michalewicz_box() { return BoxDomain::cube(5, 0.0, std::numbers::pi); }

inline double cosines(const Point& x)
{
    detail::require_in_box(x, cosines_box(), "cosines");
    const double u = 1.6 * x(0) - 0.5;
    const double v = 1.6 * x(1) - 0.5;
    const double pi = std::numbers::pi;
    return 1.0 - (u * u + v * v - 0.3 * std::cos(3.0 * pi * u) - 0.3 * std::cos(3.0 * pi * v));
}

inline double rosenbrock(const Point& x)
{
    detail::require_in_box(x, rosenbrock_box(), "rosenbrock");
    const double a = x(1) - x(0) * x(0);
    const double b = 1.0 - x(0);
    return 10.0 - 100.0 * a * a - b * b;
}

inline double hartman(const Point& x, int variant)
{
    if (variant == 3) {
        detail::require_in_box(x, hartman_box(3), "hartman3");
        return detail::hartman_impl<3>(x, detail::kHartman3A, detail::kHartman3P);
    }
    if (variant == 6) {
        detail::require_in_box(x, hartman_box(6), "hartman6");
        return detail::hartman_impl<6>(x, detail::kHartman6A, detail::kHartman6P);
    }
    throw std::invalid_argument("hartman: variant must be 3 or 6");
}

inline double shekel(const Point& x)
{
    detail::require_in_box(x, shekel_box(), "shekel");
    double total = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        double sq = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            const double diff = x(static_cast<Index>(j)) - detail::kShekelB[j][i];
            sq += diff * diff;
        }
        total += 1.0 / (detail::kShekelOmega[i] + sq);
    }
    return total;
}

/// -sum sin(x_i) sin(i x_i^2 / pi)^20, exactly as tabulated. Its maximum
/// over the box is the trivial 0, so experiments use michalewicz_negated.
inline double michalewicz(const Point& x)
{
    detail::require_in_box(x, michalewicz_box(), "michalewicz");
    double total = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        const double s = std::sin(static_cast<double>(i + 1) * x(i) * x(i) / std::numbers::pi);
        total += std::sin(x(i)) * std::pow(s, 20);
    }
    return -total;
}

inline double michalewicz_negated(const Point& x) { return -michalewicz(x); }

/// Position-weighted sum over a constant table, sum_k (k + 1) v_k in
/// row-major order; guards the embedded tables against edits.
template <typename... Tables>
double table_checksum(const Tables&... tables)
{
    double total = 0.0;
    std::size_t k = 1;
    auto visit = [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_arithmetic_v<typename T::value_type>) {
            for (double v : t)
                total += static_cast<double>(k++) * v;
        } else {
            for (const auto& row : t)
                for (double v : row)
                    total += static_cast<double>(k++) * v;
        }
    };
    (visit(tables), ...);
    return total;
}

inline double hartman3_checksum()
{
    return table_checksum(detail::kHartmanWeights, detail::kHartman3A, detail::kHartman3P);
}
inline double hartman6_checksum()
{
    return table_checksum(detail::kHartmanWeights, detail::kHartman6A, detail::kHartman6P);
}
inline double shekel_checksum() { return table_checksum(detail::kShekelOmega, detail::kShekelB); }

inline Point make_point(std::initializer_list<double> v)
{
    Point p(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v)
        p(i++) = x;
    return p;
}

inline Benchmark make(const BoxDomain& box, std::string name, Objective f, double m, Point argmax,
                      std::string note = {})
{
    Benchmark b;
    b.name = std::move(name);
    b.domain = box;
    b.evaluate = std::move(f);
    b.global_max = m;
    b.kernel_width = default_kernel_width(box);
    b.argmax = std::move(argmax);
    b.note = std::move(note);
    return b;
}

// Maxima located by a 2^17-point Sobol scan followed by L-BFGS-B and
// Nelder-Mead polishing of the 40 best candidates.
inline Benchmark cosines_benchmark()
{
    return make(cosines_box(), "cosines", cosines, 1.6, make_point({0.3125, 0.3125}));
}

inline Benchmark rosenbrock_benchmark()
{
    return make(rosenbrock_box(), "rosenbrock", rosenbrock, 10.0, make_point({1.0, 1.0}));
}

inline Benchmark hartman3_benchmark()
{
    return make(hartman_box(3), "hartman3", [](const Point& x) { return hartman(x, 3); }, 3.862779787332663,
                make_point({0.11458889285902132, 0.5556488937422941, 0.8525469846026985}));
}

inline Benchmark hartman6_benchmark()
{
    return make(hartman_box(6), "hartman6", [](const Point& x) { return hartman(x, 6); }, 3.322368011415515,
                make_point({0.201689511981222, 0.1500106921418704, 0.4768739745408309, 0.27533243012113673,
                            0.31165161735065994, 0.6573005341142446}));
}

inline Benchmark shekel_benchmark()
{
    return make(shekel_box(), "shekel", shekel, 10.536443153483534,
                make_point({4.0007468687289025, 3.9995094787257566, 4.000746867629871, 3.9995094793472914}));
}

inline Benchmark michalewicz_benchmark()
{
    return make(michalewicz_box(), "michalewicz", michalewicz_negated, 4.6876581790881495,
                make_point({2.2029055218771223, 1.5707963285509994, 1.2849915718812794, 1.9230584694853223,
                            1.7204697732569456}),
                "negated: sum sin(x_i) sin(i x_i^2/pi)^20");
}

inline Benchmark michalewicz_printed_benchmark()
{
    return make(michalewicz_box(), "michalewicz-printed", michalewicz, 0.0,
                Point::Zero(5), "as tabulated: maximum 0 at the origin");
}

inline std::vector<std::string> synthetic_names()
{
    return {"cosines", "rosenbrock", "hartman3", "hartman6", "shekel", "michalewicz"};
}

inline Benchmark by_name(const std::string& name)
{
    if (name == "cosines")
        return cosines_benchmark();
    if (name == "rosenbrock")
        return rosenbrock_benchmark();
    if (name == "hartman3")
        return hartman3_benchmark();
    if (name == "hartman6")
        return hartman6_benchmark();
    if (name == "shekel")
        return shekel_benchmark();
    if (name == "michalewicz")
        return michalewicz_benchmark();
    if (name == "michalewicz-printed")
        return michalewicz_printed_benchmark();
    throw std::invalid_argument("unknown benchmark '" + name + "'");
}

} // namespace benchmarks

class SurrogateFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SurrogateTable {
    std::vector<Point> inputs;
    std::vector<double> outputs;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline std::string trim(std::string s)
{
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline double parse_double(const std::string& cell, std::size_t line_no)
{
    const std::string t = trim(cell);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (!t.empty() && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
        throw SurrogateFormatError("line " + std::to_string(line_no) + ": cannot parse '" + t + "' as a number");
    return v;
}

} // namespace detail

/// Reads "x1,...,xd,y" CSV text: one header row, then >= 3 numeric rows.
inline SurrogateTable parse_surrogate_csv(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0)
            line.erase(0, 3);
        if (detail::trim(line).empty())
            continue;
        header = detail::split_csv_line(line);
        break;
    }
    if (header.size() < 2)
        throw SurrogateFormatError("missing or short header (expected x1,...,xd,y)");
    const std::size_t d = header.size() - 1;
    for (std::size_t j = 0; j < d; ++j)
        if (detail::trim(header[j]) != "x" + std::to_string(j + 1))
            throw SurrogateFormatError("header column " + std::to_string(j + 1) + " should be x"
                                       + std::to_string(j + 1));
    if (detail::trim(header.back()) != "y")
        throw SurrogateFormatError("last header column should be y");

    SurrogateTable table;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (detail::trim(line).empty())
            continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != d + 1)
            throw SurrogateFormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(d + 1)
                                       + " columns, got " + std::to_string(cells.size()));
        Point x(static_cast<Index>(d));
        for (std::size_t j = 0; j < d; ++j)
            x(static_cast<Index>(j)) = detail::parse_double(cells[j], line_no);
        table.inputs.push_back(std::move(x));
        table.outputs.push_back(detail::parse_double(cells[d], line_no));
    }
    if (table.inputs.size() < 3)
        throw SurrogateFormatError("need at least 3 data rows, got " + std::to_string(table.inputs.size()));
    return table;
}

/// Benchmark whose oracle is the GP-regression mean over a tabulated data
/// set. The box is the coordinatewise hull of the inputs; M comes from a
/// dense scan of the mean, polished by compass search.
inline Benchmark surrogate_from_table(const SurrogateTable& table, const KernelConfig& kernel, std::string name)
{
    const Index d = table.inputs.front().size();
    Point lo = table.inputs.front(), hi = table.inputs.front();
    for (const auto& x : table.inputs) {
        lo = lo.cwiseMin(x);
        hi = hi.cwiseMax(x);
    }
    BoxDomain box;
    try {
        box = BoxDomain(lo, hi);
    } catch (const std::invalid_argument&) {
        throw SurrogateFormatError("data hull is degenerate in at least one coordinate");
    }

    ObservationSet obs(d);
    for (std::size_t i = 0; i < table.inputs.size(); ++i) {
        if (obs.contains(table.inputs[i]))
            throw SurrogateFormatError("duplicate input row " + std::to_string(i + 1));
        obs.add(table.inputs[i], table.outputs[i]);
    }
    const GpPosterior gp = fit(std::move(obs), kernel);

    struct MeanObjective {
        GpPosterior gp;
        double operator()(const Point& x) const { return gp.predict(x).mean; }
        Vector evaluate_many(const Matrix& xs) const
        {
            Vector m, v;
            gp.predict_many(xs, m, v);
            return m;
        }
    };
    const MeanObjective mean{gp};
    OptimizerConfig scan;
    scan.grid_candidates = 20000 * static_cast<int>(d);
    scan.multistarts = 20;
    scan.local_steps = 200;
    scan.seed = 7;
    auto best = maximize_with_value(mean, box, scan);
    for (std::size_t i = 0; i < table.inputs.size(); ++i) {
        const double at_row = mean(table.inputs[i]);
        if (at_row > best.value) {
            best.value = at_row;
            best.point = table.inputs[i];
        }
    }

    Benchmark b;
    b.name = std::move(name);
    b.domain = box;
    b.evaluate = [gp, box](const Point& x) {
        if (!box.contains(x))
            throw std::domain_error("surrogate: input outside the data hull");
        return gp.predict(x).mean;
    };
    b.global_max = best.value;
    b.kernel_width = default_kernel_width(box);
    b.argmax = best.point;
    b.data_max = table.outputs.empty() ? 0.0 : *std::max_element(table.outputs.begin(), table.outputs.end());
    b.note = "GP-mean surrogate over " + std::to_string(table.inputs.size()) + " rows";
    return b;
}

inline Benchmark load_surrogate(const std::filesystem::path& path, const KernelConfig& kernel)
{
    std::ifstream in(path);
    if (!in)
        throw SurrogateFormatError("cannot open " + path.string());
    return surrogate_from_table(parse_surrogate_csv(in), kernel, path.stem().string());
}

} // namespace hybridbo

#endif

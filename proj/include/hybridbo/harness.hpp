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

#ifndef HYBRIDBO_HARNESS_HPP
#define HYBRIDBO_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <hybridbo/benchmarks.hpp>
#include <hybridbo/policies.hpp>
#include <hybridbo/theory_checks.hpp>

namespace hybridbo {

/// Protocol defaults by dimension: d <= 3 gets 2 initial points, 15
/// experiments and eps = 0.02; larger problems get 5, 30 and 0.2.
inline PolicyConfig protocol_defaults(const Benchmark& benchmark)
{
    PolicyConfig cfg;
    const bool small = benchmark.dimension() <= 3;
    cfg.init_points = small ? 2 : 5;
    cfg.budget = small ? 15 : 30;
    cfg.epsilon = small ? 0.02 : 0.2;
    cfg.max_batch = 5;
    cfg.estimator = EstimatorKind::posterior_mean();
    cfg.estimator.zeta = 0.1;
    cfg.optimizer = OptimizerConfig::defaults_for(benchmark.dimension());
    cfg.kernel = benchmark.kernel();
    return cfg;
}

struct ExperimentSpec {
    std::string benchmark;                      // synthetic name; ignored when surrogate is set
    std::optional<std::filesystem::path> surrogate;
    PolicySpec policy;
    PolicyConfig cfg;
    int repetitions = 100;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir;           // empty: keep traces in memory only

    std::string name() const { return policy.name(cfg.estimator); }

    void validate() const
    {
        if (repetitions < 1)
            throw std::invalid_argument("ExperimentSpec: repetitions must be >= 1");
        if (!surrogate && benchmark.empty())
            throw std::invalid_argument("ExperimentSpec: no benchmark given");
        cfg.validate();
    }
};

/// Looks up a synthetic benchmark or loads a surrogate table.
inline Benchmark resolve_benchmark(const ExperimentSpec& spec)
{
    if (spec.surrogate) {
        std::ifstream in(*spec.surrogate);
        if (!in)
            throw SurrogateFormatError("cannot open " + spec.surrogate->string());
        const auto table = parse_surrogate_csv(in);
        Point lo = table.inputs.front(), hi = table.inputs.front();
        for (const auto& x : table.inputs) {
            lo = lo.cwiseMin(x);
            hi = hi.cwiseMax(x);
        }
        KernelConfig kernel;
        kernel.width = 0.01 * (hi - lo).sum();
        if (!(kernel.width > 0.0))
            throw SurrogateFormatError("data hull is degenerate in at least one coordinate");
        return surrogate_from_table(table, kernel, spec.surrogate->stem().string());
    }
    return benchmarks::by_name(spec.benchmark);
}

struct AggregateResult {
    std::string policy;
    double mean_regret = 0.0;
    double regret_std_error = 0.0;
    double mean_speedup = 0.0;
    std::vector<double> mean_batch_size_by_iteration;
    std::vector<double> mean_regret_by_sample; // policy samples 1..n_l
    std::vector<double> stderr_regret_by_sample;
    std::vector<std::filesystem::path> per_run_traces;
    std::vector<RunTrace> traces;
};

namespace detail {

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Counter-based per-repetition seed, independent of execution order.
inline std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep)
{
    return splitmix64(master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(rep) + 1));
}

inline unsigned worker_count(std::size_t jobs)
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HYBRIDBO_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1)
                n = std::min<unsigned>(n, static_cast<unsigned>(v));
        } catch (const std::exception&) {
        }
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

inline void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace, Index dim)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "sample_index,wall_iteration,batch_position";
    for (Index j = 0; j < dim; ++j)
        out << ",x" << (j + 1);
    out << ",y_true,y_simulated,incumbent,regret\n";
    int sample = 0;
    auto row = [&](const TraceSample& s, int wall, std::size_t pos) {
        out << ++sample << ',' << wall << ',' << pos;
        for (Index j = 0; j < dim; ++j)
            out << ',' << fmt(s.x(j));
        out << ',' << fmt(s.y_true) << ',' << (s.y_simulated ? fmt(*s.y_simulated) : std::string()) << ','
            << fmt(s.incumbent) << ',' << fmt(s.regret) << '\n';
    };
    // Initial design rows carry wall_iteration 0.
    for (std::size_t i = 0; i < trace.initial.size(); ++i)
        row(trace.initial[i], 0, i);
    for (std::size_t w = 0; w < trace.iterations.size(); ++w)
        for (std::size_t i = 0; i < trace.iterations[w].size(); ++i)
            row(trace.iterations[w][i], static_cast<int>(w + 1), i);
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

inline void write_aggregate_csv(const std::filesystem::path& path, const std::vector<AggregateResult>& results)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << "policy,mean_regret,stderr,mean_speedup\n";
    for (const auto& r : results)
        out << r.policy << ',' << fmt(r.mean_regret) << ',' << fmt(r.regret_std_error) << ','
            << fmt(r.mean_speedup) << '\n';
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& v)
{
    if (v.empty())
        return {0.0, 0.0};
    double mean = 0.0;
    for (double x : v)
        mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double x : v)
        ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
}

} // namespace detail

/// Averages finished traces. Batch sizes are averaged per wall iteration
/// over the runs that reached it.
inline AggregateResult aggregate(std::string policy, std::vector<RunTrace> traces)
{
    AggregateResult res;
    res.policy = std::move(policy);
    std::vector<double> finals, speedups;
    std::vector<double> batch_sum, batch_count;
    std::size_t n_samples = 0;
    for (const auto& t : traces) {
        finals.push_back(t.final_regret());
        speedups.push_back(t.speedup);
        const auto sizes = t.batch_sizes();
        if (sizes.size() > batch_sum.size()) {
            batch_sum.resize(sizes.size(), 0.0);
            batch_count.resize(sizes.size(), 0.0);
        }
        for (std::size_t w = 0; w < sizes.size(); ++w) {
            batch_sum[w] += sizes[w];
            batch_count[w] += 1.0;
        }
        n_samples = std::max(n_samples, t.regret_after_each_sample.size());
    }
    std::tie(res.mean_regret, res.regret_std_error) = detail::mean_and_stderr(finals);
    res.mean_speedup = detail::mean_and_stderr(speedups).first;
    for (std::size_t w = 0; w < batch_sum.size(); ++w)
        res.mean_batch_size_by_iteration.push_back(batch_sum[w] / batch_count[w]);
    for (std::size_t s = 0; s < n_samples; ++s) {
        std::vector<double> col;
        for (const auto& t : traces)
            if (s < t.regret_after_each_sample.size())
                col.push_back(t.regret_after_each_sample[s]);
        const auto [m, se] = detail::mean_and_stderr(col);
        res.mean_regret_by_sample.push_back(m);
        res.stderr_regret_by_sample.push_back(se);
    }
    res.traces = std::move(traces);
    return res;
}

/// Runs spec.repetitions seeded repetitions on a worker pool capped by
/// HYBRIDBO_THREADS. With an output directory set, writes
/// output_dir/<name>/run-<i>.csv and output_dir/<name>/aggregate.csv.
inline AggregateResult run_suite(const ExperimentSpec& spec)
{
    spec.validate();
    const Benchmark bench = resolve_benchmark(spec);
    if (spec.cfg.kernel.width <= 0.0 || bench.dimension() <= 0)
        throw std::invalid_argument("run_suite: invalid kernel or benchmark");

    const auto reps = static_cast<std::size_t>(spec.repetitions);
    std::vector<RunTrace> traces(reps);
    std::vector<std::exception_ptr> errors(reps);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < reps; i = next++) {
            try {
                PolicyConfig cfg = spec.cfg;
                cfg.seed = detail::repetition_seed(spec.seed, i);
                traces[i] = run_policy(bench.evaluate, spec.policy, cfg, bench.domain, bench.global_max,
                                       bench.estimator_max());
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_workers = detail::worker_count(reps);
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    std::vector<std::filesystem::path> files;
    if (!spec.output_dir.empty()) {
        const auto dir = spec.output_dir / spec.name();
        std::filesystem::create_directories(dir);
        for (std::size_t i = 0; i < reps; ++i) {
            files.push_back(dir / ("run-" + std::to_string(i) + ".csv"));
            detail::write_trace_csv(files.back(), traces[i], bench.dimension());
        }
    }
    AggregateResult res = aggregate(spec.name(), std::move(traces));
    res.per_run_traces = std::move(files);
    if (!spec.output_dir.empty())
        detail::write_aggregate_csv(spec.output_dir / spec.name() / "aggregate.csv", {res});
    return res;
}

/// Runs every spec and writes the regret-vs-sample curves side by side
/// (output_dir/compare.csv) together with a combined aggregate.csv.
inline std::vector<AggregateResult> compare(const std::vector<ExperimentSpec>& specs,
                                            const std::filesystem::path& output_dir)
{
    if (specs.empty())
        throw std::invalid_argument("compare: no policies given");
    std::map<std::string, int> seen;
    for (const auto& s : specs) {
        if (s.cfg.budget != specs.front().cfg.budget)
            throw std::invalid_argument("compare: all specs must share the budget");
        if (s.benchmark != specs.front().benchmark || s.surrogate != specs.front().surrogate)
            throw std::invalid_argument("compare: all specs must share the benchmark");
        if (seen[s.name()]++ > 0)
            throw std::invalid_argument("compare: duplicate policy " + s.name());
    }

    std::vector<AggregateResult> results;
    for (const auto& s : specs) {
        ExperimentSpec run = s;
        run.output_dir = output_dir;
        results.push_back(run_suite(run));
    }
    if (!output_dir.empty()) {
        std::filesystem::create_directories(output_dir);
        std::ofstream out(output_dir / "compare.csv");
        if (!out)
            throw std::runtime_error("cannot write compare.csv");
        out << "sample_index";
        for (const auto& r : results)
            out << ',' << r.policy << "_mean," << r.policy << "_stderr";
        out << '\n';
        const auto n = static_cast<std::size_t>(specs.front().cfg.budget);
        for (std::size_t s = 0; s < n; ++s) {
            out << (s + 1);
            for (const auto& r : results) {
                if (s < r.mean_regret_by_sample.size())
                    out << ',' << detail::fmt(r.mean_regret_by_sample[s]) << ','
                        << detail::fmt(r.stderr_regret_by_sample[s]);
                else
                    out << ",,";
            }
            out << '\n';
        }
        detail::write_aggregate_csv(output_dir / "aggregate.csv", results);
    }
    return results;
}

/// Batch-growth statistic: per run, mean batch size over the second half of
/// wall iterations minus the mean over the first half (the middle
/// iteration of an odd count is dropped), averaged over runs with at least
/// two wall iterations. Returns {first-half mean, second-half mean}.
inline std::pair<double, double> batch_growth(const std::vector<RunTrace>& traces)
{
    double first = 0.0, second = 0.0;
    std::size_t used = 0;
    for (const auto& t : traces) {
        const auto sizes = t.batch_sizes();
        const std::size_t half = sizes.size() / 2;
        if (half == 0)
            continue;
        double a = 0.0, b = 0.0;
        for (std::size_t i = 0; i < half; ++i) {
            a += sizes[i];
            b += sizes[sizes.size() - half + i];
        }
        first += a / static_cast<double>(half);
        second += b / static_cast<double>(half);
        ++used;
    }
    if (used == 0)
        return {0.0, 0.0};
    return {first / static_cast<double>(used), second / static_cast<double>(used)};
}

inline constexpr int kVerifyViolationExit = 2;

struct VerifyResult {
    std::vector<BoundReport> reports;
    int exit_code = 0;
};

/// Runs every identity and bound sweep, writes <name>.csv reports to
/// out_dir when given, and returns exit code 2 when any sweep has a
/// violation.
inline VerifyResult verify(const SweepConfig& cfg, const std::filesystem::path& out_dir = {},
                           std::ostream* log = nullptr)
{
    VerifyResult res;
    SweepConfig mc = cfg;
    mc.instances = std::min<std::size_t>(cfg.instances, 100);
    res.reports.push_back(theory::sweep_theorem1(cfg));
    res.reports.push_back(theory::sweep_theorem2(cfg));
    res.reports.push_back(theory::sweep_corollary1(mc));
    res.reports.push_back(theory::sweep_lemma1(cfg));
    res.reports.push_back(theory::sweep_theorem3(cfg));
    res.reports.push_back(theory::sweep_corollary2(cfg));
    SweepConfig c3 = cfg;
    c3.instances = std::min<std::size_t>(cfg.instances, 200);
    c3.mc_samples = std::min<std::size_t>(cfg.mc_samples, 20000);
    res.reports.push_back(theory::sweep_corollary3(c3));

    if (!out_dir.empty())
        std::filesystem::create_directories(out_dir);
    for (const auto& r : res.reports) {
        if (!out_dir.empty())
            r.write_csv(out_dir / (r.name + ".csv"));
        if (log)
            *log << (r.passed() ? "ok    " : "FAIL  ") << r.summary() << '\n';
        if (!r.passed())
            res.exit_code = kVerifyViolationExit;
    }
    return res;
}

} // namespace hybridbo

#endif

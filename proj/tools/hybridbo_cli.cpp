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

// hybridbo: run, compare and verify batch Bayesian optimization policies.
//
//   hybridbo run --benchmark cosines --policy hybrid --estimator mean --reps 100 --out out/
//   hybridbo compare --benchmark rosenbrock --policy sequential --policy cl:mean --policy hybrid:mean --out out/
//   hybridbo verify --seed 7 --out reports/

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <hybridbo/hybridbo.hpp>

namespace {

using namespace hybridbo;

struct Options {
    std::string benchmark;
    std::vector<std::string> policies;
    std::string estimator = "mean";
    std::string liar = "mean";
    std::optional<int> batch_size;
    std::optional<int> budget;
    std::optional<int> max_batch;
    std::optional<double> epsilon;
    std::optional<double> zeta;
    std::optional<int> init;
    int reps = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::string surrogate;
    std::size_t instances = 1000;
    bool corrupt_theorem1 = false;
};

/// "hybrid[:est]", "sequential", "cl[:lie]" or "random".
ExperimentSpec make_spec(const Options& o, const std::string& policy_arg, const Benchmark& bench)
{
    ExperimentSpec spec;
    spec.benchmark = o.benchmark;
    if (!o.surrogate.empty())
        spec.surrogate = o.surrogate;
    spec.repetitions = o.reps;
    spec.seed = o.seed;
    spec.output_dir = o.out;

    PolicyConfig cfg = protocol_defaults(bench);
    const double zeta = o.zeta.value_or(cfg.estimator.zeta);
    if (o.budget)
        cfg.budget = *o.budget;
    if (o.max_batch)
        cfg.max_batch = *o.max_batch;
    else
        cfg.max_batch = std::min(cfg.max_batch, cfg.budget);
    if (o.epsilon)
        cfg.epsilon = *o.epsilon;
    if (o.init)
        cfg.init_points = *o.init;

    const auto colon = policy_arg.find(':');
    const std::string kind = policy_arg.substr(0, colon);
    const std::optional<std::string> sub =
        colon == std::string::npos ? std::nullopt : std::optional<std::string>(policy_arg.substr(colon + 1));

    if (kind == "hybrid") {
        spec.policy = PolicySpec::hybrid();
        cfg.estimator = EstimatorKind::parse(sub.value_or(o.estimator), zeta);
    } else if (kind == "sequential" || kind == "ei") {
        spec.policy = PolicySpec::sequential();
    } else if (kind == "cl" || kind == "constant-liar") {
        spec.policy = PolicySpec::constant_liar(o.batch_size.value_or(cfg.max_batch),
                                                EstimatorKind::parse(sub.value_or(o.liar), zeta));
    } else if (kind == "random") {
        spec.policy = PolicySpec::random();
    } else {
        throw CLI::ValidationError("--policy", "unknown policy '" + policy_arg + "'");
    }
    cfg.estimator.zeta = zeta;
    spec.cfg = cfg;
    spec.validate();
    return spec;
}

Benchmark load(const Options& o)
{
    ExperimentSpec probe;
    probe.benchmark = o.benchmark;
    if (!o.surrogate.empty())
        probe.surrogate = o.surrogate;
    if (o.benchmark.empty() && o.surrogate.empty())
        throw CLI::ValidationError("--benchmark", "a benchmark name or --surrogate file is required");
    return resolve_benchmark(probe);
}

void print_result(const AggregateResult& r)
{
    std::cout << std::left << std::setw(22) << r.policy << std::right << std::fixed << std::setprecision(4)
              << " regret " << r.mean_regret << " +- " << r.regret_std_error << "  speedup "
              << std::setprecision(3) << r.mean_speedup << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid batch expected-improvement experiments"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file of option overrides");

    Options o;
    std::string benchmark_names;
    for (const auto& n : benchmarks::synthetic_names())
        benchmark_names += (benchmark_names.empty() ? "" : "|") + n;
    app.add_option("--benchmark", o.benchmark, benchmark_names);
    app.add_option("--surrogate", o.surrogate, "CSV table (x1..xd,y) fitted as the objective");
    app.add_option("--policy", o.policies, "hybrid[:est] | sequential | cl[:lie] | random");
    app.add_option("--estimator", o.estimator, "y_hat for hybrid: max|ymax|inflated|mean|ymin|random");
    app.add_option("--liar", o.liar, "constant liar value: max|ymax|inflated|mean|ymin|random");
    app.add_option("--batch-size", o.batch_size, "constant liar batch size k")->check(CLI::PositiveNumber);
    app.add_option("--budget", o.budget, "experiments after the initial design")->check(CLI::PositiveNumber);
    app.add_option("--max-batch", o.max_batch, "largest hybrid batch")->check(CLI::PositiveNumber);
    app.add_option("--epsilon", o.epsilon, "batch continuation threshold")->check(CLI::NonNegativeNumber);
    app.add_option("--zeta", o.zeta, "inflation for the inflated estimator")->check(CLI::NonNegativeNumber);
    app.add_option("--init", o.init, "initial design size")->check(CLI::PositiveNumber);
    app.add_option("--reps", o.reps, "independent repetitions")->check(CLI::PositiveNumber);
    app.add_option("--seed", o.seed, "master seed");
    app.add_option("--out", o.out, "output directory");

    auto* run = app.add_subcommand("run", "run one policy and write traces");
    auto* cmp = app.add_subcommand("compare", "run several policies and write side-by-side curves");
    auto* ver = app.add_subcommand("verify", "run the identity and bound sweeps");
    ver->add_option("--instances", o.instances, "instances per sweep")->check(CLI::PositiveNumber);
    ver->add_flag("--corrupt-theorem1", o.corrupt_theorem1)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) {
            if (o.policies.size() > 1)
                throw CLI::ValidationError("--policy", "run takes a single policy; use compare");
            const Benchmark bench = load(o);
            const auto spec = make_spec(o, o.policies.empty() ? "hybrid" : o.policies.front(), bench);
            std::cout << bench.name << " (d=" << bench.dimension() << ", M=" << std::setprecision(10)
                      << bench.global_max << ")\n";
            print_result(run_suite(spec));
            return 0;
        }
        if (*cmp) {
            if (o.policies.empty())
                throw CLI::ValidationError("--policy", "compare needs at least one --policy");
            const Benchmark bench = load(o);
            std::vector<ExperimentSpec> specs;
            for (const auto& p : o.policies)
                specs.push_back(make_spec(o, p, bench));
            std::cout << bench.name << " (d=" << bench.dimension() << ", M=" << std::setprecision(10)
                      << bench.global_max << ")\n";
            for (const auto& r : compare(specs, o.out))
                print_result(r);
            return 0;
        }
        SweepConfig cfg;
        cfg.seed = o.seed;
        cfg.instances = o.instances;
        cfg.corrupt_theorem1 = o.corrupt_theorem1;
        return verify(cfg, o.out, &std::cout).exit_code;
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

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


// Optimizes a 2-D function with the hybrid policy and prints each batch.

#include <cmath>
#include <iostream>

#include <hybridbo/hybridbo.hpp>

int main()
{
    using namespace hybridbo;

    const auto bench = benchmarks::by_name("cosines");
    PolicyConfig cfg = protocol_defaults(bench);
    cfg.seed = 42;

    const auto trace = run_policy(bench.evaluate, PolicySpec::hybrid(), cfg, bench.domain, bench.global_max);

    int wall = 0;
    for (const auto& batch : trace.iterations) {
        std::cout << "wall " << ++wall << ": " << batch.size() << " point(s)";
        for (const auto& s : batch)
            std::cout << "  (" << s.x.transpose() << ") -> " << s.y_true;
        std::cout << '\n';
    }
    std::cout << "final regret " << trace.final_regret() << ", speedup " << trace.speedup << '\n';

    // The same machinery drives an ask/tell loop over your own data.
    ObservationSet obs(2, bench.domain);
    for (const auto& s : trace.initial)
        obs.add(s.x, s.y_true);
    const auto gp = fit(obs, bench.kernel());
    Rng rng(7);
    const auto draft = hybrid_batch_step(gp, cfg, bench.domain, cfg.budget, rng);
    std::cout << "next batch from the initial design alone: " << draft.size() << " point(s)\n";
}

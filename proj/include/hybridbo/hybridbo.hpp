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


#ifndef HYBRIDBO_HYBRIDBO_HPP
#define HYBRIDBO_HYBRIDBO_HPP

#include <hybridbo/linalg.hpp>
#include <hybridbo/domain.hpp>
#include <hybridbo/gp.hpp>
#include <hybridbo/acquisition.hpp>
#include <hybridbo/policies.hpp>
#include <hybridbo/benchmarks.hpp>
#include <hybridbo/theory_checks.hpp>
#include <hybridbo/harness.hpp>

#endif

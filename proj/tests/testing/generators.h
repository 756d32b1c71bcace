// Copyright 2026 The normcf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NORMCF_TESTS_TESTING_GENERATORS_H_
#define NORMCF_TESTS_TESTING_GENERATORS_H_

#include <cstdint>
#include <random>
#include <vector>

#include "normcf/norm.h"
#include "normcf/preference_model.h"

namespace normcf::testing {

// Attributes "a0", "a1", ... whose values are "v0", "v1", ...
ActionSpace SpaceWithSizes(const std::vector<int>& sizes);

// A random space with 1..max_attributes attributes of 1..max_domain values
// and at most max_actions actions.
ActionSpace RandomSpace(std::mt19937_64& rng, int max_attributes,
                        int max_domain, std::size_t max_actions);

enum class ValueKind { kContinuous, kHalfSteps };

// Users "u00", "u01", ...; each entry hidden with probability `masking`.
// kHalfSteps draws from {-1, -0.5, 0, 0.5, 1}, which forces exact ties.
PreferenceMatrix RandomMatrix(std::mt19937_64& rng, const ActionSpace& space,
                              std::size_t n_users, double masking,
                              ValueKind kind = ValueKind::kContinuous);

double RandomPreference(std::mt19937_64& rng, ValueKind kind);

NormPattern RandomPattern(std::mt19937_64& rng, const ActionSpace& space,
                          double wildcard_probability);

Norm MakeTestNorm(std::string id, std::string user, Modality modality,
                  NormPattern pattern,
                  Provenance provenance = Provenance::kPredicted,
                  std::int64_t epoch = 0, double confidence = 0.9);

}  // namespace normcf::testing

#endif  // NORMCF_TESTS_TESTING_GENERATORS_H_

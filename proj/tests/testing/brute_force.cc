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

#include "testing/brute_force.h"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace normcf::testing {

std::vector<std::vector<double>> ReferenceSimilarityTable(
    const PreferenceMatrix& matrix, double d_max) {
  const std::size_t n = matrix.num_users();
  const std::size_t m = matrix.num_actions();
  std::vector<std::vector<double>> table(n, std::vector<double>(n, 0.0));
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = 0; v < n; ++v) {
      double total = 0.0;
      for (std::size_t a = 0; a < m; ++a) {
        const auto pu = matrix.Get(u, a);
        const auto pv = matrix.Get(v, a);
        total += (pu && pv) ? std::fabs(pu->value - pv->value) : d_max;
      }
      table[u][v] = 1.0 - (total / static_cast<double>(m)) / d_max;
    }
  }
  return table;
}

std::optional<ReferencePrediction> ReferencePredict(
    const PreferenceMatrix& matrix, UserIndex user, ActionIndex action,
    const ReferenceParams& params) {
  const auto table = ReferenceSimilarityTable(matrix, params.d_max);
  // (similarity, id, index)
  std::vector<std::tuple<double, std::string, std::size_t>> candidates;
  for (std::size_t v = 0; v < matrix.num_users(); ++v) {
    if (v == user) continue;
    if (!matrix.Get(v, action).has_value()) continue;
    if (!(table[user][v] > params.sigma_min)) continue;
    candidates.emplace_back(table[user][v], matrix.user_id(v), v);
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const auto& a, const auto& b) {
              if (std::get<0>(a) != std::get<0>(b)) {
                return std::get<0>(a) > std::get<0>(b);
              }
              return std::get<1>(a) < std::get<1>(b);
            });
  if (candidates.size() > params.k) candidates.resize(params.k);
  if (candidates.size() < params.n_min) return std::nullopt;

  ReferencePrediction out;
  double numerator = 0.0;
  double denominator = 0.0;
  for (const auto& [similarity, id, v] : candidates) {
    numerator += similarity * matrix.Get(v, action)->value;
    denominator += similarity;
    out.neighbor_ids.push_back(id);
  }
  out.value = numerator / denominator;
  out.confidence = denominator / static_cast<double>(params.k);
  return out;
}

}  // namespace normcf::testing

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

#ifndef NORMCF_SENSITIVITY_H_
#define NORMCF_SENSITIVITY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "normcf/norm.h"
#include "normcf/preference_model.h"

namespace normcf {

struct SensitivityParams {
  // Minimum prohibition share for a sensitive value.
  double varsigma = 0.75;
  // Minimum number of norms mentioning a value before it can be flagged.
  std::size_t m_min = 5;
  // When false nothing is ever flagged; statistics are still collected.
  bool enabled = true;

  absl::Status Validate() const;
};

struct ValueStats {
  std::size_t support = 0;
  std::size_t prohibitions = 0;
  bool sensitive = false;

  // Prohibition share; undefined without support.
  std::optional<double> score() const {
    if (support == 0) return std::nullopt;
    return static_cast<double>(prohibitions) / static_cast<double>(support);
  }
};

// Attribute-value statistics over a pool of active norms. A value counts a
// norm only when the norm names it concretely; wildcards contribute nothing.
// An action is sensitive when any of its values is.
class SensitivityModel {
 public:
  // Nothing flagged.
  explicit SensitivityModel(const ActionSpace& space);

  // Abolished norms in the pool are ignored.
  static SensitivityModel Fit(const ActionSpace& space,
                              std::span<const Norm* const> pool,
                              const SensitivityParams& params,
                              std::int64_t epoch);
  static SensitivityModel Fit(const ActionSpace& space,
                              std::span<const Norm> pool,
                              const SensitivityParams& params,
                              std::int64_t epoch);

  const ValueStats& stats(std::size_t attr, int value) const {
    return stats_[attr][value];
  }
  bool IsSensitive(ActionIndex action) const {
    return action_sensitive_[action] != 0;
  }
  bool IsSensitive(const Action& action) const;
  std::size_t num_sensitive_values() const;
  std::int64_t fitted_epoch() const { return fitted_epoch_; }

 private:
  void Finalize(const ActionSpace& space, const SensitivityParams& params);

  std::vector<std::vector<ValueStats>> stats_;
  std::vector<std::uint8_t> action_sensitive_;
  std::int64_t fitted_epoch_ = 0;
};

}  // namespace normcf

#endif  // NORMCF_SENSITIVITY_H_

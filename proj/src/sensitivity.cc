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

#include "normcf/sensitivity.h"

#include "absl/strings/str_cat.h"

namespace normcf {

absl::Status SensitivityParams::Validate() const {
  if (!(varsigma > 0.0 && varsigma <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("varsigma must lie in (0, 1], got ", varsigma));
  }
  if (m_min < 1) {
    return absl::InvalidArgumentError("m_min must be at least 1");
  }
  return absl::OkStatus();
}

SensitivityModel::SensitivityModel(const ActionSpace& space)
    : stats_(space.num_attributes()),
      action_sensitive_(space.num_actions(), 0) {
  for (std::size_t i = 0; i < space.num_attributes(); ++i) {
    stats_[i].resize(space.domain_size(i));
  }
}

SensitivityModel SensitivityModel::Fit(const ActionSpace& space,
                                       std::span<const Norm* const> pool,
                                       const SensitivityParams& params,
                                       std::int64_t epoch) {
  SensitivityModel model(space);
  model.fitted_epoch_ = epoch;
  for (const Norm* norm : pool) {
    if (!norm->active()) continue;
    for (std::size_t i = 0; i < norm->pattern.entries.size(); ++i) {
      const int value = norm->pattern.entries[i];
      if (value == kWildcard) continue;
      ValueStats& stats = model.stats_[i][value];
      ++stats.support;
      if (norm->modality == Modality::kProhibition) ++stats.prohibitions;
    }
  }
  model.Finalize(space, params);
  return model;
}

SensitivityModel SensitivityModel::Fit(const ActionSpace& space,
                                       std::span<const Norm> pool,
                                       const SensitivityParams& params,
                                       std::int64_t epoch) {
  std::vector<const Norm*> pointers;
  pointers.reserve(pool.size());
  for (const Norm& norm : pool) pointers.push_back(&norm);
  return Fit(space, pointers, params, epoch);
}

void SensitivityModel::Finalize(const ActionSpace& space,
                                const SensitivityParams& params) {
  for (auto& attribute : stats_) {
    for (ValueStats& stats : attribute) {
      stats.sensitive = params.enabled && stats.support >= params.m_min &&
                        *stats.score() >= params.varsigma;
    }
  }
  for (ActionIndex a = 0; a < space.num_actions(); ++a) {
    bool sensitive = false;
    for (std::size_t i = 0; i < stats_.size() && !sensitive; ++i) {
      sensitive = stats_[i][space.ValueAt(a, i)].sensitive;
    }
    action_sensitive_[a] = sensitive ? 1 : 0;
  }
}

bool SensitivityModel::IsSensitive(const Action& action) const {
  for (std::size_t i = 0; i < stats_.size(); ++i) {
    if (stats_[i][action.values[i]].sensitive) return true;
  }
  return false;
}

std::size_t SensitivityModel::num_sensitive_values() const {
  std::size_t count = 0;
  for (const auto& attribute : stats_) {
    for (const ValueStats& stats : attribute) count += stats.sensitive;
  }
  return count;
}

}  // namespace normcf

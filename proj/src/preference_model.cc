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

#include "normcf/preference_model.h"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace normcf {

namespace {

// Names travel through comma-separated records.
bool IsPlainToken(std::string_view token) {
  if (token.empty()) return false;
  for (char c : token) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') return false;
  }
  return true;
}

}  // namespace

absl::StatusOr<ActionSpace> ActionSpace::Create(
    std::vector<AttributeDomain> attributes) {
  if (attributes.empty()) {
    return absl::InvalidArgumentError("action space needs at least one attribute");
  }
  std::unordered_set<std::string> names;
  for (const AttributeDomain& domain : attributes) {
    if (!IsPlainToken(domain.name)) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid attribute name '", domain.name, "'"));
    }
    if (!names.insert(domain.name).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate attribute name '", domain.name, "'"));
    }
    if (domain.values.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("attribute '", domain.name, "' has an empty domain"));
    }
    std::unordered_set<std::string> values;
    for (const std::string& value : domain.values) {
      if (!IsPlainToken(value) || value == "*") {
        return absl::InvalidArgumentError(absl::StrCat(
            "attribute '", domain.name, "' has an invalid value '", value, "'"));
      }
      if (!values.insert(value).second) {
        return absl::InvalidArgumentError(absl::StrCat(
            "attribute '", domain.name, "' repeats value '", value, "'"));
      }
    }
  }
  return ActionSpace(std::move(attributes));
}

ActionSpace::ActionSpace(std::vector<AttributeDomain> attributes)
    : attributes_(std::move(attributes)), strides_(attributes_.size()) {
  std::size_t stride = 1;
  for (std::size_t i = attributes_.size(); i-- > 0;) {
    strides_[i] = stride;
    stride *= attributes_[i].values.size();
  }
  num_actions_ = stride;
}

bool ActionSpace::Contains(const Action& action) const {
  if (action.values.size() != attributes_.size()) return false;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (action.values[i] < 0 ||
        static_cast<std::size_t>(action.values[i]) >= domain_size(i)) {
      return false;
    }
  }
  return true;
}

ActionIndex ActionSpace::IndexOf(const Action& action) const {
  ActionIndex index = 0;
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    index += static_cast<std::size_t>(action.values[i]) * strides_[i];
  }
  return index;
}

Action ActionSpace::ActionAt(ActionIndex index) const {
  Action action;
  action.values.resize(attributes_.size());
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    action.values[i] = ValueAt(index, i);
  }
  return action;
}

std::optional<std::size_t> ActionSpace::FindAttribute(
    std::string_view name) const {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (attributes_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<int> ActionSpace::FindValue(std::size_t attr,
                                          std::string_view value) const {
  const auto& values = attributes_[attr].values;
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<int>(it - values.begin());
}

absl::StatusOr<Action> ActionSpace::MakeAction(
    std::span<const std::string> value_names) const {
  if (value_names.size() != attributes_.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected ", attributes_.size(), " attribute values, got ",
                     value_names.size()));
  }
  Action action;
  action.values.reserve(attributes_.size());
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    std::optional<int> value = FindValue(i, value_names[i]);
    if (!value.has_value()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown value '", value_names[i], "' for attribute '",
                       attributes_[i].name, "'"));
    }
    action.values.push_back(*value);
  }
  return action;
}

std::vector<std::string> ActionSpace::ValueNames(const Action& action) const {
  std::vector<std::string> names;
  names.reserve(attributes_.size());
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    names.push_back(attributes_[i].values[action.values[i]]);
  }
  return names;
}

std::string ActionSpace::ToString(const Action& action) const {
  return absl::StrCat("(", absl::StrJoin(ValueNames(action), ","), ")");
}

ActionSpace DefaultPrivacyActionSpace() {
  return *ActionSpace::Create({
      {"data_type", {"photo", "location", "contacts", "health"}},
      {"recipient", {"family", "friends", "app", "advertiser", "public"}},
      {"time_of_day", {"day", "night"}},
  });
}

std::string_view SourceName(Source source) {
  switch (source) {
    case Source::kStated:
      return "stated";
    case Source::kPredicted:
      return "predicted";
    case Source::kTruth:
      return "truth";
  }
  return "unknown";
}

absl::StatusOr<Source> ParseSource(std::string_view name) {
  if (name == "stated") return Source::kStated;
  if (name == "predicted") return Source::kPredicted;
  if (name == "truth") return Source::kTruth;
  return absl::InvalidArgumentError(absl::StrCat("unknown source tag '", std::string(name), "'"));
}

PreferenceMatrix::PreferenceMatrix(ActionSpace space)
    : space_(std::move(space)) {}

UserIndex PreferenceMatrix::AddUser(std::string_view id) {
  auto [it, inserted] =
      user_index_.try_emplace(std::string(id), user_ids_.size());
  if (inserted) {
    user_ids_.emplace_back(id);
    values_.resize(values_.size() + num_actions(), 0.0);
    known_.resize(known_.size() + num_actions(), 0);
    sources_.resize(sources_.size() + num_actions(), Source::kStated);
    known_count_.push_back(0);
  }
  return it->second;
}

std::optional<UserIndex> PreferenceMatrix::FindUser(std::string_view id) const {
  auto it = user_index_.find(std::string(id));
  if (it == user_index_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<UserIndex> PreferenceMatrix::LookupUser(
    std::string_view id) const {
  std::optional<UserIndex> user = FindUser(id);
  if (!user.has_value()) {
    return absl::NotFoundError(absl::StrCat("unknown user '", std::string(id), "'"));
  }
  return *user;
}

absl::Status PreferenceMatrix::Set(std::string_view user, const Action& action,
                                   double value, Source source) {
  if (!space_.Contains(action)) {
    return absl::InvalidArgumentError("action does not belong to the action space");
  }
  if (!(value >= kMinPreference && value <= kMaxPreference)) {
    return absl::OutOfRangeError(
        absl::StrCat("preference ", value, " outside [-1, 1]"));
  }
  return Set(AddUser(user), space_.IndexOf(action), value, source);
}

absl::Status PreferenceMatrix::Set(UserIndex user, ActionIndex action,
                                   double value, Source source) {
  if (!(value >= kMinPreference && value <= kMaxPreference)) {
    return absl::OutOfRangeError(
        absl::StrCat("preference ", value, " outside [-1, 1]"));
  }
  if (user >= num_users() || action >= num_actions()) {
    return absl::InvalidArgumentError("user or action index out of range");
  }
  const std::size_t offset = Offset(user, action);
  if (known_[offset] != 0 && sources_[offset] == Source::kStated &&
      source == Source::kPredicted) {
    return absl::FailedPreconditionError(
        "a predicted value cannot shadow a stated preference");
  }
  if (known_[offset] == 0) {
    known_[offset] = 1;
    ++known_count_[user];
  }
  values_[offset] = value;
  sources_[offset] = source;
  return absl::OkStatus();
}

absl::StatusOr<std::optional<PreferenceValue>> PreferenceMatrix::Get(
    std::string_view user, const Action& action) const {
  absl::StatusOr<UserIndex> index = LookupUser(user);
  if (!index.ok()) return index.status();
  if (!space_.Contains(action)) {
    return absl::InvalidArgumentError("action does not belong to the action space");
  }
  return Get(*index, space_.IndexOf(action));
}

std::optional<PreferenceValue> PreferenceMatrix::Get(UserIndex user,
                                                     ActionIndex action) const {
  const std::size_t offset = Offset(user, action);
  if (known_[offset] == 0) return std::nullopt;
  return PreferenceValue{values_[offset], sources_[offset]};
}

void PreferenceMatrix::Erase(UserIndex user, ActionIndex action) {
  const std::size_t offset = Offset(user, action);
  if (known_[offset] != 0) {
    known_[offset] = 0;
    values_[offset] = 0.0;
    --known_count_[user];
  }
}

std::size_t PreferenceMatrix::TotalKnown() const {
  std::size_t total = 0;
  for (std::size_t count : known_count_) total += count;
  return total;
}

std::vector<std::size_t> PreferenceMatrix::IdRanks() const {
  std::vector<UserIndex> order(num_users());
  for (UserIndex u = 0; u < order.size(); ++u) order[u] = u;
  std::sort(order.begin(), order.end(), [this](UserIndex a, UserIndex b) {
    return user_ids_[a] < user_ids_[b];
  });
  std::vector<std::size_t> ranks(num_users());
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    ranks[order[rank]] = rank;
  }
  return ranks;
}

PreferenceMatrix PreferenceMatrix::Negated() const {
  PreferenceMatrix negated = *this;
  for (std::size_t i = 0; i < negated.values_.size(); ++i) {
    if (negated.known_[i] != 0) negated.values_[i] = -negated.values_[i];
  }
  return negated;
}

absl::StatusOr<std::vector<std::pair<Action, double>>> FromOrdinal(
    const std::vector<std::vector<Action>>& ranking) {
  std::set<Action> seen;
  std::size_t m = 0;
  for (const auto& group : ranking) {
    if (group.empty()) {
      return absl::InvalidArgumentError("ranking contains an empty rank group");
    }
    for (const Action& action : group) {
      if (!seen.insert(action).second) {
        return absl::InvalidArgumentError("action appears twice in ranking");
      }
      ++m;
    }
  }
  if (m == 0) return absl::InvalidArgumentError("ranking is empty");

  // Integer numerators keep the map exactly antisymmetric under reversal.
  std::vector<std::pair<Action, double>> result;
  result.reserve(m);
  const auto span = static_cast<long long>(m);
  long long next_position = 1;
  for (const auto& group : ranking) {
    double value = 0.0;
    if (m > 1) {
      long long numerator = 0;
      for (std::size_t j = 0; j < group.size(); ++j) {
        numerator += span + 1 - 2 * (next_position + static_cast<long long>(j));
      }
      value = static_cast<double>(numerator) /
              static_cast<double>(static_cast<long long>(group.size()) * (span - 1));
    }
    for (const Action& action : group) result.emplace_back(action, value);
    next_position += static_cast<long long>(group.size());
  }
  return result;
}

}  // namespace normcf

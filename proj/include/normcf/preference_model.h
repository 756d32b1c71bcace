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

#ifndef NORMCF_PREFERENCE_MODEL_H_
#define NORMCF_PREFERENCE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace normcf {

using ActionIndex = std::size_t;
using UserIndex = std::size_t;

// A categorical attribute of an assistant action, e.g. the recipient of a
// data flow. Value order is significant: it fixes action enumeration.
struct AttributeDomain {
  std::string name;
  std::vector<std::string> values;

  bool operator==(const AttributeDomain&) const = default;
};

// A full assignment of one value index per attribute, in attribute order.
struct Action {
  std::vector<int> values;

  auto operator<=>(const Action&) const = default;
};

// Cartesian product of attribute domains. Actions are enumerated
// lexicographically over value indices, the first attribute being the most
// significant digit.
class ActionSpace {
 public:
  // Fails on an empty attribute list, an empty domain, a duplicate attribute
  // name or a duplicate value inside one domain.
  static absl::StatusOr<ActionSpace> Create(
      std::vector<AttributeDomain> attributes);

  ActionSpace() = default;

  std::size_t num_attributes() const { return attributes_.size(); }
  std::size_t num_actions() const { return num_actions_; }
  const std::vector<AttributeDomain>& attributes() const {
    return attributes_;
  }
  const AttributeDomain& attribute(std::size_t i) const {
    return attributes_[i];
  }
  std::size_t domain_size(std::size_t i) const {
    return attributes_[i].values.size();
  }

  bool Contains(const Action& action) const;

  // Both require a valid action / index.
  ActionIndex IndexOf(const Action& action) const;
  Action ActionAt(ActionIndex index) const;
  // Value index of attribute `attr` inside the action with the given index.
  int ValueAt(ActionIndex index, std::size_t attr) const {
    return static_cast<int>((index / strides_[attr]) % domain_size(attr));
  }

  std::optional<std::size_t> FindAttribute(std::string_view name) const;
  std::optional<int> FindValue(std::size_t attr, std::string_view value) const;

  // Builds an action from value names given in attribute order.
  absl::StatusOr<Action> MakeAction(
      std::span<const std::string> value_names) const;
  std::vector<std::string> ValueNames(const Action& action) const;
  // "(photo,family,night)"
  std::string ToString(const Action& action) const;

  bool operator==(const ActionSpace& other) const {
    return attributes_ == other.attributes_;
  }

 private:
  explicit ActionSpace(std::vector<AttributeDomain> attributes);

  std::vector<AttributeDomain> attributes_;
  std::vector<std::size_t> strides_;
  std::size_t num_actions_ = 0;
};

// The privacy scenario schema: what is shared, with whom, and when.
ActionSpace DefaultPrivacyActionSpace();

enum class Source : std::uint8_t { kStated, kPredicted, kTruth };

std::string_view SourceName(Source source);
absl::StatusOr<Source> ParseSource(std::string_view name);

// A preference on the signed scale: -1 strongly against, 0 neutral,
// +1 strongly in favour.
struct PreferenceValue {
  double value = 0.0;
  Source source = Source::kStated;

  bool operator==(const PreferenceValue&) const = default;
};

inline constexpr double kMinPreference = -1.0;
inline constexpr double kMaxPreference = 1.0;

// Sparse user x action preferences over one fixed action space. An absent
// entry means "unknown" and is never conflated with the neutral value 0.
//
// Rows are stored densely with a presence mask so that distance kernels can
// stream over them; the abstraction is still the sparse association.
// Const member functions are safe to call concurrently.
class PreferenceMatrix {
 public:
  explicit PreferenceMatrix(ActionSpace space);

  const ActionSpace& space() const { return space_; }
  std::size_t num_actions() const { return space_.num_actions(); }
  std::size_t num_users() const { return user_ids_.size(); }

  // Registers `id` if needed and returns its index.
  UserIndex AddUser(std::string_view id);
  std::optional<UserIndex> FindUser(std::string_view id) const;
  absl::StatusOr<UserIndex> LookupUser(std::string_view id) const;
  const std::string& user_id(UserIndex user) const { return user_ids_[user]; }
  const std::vector<std::string>& user_ids() const { return user_ids_; }

  // Registers the user when absent. Stated values always overwrite; a
  // predicted value never overwrites a stated one (FailedPrecondition).
  absl::Status Set(std::string_view user, const Action& action, double value,
                   Source source);
  absl::Status Set(UserIndex user, ActionIndex action, double value,
                   Source source);

  // NotFound for an unregistered user; nullopt for an unknown preference.
  absl::StatusOr<std::optional<PreferenceValue>> Get(
      std::string_view user, const Action& action) const;
  std::optional<PreferenceValue> Get(UserIndex user, ActionIndex action) const;

  void Erase(UserIndex user, ActionIndex action);

  bool Known(UserIndex user, ActionIndex action) const {
    return known_[Offset(user, action)] != 0;
  }
  // Requires Known(user, action).
  double Value(UserIndex user, ActionIndex action) const {
    return values_[Offset(user, action)];
  }
  Source SourceOf(UserIndex user, ActionIndex action) const {
    return sources_[Offset(user, action)];
  }

  std::size_t KnownCount(UserIndex user) const { return known_count_[user]; }
  std::size_t TotalKnown() const;

  std::span<const double> ValueRow(UserIndex user) const {
    return {values_.data() + Offset(user, 0), num_actions()};
  }
  std::span<const std::uint8_t> KnownRow(UserIndex user) const {
    return {known_.data() + Offset(user, 0), num_actions()};
  }

  // Position of each user in ascending id order; used for tie-breaking.
  std::vector<std::size_t> IdRanks() const;

  // Every known entry multiplied by -1, sources preserved.
  PreferenceMatrix Negated() const;

 private:
  std::size_t Offset(UserIndex user, ActionIndex action) const {
    return user * num_actions() + action;
  }

  ActionSpace space_;
  std::vector<std::string> user_ids_;
  std::unordered_map<std::string, UserIndex> user_index_;
  std::vector<double> values_;
  std::vector<std::uint8_t> known_;
  std::vector<Source> sources_;
  std::vector<std::size_t> known_count_;
};

// Maps a best-first ranking onto [-1, +1]. Each inner vector is a group of
// tied items. Position r of m maps to 1 - 2(r-1)/(m-1); a single item maps
// to 0; tied items share the mean value of the positions they span.
absl::StatusOr<std::vector<std::pair<Action, double>>> FromOrdinal(
    const std::vector<std::vector<Action>>& ranking);

}  // namespace normcf

#endif  // NORMCF_PREFERENCE_MODEL_H_

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

#include "normcf/similarity.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace normcf {

absl::Status SimilarityParams::Validate() const {
  if (!(d_max >= kMaxPreference - kMinPreference) || !std::isfinite(d_max)) {
    return absl::InvalidArgumentError(
        absl::StrCat("d_max must be finite and at least the preference "
                     "interval width 2, got ", d_max));
  }
  if (!(sigma_min >= 0.0 && sigma_min < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma_min must lie in [0, 1), got ", sigma_min));
  }
  return absl::OkStatus();
}

PairStats ComparePair(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                      const SimilarityParams& params) {
  const std::span<const double> pu = matrix.ValueRow(u);
  const std::span<const double> pv = matrix.ValueRow(v);
  const std::span<const std::uint8_t> ku = matrix.KnownRow(u);
  const std::span<const std::uint8_t> kv = matrix.KnownRow(v);
  const std::size_t n = pu.size();

  double known_sum = 0.0;
  std::size_t overlap = 0;
  for (std::size_t a = 0; a < n; ++a) {
    if (ku[a] & kv[a]) {
      known_sum += std::abs(pu[a] - pv[a]);
      ++overlap;
    }
  }

  PairStats stats;
  stats.overlap = overlap;
  if (params.gap_penalty == GapPenalty::kMax) {
    const double gap_sum = static_cast<double>(n - overlap) * params.d_max;
    stats.distance = (known_sum + gap_sum) / static_cast<double>(n);
  } else {
    stats.distance = overlap == 0 ? params.d_max
                                  : known_sum / static_cast<double>(overlap);
  }
  return stats;
}

double PairDistance(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                    const SimilarityParams& params) {
  return ComparePair(matrix, u, v, params).distance;
}

double Similarity(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                  const SimilarityParams& params) {
  return SimilarityFromDistance(PairDistance(matrix, u, v, params),
                                params.d_max);
}

std::size_t Overlap(const PreferenceMatrix& matrix, UserIndex u, UserIndex v) {
  const auto ku = matrix.KnownRow(u);
  const auto kv = matrix.KnownRow(v);
  std::size_t overlap = 0;
  for (std::size_t a = 0; a < ku.size(); ++a) overlap += (ku[a] & kv[a]);
  return overlap;
}

namespace {

absl::StatusOr<std::pair<UserIndex, UserIndex>> LookupPair(
    const PreferenceMatrix& matrix, std::string_view u, std::string_view v) {
  absl::StatusOr<UserIndex> first = matrix.LookupUser(u);
  if (!first.ok()) return first.status();
  absl::StatusOr<UserIndex> second = matrix.LookupUser(v);
  if (!second.ok()) return second.status();
  return std::make_pair(*first, *second);
}

// Neighbour order: higher similarity first, then lower id rank.
struct NeighborOrder {
  const std::vector<std::size_t>* id_ranks;

  bool operator()(const Neighbor& a, const Neighbor& b) const {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return (*id_ranks)[a.user] < (*id_ranks)[b.user];
  }
};

}  // namespace

absl::StatusOr<double> PairDistance(const PreferenceMatrix& matrix,
                                    std::string_view u, std::string_view v,
                                    const SimilarityParams& params) {
  auto users = LookupPair(matrix, u, v);
  if (!users.ok()) return users.status();
  return PairDistance(matrix, users->first, users->second, params);
}

absl::StatusOr<double> Similarity(const PreferenceMatrix& matrix,
                                  std::string_view u, std::string_view v,
                                  const SimilarityParams& params) {
  auto users = LookupPair(matrix, u, v);
  if (!users.ok()) return users.status();
  return Similarity(matrix, users->first, users->second, params);
}

absl::StatusOr<std::size_t> Overlap(const PreferenceMatrix& matrix,
                                    std::string_view u, std::string_view v) {
  auto users = LookupPair(matrix, u, v);
  if (!users.ok()) return users.status();
  return Overlap(matrix, users->first, users->second);
}

NeighborList NearestNeighbors(const PreferenceMatrix& matrix, UserIndex user,
                              std::size_t k, const SimilarityParams& params,
                              std::optional<ActionIndex> required_action) {
  NeighborList candidates;
  for (UserIndex v = 0; v < matrix.num_users(); ++v) {
    if (v == user) continue;
    if (required_action.has_value() && !matrix.Known(v, *required_action)) {
      continue;
    }
    const PairStats stats = ComparePair(matrix, user, v, params);
    const double similarity =
        SimilarityFromDistance(stats.distance, params.d_max);
    if (similarity > params.sigma_min) {
      candidates.push_back({v, similarity, stats.overlap});
    }
  }
  const std::vector<std::size_t> ranks = matrix.IdRanks();
  const std::size_t keep = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), NeighborOrder{&ranks});
  candidates.resize(keep);
  return candidates;
}

absl::StatusOr<NeighborList> NearestNeighbors(
    const PreferenceMatrix& matrix, std::string_view user, std::size_t k,
    const SimilarityParams& params,
    std::optional<ActionIndex> required_action) {
  absl::StatusOr<UserIndex> index = matrix.LookupUser(user);
  if (!index.ok()) return index.status();
  if (required_action.has_value() && *required_action >= matrix.num_actions()) {
    return absl::InvalidArgumentError("required action out of range");
  }
  return NearestNeighbors(matrix, *index, k, params, required_action);
}

NeighborIndex::NeighborIndex(const PreferenceMatrix& matrix,
                             SimilarityParams params)
    : matrix_(&matrix),
      params_(params),
      n_(matrix.num_users()),
      distance_(n_ * n_, 0.0),
      similarity_(n_ * n_, 0.0),
      overlap_(n_ * n_, 0),
      ranked_(n_) {
  for (UserIndex u = 0; u < n_; ++u) {
    for (UserIndex v = u; v < n_; ++v) {
      const PairStats stats = ComparePair(matrix, u, v, params_);
      const double similarity =
          SimilarityFromDistance(stats.distance, params_.d_max);
      distance_[u * n_ + v] = distance_[v * n_ + u] = stats.distance;
      similarity_[u * n_ + v] = similarity_[v * n_ + u] = similarity;
      overlap_[u * n_ + v] = overlap_[v * n_ + u] =
          static_cast<std::uint32_t>(stats.overlap);
    }
  }

  const std::vector<std::size_t> ranks = matrix.IdRanks();
  for (UserIndex u = 0; u < n_; ++u) {
    std::vector<UserIndex>& ranked = ranked_[u];
    for (UserIndex v = 0; v < n_; ++v) {
      if (v != u && similarity(u, v) > params_.sigma_min) ranked.push_back(v);
    }
    const double* row = similarity_.data() + u * n_;
    std::sort(ranked.begin(), ranked.end(), [&](UserIndex a, UserIndex b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return ranks[a] < ranks[b];
    });
  }
}

NeighborList NeighborIndex::Nearest(
    UserIndex user, std::size_t k,
    std::optional<ActionIndex> required_action) const {
  NeighborList neighbors;
  for (UserIndex v : ranked_[user]) {
    if (neighbors.size() >= k) break;
    if (required_action.has_value() && !matrix_->Known(v, *required_action)) {
      continue;
    }
    neighbors.push_back({v, similarity(user, v), overlap(user, v)});
  }
  return neighbors;
}

}  // namespace normcf

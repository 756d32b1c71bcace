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

#ifndef NORMCF_SIMILARITY_H_
#define NORMCF_SIMILARITY_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "normcf/preference_model.h"

namespace normcf {

// How an action known to only one (or neither) of two users contributes to
// their distance. kMax charges the full interval width; kIgnore averages over
// commonly known actions only and is kept for ablations.
enum class GapPenalty { kMax, kIgnore };

struct SimilarityParams {
  // Per-action distance charged for a gap. Must cover the preference
  // interval width so that known differences never exceed it.
  double d_max = 2.0;
  // Neighbours need similarity strictly above this.
  double sigma_min = 0.0;
  GapPenalty gap_penalty = GapPenalty::kMax;

  absl::Status Validate() const;
};

struct Neighbor {
  UserIndex user = 0;
  double similarity = 0.0;
  std::size_t overlap = 0;

  bool operator==(const Neighbor&) const = default;
};

// Descending similarity, ties by ascending user id.
using NeighborList = std::vector<Neighbor>;

struct PairStats {
  double distance = 0.0;
  std::size_t overlap = 0;
};

// Single pass over two rows computing both the gap-penalized distance and
// the number of commonly known actions.
PairStats ComparePair(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                      const SimilarityParams& params);

double PairDistance(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                    const SimilarityParams& params);
double Similarity(const PreferenceMatrix& matrix, UserIndex u, UserIndex v,
                  const SimilarityParams& params);
std::size_t Overlap(const PreferenceMatrix& matrix, UserIndex u, UserIndex v);

// Id-based variants; NotFound for an unregistered user.
absl::StatusOr<double> PairDistance(const PreferenceMatrix& matrix,
                                    std::string_view u, std::string_view v,
                                    const SimilarityParams& params);
absl::StatusOr<double> Similarity(const PreferenceMatrix& matrix,
                                  std::string_view u, std::string_view v,
                                  const SimilarityParams& params);
absl::StatusOr<std::size_t> Overlap(const PreferenceMatrix& matrix,
                                    std::string_view u, std::string_view v);

inline double SimilarityFromDistance(double distance, double d_max) {
  return 1.0 - distance / d_max;
}

// Up to k users other than `user` with similarity above sigma_min, restricted
// to users with a known preference for `required_action` when given.
// Computes similarities on the fly; see NeighborIndex for repeated queries.
NeighborList NearestNeighbors(const PreferenceMatrix& matrix, UserIndex user,
                              std::size_t k, const SimilarityParams& params,
                              std::optional<ActionIndex> required_action);
absl::StatusOr<NeighborList> NearestNeighbors(
    const PreferenceMatrix& matrix, std::string_view user, std::size_t k,
    const SimilarityParams& params,
    std::optional<ActionIndex> required_action);

// All-pairs similarity table over a matrix snapshot, with each user's
// eligible candidates pre-sorted in neighbour order. The matrix must outlive
// the index and must not change while the index is in use. Queries are
// const and may run concurrently.
class NeighborIndex {
 public:
  NeighborIndex(const PreferenceMatrix& matrix, SimilarityParams params);

  const PreferenceMatrix& matrix() const { return *matrix_; }
  const SimilarityParams& params() const { return params_; }

  double similarity(UserIndex u, UserIndex v) const {
    return similarity_[u * n_ + v];
  }
  double distance(UserIndex u, UserIndex v) const {
    return distance_[u * n_ + v];
  }
  std::size_t overlap(UserIndex u, UserIndex v) const {
    return overlap_[u * n_ + v];
  }

  // Same contract as NearestNeighbors.
  NeighborList Nearest(UserIndex user, std::size_t k,
                       std::optional<ActionIndex> required_action) const;

 private:
  const PreferenceMatrix* matrix_;
  SimilarityParams params_;
  std::size_t n_;
  std::vector<double> distance_;
  std::vector<double> similarity_;
  std::vector<std::uint32_t> overlap_;
  // Per user: eligible candidates in neighbour order.
  std::vector<std::vector<UserIndex>> ranked_;
};

}  // namespace normcf

#endif  // NORMCF_SIMILARITY_H_

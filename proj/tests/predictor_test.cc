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

#include "normcf/predictor.h"

#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "testing/brute_force.h"
#include "testing/generators.h"

namespace normcf {
namespace {

using ::normcf::testing::RandomMatrix;
using ::normcf::testing::SpaceWithSizes;

constexpr double kTolerance = 1e-12;
constexpr double kUnknown = std::numeric_limits<double>::quiet_NaN();

void SetRow(PreferenceMatrix& matrix, const std::string& user,
            const std::vector<double>& row) {
  const UserIndex u = matrix.AddUser(user);
  for (ActionIndex a = 0; a < row.size(); ++a) {
    if (!std::isnan(row[a])) ASSERT_TRUE(matrix.Set(u, a, row[a], Source::kStated).ok());
  }
}

Neighbor At(double similarity) { return Neighbor{0, similarity, 0}; }

TEST(ConfidenceTest, EmptyListHasNoEvidence) {
  EXPECT_EQ(Confidence({}, 10), 0.0);
}

TEST(ConfidenceTest, SaturatedNeighborhoodIsOne) {
  EXPECT_EQ(Confidence(NeighborList(4, At(1.0)), 4), 1.0);
}

TEST(ConfidenceTest, ThreeHalfSimilarNeighborsOfTen) {
  EXPECT_NEAR(Confidence(NeighborList(3, At(0.5)), 10), 0.15, kTolerance);
}

TEST(ConfidenceTest, MonotoneInNeighborsAndSimilarity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> similarity(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    NeighborList list;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      if (rng() % 2) list.push_back(At(similarity(rng)));
    }
    const double before = Confidence(list, k);
    NeighborList appended = list;
    appended.push_back(At(similarity(rng)));
    EXPECT_GE(Confidence(appended, k), before);
    if (!list.empty()) {
      NeighborList raised = list;
      Neighbor& n = raised[rng() % raised.size()];
      n.similarity = std::uniform_real_distribution<double>(n.similarity, 1.0)(rng);
      EXPECT_GE(Confidence(raised, k), before);
    }
  }
}

TEST(PredictorParamsTest, Validates) {
  EXPECT_TRUE(PredictorParams{}.Validate().ok());
  PredictorParams params;
  params.n_min = 0;
  EXPECT_FALSE(params.Validate().ok());
  params.n_min = 3;
  params.k = 2;
  EXPECT_FALSE(params.Validate().ok());
}

TEST(PredictTest, UnanimousSaturatedNeighborhood) {
  // A known target entry may be re-predicted for evaluation; with clones on
  // every action each neighbour is at similarity 1.
  PreferenceMatrix matrix(SpaceWithSizes({3}));
  const std::vector<double> row = {0.6, -0.2, 0.9};
  SetRow(matrix, "target", row);
  for (int i = 0; i < 3; ++i) SetRow(matrix, "clone" + std::to_string(i), row);
  PredictorParams params;
  params.k = 3;
  const PredictionOutcome outcome = Predict(matrix, 0, 0, params);
  const auto* prediction = std::get_if<Prediction>(&outcome);
  ASSERT_NE(prediction, nullptr);
  EXPECT_EQ(prediction->value, 0.6);
  EXPECT_EQ(prediction->confidence, 1.0);
  EXPECT_EQ(prediction->support, 3);
  EXPECT_TRUE(prediction->target_known);
}

TEST(PredictTest, SingleNeighborIsBelowTheSupportFloor) {
  PreferenceMatrix matrix(SpaceWithSizes({2}));
  SetRow(matrix, "target", {kUnknown, 0.5});
  SetRow(matrix, "other", {0.8, 0.5});
  const PredictionOutcome outcome = Predict(matrix, 0, 0, PredictorParams{});
  ASSERT_TRUE(std::holds_alternative<NoNeighbors>(outcome));
  EXPECT_EQ(std::get<NoNeighbors>(outcome).support, 1);
}

// Neighbours at similarity 0.8 (value +1) and 0.2 (value -1) on a 5-action
// space: the first copies the target elsewhere, the second sits 1.5 away on
// each of the four other actions.
PreferenceMatrix TwoNeighborFixture() {
  PreferenceMatrix matrix(SpaceWithSizes({5}));
  SetRow(matrix, "target", {kUnknown, 0.75, 0.75, 0.75, 0.75});
  SetRow(matrix, "near", {1.0, 0.75, 0.75, 0.75, 0.75});
  SetRow(matrix, "far", {-1.0, -0.75, -0.75, -0.75, -0.75});
  return matrix;
}

TEST(PredictTest, TwoNeighborWeightedMean) {
  const PreferenceMatrix matrix = TwoNeighborFixture();
  PredictorParams params;
  params.k = 2;
  params.n_min = 2;
  const PredictionOutcome outcome = Predict(matrix, 0, 0, params);
  const auto* prediction = std::get_if<Prediction>(&outcome);
  ASSERT_NE(prediction, nullptr);
  EXPECT_NEAR(prediction->value, 0.6, kTolerance);
  EXPECT_NEAR(prediction->confidence, 0.5, kTolerance);
  ASSERT_EQ(prediction->neighbors.size(), 2);
  EXPECT_NEAR(prediction->neighbors[0].similarity, 0.8, kTolerance);
  EXPECT_NEAR(prediction->neighbors[1].similarity, 0.2, kTolerance);
  EXPECT_FALSE(prediction->target_known);

  const auto reference = testing::ReferencePredict(matrix, 0, 0, {2, 2});
  ASSERT_TRUE(reference.has_value());
  EXPECT_NEAR(prediction->value, reference->value, kTolerance);
  EXPECT_NEAR(prediction->confidence, reference->confidence, kTolerance);
}

TEST(PredictTest, IdOverloadValidatesInput) {
  const PreferenceMatrix matrix = TwoNeighborFixture();
  EXPECT_EQ(Predict(matrix, "ghost", Action{{0}}, {}).status().code(),
            absl::StatusCode::kNotFound);
  EXPECT_EQ(Predict(matrix, "target", Action{{9}}, {}).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_TRUE(Predict(matrix, "target", Action{{0}}, {}).ok());
}

TEST(PredictAllTest, FullyKnownUserHasNothingToPredict) {
  PreferenceMatrix matrix(SpaceWithSizes({2}));
  SetRow(matrix, "u", {0.1, 0.2});
  SetRow(matrix, "v", {0.1, kUnknown});
  EXPECT_TRUE(PredictAll(matrix, 0, {}).empty());
}

TEST(PredictAllTest, OneUnknownGivesOneEntry) {
  PreferenceMatrix matrix(SpaceWithSizes({3}));
  SetRow(matrix, "u", {0.1, kUnknown, 0.2});
  SetRow(matrix, "v", {0.1, 0.4, 0.2});
  auto outcomes = PredictAll(matrix, "u", {});
  ASSERT_TRUE(outcomes.ok());
  ASSERT_EQ(outcomes->size(), 1);
  EXPECT_EQ(outcomes->begin()->first, 1);
}

void ExpectSameOutcome(const PredictionOutcome& a, const PredictionOutcome& b) {
  ASSERT_EQ(a.index(), b.index());
  if (const auto* pa = std::get_if<Prediction>(&a)) {
    const auto& pb = std::get<Prediction>(b);
    EXPECT_EQ(pa->value, pb.value);
    EXPECT_EQ(pa->confidence, pb.confidence);
    EXPECT_EQ(pa->support, pb.support);
  } else {
    EXPECT_EQ(std::get<NoNeighbors>(a).support, std::get<NoNeighbors>(b).support);
  }
}

TEST(PredictAllTest, MatchesPerEntryPredictOnAFixedMatrix) {
  std::mt19937_64 rng(106);
  const PreferenceMatrix matrix = RandomMatrix(rng, SpaceWithSizes({6}), 10, 0.4);
  PredictorParams params;
  params.k = 3;
  const NeighborIndex index(matrix, params.similarity);
  std::size_t compared = 0;
  for (UserIndex u = 0; u < matrix.num_users(); ++u) {
    const auto all = PredictAll(matrix, u, params);
    const auto all_indexed = PredictAll(index, u, params);
    ASSERT_EQ(all.size(), matrix.num_actions() - matrix.KnownCount(u));
    ASSERT_EQ(all_indexed.size(), all.size());
    for (const auto& [action, outcome] : all) {
      ExpectSameOutcome(outcome, Predict(matrix, u, action, params));
      ExpectSameOutcome(outcome, all_indexed.at(action));
      ++compared;
    }
  }
  EXPECT_GT(compared, 10);
}

TEST(PredictPropertyTest, StaysInsideTheNeighborHull) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const PreferenceMatrix matrix =
        RandomMatrix(rng, testing::RandomSpace(rng, 3, 4, 16), 10, 0.5);
    PredictorParams params;
    params.k = 1 + rng() % 6;
    params.n_min = 1;
    const NeighborIndex index(matrix, params.similarity);
    for (UserIndex u = 0; u < matrix.num_users(); ++u) {
      for (const auto& [a, outcome] : PredictAll(index, u, params)) {
        const auto* p = std::get_if<Prediction>(&outcome);
        if (p == nullptr) continue;
        double lowest = 1.0;
        double highest = -1.0;
        for (const Neighbor& n : p->neighbors) {
          lowest = std::min(lowest, matrix.Value(n.user, a));
          highest = std::max(highest, matrix.Value(n.user, a));
        }
        EXPECT_GE(p->value, lowest);
        EXPECT_LE(p->value, highest);
        EXPECT_GE(p->confidence, 0.0);
        EXPECT_LE(p->confidence, 1.0);
      }
    }
  }
}

TEST(PredictPropertyTest, CloneRecovery) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const ActionSpace space = testing::RandomSpace(rng, 3, 4, 16);
    if (space.num_actions() < 2) continue;
    PreferenceMatrix matrix = RandomMatrix(rng, space, 8, 0.3);
    const UserIndex source = matrix.AddUser("source");
    const UserIndex clone = matrix.AddUser("clone");
    const ActionIndex masked = rng() % space.num_actions();
    for (ActionIndex a = 0; a < space.num_actions(); ++a) {
      const double value = testing::RandomPreference(rng, testing::ValueKind::kContinuous);
      ASSERT_TRUE(matrix.Set(source, a, value, Source::kStated).ok());
      if (a != masked) ASSERT_TRUE(matrix.Set(clone, a, value, Source::kStated).ok());
    }
    PredictorParams params;
    params.k = 1;
    params.n_min = 1;
    const PredictionOutcome outcome = Predict(matrix, clone, masked, params);
    const auto* p = std::get_if<Prediction>(&outcome);
    ASSERT_NE(p, nullptr);
    EXPECT_EQ(p->neighbors.front().user, source);
    EXPECT_EQ(p->value, matrix.Value(source, masked));
  }
}

TEST(PredictPropertyTest, NegationEquivariance) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    const PreferenceMatrix matrix =
        RandomMatrix(rng, testing::RandomSpace(rng, 3, 4, 16), 10, 0.5);
    const PreferenceMatrix negated = matrix.Negated();
    PredictorParams params;
    params.k = 1 + rng() % 6;
    params.n_min = 1 + rng() % params.k;
    for (UserIndex u = 0; u < matrix.num_users(); ++u) {
      const auto plain = PredictAll(matrix, u, params);
      const auto flipped = PredictAll(negated, u, params);
      for (const auto& [a, outcome] : plain) {
        const PredictionOutcome& other = flipped.at(a);
        ASSERT_EQ(outcome.index(), other.index());
        if (const auto* p = std::get_if<Prediction>(&outcome)) {
          const auto& q = std::get<Prediction>(other);
          EXPECT_EQ(q.value, -p->value);
          EXPECT_EQ(q.confidence, p->confidence);
        }
      }
    }
  }
}

TEST(PredictPropertyTest, MatchesBruteForceReference) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> masking(0.2, 0.8);
  for (int trial = 0; trial < 200; ++trial) {
    const ActionSpace space = testing::RandomSpace(rng, 3, 4, 8);
    const std::size_t n_users = 1 + rng() % 15;
    const auto kind = trial % 4 == 0 ? testing::ValueKind::kHalfSteps
                                     : testing::ValueKind::kContinuous;
    const PreferenceMatrix matrix = RandomMatrix(rng, space, n_users, masking(rng), kind);
    PredictorParams params;
    params.k = 1 + rng() % 6;
    params.n_min = 1 + rng() % params.k;
    params.similarity.sigma_min = (rng() % 3) * 0.1;
    const testing::ReferenceParams reference_params{
        params.k, params.n_min, 2.0, params.similarity.sigma_min};
    for (UserIndex u = 0; u < n_users; ++u) {
      for (ActionIndex a = 0; a < space.num_actions(); ++a) {
        const PredictionOutcome outcome = Predict(matrix, u, a, params);
        const auto reference = testing::ReferencePredict(matrix, u, a, reference_params);
        const auto* p = std::get_if<Prediction>(&outcome);
        ASSERT_EQ(p != nullptr, reference.has_value());
        if (p == nullptr) continue;
        EXPECT_NEAR(p->value, reference->value, kTolerance);
        EXPECT_NEAR(p->confidence, reference->confidence, kTolerance);
        ASSERT_EQ(p->neighbors.size(), reference->neighbor_ids.size());
        for (std::size_t i = 0; i < p->neighbors.size(); ++i) {
          EXPECT_EQ(matrix.user_id(p->neighbors[i].user), reference->neighbor_ids[i]);
        }
      }
    }
  }
}

}  // namespace
}  // namespace normcf

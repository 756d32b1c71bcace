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

#include "normcf/simulation.h"

#include <cmath>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "normcf/dataset_io.h"
#include "normcf/predictor.h"
#include "testing/generators.h"

namespace normcf {
namespace {

using ::normcf::testing::MakeTestNorm;
using ::normcf::testing::SpaceWithSizes;

PopulationConfig SmallConfig() {
  PopulationConfig config;
  config.n_users = 60;
  config.n_clusters = 3;
  config.masking = 0.5;
  config.seed = 7;
  return config;
}

bool SameEntries(const PreferenceMatrix& a, const PreferenceMatrix& b) {
  if (a.num_users() != b.num_users() || a.user_ids() != b.user_ids()) return false;
  for (UserIndex u = 0; u < a.num_users(); ++u) {
    for (ActionIndex x = 0; x < a.num_actions(); ++x) {
      if (a.Known(u, x) != b.Known(u, x)) return false;
      if (a.Known(u, x) && a.Value(u, x) != b.Value(u, x)) return false;
    }
  }
  return true;
}

TEST(PopulationConfigTest, Validates) {
  EXPECT_TRUE(PopulationConfig{}.Validate().ok());
  PopulationConfig config;
  config.n_clusters = 400;
  EXPECT_FALSE(config.Validate().ok());
  config = PopulationConfig{};
  config.masking = 1.0;
  EXPECT_FALSE(config.Validate().ok());
  config = PopulationConfig{};
  config.cluster_noise = -0.1;
  EXPECT_FALSE(config.Validate().ok());
  config = PopulationConfig{};
  config.n_users = 0;
  EXPECT_FALSE(config.Validate().ok());
}

TEST(GeneratePopulationTest, NoMaskingObservesTheTruth) {
  PopulationConfig config = SmallConfig();
  config.masking = 0.0;
  auto population = GeneratePopulation(config);
  ASSERT_TRUE(population.ok());
  EXPECT_TRUE(SameEntries(population->truth, population->observed));
  EXPECT_EQ(population->truth.SourceOf(0, 0), Source::kTruth);
  EXPECT_EQ(population->observed.SourceOf(0, 0), Source::kStated);
}

TEST(GeneratePopulationTest, NoNoiseMakesClustersIdentical) {
  PopulationConfig config = SmallConfig();
  config.cluster_noise = 0.0;
  auto population = GeneratePopulation(config);
  ASSERT_TRUE(population.ok());
  const PreferenceMatrix& truth = population->truth;
  for (UserIndex u = 0; u < truth.num_users(); ++u) {
    const UserIndex first = population->cluster_of[u];
    EXPECT_EQ(population->cluster_of[first], population->cluster_of[u]);
    for (ActionIndex a = 0; a < truth.num_actions(); ++a) {
      EXPECT_EQ(truth.Value(u, a), truth.Value(first, a));
    }
  }
}

TEST(GeneratePopulationTest, SameSeedSameMatrices) {
  auto a = GeneratePopulation(SmallConfig());
  auto b = GeneratePopulation(SmallConfig());
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_TRUE(SameEntries(a->truth, b->truth));
  EXPECT_TRUE(SameEntries(a->observed, b->observed));
  PopulationConfig other = SmallConfig();
  other.seed = 8;
  auto c = GeneratePopulation(other);
  EXPECT_FALSE(SameEntries(a->truth, c->truth));
}

TEST(GeneratePopulationTest, TruthIsCompleteAndBounded) {
  auto population = GeneratePopulation(SmallConfig());
  ASSERT_TRUE(population.ok());
  const PreferenceMatrix& truth = population->truth;
  std::size_t hidden = 0;
  for (UserIndex u = 0; u < truth.num_users(); ++u) {
    EXPECT_EQ(truth.KnownCount(u), truth.num_actions());
    for (ActionIndex a = 0; a < truth.num_actions(); ++a) {
      EXPECT_GE(truth.Value(u, a), -1.0);
      EXPECT_LE(truth.Value(u, a), 1.0);
      if (population->observed.Known(u, a)) {
        EXPECT_EQ(population->observed.Value(u, a), truth.Value(u, a));
      } else {
        ++hidden;
      }
    }
  }
  const double share = static_cast<double>(hidden) /
                       static_cast<double>(truth.num_users() * truth.num_actions());
  EXPECT_NEAR(share, 0.5, 0.05);
  EXPECT_EQ(truth.user_id(0), "u01");
  EXPECT_EQ(SyntheticUserId(4, 1000), "u0005");
}

TEST(OracleNormsTest, ThresholdsWithInclusiveBoundary) {
  PreferenceMatrix truth(SpaceWithSizes({3}));
  const UserIndex u = truth.AddUser("u");
  ASSERT_TRUE(truth.Set(u, 0, 1.0, Source::kTruth).ok());
  ASSERT_TRUE(truth.Set(u, 1, 0.0, Source::kTruth).ok());
  ASSERT_TRUE(truth.Set(u, 2, -0.5, Source::kTruth).ok());
  auto grid = OracleNorms(truth, 0.5);
  ASSERT_TRUE(grid.ok());
  EXPECT_EQ((*grid)[0][0], Modality::kObligation);
  EXPECT_EQ((*grid)[0][1], std::nullopt);
  EXPECT_EQ((*grid)[0][2], Modality::kProhibition);
}

TEST(OracleNormsTest, IncompleteTruthFails) {
  PreferenceMatrix truth(SpaceWithSizes({2}));
  ASSERT_TRUE(truth.Set("u", Action{{0}}, 1.0, Source::kTruth).ok());
  EXPECT_FALSE(OracleNorms(truth, 0.5).ok());
}

TEST(RunEpochTest, NoMaskingMeansNothingToDecide) {
  PopulationConfig config = SmallConfig();
  config.masking = 0.0;
  auto state = InitializeSimulation(config, {}, {});
  ASSERT_TRUE(state.ok());
  const EpochReport report = RunEpoch(*state);
  EXPECT_TRUE(report.activity.predictions.empty());
  EXPECT_EQ(report.activity.decisions, 0);
  EXPECT_EQ(report.metrics.interaction_rate, 0.0);
  EXPECT_FALSE(report.metrics.norm_accuracy.has_value());
  EXPECT_FALSE(report.metrics.prediction_mae.has_value());
}

TEST(RunEpochTest, SingleUserNeverHasNeighbors) {
  PopulationConfig config = SmallConfig();
  config.n_users = 1;
  config.n_clusters = 1;
  auto state = InitializeSimulation(config, {}, {});
  ASSERT_TRUE(state.ok());
  const EpochReport report = RunEpoch(*state);
  EXPECT_GT(report.activity.decisions, 0);
  EXPECT_EQ(report.activity.no_norm, report.activity.decisions);
  EXPECT_TRUE(report.activity.predictions.empty());
}

TEST(RunEpochTest, AskEverythingAsksAboutEveryDecision) {
  auto state = InitializeSimulation(SmallConfig(), {}, {},
                                    DecisionPolicy::kAskEverything);
  ASSERT_TRUE(state.ok());
  const EpochReport report = RunEpoch(*state);
  EXPECT_GT(report.activity.decisions, 0);
  EXPECT_EQ(report.metrics.interaction_rate, 1.0);
  // Every unknown preference has now been answered.
  EXPECT_EQ(report.observed_known,
            state->truth.num_users() * state->truth.num_actions());
}

TEST(RunEpochTest, InvariantsHoldEveryEpoch) {
  const std::vector<DriftEvent> drift = {{2, 1, DriftKind::kSignFlip},
                                         {4, 0, DriftKind::kRedraw}};
  PipelineParams params;
  params.revision_age = 1;
  auto state = InitializeSimulation(SmallConfig(), params, drift);
  ASSERT_TRUE(state.ok());
  std::size_t known = state->observed.TotalKnown();
  for (int e = 0; e < 6; ++e) {
    const EpochReport report = RunEpoch(*state);
    EXPECT_GE(report.observed_known, known);
    known = report.observed_known;
    EXPECT_TRUE(IsConflictFree(state->norms));
    for (UserIndex u = 0; u < state->observed.num_users(); ++u) {
      for (ActionIndex a = 0; a < state->observed.num_actions(); ++a) {
        if (!state->observed.Known(u, a)) continue;
        EXPECT_EQ(state->observed.SourceOf(u, a), Source::kStated);
        EXPECT_EQ(state->observed.Value(u, a), state->truth.Value(u, a));
      }
    }
    const Metrics& m = report.metrics;
    EXPECT_GE(m.interaction_rate, 0.0);
    EXPECT_LE(m.interaction_rate, 1.0);
    if (m.prediction_mae) {
      EXPECT_GE(*m.prediction_mae, 0.0);
      EXPECT_LE(*m.prediction_mae, 2.0);
    }
    for (const auto& rate : {m.norm_accuracy, m.obligation_precision,
                             m.obligation_recall, m.prohibition_precision,
                             m.prohibition_recall}) {
      if (!rate) continue;
      EXPECT_GE(*rate, 0.0);
      EXPECT_LE(*rate, 1.0);
    }
  }
}

TEST(RunEpochTest, SingleArchetypePredictsExactly) {
  PopulationConfig config = SmallConfig();
  config.n_clusters = 1;
  config.cluster_noise = 0.0;
  auto state = InitializeSimulation(config, {}, {});
  ASSERT_TRUE(state.ok());
  const EpochReport report = RunEpoch(*state);
  ASSERT_FALSE(report.activity.predictions.empty());
  EXPECT_EQ(*report.metrics.prediction_mae, 0.0);
}

TEST(PredictOnPopulationTest, CloneNeighborhoodsPredictExactly) {
  PopulationConfig config = SmallConfig();
  config.cluster_noise = 0.0;
  auto population = GeneratePopulation(config);
  ASSERT_TRUE(population.ok());
  const PreferenceMatrix& observed = population->observed;
  const PredictorParams params;
  const NeighborIndex index(observed, params.similarity);
  std::size_t checked = 0;
  for (UserIndex u = 0; u < observed.num_users(); ++u) {
    for (const auto& [a, outcome] : PredictAll(index, u, params)) {
      const auto* p = std::get_if<Prediction>(&outcome);
      if (p == nullptr) continue;
      bool all_clones = true;
      for (const Neighbor& n : p->neighbors) {
        all_clones &= population->cluster_of[n.user] == population->cluster_of[u];
      }
      if (!all_clones) continue;
      EXPECT_EQ(p->value, population->truth.Value(u, a));
      ++checked;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(RunSimulationTest, OneEpochOneReport) {
  auto reports = RunSimulation(SmallConfig(), {}, 1, {});
  ASSERT_TRUE(reports.ok());
  EXPECT_EQ(reports->size(), 1);
  EXPECT_EQ(reports->front().epoch, 1);
  EXPECT_FALSE(RunSimulation(SmallConfig(), {}, 0, {}).ok());
}

TEST(RunSimulationTest, RejectsDriftOutsideThePopulation) {
  EXPECT_FALSE(RunSimulation(SmallConfig(), {}, 2, {{1, 3, DriftKind::kSignFlip}}).ok());
  EXPECT_FALSE(RunSimulation(SmallConfig(), {}, 2, {{0, 0, DriftKind::kSignFlip}}).ok());
}

TEST(RunSimulationTest, InteractionRateNeverRisesWithoutDrift) {
  for (std::uint64_t seed : {1, 2, 3, 42}) {
    PopulationConfig config;
    config.seed = seed;
    config.masking = 0.6;
    auto reports = RunSimulation(config, {}, 5, {});
    ASSERT_TRUE(reports.ok());
    for (std::size_t e = 1; e < reports->size(); ++e) {
      EXPECT_LE((*reports)[e].metrics.interaction_rate,
                (*reports)[e - 1].metrics.interaction_rate)
          << "seed " << seed << " epoch " << e + 1;
    }
  }
}

TEST(RunSimulationTest, AccuracyRecoversAfterDrift) {
  PopulationConfig config;
  config.masking = 0.6;
  auto reports = RunSimulation(config, {}, 8, {{5, 0, DriftKind::kSignFlip}});
  ASSERT_TRUE(reports.ok());
  const double before = *(*reports)[3].metrics.norm_accuracy;
  const double at_drift = *(*reports)[4].metrics.norm_accuracy;
  EXPECT_LT(at_drift, before);
  double best_after = 0.0;
  for (std::size_t e = 5; e < 8; ++e) {
    best_after = std::max(best_after, *(*reports)[e].metrics.norm_accuracy);
  }
  EXPECT_GE(best_after, before - 0.05);
  EXPECT_EQ((*reports)[4].activity.drift_events, 1);
}

TEST(RunSimulationTest, ReportsAreByteIdenticalAcrossRuns) {
  const std::vector<DriftEvent> drift = {{2, 1, DriftKind::kRedraw}};
  auto a = RunSimulation(SmallConfig(), {}, 4, drift);
  auto b = RunSimulation(SmallConfig(), {}, 4, drift);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(SerializeReports(*a), SerializeReports(*b));
}

// Three users on a 2 x 2 space, scored by hand.
//
//   truth           oracle (theta 0.5)   active coverage     decided
//   u0  .9 .2 -.6 -1   O - P P             - O P P             a0 a1 a2
//   u1 -.5 .5  0  .7   P O - O             P O - O             a0 a2
//   u2  1  1  -.2 .4   O O - -             O O P -             a2 a3
class HandFixtureTest : public ::testing::Test {
 protected:
  static constexpr int kAny = kWildcard;

  static SimulationState MakeState() {
    const ActionSpace space = SpaceWithSizes({2, 2});
    PreferenceMatrix truth(space);
    const std::vector<std::vector<double>> rows = {{0.9, 0.2, -0.6, -1.0},
                                                   {-0.5, 0.5, 0.0, 0.7},
                                                   {1.0, 1.0, -0.2, 0.4}};
    for (std::size_t u = 0; u < rows.size(); ++u) {
      const UserIndex user = truth.AddUser("u" + std::to_string(u));
      for (ActionIndex a = 0; a < 4; ++a) {
        (void)truth.Set(user, a, rows[u][a], Source::kTruth);
      }
    }
    NormStore norms(space);
    auto add = [&](const char* id, const char* user, Modality m,
                   std::vector<int> pattern) {
      EXPECT_TRUE(norms.Add(MakeTestNorm(id, user, m, NormPattern{pattern})).ok());
    };
    add("a", "u0", Modality::kProhibition, {1, kAny});
    add("b", "u0", Modality::kObligation, {0, 1});
    add("c", "u1", Modality::kObligation, {kAny, 1});
    add("d", "u1", Modality::kProhibition, {0, 0});
    add("e", "u2", Modality::kObligation, {0, kAny});
    add("f", "u2", Modality::kProhibition, {1, 0});
    add("g", "u2", Modality::kObligation, {1, 1});
    EXPECT_TRUE(norms.Abolish("g").ok());

    SimulationState state{truth, truth, {0, 0, 0}, std::move(norms),
                          SensitivityModel(space), 1, {}, {},
                          DecisionPolicy::kPredict, 0, 0.0, {}};
    state.decided = {1, 1, 1, 0,  //
                     1, 0, 1, 0,  //
                     0, 0, 1, 1};
    return state;
  }
};

TEST_F(HandFixtureTest, MetricsMatchHandCounts) {
  const SimulationState state = MakeState();
  EpochActivity activity;
  activity.predictions = {{0, 1, 0.4}, {2, 2, -0.7}, {1, 2, 0.0}};
  activity.decisions = 7;
  activity.ask_user = 2;
  const NormGrid oracle = *OracleNorms(state.truth, 0.5);
  const Metrics m = Evaluate(state, oracle, activity);

  EXPECT_NEAR(*m.prediction_mae, 0.7 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(*m.norm_accuracy, 4.0 / 7.0);
  EXPECT_DOUBLE_EQ(*m.obligation_precision, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(*m.obligation_recall, 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(*m.prohibition_precision, 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(*m.prohibition_recall, 1.0);
  EXPECT_DOUBLE_EQ(m.interaction_rate, 2.0 / 7.0);
}

TEST_F(HandFixtureTest, AllCellsScoring) {
  const SimulationState state = MakeState();
  const NormScores scores =
      ScoreNorms(state.norms, state.truth, *OracleNorms(state.truth, 0.5), nullptr);
  // Mismatches: u0a0, u0a1, u2a2.
  EXPECT_DOUBLE_EQ(*scores.accuracy, 9.0 / 12.0);
}

TEST_F(HandFixtureTest, ExactPredictionsAndNoDecisions) {
  SimulationState state = MakeState();
  state.decided.assign(12, 0);
  EpochActivity activity;
  activity.predictions = {{0, 0, 0.9}, {1, 3, 0.7}};
  const Metrics m = Evaluate(state, *OracleNorms(state.truth, 0.5), activity);
  EXPECT_EQ(*m.prediction_mae, 0.0);
  EXPECT_FALSE(m.norm_accuracy.has_value());
  EXPECT_EQ(m.interaction_rate, 0.0);
}

TEST(DriftAdherenceTest, FlippedClusterEndsUpWithNewModalities) {
  PopulationConfig config;
  config.masking = 0.6;
  auto state = InitializeSimulation(config, {}, {{5, 0, DriftKind::kSignFlip}});
  ASSERT_TRUE(state.ok());
  for (int e = 0; e < 4; ++e) RunEpoch(*state);
  const NormGrid before = *OracleNorms(state->truth, 0.5);
  std::optional<double> adherence;
  for (int e = 0; e < 4; ++e) {
    RunEpoch(*state);
    adherence = DriftAdherence(*state, 0, before);
  }
  ASSERT_TRUE(adherence.has_value());
  EXPECT_GE(*adherence, 0.9);
}

}  // namespace
}  // namespace normcf

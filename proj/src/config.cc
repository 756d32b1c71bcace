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

#include "normcf/config.h"

#include <cmath>
#include <functional>
#include <initializer_list>
#include <limits>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "normcf/dataset_io.h"

namespace normcf {

namespace {

using nlohmann::json;

absl::Status FieldError(std::string_view field, std::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat(std::string(field), ": ", std::string(message)));
}

// Typed, path-aware access to one JSON object.
class Section {
 public:
  Section(const json* object, std::string name)
      : object_(object), name_(std::move(name)) {}

  absl::Status CheckKeys(std::initializer_list<std::string_view> allowed) const {
    if (object_ == nullptr) return absl::OkStatus();
    for (const auto& [key, value] : object_->items()) {
      bool known = false;
      for (std::string_view candidate : allowed) known |= (candidate == key);
      if (!known) {
        return absl::InvalidArgumentError(
            absl::StrCat("unknown key '", Path(key), "'"));
      }
    }
    return absl::OkStatus();
  }

  const json* Find(std::string_view key) const {
    if (object_ == nullptr) return nullptr;
    auto it = object_->find(std::string(key));
    return it == object_->end() ? nullptr : &*it;
  }

  std::string Path(std::string_view key) const {
    return name_.empty() ? std::string(key) : absl::StrCat(name_, ".", std::string(key));
  }

  // Leaves *out untouched when the key is absent.
  absl::Status Real(std::string_view key, double* out,
                    const std::function<bool(double)>& valid,
                    std::string_view requirement) const {
    const json* value = Find(key);
    if (value == nullptr) return absl::OkStatus();
    if (!value->is_number()) return FieldError(Path(key), "must be a number");
    const double number = value->get<double>();
    if (!std::isfinite(number) || !valid(number)) {
      return FieldError(Path(key),
                        absl::StrCat(std::string(requirement), ", got ", number));
    }
    *out = number;
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(std::string_view key, Int* out, std::int64_t minimum) const {
    const json* value = Find(key);
    if (value == nullptr) return absl::OkStatus();
    if (!value->is_number_integer()) {
      return FieldError(Path(key), "must be an integer");
    }
    if (value->is_number_unsigned()) {
      const auto number = value->get<std::uint64_t>();
      if (number > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
        return FieldError(Path(key), "is too large");
      }
      if (minimum > 0 && number < static_cast<std::uint64_t>(minimum)) {
        return FieldError(Path(key), absl::StrCat("must be at least ", minimum));
      }
      *out = static_cast<Int>(number);
      return absl::OkStatus();
    }
    const auto number = value->get<std::int64_t>();
    if (number < minimum) {
      return FieldError(Path(key), absl::StrCat("must be at least ", minimum));
    }
    *out = static_cast<Int>(number);
    return absl::OkStatus();
  }

  absl::Status Bool(std::string_view key, bool* out) const {
    const json* value = Find(key);
    if (value == nullptr) return absl::OkStatus();
    if (!value->is_boolean()) return FieldError(Path(key), "must be a boolean");
    *out = value->get<bool>();
    return absl::OkStatus();
  }

  absl::Status String(std::string_view key, std::string* out) const {
    const json* value = Find(key);
    if (value == nullptr) return absl::OkStatus();
    if (!value->is_string()) return FieldError(Path(key), "must be a string");
    *out = value->get<std::string>();
    return absl::OkStatus();
  }

 private:
  const json* object_;
  std::string name_;
};

#define NORMCF_RETURN_IF_ERROR(expr)         \
  do {                                       \
    absl::Status status_ = (expr);           \
    if (!status_.ok()) return status_;       \
  } while (false)

absl::StatusOr<Section> SubSection(const json& root, std::string_view name) {
  auto it = root.find(std::string(name));
  if (it == root.end()) return Section(nullptr, std::string(name));
  if (!it->is_object()) return FieldError(name, "must be an object");
  return Section(&*it, std::string(name));
}

absl::Status ReadSimilarity(const json& root, SimilarityParams& params) {
  absl::StatusOr<Section> section = SubSection(root, "similarity");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys({"d_max", "sigma_min", "gap_penalty"}));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "d_max", &params.d_max, [](double v) { return v >= 2.0; },
      "must be at least the preference interval width 2"));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "sigma_min", &params.sigma_min,
      [](double v) { return v >= 0.0 && v < 1.0; }, "must lie in [0, 1)"));
  std::string gap;
  NORMCF_RETURN_IF_ERROR(section->String("gap_penalty", &gap));
  if (gap == "max") {
    params.gap_penalty = GapPenalty::kMax;
  } else if (gap == "ignore") {
    params.gap_penalty = GapPenalty::kIgnore;
  } else if (!gap.empty()) {
    return FieldError("similarity.gap_penalty", "must be \"max\" or \"ignore\"");
  }
  return absl::OkStatus();
}

absl::Status ReadPredictor(const json& root, PredictorParams& params) {
  absl::StatusOr<Section> section = SubSection(root, "predictor");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys({"k", "n_min"}));
  NORMCF_RETURN_IF_ERROR(section->Integer("k", &params.k, 1));
  NORMCF_RETURN_IF_ERROR(section->Integer("n_min", &params.n_min, 1));
  if (params.k < params.n_min) {
    return FieldError("predictor.k", absl::StrCat("must be at least n_min (",
                                                  params.n_min, ")"));
  }
  return absl::OkStatus();
}

absl::Status ReadSynthesis(const json& root, SynthesisParams& params) {
  absl::StatusOr<Section> section = SubSection(root, "synthesis");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys({"theta", "gamma"}));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "theta", &params.theta, [](double v) { return v > 0.0 && v <= 1.0; },
      "must lie in (0, 1]"));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "gamma", &params.gamma, [](double v) { return v >= 0.0 && v <= 1.0; },
      "must lie in [0, 1]"));
  return absl::OkStatus();
}

absl::Status ReadSensitivity(const json& root, SensitivityParams& params) {
  absl::StatusOr<Section> section = SubSection(root, "sensitivity");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys({"varsigma", "m_min", "enabled"}));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "varsigma", &params.varsigma, [](double v) { return v > 0.0 && v <= 1.0; },
      "must lie in (0, 1]"));
  NORMCF_RETURN_IF_ERROR(section->Integer("m_min", &params.m_min, 1));
  NORMCF_RETURN_IF_ERROR(section->Bool("enabled", &params.enabled));
  return absl::OkStatus();
}

absl::Status ReadPopulation(const json& root, PopulationConfig& population) {
  absl::StatusOr<Section> section = SubSection(root, "population");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys(
      {"n_users", "n_clusters", "cluster_noise", "masking", "seed"}));
  NORMCF_RETURN_IF_ERROR(section->Integer("n_users", &population.n_users, 1));
  NORMCF_RETURN_IF_ERROR(section->Integer("n_clusters", &population.n_clusters, 1));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "cluster_noise", &population.cluster_noise,
      [](double v) { return v >= 0.0; }, "must be non-negative"));
  NORMCF_RETURN_IF_ERROR(section->Real(
      "masking", &population.masking,
      [](double v) { return v >= 0.0 && v < 1.0; }, "must lie in [0, 1)"));
  NORMCF_RETURN_IF_ERROR(section->Integer("seed", &population.seed, 0));
  if (population.n_clusters > population.n_users) {
    return FieldError("population.n_clusters", "must not exceed n_users");
  }
  return absl::OkStatus();
}

absl::Status ReadSimulation(const json& root, Config& config) {
  absl::StatusOr<Section> section = SubSection(root, "simulation");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(
      section->CheckKeys({"n_epochs", "revision_age", "policy", "drift"}));
  NORMCF_RETURN_IF_ERROR(section->Integer("n_epochs", &config.n_epochs, 1));
  NORMCF_RETURN_IF_ERROR(
      section->Integer("revision_age", &config.pipeline.revision_age, 1));
  std::string policy;
  NORMCF_RETURN_IF_ERROR(section->String("policy", &policy));
  if (policy == "predict") {
    config.policy = DecisionPolicy::kPredict;
  } else if (policy == "ask_everything") {
    config.policy = DecisionPolicy::kAskEverything;
  } else if (!policy.empty()) {
    return FieldError("simulation.policy",
                      "must be \"predict\" or \"ask_everything\"");
  }

  const json* drift = section->Find("drift");
  if (drift == nullptr) return absl::OkStatus();
  if (!drift->is_array()) return FieldError("simulation.drift", "must be an array");
  for (std::size_t i = 0; i < drift->size(); ++i) {
    const json& entry = (*drift)[i];
    const std::string path = absl::StrCat("simulation.drift[", i, "]");
    if (!entry.is_object()) return FieldError(path, "must be an object");
    Section event_section(&entry, path);
    NORMCF_RETURN_IF_ERROR(event_section.CheckKeys({"epoch", "cluster", "kind"}));
    if (!entry.contains("epoch") || !entry.contains("cluster")) {
      return FieldError(path, "needs 'epoch' and 'cluster'");
    }
    DriftEvent event;
    NORMCF_RETURN_IF_ERROR(event_section.Integer("epoch", &event.epoch, 1));
    NORMCF_RETURN_IF_ERROR(event_section.Integer("cluster", &event.cluster, 0));
    std::string kind;
    NORMCF_RETURN_IF_ERROR(event_section.String("kind", &kind));
    if (!kind.empty()) {
      absl::StatusOr<DriftKind> parsed = ParseDriftKind(kind);
      if (!parsed.ok()) {
        return FieldError(absl::StrCat(path, ".kind"),
                          "must be \"sign_flip\" or \"redraw\"");
      }
      event.kind = *parsed;
    }
    if (event.cluster >= config.population.n_clusters) {
      return FieldError(absl::StrCat(path, ".cluster"),
                        "must be below population.n_clusters");
    }
    config.drift.push_back(event);
  }
  return absl::OkStatus();
}

absl::Status ReadPaths(const json& root, const std::filesystem::path& base_dir,
                       Paths& paths) {
  absl::StatusOr<Section> section = SubSection(root, "paths");
  if (!section.ok()) return section.status();
  NORMCF_RETURN_IF_ERROR(section->CheckKeys(
      {"action_space", "preferences", "truth", "norms", "out_dir"}));
  auto read = [&](std::string_view key,
                  std::filesystem::path& out) -> absl::Status {
    std::string value;
    NORMCF_RETURN_IF_ERROR(section->String(key, &value));
    if (value.empty()) return absl::OkStatus();
    std::filesystem::path path(value);
    out = path.is_absolute() ? path : base_dir / path;
    return absl::OkStatus();
  };
  NORMCF_RETURN_IF_ERROR(read("action_space", paths.action_space));
  NORMCF_RETURN_IF_ERROR(read("preferences", paths.preferences));
  NORMCF_RETURN_IF_ERROR(read("truth", paths.truth));
  NORMCF_RETURN_IF_ERROR(read("norms", paths.norms));
  NORMCF_RETURN_IF_ERROR(read("out_dir", paths.out_dir));
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Config> ParseConfig(std::string_view text,
                                   const std::filesystem::path& base_dir) {
  Config config;
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    return config;
  }
  json root = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) {
    return absl::InvalidArgumentError("config: parse error: not valid JSON");
  }
  if (!root.is_object()) {
    return absl::InvalidArgumentError("config: top level must be an object");
  }
  Section top(&root, "");
  NORMCF_RETURN_IF_ERROR(top.CheckKeys({"similarity", "predictor", "synthesis",
                                        "sensitivity", "population",
                                        "action_space", "simulation", "paths"}));

  NORMCF_RETURN_IF_ERROR(ReadSimilarity(root, config.pipeline.predictor.similarity));
  NORMCF_RETURN_IF_ERROR(ReadPredictor(root, config.pipeline.predictor));
  NORMCF_RETURN_IF_ERROR(ReadSynthesis(root, config.pipeline.synthesis));
  NORMCF_RETURN_IF_ERROR(ReadSensitivity(root, config.pipeline.sensitivity));
  NORMCF_RETURN_IF_ERROR(ReadPopulation(root, config.population));
  NORMCF_RETURN_IF_ERROR(ReadSimulation(root, config));
  NORMCF_RETURN_IF_ERROR(ReadPaths(root, base_dir, config.paths));

  const bool inline_space = root.contains("action_space");
  if (inline_space && !config.paths.action_space.empty()) {
    return FieldError("action_space",
                      "given both inline and as paths.action_space");
  }
  if (inline_space) {
    absl::StatusOr<ActionSpace> space = ActionSpaceFromJson(root["action_space"]);
    if (!space.ok()) return space.status();
    config.population.space = *std::move(space);
  } else if (!config.paths.action_space.empty()) {
    absl::StatusOr<std::string> text_or = ReadFile(config.paths.action_space);
    if (!text_or.ok()) return text_or.status();
    absl::StatusOr<ActionSpace> space = ParseActionSpace(*text_or);
    if (!space.ok()) return space.status();
    config.population.space = *std::move(space);
  }

  NORMCF_RETURN_IF_ERROR(config.pipeline.Validate());
  NORMCF_RETURN_IF_ERROR(config.population.Validate());
  return config;
}

absl::StatusOr<Config> LoadConfig(const std::filesystem::path& path) {
  absl::StatusOr<std::string> text = ReadFile(path);
  if (!text.ok()) return text.status();
  return ParseConfig(*text, path.parent_path());
}

}  // namespace normcf

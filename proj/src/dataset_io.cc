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

#include "normcf/dataset_io.h"

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"

namespace normcf {

using nlohmann::json;
using nlohmann::ordered_json;

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    return absl::NotFoundError(
        absl::StrCat("cannot open '", path.string(), "': no such file"));
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::UnavailableError(absl::StrCat(
        "cannot open '", path.string(), "': ", std::strerror(errno)));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFileAtomically(const std::filesystem::path& path,
                                 std::string_view contents) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) {
      return absl::UnavailableError(absl::StrCat(
          "cannot write '", temp.string(), "': ", std::strerror(errno)));
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out.flush()) {
      return absl::UnavailableError(
          absl::StrCat("short write to '", temp.string(), "'"));
    }
  }
  std::error_code ec;
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    return absl::UnavailableError(absl::StrCat(
        "cannot rename into '", path.string(), "': ", ec.message()));
  }
  return absl::OkStatus();
}

std::string FormatReal(double value) { return absl::StrFormat("%.17g", value); }

namespace {

// Data lines with the header checked against `expected`. Blank lines are
// skipped; a trailing '\r' is tolerated.
absl::StatusOr<std::vector<std::vector<std::string>>> ReadRecords(
    std::string_view text, const std::vector<std::string>& expected,
    absl::string_view what) {
  std::vector<std::vector<std::string>> records;
  bool header_seen = false;
  std::size_t line_number = 0;
  for (absl::string_view line :
       absl::StrSplit(absl::string_view(text.data(), text.size()), '\n')) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> fields = absl::StrSplit(line, ',');
    if (!header_seen) {
      if (fields != expected) {
        return absl::InvalidArgumentError(
            absl::StrCat(what, ": header must be '",
                         absl::StrJoin(expected, ","), "'"));
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != expected.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat(what, " line ", line_number, ": expected ",
                       expected.size(), " fields, got ", fields.size()));
    }
    records.push_back(std::move(fields));
  }
  if (!header_seen) {
    return absl::InvalidArgumentError(absl::StrCat(what, ": missing header"));
  }
  return records;
}

absl::Status LineError(absl::string_view what, std::size_t record,
                       const absl::Status& cause) {
  return absl::InvalidArgumentError(absl::StrCat(
      what, " record ", record + 1, ": ", cause.message()));
}

std::vector<std::string> AttributeNames(const ActionSpace& space) {
  std::vector<std::string> names;
  for (const AttributeDomain& domain : space.attributes()) {
    names.push_back(domain.name);
  }
  return names;
}

std::string Join(const std::vector<std::string>& fields) {
  return absl::StrCat(absl::StrJoin(fields, ","), "\n");
}

std::optional<double> ParseReal(std::string_view field) {
  double value = 0.0;
  if (!absl::SimpleAtod(absl::string_view(field.data(), field.size()), &value)) {
    return std::nullopt;
  }
  return value;
}

std::string OptionalReal(const std::optional<double>& value) {
  return value.has_value() ? FormatReal(*value) : std::string();
}

ordered_json OptionalJson(const std::optional<double>& value) {
  if (!value.has_value()) return nullptr;
  return *value;
}

}  // namespace

ordered_json ActionSpaceToJson(const ActionSpace& space) {
  ordered_json attributes = ordered_json::array();
  for (const AttributeDomain& domain : space.attributes()) {
    attributes.push_back({{"name", domain.name}, {"values", domain.values}});
  }
  return {{"attributes", attributes}};
}

absl::StatusOr<ActionSpace> ActionSpaceFromJson(const json& document) {
  if (!document.is_object() || !document.contains("attributes") ||
      !document.at("attributes").is_array()) {
    return absl::InvalidArgumentError(
        "action space: expected an object with an 'attributes' array");
  }
  for (const auto& [key, value] : document.items()) {
    if (key != "attributes") {
      return absl::InvalidArgumentError(
          absl::StrCat("action space: unknown key '", key, "'"));
    }
  }
  std::vector<AttributeDomain> attributes;
  std::size_t i = 0;
  for (const json& entry : document.at("attributes")) {
    const std::string where = absl::StrCat("action space: attributes[", i++, "]");
    if (!entry.is_object() || !entry.contains("name") ||
        !entry.contains("values") || entry.size() != 2 ||
        !entry.at("name").is_string() || !entry.at("values").is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat(where, ": expected {\"name\": string, \"values\": [...]}"));
    }
    AttributeDomain domain;
    domain.name = entry.at("name").get<std::string>();
    for (const json& value : entry.at("values")) {
      if (!value.is_string()) {
        return absl::InvalidArgumentError(
            absl::StrCat(where, ": values must be strings"));
      }
      domain.values.push_back(value.get<std::string>());
    }
    attributes.push_back(std::move(domain));
  }
  absl::StatusOr<ActionSpace> space = ActionSpace::Create(std::move(attributes));
  if (!space.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("action space: ", space.status().message()));
  }
  return space;
}

std::string SerializeActionSpace(const ActionSpace& space) {
  return ActionSpaceToJson(space).dump(2) + "\n";
}

absl::StatusOr<ActionSpace> ParseActionSpace(std::string_view text) {
  json document = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (document.is_discarded()) {
    return absl::InvalidArgumentError("action space: not valid JSON");
  }
  return ActionSpaceFromJson(document);
}

std::string SerializePreferences(const PreferenceMatrix& matrix) {
  const ActionSpace& space = matrix.space();
  std::vector<std::string> header = {"user_id"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  header.push_back("value");
  header.push_back("source");
  std::string out = Join(header);
  for (UserIndex u = 0; u < matrix.num_users(); ++u) {
    for (ActionIndex a = 0; a < matrix.num_actions(); ++a) {
      const std::optional<PreferenceValue> entry = matrix.Get(u, a);
      if (!entry.has_value()) continue;
      std::vector<std::string> fields = {matrix.user_id(u)};
      for (std::string& name : space.ValueNames(space.ActionAt(a))) {
        fields.push_back(std::move(name));
      }
      fields.push_back(FormatReal(entry->value));
      fields.emplace_back(SourceName(entry->source));
      out += Join(fields);
    }
  }
  return out;
}

absl::StatusOr<PreferenceMatrix> ParsePreferences(std::string_view text,
                                                  const ActionSpace& space) {
  const std::size_t m = space.num_attributes();
  std::vector<std::string> header = {"user_id"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  header.push_back("value");
  header.push_back("source");
  auto records = ReadRecords(text, header, "preferences");
  if (!records.ok()) return records.status();

  PreferenceMatrix matrix(space);
  for (std::size_t r = 0; r < records->size(); ++r) {
    const std::vector<std::string>& fields = (*records)[r];
    if (fields[0].empty()) {
      return LineError("preferences", r, absl::InvalidArgumentError("empty user id"));
    }
    absl::StatusOr<Action> action = space.MakeAction(
        std::span<const std::string>(fields.data() + 1, m));
    if (!action.ok()) return LineError("preferences", r, action.status());
    const std::optional<double> value = ParseReal(fields[m + 1]);
    if (!value.has_value()) {
      return LineError("preferences", r,
                       absl::InvalidArgumentError(absl::StrCat(
                           "bad value '", fields[m + 1], "'")));
    }
    absl::StatusOr<Source> source = ParseSource(fields[m + 2]);
    if (!source.ok()) return LineError("preferences", r, source.status());
    if (absl::Status status = matrix.Set(fields[0], *action, *value, *source);
        !status.ok()) {
      return LineError("preferences", r, status);
    }
  }
  return matrix;
}

std::string SerializeNorms(const ActionSpace& space,
                           const std::vector<const Norm*>& norms) {
  std::vector<std::string> header = {"norm_id", "user_id", "modality"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  for (const char* tail : {"provenance", "epoch", "status", "confidence"}) {
    header.emplace_back(tail);
  }
  std::string out = Join(header);
  for (const Norm* norm : norms) {
    std::vector<std::string> fields = {norm->id, norm->user,
                                       std::string(ModalityName(norm->modality))};
    for (std::size_t i = 0; i < space.num_attributes(); ++i) {
      fields.push_back(norm->pattern.IsWildcard(i)
                           ? std::string("*")
                           : space.attribute(i).values[norm->pattern.entries[i]]);
    }
    fields.emplace_back(ProvenanceName(norm->provenance));
    fields.push_back(absl::StrCat(norm->created_epoch));
    fields.emplace_back(StatusName(norm->status));
    fields.push_back(FormatReal(norm->confidence));
    out += Join(fields);
  }
  return out;
}

absl::StatusOr<std::vector<Norm>> ParseNorms(std::string_view text,
                                             const ActionSpace& space) {
  const std::size_t m = space.num_attributes();
  std::vector<std::string> header = {"norm_id", "user_id", "modality"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  for (const char* tail : {"provenance", "epoch", "status", "confidence"}) {
    header.emplace_back(tail);
  }
  auto records = ReadRecords(text, header, "norms");
  if (!records.ok()) return records.status();

  std::vector<Norm> norms;
  norms.reserve(records->size());
  for (std::size_t r = 0; r < records->size(); ++r) {
    const std::vector<std::string>& fields = (*records)[r];
    Norm norm;
    norm.id = fields[0];
    norm.user = fields[1];
    if (norm.id.empty() || norm.user.empty()) {
      return LineError("norms", r,
                       absl::InvalidArgumentError("empty norm or user id"));
    }
    absl::StatusOr<Modality> modality = ParseModality(fields[2]);
    if (!modality.ok()) return LineError("norms", r, modality.status());
    norm.modality = *modality;
    norm.pattern.entries.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::string& entry = fields[3 + i];
      if (entry == "*") {
        norm.pattern.entries[i] = kWildcard;
        continue;
      }
      std::optional<int> value = space.FindValue(i, entry);
      if (!value.has_value()) {
        return LineError("norms", r,
                         absl::InvalidArgumentError(absl::StrCat(
                             "unknown value '", entry, "' for attribute '",
                             space.attribute(i).name, "'")));
      }
      norm.pattern.entries[i] = *value;
    }
    absl::StatusOr<Provenance> provenance = ParseProvenance(fields[3 + m]);
    if (!provenance.ok()) return LineError("norms", r, provenance.status());
    norm.provenance = *provenance;
    if (!absl::SimpleAtoi(fields[4 + m], &norm.created_epoch) ||
        norm.created_epoch < 0) {
      return LineError("norms", r,
                       absl::InvalidArgumentError(absl::StrCat(
                           "bad epoch '", fields[4 + m], "'")));
    }
    absl::StatusOr<NormStatus> status = ParseStatus(fields[5 + m]);
    if (!status.ok()) return LineError("norms", r, status.status());
    norm.status = *status;
    const std::optional<double> confidence = ParseReal(fields[6 + m]);
    if (!confidence.has_value() || !(*confidence >= 0.0 && *confidence <= 1.0)) {
      return LineError("norms", r,
                       absl::InvalidArgumentError(absl::StrCat(
                           "bad confidence '", fields[6 + m], "'")));
    }
    if (norm.provenance == Provenance::kStated && *confidence != 1.0) {
      return LineError("norms", r,
                       absl::InvalidArgumentError(
                           "stated norms must carry confidence 1"));
    }
    norm.confidence = *confidence;
    norms.push_back(std::move(norm));
  }
  return norms;
}

absl::StatusOr<NormStore> BuildNormStore(const ActionSpace& space,
                                         std::vector<Norm> norms) {
  NormStore store(space);
  for (Norm& norm : norms) {
    if (absl::Status status = store.Restore(std::move(norm)); !status.ok()) {
      return status;
    }
  }
  return store;
}

std::string SerializePredictions(const PreferenceMatrix& matrix,
                                 const std::vector<PredictionRow>& rows) {
  const ActionSpace& space = matrix.space();
  std::vector<std::string> header = {"user_id"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  for (const char* tail : {"value", "confidence", "support"}) {
    header.emplace_back(tail);
  }
  std::string out = Join(header);
  for (const PredictionRow& row : rows) {
    std::vector<std::string> fields = {matrix.user_id(row.user)};
    for (std::string& name : space.ValueNames(space.ActionAt(row.action))) {
      fields.push_back(std::move(name));
    }
    fields.push_back(FormatReal(row.prediction.value));
    fields.push_back(FormatReal(row.prediction.confidence));
    fields.push_back(absl::StrCat(row.prediction.support));
    out += Join(fields);
  }
  return out;
}

std::string SerializeDecisions(const PreferenceMatrix& matrix,
                               const std::vector<DecisionRow>& rows) {
  const ActionSpace& space = matrix.space();
  std::vector<std::string> header = {"user_id"};
  for (std::string& name : AttributeNames(space)) header.push_back(name);
  header.emplace_back("decision");
  header.emplace_back("suggestion");
  std::string out = Join(header);
  for (const DecisionRow& row : rows) {
    std::vector<std::string> fields = {matrix.user_id(row.user)};
    for (std::string& name :
         space.ValueNames(space.ActionAt(row.decision.action))) {
      fields.push_back(std::move(name));
    }
    fields.emplace_back(DecisionName(row.decision.kind));
    fields.emplace_back(row.decision.suggestion.has_value()
                            ? ModalityName(*row.decision.suggestion)
                            : "");
    out += Join(fields);
  }
  return out;
}

std::string SerializeSimilarityTable(const NeighborIndex& index) {
  const PreferenceMatrix& matrix = index.matrix();
  std::string out = Join({"user_a", "user_b", "distance", "similarity", "overlap"});
  for (UserIndex u = 0; u < matrix.num_users(); ++u) {
    for (UserIndex v = u + 1; v < matrix.num_users(); ++v) {
      out += Join({matrix.user_id(u), matrix.user_id(v),
                   FormatReal(index.distance(u, v)),
                   FormatReal(index.similarity(u, v)),
                   absl::StrCat(index.overlap(u, v))});
    }
  }
  return out;
}

std::string SerializeSensitivity(const ActionSpace& space,
                                 const SensitivityModel& model) {
  std::string out = Join({"attribute", "value", "support", "score", "flag"});
  for (std::size_t i = 0; i < space.num_attributes(); ++i) {
    const AttributeDomain& domain = space.attribute(i);
    for (std::size_t v = 0; v < domain.values.size(); ++v) {
      const ValueStats& stats = model.stats(i, static_cast<int>(v));
      out += Join({domain.name, domain.values[v], absl::StrCat(stats.support),
                   OptionalReal(stats.score()),
                   stats.sensitive ? "sensitive" : "-"});
    }
  }
  return out;
}

namespace {

void AddMetrics(ordered_json& out, const Metrics& metrics) {
  out["prediction_mae"] = OptionalJson(metrics.prediction_mae);
  out["norm_accuracy"] = OptionalJson(metrics.norm_accuracy);
  out["obligation_precision"] = OptionalJson(metrics.obligation_precision);
  out["obligation_recall"] = OptionalJson(metrics.obligation_recall);
  out["prohibition_precision"] = OptionalJson(metrics.prohibition_precision);
  out["prohibition_recall"] = OptionalJson(metrics.prohibition_recall);
  out["interaction_rate"] = metrics.interaction_rate;
}

}  // namespace

ordered_json EpochReportToJson(const EpochReport& report) {
  const EpochActivity& a = report.activity;
  ordered_json out;
  out["type"] = "epoch";
  out["epoch"] = report.epoch;
  AddMetrics(out, report.metrics);
  out["predictions"] = a.predictions.size();
  out["decisions"] = a.decisions;
  out["obliged"] = a.obliged;
  out["prohibited"] = a.prohibited;
  out["no_norm"] = a.no_norm;
  out["ask_user"] = a.ask_user;
  out["norms_created"] = a.norms_created;
  out["norms_abolished"] = a.norms_abolished;
  out["norms_generalized"] = a.norms_generalized;
  out["revisions_kept"] = a.revisions_kept;
  out["revisions_replaced"] = a.revisions_replaced;
  out["revisions_asked"] = a.revisions_asked;
  out["drift_events"] = a.drift_events;
  out["observed_known"] = report.observed_known;
  out["active_norms"] = report.active_norms;
  out["sensitive_values"] = report.sensitive_values;
  return out;
}

ordered_json SummaryToJson(const std::vector<EpochReport>& reports) {
  ordered_json out;
  out["type"] = "summary";
  out["epochs"] = reports.size();
  std::size_t decisions = 0;
  std::size_t asks = 0;
  std::size_t created = 0;
  std::size_t abolished = 0;
  std::size_t generalized = 0;
  std::size_t revised = 0;
  for (const EpochReport& report : reports) {
    decisions += report.activity.decisions;
    asks += report.activity.ask_user;
    created += report.activity.norms_created;
    abolished += report.activity.norms_abolished;
    generalized += report.activity.norms_generalized;
    revised += report.activity.revisions_replaced + report.activity.revisions_asked;
  }
  out["total_decisions"] = decisions;
  out["total_ask_user"] = asks;
  out["overall_interaction_rate"] =
      decisions == 0 ? 0.0
                     : static_cast<double>(asks) / static_cast<double>(decisions);
  out["total_norms_created"] = created;
  out["total_norms_abolished"] = abolished;
  out["total_norms_generalized"] = generalized;
  out["total_norms_revised"] = revised;
  ordered_json final_metrics;
  if (!reports.empty()) AddMetrics(final_metrics, reports.back().metrics);
  out["final"] = final_metrics;
  return out;
}

std::string SerializeReports(const std::vector<EpochReport>& reports) {
  std::string out;
  for (const EpochReport& report : reports) {
    out += EpochReportToJson(report).dump();
    out += "\n";
  }
  out += SummaryToJson(reports).dump();
  out += "\n";
  return out;
}

ordered_json NormScoresToJson(const NormScores& scores) {
  ordered_json out;
  out["norm_accuracy"] = OptionalJson(scores.accuracy);
  out["obligation_precision"] = OptionalJson(scores.obligation_precision);
  out["obligation_recall"] = OptionalJson(scores.obligation_recall);
  out["prohibition_precision"] = OptionalJson(scores.prohibition_precision);
  out["prohibition_recall"] = OptionalJson(scores.prohibition_recall);
  return out;
}

}  // namespace normcf

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spectrasort/eval.hpp"
#include "spectrasort/preprocess.hpp"

namespace spectrasort {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// Wrap a report body with the provenance needed to re-run it: command,
/// tool version, seed, the configuration and its hash. Nothing here depends
/// on timing or on the number of worker threads.
nlohmann::json with_provenance(std::string_view command, std::uint64_t seed,
                               const nlohmann::json& config, nlohmann::json body);

/// FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

nlohmann::json to_json(const GateReport& r);
nlohmann::json to_json(const Pipeline& p);
nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const UnambiguousReport& r);
nlohmann::json to_json(const EvaluationReport& r);
nlohmann::json to_json(const CVReport& r);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const LearningCurveReport& r);
nlohmann::json to_json(const GridSearchReport& r);

/// Left-aligned first column, right-aligned others, two-space gutters.
std::string format_table(const std::vector<std::string>& header,
                         const std::vector<std::vector<std::string>>& rows);

std::string text_report(const GateReport& r);
std::string text_report(const CVReport& r);
std::string text_report(const SweepReport& r);
std::string text_report(const LearningCurveReport& r);
std::string text_report(const GridSearchReport& r);
std::string text_report(const EvaluationReport& r);

/// Confusion counts as CSV. With a taxonomy, rows and columns are grouped
/// by cluster (cluster order, then class order), which reproduces the
/// reference alloy confusion layout for the default names.
std::string confusion_csv(const ConfusionMatrix& cm, const AlloyTaxonomy* taxonomy = nullptr);

}  // namespace spectrasort

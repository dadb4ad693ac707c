#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "crosscycle/classify.hpp"
#include "crosscycle/config.hpp"

namespace crosscycle {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kReportSchemaName = "crosscycle.report";

/// One-line headline, e.g. "AtMostOneStable; cycle found; encloses 1 equilibrium".
[[nodiscard]] std::string headline(const FullReport& r);

[[nodiscard]] std::string text_report(const FullReport& r, std::string_view title = {});
[[nodiscard]] std::string text_hypotheses(const HypothesisReport& h);

/// Structured document; `indent` < 0 gives compact output.
[[nodiscard]] std::string json_report(const FullReport& r, std::string_view title = {}, int indent = 2);
[[nodiscard]] std::string json_hypotheses(const HypothesisReport& h, int indent = 2);

/// Checks a document produced by json_report against the schema. On failure
/// returns false and writes the first problem to `why` when given.
bool validate_report_json(std::string_view doc, std::string* why = nullptr);

/// Phase portrait: switching line, x-nullclines, equilibria, star verticals
/// (Liénard input) and every located cycle. Deterministic for fixed input.
[[nodiscard]] std::string svg_portrait(const SystemConfig& cfg, const FullReport& r);

/// CSV header y_B,y_D,T,lambda,dP,k plus one row per cycle.
void write_cycle_summary_csv(std::ostream& out, const std::vector<CycleRecord>& cycles);

}  // namespace crosscycle

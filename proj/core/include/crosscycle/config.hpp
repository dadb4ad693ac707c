#pragma once

// System description files.
//
//   # comments start with '#' or ';'
//   [params]
//   chi = 1
//
//   [right]              # Liénard branch ...
//   f = 2
//   g = 2*x - 2
//   F = 2*x              # optional closed-form antiderivative
//
//   [left]               # ... or matrix entries of z' = A z + b
//   a11 = -4
//   a12 = -1
//   a21 = 5
//   a22 = 0
//   b1  = 0
//   b2  = -5*chi
//
//   [analysis]
//   xmax = 100
//   bracket_cap = 1e4
//
// Both sides must use the same form. Values are expressions over the
// grammar of parse(); matrix entries and params may not mention x.

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "crosscycle/classify.hpp"

namespace crosscycle {

struct SystemConfig {
  std::variant<PwlSpec, LienardSpec> system;
  ParamMap params;
  AnalysisOptions analysis;
  std::string name;

  [[nodiscard]] bool is_pwl() const noexcept { return std::holds_alternative<PwlSpec>(system); }
};

/// Throws ConfigError (with line numbers) on malformed input.
[[nodiscard]] SystemConfig parse_config(std::string_view text, std::string name = "<config>");
[[nodiscard]] SystemConfig load_config(const std::filesystem::path& path);

/// Applies one [analysis] key; returns false for unknown keys.
bool set_analysis_option(AnalysisOptions& opts, std::string_view key, double value);

/// Names accepted by set_analysis_option.
[[nodiscard]] std::vector<std::string> analysis_option_names();

}  // namespace crosscycle

#include "crosscycle/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "crosscycle/error.hpp"

namespace crosscycle {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry, std::less<>>;

const std::set<std::string, std::less<>> kMatrixKeys{"a11", "a12", "a21", "a22", "b1", "b2"};
const std::set<std::string, std::less<>> kBranchKeys{"f", "g", "F"};

Expr parse_at(const Entry& e, const std::set<std::string>& known) {
  try {
    return parse(e.value, known);
  } catch (const SyntaxError& err) {
    throw ConfigError(e.line, std::string("column ") + std::to_string(err.offset() + 1) + ": " + err.what());
  } catch (const UnknownIdentifier& err) {
    throw ConfigError(e.line, err.what());
  }
}

double constant_at(const Entry& e, const std::set<std::string>& known, const ParamMap& params) {
  const Expr ex = parse_at(e, known);
  if (ex.depends_on_x()) throw ConfigError(e.line, "value may not depend on x");
  try {
    return ex.eval(0.0, params);
  } catch (const Error& err) {
    throw ConfigError(e.line, err.what());
  }
}

}  // namespace

std::vector<std::string> analysis_option_names() {
  return {"xmax",     "bracket_cap", "scan_start", "fixed_point_tol", "neutral_tol", "rtol",        "atol",
          "fine_rtol", "fine_atol",  "time_cap",   "state_cap",       "event_tol",   "tangency_tol", "h_max"};
}

bool set_analysis_option(AnalysisOptions& o, std::string_view key, double v) {
  auto both = [&](double FlowOptions::*m) {
    o.finder.scan_flow.*m = v;
    o.finder.fine_flow.*m = v;
  };
  if (key == "xmax") o.xmax = v;
  else if (key == "bracket_cap") o.finder.bracket_cap = v;
  else if (key == "scan_start") o.finder.scan_start = v;
  else if (key == "fixed_point_tol") o.finder.fixed_point_tol = v;
  else if (key == "neutral_tol") o.finder.neutral_tol = v;
  else if (key == "rtol") o.finder.scan_flow.rtol = v;
  else if (key == "atol") o.finder.scan_flow.atol = v;
  else if (key == "fine_rtol") o.finder.fine_flow.rtol = v;
  else if (key == "fine_atol") o.finder.fine_flow.atol = v;
  else if (key == "time_cap") both(&FlowOptions::time_cap);
  else if (key == "state_cap") both(&FlowOptions::state_cap);
  else if (key == "event_tol") both(&FlowOptions::event_tol);
  else if (key == "tangency_tol") both(&FlowOptions::tangency_tol);
  else if (key == "h_max") both(&FlowOptions::h_max);
  else return false;
  return true;
}

SystemConfig parse_config(std::string_view text, std::string name) {
  std::map<std::string, Section, std::less<>> sections;
  std::map<std::string, std::size_t, std::less<>> section_line;
  std::string current;
  std::size_t lineno = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string_view line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(lineno, "unterminated section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current != "params" && current != "right" && current != "left" && current != "analysis") {
        throw ConfigError(lineno, "unknown section [" + current + "]");
      }
      if (sections.contains(current)) throw ConfigError(lineno, "duplicate section [" + current + "]");
      sections[current];
      section_line[current] = lineno;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(lineno, "expected key = value");
    if (current.empty()) throw ConfigError(lineno, "key outside of any section");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(lineno, "empty key");
    if (value.empty()) throw ConfigError(lineno, "empty value for '" + key + "'");
    Section& sec = sections[current];
    if (sec.contains(key)) throw ConfigError(lineno, "duplicate key '" + key + "'");
    sec[key] = {value, lineno};
  }

  for (const char* need : {"right", "left"}) {
    if (!sections.contains(need)) throw ConfigError(0, std::string("missing section [") + need + "]");
  }

  SystemConfig cfg{PwlSpec{}, {}, {}, std::move(name)};

  std::set<std::string> known;
  if (auto it = sections.find("params"); it != sections.end()) {
    // Later params may refer to earlier ones, in file order.
    std::vector<std::pair<std::string, const Entry*>> ordered;
    for (const auto& [k, e] : it->second) ordered.emplace_back(k, &e);
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) { return a.second->line < b.second->line; });
    for (const auto& [k, e] : ordered) {
      if (k == "x") throw ConfigError(e->line, "'x' is reserved");
      cfg.params[k] = constant_at(*e, known, cfg.params);
      known.insert(k);
    }
  }

  if (auto it = sections.find("analysis"); it != sections.end()) {
    for (const auto& [k, e] : it->second) {
      const double v = constant_at(e, known, cfg.params);
      if (!set_analysis_option(cfg.analysis, k, v)) throw ConfigError(e.line, "unknown analysis option '" + k + "'");
    }
  }

  auto form_of = [&](const std::string& side) {
    const Section& sec = sections[side];
    bool matrix = false, branch = false;
    for (const auto& [k, e] : sec) {
      if (kMatrixKeys.contains(k)) matrix = true;
      else if (kBranchKeys.contains(k)) branch = true;
      else throw ConfigError(e.line, "unknown key '" + k + "' in [" + side + "]");
    }
    if (matrix && branch) throw ConfigError(section_line[side], "[" + side + "] mixes matrix entries and f/g expressions");
    if (!matrix && !branch) throw ConfigError(section_line[side], "[" + side + "] is empty");
    return matrix;
  };
  const bool right_matrix = form_of("right");
  const bool left_matrix = form_of("left");
  if (right_matrix != left_matrix) {
    throw ConfigError(section_line["left"], "[right] and [left] must use the same form");
  }

  if (right_matrix) {
    auto side = [&](const std::string& s, Mat2& A, Vec2& b) {
      const Section& sec = sections[s];
      for (const auto& k : kMatrixKeys) {
        if (!sec.contains(k)) throw ConfigError(section_line[s], "[" + s + "] missing '" + k + "'");
      }
      auto v = [&](const char* k) { return constant_at(sec.find(k)->second, known, cfg.params); };
      A = {v("a11"), v("a12"), v("a21"), v("a22")};
      b = {v("b1"), v("b2")};
    };
    PwlSpec p;
    side("right", p.A_plus, p.b_plus);
    side("left", p.A_minus, p.b_minus);
    cfg.system = p;
    return cfg;
  }

  auto branch = [&](const std::string& s) {
    const Section& sec = sections[s];
    for (const char* k : {"f", "g"}) {
      if (!sec.contains(k)) throw ConfigError(section_line[s], "[" + s + "] missing '" + k + "'");
    }
    LienardSpec::Branch b{parse_at(sec.find("f")->second, known), parse_at(sec.find("g")->second, known), std::nullopt};
    if (auto F = sec.find("F"); F != sec.end()) b.F = parse_at(F->second, known);
    return b;
  };
  try {
    cfg.system = LienardSpec(branch("right"), branch("left"), cfg.params);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(section_line["right"], e.what());
  }
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace crosscycle

// crosscycle: command-line front end.
//
// Exit codes: 0 success, 1 input or parse error (or failed reproduction
// check), 2 degenerate system, 3 no cycle found.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "crosscycle/classify.hpp"
#include "crosscycle/config.hpp"
#include "crosscycle/error.hpp"
#include "crosscycle/example_system.hpp"
#include "crosscycle/report.hpp"

namespace fs = std::filesystem;
using namespace crosscycle;

namespace {

enum Exit { kOk = 0, kInputError = 1, kDegenerate = 2, kNoCycle = 3 };

fs::path resolve_config(const std::string& arg) {
  fs::path p(arg);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* dir = std::getenv("CROSSCYCLE_CONFIG_DIR")) {
    fs::path alt = fs::path(dir) / p;
    if (fs::exists(alt)) return alt;
    if (!p.has_extension() && fs::exists(alt.replace_extension(".ini"))) return alt;
  }
  return p;
}

// --rtol, --bracket-cap, ... one flag per analysis option.
struct TolFlags {
  std::map<std::string, double> values;

  void attach(CLI::App* app) {
    for (const std::string& name : analysis_option_names()) {
      std::string flag = "--" + name;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option_function<double>(flag, [this, name](double v) { values[name] = v; }, "override [analysis] " + name);
    }
  }
  void apply(AnalysisOptions& o) const {
    for (const auto& [k, v] : values) set_analysis_option(o, k, v);
  }
};

FullReport run_full(const SystemConfig& cfg) {
  if (const auto* p = std::get_if<PwlSpec>(&cfg.system)) return full_report(*p, cfg.analysis);
  return full_report(std::get<LienardSpec>(cfg.system), cfg.analysis);
}

SystemConfig load(const std::string& path, const TolFlags& tol) {
  SystemConfig cfg = load_config(resolve_config(path));
  tol.apply(cfg.analysis);
  return cfg;
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
  if (!out) {
    std::cerr << "error: cannot write " << path << '\n';
    return false;
  }
  return true;
}

int cmd_classify(const std::string& path, const TolFlags& tol, const std::string& format, const std::string& json_out) {
  const SystemConfig cfg = load(path, tol);
  const FullReport r = run_full(cfg);
  if (format != "json") std::cout << text_report(r, cfg.name);
  if (format != "text") {
    if (format == "both") std::cout << '\n';
    std::cout << json_report(r, cfg.name) << '\n';
  }
  if (!json_out.empty() && !write_file(json_out, json_report(r, cfg.name) + "\n")) return kInputError;
  return kOk;
}

int cmd_hypotheses(const std::string& path, const TolFlags& tol, bool as_json) {
  const SystemConfig cfg = load(path, tol);
  LienardSpec sys = cfg.is_pwl() ? [&] {
    const PwlSpec& p = std::get<PwlSpec>(cfg.system);
    return as_lienard(canonicalize(p));
  }()
                                 : std::get<LienardSpec>(cfg.system);
  const HypothesisReport h = hypothesis_report(sys, cfg.analysis.xmax);
  std::cout << (as_json ? json_hypotheses(h) + "\n" : text_hypotheses(h));
  return kOk;
}

int cmd_find_cycle(const std::string& path, const TolFlags& tol, const std::string& csv, const std::string& svg,
                   const std::string& summary) {
  const SystemConfig cfg = load(path, tol);
  const FullReport r = run_full(cfg);
  std::cout << headline(r) << '\n';
  if (r.refused) return kOk;
  write_cycle_summary_csv(std::cout, r.search.cycles);
  if (!svg.empty() && !write_file(svg, svg_portrait(cfg, r))) return kInputError;
  if (!summary.empty()) {
    std::ostringstream os;
    write_cycle_summary_csv(os, r.search.cycles);
    if (!write_file(summary, os.str())) return kInputError;
  }
  if (r.search.cycles.empty()) {
    std::cerr << "no crossing cycle found\n";
    return kNoCycle;
  }
  if (!csv.empty()) {
    std::ostringstream os;
    write_cycle_csv(os, r.search.cycles.front());
    for (std::size_t i = 1; i < r.search.cycles.size(); ++i) {
      os << '\n';
      write_cycle_csv(os, r.search.cycles[i]);
    }
    if (!write_file(csv, os.str())) return kInputError;
  }
  return kOk;
}

// t^ in (pi, 2pi) with exp(-t) - cos t + sin t = 0; P_R(0) = -2 exp(t^) sin t^.
double example_pr0() {
  double lo = std::numbers::pi + 1e-9, hi = 2 * std::numbers::pi - 1e-9;
  auto h = [](double t) { return std::exp(-t) - std::cos(t) + std::sin(t); };
  const bool lo_neg = h(lo) < 0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((h(mid) < 0) == lo_neg ? lo : hi) = mid;
  }
  const double t = 0.5 * (lo + hi);
  return -2.0 * std::exp(t) * std::sin(t);
}

int cmd_reproduce(const std::vector<double>& chis) {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "  PASS  " : "  FAIL  ") << what << '\n';
    if (!ok) ++failures;
  };
  for (double chi : chis) {
    const int expected_k = chi > 0 ? 1 : chi == 0 ? 2 : 3;
    std::cout << "chi = " << chi << '\n';
    const auto t0 = std::chrono::steady_clock::now();
    const FullReport r = full_report(example_pwl(chi));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "  " << headline(r) << '\n';
    check(r.verdict.kind == VerdictKind::AtMostOneStable, "verdict AtMostOneStable");
    check(r.search.cycles.size() == 1, "exactly one crossing cycle");
    if (r.search.cycles.size() == 1) {
      const CycleRecord& c = r.search.cycles.front();
      check(c.enclosed.size() == static_cast<std::size_t>(expected_k),
            "encloses " + std::to_string(expected_k) + " equilibria (found " + std::to_string(c.enclosed.size()) + ")");
      check(c.lambda_gamma < 0, "lambda_Gamma < 0");
      check(std::fabs(c.map_derivative - std::exp(c.lambda_gamma)) <= 0.01 * std::exp(c.lambda_gamma),
            "P'(y*) = exp(lambda_Gamma) within 1%");
    }
    const FullReport rl = full_report(example_system(chi));
    check(rl.verdict.kind == VerdictKind::AtMostOneStable, "Lienard form verdict AtMostOneStable");
    if (rl.search.cycles.size() == 1) {
      const CycleRecord& c = rl.search.cycles.front();
      check(std::fabs(c.area_plus - c.area_minus) <= 1e-4 * (c.area_plus + c.area_minus), "area identity");
    }
    const double pr0 = half_map_right(example_system(chi), 0.0).value;
    const double oracle = example_pr0();
    check(std::fabs(pr0 - oracle) <= 1e-6 * oracle, "P_R(0) matches parametric value " + std::to_string(oracle));
    check(secs < 5.0, "runtime " + std::to_string(secs) + " s < 5 s");
  }
  std::cout << (failures ? "FAILED checks: " + std::to_string(failures) : std::string("all checks passed")) << '\n';
  return failures ? kInputError : kOk;
}

int cmd_sweep(const std::string& path, const TolFlags& tol, const std::string& param, double from, double to, int steps) {
  SystemConfig base = load(path, tol);
  const std::string text = [&] {
    std::ifstream in(resolve_config(path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }();
  if (!base.params.contains(param)) throw ConfigError(0, "parameter '" + param + "' is not defined in [params]");
  std::cout << param << ",verdict,cycles,k,y_D,lambda\n";
  for (int i = 0; i < steps; ++i) {
    const double v = steps == 1 ? from : from + (to - from) * i / (steps - 1);
    // Re-parse with the parameter overridden so derived params follow it.
    std::string patched;
    std::istringstream in(text);
    bool in_params = false;
    for (std::string line; std::getline(in, line);) {
      const auto s = line.find_first_not_of(" \t");
      if (s != std::string::npos && line[s] == '[') in_params = line.find("[params]") != std::string::npos;
      const auto eq = line.find('=');
      if (in_params && eq != std::string::npos) {
        std::string key = line.substr(0, eq);
        key.erase(0, key.find_first_not_of(" \t"));
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key == param) {
          char buf[64];
          std::snprintf(buf, sizeof buf, "%.17g", v);
          line = param + " = " + buf;
        }
      }
      patched += line + '\n';
    }
    SystemConfig cfg = parse_config(patched, base.name);
    tol.apply(cfg.analysis);
    try {
      const FullReport r = run_full(cfg);
      std::cout << v << ',' << to_string(r.verdict.kind) << ',' << r.search.cycles.size();
      if (!r.search.cycles.empty()) {
        const CycleRecord& c = r.search.cycles.front();
        std::cout << ',' << c.enclosed.size() << ',' << c.y_D << ',' << c.lambda_gamma;
      } else {
        std::cout << ",,,";
      }
      std::cout << '\n';
    } catch (const DegenerateSystem& e) {
      std::cout << v << ",Degenerate,0,,,\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crossing limit cycles of planar switched Lienard and piecewise-linear systems"};
  app.require_subcommand(1);
  TolFlags tol;

  std::string config, format = "both", json_out, csv, svg, summary, param;
  bool json_only = false;
  std::vector<double> chis;
  double from = 0, to = 1;
  int steps = 11;

  auto* classify = app.add_subcommand("classify", "verdict, hypotheses and cycle search");
  classify->add_option("config", config, "system description file")->required();
  classify->add_option("--format", format, "text, json or both")->check(CLI::IsMember({"text", "json", "both"}));
  classify->add_option("--json-out", json_out, "also write the structured report here");
  tol.attach(classify);

  auto* hyp = app.add_subcommand("hypotheses", "dump the H1-H5 report");
  hyp->add_option("config", config, "system description file")->required();
  hyp->add_flag("--json", json_only, "print JSON instead of text");
  tol.attach(hyp);

  auto* find = app.add_subcommand("find-cycle", "locate crossing cycles; CSV and SVG output");
  find->add_option("config", config, "system description file")->required();
  find->add_option("--csv", csv, "cycle polyline CSV");
  find->add_option("--svg", svg, "phase portrait SVG");
  find->add_option("--summary", summary, "cycle summary CSV");
  tol.attach(find);

  auto* repro = app.add_subcommand("reproduce-example", "run the worked example and its checks");
  repro->add_option("--chi", chis, "chi values (default 1 0 -0.01)");

  auto* sweep = app.add_subcommand("sweep", "classify over a range of one parameter");
  sweep->add_option("config", config, "system description file")->required();
  sweep->add_option("--param", param, "name of a [params] entry")->required();
  sweep->add_option("--from", from, "first value");
  sweep->add_option("--to", to, "last value");
  sweep->add_option("--steps", steps, "number of values")->check(CLI::PositiveNumber);
  tol.attach(sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*classify) return cmd_classify(config, tol, format, json_out);
    if (*hyp) return cmd_hypotheses(config, tol, json_only);
    if (*find) return cmd_find_cycle(config, tol, csv, svg, summary);
    if (*repro) return cmd_reproduce(chis.empty() ? std::vector<double>{1.0, 0.0, kDefaultEpsilon} : chis);
    if (*sweep) return cmd_sweep(config, tol, param, from, to, steps);
  } catch (const DegenerateSystem& e) {
    std::cerr << "degenerate system: " << e.what() << '\n';
    return kDegenerate;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}

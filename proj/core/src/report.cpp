#include "crosscycle/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace crosscycle {

using nlohmann::json;

namespace {

std::string fmt(double v, int prec = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string plural(std::size_t n, const char* one, const char* many) {
  return std::to_string(n) + " " + (n == 1 ? one : many);
}

json evidence_json(const Evidence& e) {
  json values = json::object();
  for (const auto& [k, v] : e.values) values[k] = num(v);
  return {{"condition", e.condition}, {"values", values}, {"note", e.note}};
}

json equilibrium_json(const EquilibriumRecord& r) {
  return {{"x", num(r.location.x)},
          {"y", num(r.location.y)},
          {"kind", std::string(to_string(r.kind))},
          {"type", std::string(to_string(r.type))},
          {"stability", std::string(to_string(r.stability))}};
}

json hypotheses_json(const HypothesisReport& h) {
  json star = json::array();
  for (const StarSolution& s : h.star.roots) star.push_back({{"x_minus", num(s.x_minus)}, {"x_plus", num(s.x_plus)}, {"p", num(s.p)}});
  auto check = [](const CheckResult& c) { return json{{"checked", c.checked}, {"holds", c.holds}, {"margin", num(c.margin)}}; };
  return {{"xmax", num(h.xmax)},
          {"pmax", num(h.pmax)},
          {"h1", {{"holds", h.h1.holds}, {"x_e", num(h.h1.x_e)}}},
          {"h2", {{"holds", h.h2}}},
          {"h3",
           {{"holds", h.h3.holds},
            {"converged", h.h3.converged},
            {"equality_case", h.h3.equality_case},
            {"eta_plus", num(h.h3.eta_plus)},
            {"eta_minus", num(h.h3.eta_minus)}}},
          {"h4", check(h.h4)},
          {"h5", check(h.h5)},
          {"star_solutions", star},
          {"unique_star", h.unique_star},
          {"lambda_identically_zero", h.star.lambda_identically_zero},
          {"notes", h.notes}};
}

json cycle_json(const CycleRecord& c) {
  return {{"y_B", num(c.y_B)},
          {"y_D", num(c.y_D)},
          {"period", num(c.period)},
          {"right_time", num(c.right_time)},
          {"left_time", num(c.left_time)},
          {"lambda_gamma", num(c.lambda_gamma)},
          {"map_derivative", num(c.map_derivative)},
          {"fixed_point_residual", num(c.fixed_point_residual)},
          {"area_plus", num(c.area_plus)},
          {"area_minus", num(c.area_minus)},
          {"x_min", num(c.x_min)},
          {"x_max", num(c.x_max)},
          {"enclosed", c.enclosed.size()}};
}

}  // namespace

std::string headline(const FullReport& r) {
  std::string s(to_string(r.verdict.kind));
  if (r.refused) return s + "; " + r.verdict.reason;
  if (!r.search_run) return s + "; no cycle search run";
  if (r.search.annulus_band) {
    s += "; periodic annulus found";
  } else if (r.search.cycles.empty()) {
    s += "; no cycle found";
  } else {
    for (const CycleRecord& c : r.search.cycles) {
      s += "; cycle found; encloses " + plural(c.enclosed.size(), "equilibrium", "equilibria");
    }
  }
  return s;
}

std::string text_hypotheses(const HypothesisReport& h) {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "holds" : "fails"; };
  os << "hypotheses (xmax=" << fmt(h.xmax) << ", pmax=" << fmt(h.pmax) << ")\n";
  os << "  H1 " << yn(h.h1.holds) << "  x_e=" << fmt(h.h1.x_e) << '\n';
  os << "  H2 " << yn(h.h2) << '\n';
  os << "  H3 " << yn(h.h3.holds) << "  eta+=" << fmt(h.h3.eta_plus) << " eta-=" << fmt(h.h3.eta_minus)
     << (h.h3.converged ? "" : " (limits did not converge)") << (h.h3.equality_case ? " (equality case)" : "") << '\n';
  auto chk = [&](const char* n, const CheckResult& c) {
    os << "  " << n << ' ' << (c.checked ? yn(c.holds) : "not checked");
    if (c.checked) os << "  margin=" << fmt(c.margin, 6);
    os << '\n';
  };
  chk("H4", h.h4);
  chk("H5", h.h5);
  if (h.star.lambda_identically_zero) {
    os << "  Lambda vanishes on the scanned range (sup=" << fmt(h.star.lambda_sup, 3) << ")\n";
  } else {
    os << "  star solutions: " << h.star.roots.size() << (h.unique_star ? " (unique)" : "") << '\n';
    for (const StarSolution& s : h.star.roots) {
      os << "    x-*=" << fmt(s.x_minus) << "  x+*=" << fmt(s.x_plus) << "  p*=" << fmt(s.p) << '\n';
    }
  }
  for (const std::string& n : h.notes) os << "  note: " << n << '\n';
  return os.str();
}

std::string text_report(const FullReport& r, std::string_view title) {
  std::ostringstream os;
  if (!title.empty()) os << title << '\n';
  os << headline(r) << "\n\n";
  os << "verdict: " << to_string(r.verdict.kind) << "\n  reason: " << r.verdict.reason << '\n';
  for (const Evidence& e : r.verdict.evidence) {
    os << "  evidence: " << e.condition;
    for (const auto& [k, v] : e.values) os << "  " << k << '=' << fmt(v, 8);
    if (!e.note.empty()) os << "\n    " << e.note;
    os << '\n';
  }
  if (r.canonical) {
    const CanonicalParams& c = *r.canonical;
    os << "\ncanonical: tR=" << fmt(c.tR) << " tL=" << fmt(c.tL) << " dR=" << fmt(c.dR) << " dL=" << fmt(c.dL)
       << " aR=" << fmt(c.aR) << " aL=" << fmt(c.aL) << " b=" << fmt(c.b) << '\n';
  }
  os << "\nequilibria: " << r.census.equilibria.size() << '\n';
  for (const EquilibriumRecord& e : r.census.equilibria) {
    os << "  (" << fmt(e.location.x, 8) << ", " << fmt(e.location.y, 8) << ") " << to_string(e.kind) << ' '
       << to_string(e.type) << ' ' << to_string(e.stability) << '\n';
  }
  for (const EquilibriumRecord& e : r.census.virtual_equilibria) {
    os << "  virtual (" << fmt(e.location.x, 8) << ", " << fmt(e.location.y, 8) << ") " << to_string(e.kind) << '\n';
  }
  if (r.hypotheses) os << '\n' << text_hypotheses(*r.hypotheses);
  if (r.search_run) {
    os << "\ncycles: " << r.search.cycles.size() << '\n';
    for (const CycleRecord& c : r.search.cycles) {
      os << "  y_D=" << fmt(c.y_D, 12) << " y_B=" << fmt(c.y_B, 12) << " T=" << fmt(c.period, 8)
         << " lambda=" << fmt(c.lambda_gamma, 8) << " dP=" << fmt(c.map_derivative, 8)
         << " k=" << c.enclosed.size() << '\n';
    }
    if (r.search.annulus_band) {
      os << "  annulus band: " << r.search.neutral.size() << " neutral scan points\n";
    }
  }
  for (const std::string& c : r.contradictions) os << "CONTRADICTION: " << c << '\n';
  return os.str();
}

std::string json_hypotheses(const HypothesisReport& h, int indent) {
  json doc{{"schema", "crosscycle.hypotheses"}, {"version", kReportSchemaVersion}, {"hypotheses", hypotheses_json(h)}};
  return doc.dump(indent);
}

std::string json_report(const FullReport& r, std::string_view title, int indent) {
  json ev = json::array();
  for (const Evidence& e : r.verdict.evidence) ev.push_back(evidence_json(e));
  json eq = json::array(), veq = json::array();
  for (const auto& e : r.census.equilibria) eq.push_back(equilibrium_json(e));
  for (const auto& e : r.census.virtual_equilibria) veq.push_back(equilibrium_json(e));
  json cycles = json::array();
  for (const auto& c : r.search.cycles) cycles.push_back(cycle_json(c));
  json neutral = json::array();
  for (double y : r.search.neutral) neutral.push_back(num(y));

  json doc;
  doc["schema"] = kReportSchemaName;
  doc["version"] = kReportSchemaVersion;
  doc["title"] = std::string(title);
  doc["headline"] = headline(r);
  doc["verdict"] = {{"kind", std::string(to_string(r.verdict.kind))}, {"reason", r.verdict.reason}, {"evidence", ev}};
  if (r.canonical) {
    const CanonicalParams& c = *r.canonical;
    doc["canonical"] = {{"tR", num(c.tR)}, {"tL", num(c.tL)}, {"dR", num(c.dR)}, {"dL", num(c.dL)},
                        {"aR", num(c.aR)}, {"aL", num(c.aL)}, {"b", num(c.b)}};
  } else {
    doc["canonical"] = nullptr;
  }
  doc["hypotheses"] = r.hypotheses ? hypotheses_json(*r.hypotheses) : json(nullptr);
  doc["census"] = {{"equilibria", eq}, {"virtual", veq}};
  doc["search"] = {{"run", r.search_run}, {"annulus_band", r.search.annulus_band}, {"neutral", neutral}};
  doc["cycles"] = cycles;
  doc["refused"] = r.refused;
  doc["contradictions"] = r.contradictions;
  return doc.dump(indent);
}

namespace {

class Checker {
 public:
  bool fail(std::string msg) {
    if (why_.empty()) why_ = std::move(msg);
    return false;
  }
  bool has(const json& o, const char* key, json::value_t t, const std::string& where) {
    if (!o.is_object() || !o.contains(key)) return fail(where + ": missing '" + key + "'");
    const json& v = o.at(key);
    if (t == json::value_t::number_float) {
      if (!v.is_number() && !v.is_null()) return fail(where + "." + key + ": expected number");
    } else if (t == json::value_t::number_unsigned) {
      if (!v.is_number_integer() || v.get<long long>() < 0) return fail(where + "." + key + ": expected count");
    } else if (v.type() != t) {
      return fail(where + "." + key + ": wrong type");
    }
    return true;
  }
  std::string why_;
};

}  // namespace

bool validate_report_json(std::string_view doc, std::string* why) {
  using vt = json::value_t;
  Checker ck;
  auto done = [&](bool ok) {
    if (!ok && why) *why = ck.why_;
    return ok;
  };
  json j = json::parse(doc, nullptr, false);
  if (j.is_discarded()) return done(ck.fail("not valid JSON"));
  if (!ck.has(j, "schema", vt::string, "$") || j["schema"] != kReportSchemaName) return done(ck.fail("$.schema mismatch"));
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != kReportSchemaVersion) {
    return done(ck.fail("$.version mismatch"));
  }
  bool ok = ck.has(j, "title", vt::string, "$") && ck.has(j, "headline", vt::string, "$") &&
            ck.has(j, "verdict", vt::object, "$") && ck.has(j, "census", vt::object, "$") &&
            ck.has(j, "search", vt::object, "$") && ck.has(j, "cycles", vt::array, "$") &&
            ck.has(j, "refused", vt::boolean, "$") && ck.has(j, "contradictions", vt::array, "$");
  if (!ok) return done(false);

  const json& v = j["verdict"];
  if (!ck.has(v, "kind", vt::string, "$.verdict") || !ck.has(v, "reason", vt::string, "$.verdict") ||
      !ck.has(v, "evidence", vt::array, "$.verdict")) {
    return done(false);
  }
  static const std::vector<std::string> kinds{"NoCrossingCycles", "AtMostOne", "AtMostOneStable",
                                              "AtMostOneUnstable", "Annulus", "Inconclusive"};
  if (std::find(kinds.begin(), kinds.end(), v["kind"].get<std::string>()) == kinds.end()) {
    return done(ck.fail("$.verdict.kind: unknown value"));
  }
  for (const json& e : v["evidence"]) {
    if (!ck.has(e, "condition", vt::string, "$.verdict.evidence[]") || !ck.has(e, "values", vt::object, "$.verdict.evidence[]") ||
        !ck.has(e, "note", vt::string, "$.verdict.evidence[]")) {
      return done(false);
    }
    for (const auto& [k, x] : e["values"].items()) {
      if (!x.is_number() && !x.is_null()) return done(ck.fail("$.verdict.evidence[].values." + k + ": expected number"));
    }
  }

  if (!j["canonical"].is_null()) {
    for (const char* k : {"tR", "tL", "dR", "dL", "aR", "aL", "b"}) {
      if (!ck.has(j["canonical"], k, vt::number_float, "$.canonical")) return done(false);
    }
  }
  if (!j["hypotheses"].is_null()) {
    const json& h = j["hypotheses"];
    for (const char* k : {"h1", "h2", "h3", "h4", "h5"}) {
      if (!ck.has(h, k, vt::object, "$.hypotheses") || !ck.has(h[k], "holds", vt::boolean, std::string("$.hypotheses.") + k)) {
        return done(false);
      }
    }
    if (!ck.has(h, "star_solutions", vt::array, "$.hypotheses") || !ck.has(h, "unique_star", vt::boolean, "$.hypotheses")) {
      return done(false);
    }
  }

  const json& c = j["census"];
  if (!ck.has(c, "equilibria", vt::array, "$.census") || !ck.has(c, "virtual", vt::array, "$.census")) return done(false);
  for (const char* list : {"equilibria", "virtual"}) {
    for (const json& e : c[list]) {
      if (!ck.has(e, "x", vt::number_float, "$.census") || !ck.has(e, "y", vt::number_float, "$.census") ||
          !ck.has(e, "kind", vt::string, "$.census") || !ck.has(e, "type", vt::string, "$.census") ||
          !ck.has(e, "stability", vt::string, "$.census")) {
        return done(false);
      }
    }
  }

  const json& s = j["search"];
  if (!ck.has(s, "run", vt::boolean, "$.search") || !ck.has(s, "annulus_band", vt::boolean, "$.search") ||
      !ck.has(s, "neutral", vt::array, "$.search")) {
    return done(false);
  }
  for (const json& cy : j["cycles"]) {
    for (const char* k : {"y_B", "y_D", "period", "right_time", "left_time", "lambda_gamma", "map_derivative",
                          "fixed_point_residual", "area_plus", "area_minus", "x_min", "x_max"}) {
      if (!ck.has(cy, k, vt::number_float, "$.cycles[]")) return done(false);
    }
    if (!ck.has(cy, "enclosed", vt::number_unsigned, "$.cycles[]")) return done(false);
  }
  for (const json& m : j["contradictions"]) {
    if (!m.is_string()) return done(ck.fail("$.contradictions[]: expected string"));
  }
  return done(true);
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct View {
  double x0, x1, y0, y1;
  double w = 800, h = 600, pad = 40;
  [[nodiscard]] double sx(double x) const { return pad + (x - x0) / (x1 - x0) * (w - 2 * pad); }
  [[nodiscard]] double sy(double y) const { return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad); }
};

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

std::string svg_portrait(const SystemConfig& cfg, const FullReport& r) {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
  auto grow = [&](Vec2 p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return;
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  };
  for (const auto& e : r.census.equilibria) grow(e.location);
  for (const auto& c : r.search.cycles) {
    for (const Vec2& p : c.polyline) grow(p);
  }
  const double mx = 0.08 * (x1 - x0), my = 0.08 * (y1 - y0);
  View v{x0 - mx, x1 + mx, y0 - my, y1 + my};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << v.w << "\" height=\"" << v.h << "\" viewBox=\"0 0 "
     << v.w << ' ' << v.h << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << v.pad << "\" y=\"" << v.pad << "\" width=\"" << v.w - 2 * v.pad
     << "\" height=\"" << v.h - 2 * v.pad << "\"/></clipPath></defs>\n";
  os << "<line x1=\"" << v.pad << "\" y1=\"" << f3(v.sy(0)) << "\" x2=\"" << v.w - v.pad << "\" y2=\"" << f3(v.sy(0))
     << "\" stroke=\"#bbb\"/>\n";
  os << "<line x1=\"" << f3(v.sx(0)) << "\" y1=\"" << v.pad << "\" x2=\"" << f3(v.sx(0)) << "\" y2=\"" << v.h - v.pad
     << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

  // x-nullclines: y = F(x) for Liénard input, a11 x + a12 y + b1 = 0 otherwise.
  os << "<g clip-path=\"url(#plot)\">\n";
  for (Side s : {Side::Right, Side::Left}) {
    os << "<polyline fill=\"none\" stroke=\"#2a7\" stroke-dasharray=\"6 3\" points=\"";
    const double lim = s == Side::Right ? v.x1 : v.x0;
    for (int i = 0; i <= 200; ++i) {
      const double x = lim * i / 200.0;
      double y = 0.0;
      if (const auto* sys = std::get_if<LienardSpec>(&cfg.system)) {
        y = sys->F(s, x);
      } else {
        const PwlSpec& p = std::get<PwlSpec>(cfg.system);
        const Mat2& A = s == Side::Right ? p.A_plus : p.A_minus;
        const Vec2 b = s == Side::Right ? p.b_plus : p.b_minus;
        y = -(A.a11 * x + b.x) / A.a12;
      }
      if (std::isfinite(y)) os << f3(v.sx(x)) << ',' << f3(v.sy(std::clamp(y, v.y0 - 10 * (v.y1 - v.y0), v.y1 + 10 * (v.y1 - v.y0)))) << ' ';
    }
    os << "\"/>\n";
  }
  if (!cfg.is_pwl() && r.hypotheses) {
    for (const StarSolution& st : r.hypotheses->star.roots) {
      for (double x : {st.x_minus, st.x_plus}) {
        os << "<line x1=\"" << f3(v.sx(x)) << "\" y1=\"" << v.pad << "\" x2=\"" << f3(v.sx(x)) << "\" y2=\"" << v.h - v.pad
           << "\" stroke=\"#c60\" stroke-dasharray=\"2 3\"/>\n";
      }
    }
  }
  for (const CycleRecord& c : r.search.cycles) {
    os << "<polygon fill=\"none\" stroke=\"#1f4fbf\" stroke-width=\"2\" points=\"";
    for (const Vec2& p : c.polyline) os << f3(v.sx(p.x)) << ',' << f3(v.sy(p.y)) << ' ';
    os << "\"/>\n";
  }
  os << "</g>\n";
  for (const auto& e : r.census.equilibria) {
    os << "<circle cx=\"" << f3(v.sx(e.location.x)) << "\" cy=\"" << f3(v.sy(e.location.y))
       << "\" r=\"4\" fill=\"#b00\"/>\n";
  }
  for (const auto& e : r.census.virtual_equilibria) {
    if (e.location.x < v.x0 || e.location.x > v.x1 || e.location.y < v.y0 || e.location.y > v.y1) continue;
    os << "<circle cx=\"" << f3(v.sx(e.location.x)) << "\" cy=\"" << f3(v.sy(e.location.y))
       << "\" r=\"4\" fill=\"none\" stroke=\"#b00\"/>\n";
  }
  os << "<text x=\"" << v.pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << headline(r) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

void write_cycle_summary_csv(std::ostream& out, const std::vector<CycleRecord>& cycles) {
  out << "y_B,y_D,T,lambda,dP,k\n";
  for (const CycleRecord& c : cycles) {
    out << fmt(c.y_B, 12) << ',' << fmt(c.y_D, 12) << ',' << fmt(c.period, 12) << ',' << fmt(c.lambda_gamma, 12) << ','
        << fmt(c.map_derivative, 12) << ',' << c.enclosed.size() << '\n';
  }
}

}  // namespace crosscycle

#include "perdist/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace perdist::io {
namespace {

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
  throw InputError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

const json& field(const json& j, const char* key, const std::string& ptr) {
  if (!j.is_object()) fail(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(ptr + "/" + key, "missing field");
  return *it;
}

double number(const json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

long integer(const json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<long>();
}

const json& array(const json& j, const std::string& ptr) {
  if (!j.is_array()) fail(ptr, "expected an array");
  return j;
}

json seq_list(const std::vector<Seq>& s) {
  json out = json::array();
  for (const auto& e : s) out.push_back(to_json(e));
  return out;
}

json point_json(const LatticeWindow& w, std::optional<Index> i) {
  if (!i) return nullptr;
  auto p = w.point(*i);
  return json(std::vector<int>(p.begin(), p.end()));
}

json vector_json(const CVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v[i]));
  return out;
}

}  // namespace

json to_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json to_json(const LatticeWindow& w) { return {{"d", w.dim()}, {"N", w.radius()}}; }

json to_json(const Envelope& e) { return {{"M", e.M}, {"k", e.k}}; }

json to_json(const Seq& s) {
  json values = json::array();
  for (Index i = 0; i < s.size(); ++i) values.push_back(to_json(s[i]));
  return {{"d", s.window().dim()}, {"N", s.window().radius()}, {"envelope", to_json(s.envelope())}, {"values", values}};
}

json to_json(const SeqMat& a) {
  return {{"m", a.rows()}, {"n", a.cols()}, {"window", to_json(a.window())}, {"entries", seq_list(a.entries())}};
}

json dense_to_json(const CMatrix& a) {
  json entries = json::array();
  for (Index r = 0; r < a.rows(); ++r)
    for (Index c = 0; c < a.cols(); ++c) entries.push_back(to_json(a(r, c)));
  return {{"m", a.rows()}, {"n", a.cols()}, {"entries", entries}};
}

json to_json(const BezoutCertificate<double>& c, const Seq& a, const Seq& b) {
  const double res = c.max_residual(a, b);
  return {{"g", to_json(c.g)},           {"alpha_a", to_json(c.alpha_a)}, {"alpha_b", to_json(c.alpha_b)},
          {"comb_a", to_json(c.comb_a)}, {"comb_b", to_json(c.comb_b)},   {"max_residual", res},
          {"verified", c.verified(a, b)}};
}

json to_json(const PreBezoutCertificate<double>& c) {
  return {{"x", to_json(c.x)},
          {"y", to_json(c.y)},
          {"d", to_json(c.d)},
          {"alpha", to_json(c.alpha)},
          {"beta", to_json(c.beta)},
          {"q_envelope", to_json(c.q_envelope)},
          {"combination_envelope", to_json(c.combination_envelope())},
          {"max_residual", c.max_residual},
          {"verified", c.verified()}};
}

json to_json(const BoundConstants& c) { return {{"C", c.C}, {"k", c.k}, {"nu", c.nu}}; }

json to_json(const ElementaryFactor<double>& f) {
  return {{"i", f.type.row + 1}, {"j", f.type.col + 1}, {"re", f.coeff.real()}, {"im", f.coeff.imag()}};
}

json to_json(const FactorizationReport<double>& r) {
  json factors = json::array();
  for (const auto& f : r.factors) factors.push_back(to_json(f));
  return {{"m", r.m},
          {"factors", factors},
          {"factor_count", r.factors.size()},
          {"input_norm", r.input_norm},
          {"max_factor_norm", r.max_factor_norm},
          {"norm_bound", r.norm_bound()},
          {"residual", r.reconstruction_residual},
          {"residual_bound", r.residual_bound()},
          {"constants", to_json(r.constants)},
          {"permutation_budget", permutation_budget(static_cast<int>(r.m))},
          {"within_bounds", r.within_bounds()}};
}

json to_json(const UniformFactorization<double>& f, const UniformReport<double>& check) {
  json types = json::array();
  for (const auto& t : type_enumeration(f.schedule.m)) types.push_back({t.row + 1, t.col + 1});
  json factors = json::array();
  for (const auto& s : f.factors) {
    factors.push_back({{"type", {s.type.row + 1, s.type.col + 1}}, {"coefficient", to_json(s.coefficient)}});
  }
  const auto opt = [](std::optional<Index> i) { return i ? json(*i) : json(nullptr); };
  return {{"schedule",
           {{"m", f.schedule.m}, {"group_count", f.schedule.group_count}, {"group_size", f.schedule.group_size()},
            {"group_types", types}}},
          {"factors", factors},
          {"constants", to_json(f.constants)},
          {"input_envelope", to_json(f.input_envelope)},
          {"coefficient_bound", to_json(f.coefficient_bound())},
          {"verification",
           {{"max_residual", check.max_residual},
            {"residual_ok", check.residual_ok},
            {"envelopes_ok", check.envelopes_ok},
            {"bad_envelope", opt(check.bad_envelope)},
            {"types_ok", check.types_ok},
            {"bad_type", opt(check.bad_type)},
            {"bound_ok", check.bound_ok},
            {"passed", check.passed()}}}};
}

json to_json(const CoronaCertificate<double>& c, const LatticeWindow& w) {
  json margins = json::array();
  for (double m : c.per_point_margin) margins.push_back(std::isinf(m) ? json(nullptr) : json(m));
  return {{"delta", std::isinf(c.delta) ? json(nullptr) : json(c.delta)},
          {"k", c.k},
          {"verdict", to_string(c.verdict)},
          {"witness_point", point_json(w, c.witness_point)},
          {"witness_y", c.range_failure ? vector_json(c.witness_y) : json(nullptr)},
          {"range_failure", c.range_failure},
          {"margin_degenerate", c.margin_degenerate},
          {"reason", c.reason},
          {"per_point_margin", margins}};
}

json to_json(const CoronaResult<double>& r, const LatticeWindow& w) {
  json out = to_json(r.certificate, w);
  if (r.solution) {
    out["max_residual"] = r.solution->max_residual;
    out["solution"] = to_json(r.solution->x);
    out["solution_envelope"] = to_json(r.solution->envelope);
  } else {
    out["max_residual"] = nullptr;
    out["solution"] = nullptr;
    out["solution_envelope"] = nullptr;
  }
  return out;
}

json to_json(const CounterexampleReport& r) {
  json params = json::object();
  for (const auto& [k, v] : r.parameters) params[k] = v;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"description", c.description}, {"passed", c.passed}, {"evidence", c.evidence}});
  }
  return {{"name", r.name}, {"parameters", params}, {"checks", checks}, {"overall", r.overall()}};
}

json to_json(const CExampleResult& r) {
  json out = to_json(r.report);
  const auto witness = [](const std::optional<OscillationWitness>& w) {
    return w ? json{{"n", w->n}, {"frac", w->frac}, {"x2", w->x2}} : json(nullptr);
  };
  json scales = json::array();
  for (std::size_t i = 0; i < r.scales.size(); ++i) {
    scales.push_back({{"scale", r.scales[i]},
                      {"near_one", witness(r.near_one[i])},
                      {"near_two_thirds", witness(r.near_two_thirds[i])}});
  }
  out["witnesses"] = scales;
  out["min_margin"] = r.min_margin;
  return out;
}

Complex complex_from_json(const json& j, const std::string& ptr) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  return {number(field(j, "re", ptr), ptr + "/re"), number(field(j, "im", ptr), ptr + "/im")};
}

LatticeWindow window_from_json(const json& j, const std::string& ptr) {
  const long d = integer(field(j, "d", ptr), ptr + "/d");
  const long n = integer(field(j, "N", ptr), ptr + "/N");
  if (d < 1) fail(ptr + "/d", "must be >= 1");
  if (n < 0) fail(ptr + "/N", "must be >= 0");
  return LatticeWindow(static_cast<int>(d), static_cast<int>(n));
}

Seq seq_from_json(const json& j, const std::string& ptr, const FitPolicy<double>& policy) {
  const LatticeWindow w = window_from_json(j, ptr);
  const json& vals = array(field(j, "values", ptr), ptr + "/values");
  if (static_cast<Index>(vals.size()) != w.size()) {
    fail(ptr + "/values", "expected " + std::to_string(w.size()) + " values, got " + std::to_string(vals.size()));
  }
  CVector v(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    v[i] = complex_from_json(vals[static_cast<std::size_t>(i)], ptr + "/values/" + std::to_string(i));
  }
  if (!j.contains("envelope")) {
    auto env = fit_envelope_capped(w, v, policy);
    if (!env) fail(ptr + "/values", env.failure().reason);
    return {w, std::move(v), *env};
  }
  const json& e = field(j, "envelope", ptr);
  const Envelope env{number(field(e, "M", ptr + "/envelope"), ptr + "/envelope/M"),
                     static_cast<int>(integer(field(e, "k", ptr + "/envelope"), ptr + "/envelope/k"))};
  try {
    return {w, std::move(v), env};
  } catch (const EnvelopeViolation& ex) {
    fail(ptr + "/envelope", ex.what());
  }
}

SeqMat seqmat_from_json(const json& j, const std::string& ptr, const FitPolicy<double>& policy) {
  const long m = integer(field(j, "m", ptr), ptr + "/m");
  const long n = integer(field(j, "n", ptr), ptr + "/n");
  if (m < 1) fail(ptr + "/m", "must be >= 1");
  if (n < 1) fail(ptr + "/n", "must be >= 1");
  const json& es = array(field(j, "entries", ptr), ptr + "/entries");
  if (static_cast<long>(es.size()) != m * n) {
    fail(ptr + "/entries", "expected " + std::to_string(m * n) + " entries, got " + std::to_string(es.size()));
  }
  std::optional<LatticeWindow> shared;
  if (j.contains("window")) shared = window_from_json(j["window"], ptr + "/window");
  std::vector<Seq> entries;
  entries.reserve(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    const std::string p = ptr + "/entries/" + std::to_string(i);
    entries.push_back(seq_from_json(es[i], p, policy));
    if (!shared) shared = entries.back().window();
    if (!(entries.back().window() == *shared)) throw WindowMismatch(p + ": entry window differs from the matrix window");
  }
  return {m, n, std::move(entries)};
}

CMatrix dense_from_json(const json& j, const std::string& ptr) {
  const long m = integer(field(j, "m", ptr), ptr + "/m");
  const long n = integer(field(j, "n", ptr), ptr + "/n");
  if (m < 1) fail(ptr + "/m", "must be >= 1");
  if (n < 1) fail(ptr + "/n", "must be >= 1");
  const json& es = array(field(j, "entries", ptr), ptr + "/entries");
  if (static_cast<long>(es.size()) != m * n) {
    fail(ptr + "/entries", "expected " + std::to_string(m * n) + " entries, got " + std::to_string(es.size()));
  }
  CMatrix a(m, n);
  for (long r = 0; r < m; ++r)
    for (long c = 0; c < n; ++c) {
      const auto idx = static_cast<std::size_t>(r * n + c);
      a(r, c) = complex_from_json(es[idx], ptr + "/entries/" + std::to_string(idx));
    }
  return a;
}

SeqMat seq_or_matrix_from_json(const json& j, const FitPolicy<double>& policy) {
  if (j.is_object() && j.contains("values")) return {1, 1, {seq_from_json(j, "", policy)}};
  return seqmat_from_json(j, "", policy);
}

json parse_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(source + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

namespace {

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

}  // namespace

std::string render_text(const json& j) {
  std::ostringstream os;
  if (!j.is_object()) {
    os << j.dump() << "\n";
    return os.str();
  }
  if (j.contains("name")) os << j["name"].get<std::string>() << "\n";
  for (const auto& [key, value] : j.items()) {
    if (key == "name" || key == "checks") continue;
    if (value.is_object()) {
      if (value.contains("values") || value.contains("entries")) {
        os << key << ": <" << (value.contains("values") ? "sequence" : "matrix") << ">\n";
        continue;
      }
      os << key << ":";
      for (const auto& [k2, v2] : value.items()) {
        if (v2.is_primitive()) os << " " << k2 << "=" << scalar_text(v2);
      }
      os << "\n";
    } else if (value.is_array()) {
      if (key == "witnesses") {
        for (const auto& w : value) {
          os << "scale " << w["scale"].dump() << ":";
          for (const char* side : {"near_one", "near_two_thirds"}) {
            const auto& s = w[side];
            os << " " << side << "=" << (s.is_null() ? std::string("none") : "n=" + s["n"].dump() + " x2=" + s["x2"].dump());
          }
          os << "\n";
        }
      } else {
        os << key << ": [" << value.size() << " items]\n";
      }
    } else {
      os << key << ": " << scalar_text(value) << "\n";
    }
  }
  if (j.contains("checks")) {
    for (const auto& c : j["checks"]) {
      os << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["description"].get<std::string>() << " ("
         << c["evidence"].dump() << ")\n";
    }
  }
  return os.str();
}

}  // namespace perdist::io

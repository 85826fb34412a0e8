#pragma once

// File ingestion and report serialization. Matrices come as CSV (one row
// per line) or JSON nested arrays; every JSON report carries "schema": 1.

#include "cvdp/classify.hpp"
#include "cvdp/compound.hpp"
#include "cvdp/error.hpp"
#include "cvdp/lindyn.hpp"
#include "cvdp/matrix.hpp"
#include "cvdp/rfmr.hpp"
#include "cvdp/signvar.hpp"
#include "cvdp/vdp.hpp"

#include "json.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace cvdp {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---- raw input -------------------------------------------------------------

/// Whole file, or stdin for "-".
inline std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("invalid JSON: ") + e.what());
  }
}

inline bool looks_like_json(const std::string& path, const std::string& text) {
  auto ends_with = [&](const char* ext) {
    const std::string e(ext);
    return path.size() >= e.size() && path.compare(path.size() - e.size(), e.size(), e) == 0;
  };
  if (ends_with(".json")) return true;
  if (ends_with(".csv")) return false;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) return c == '[' || c == '{';
  return false;
}

// ---- matrices and vectors ---------------------------------------------------

inline Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline double number_from_json(const Json& j) {
  if (!j.is_number()) throw Error(ErrorCode::parse_error, "expected a number, got " + j.dump());
  return j.get<double>();
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from_json(j[i]);
  return v;
}

/// Nested arrays, or an object holding them under "matrix" or "entries".
inline Matrix matrix_from_json(const Json& j) {
  if (j.is_object()) {
    for (const char* key : {"matrix", "entries"})
      if (j.contains(key)) return matrix_from_json(j.at(key));
    throw Error(ErrorCode::parse_error, "JSON object has no \"matrix\" field");
  }
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::parse_error, "matrix must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Matrix a(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array()) throw Error(ErrorCode::parse_error, "matrix rows must be arrays");
    if (j[i].size() != cols) throw Error(ErrorCode::shape_error, "matrix rows have different lengths");
    for (std::size_t k = 0; k < cols; ++k)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = number_from_json(j[i][k]);
  }
  if (cols == 0) throw Error(ErrorCode::shape_error, "matrix has no columns");
  return a;
}

inline std::vector<std::vector<double>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        throw Error(ErrorCode::parse_error, "not a number in CSV: '" + cell + "'");
      }
      if (cell.find_first_not_of(" \t", used) != std::string::npos)
        throw Error(ErrorCode::parse_error, "trailing characters in CSV cell: '" + cell + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_csv(const std::string& text) {
  const auto rows = parse_csv_rows(text);
  if (rows.empty() || rows.front().empty()) throw Error(ErrorCode::parse_error, "CSV matrix is empty");
  for (const auto& r : rows)
    if (r.size() != rows.front().size()) throw Error(ErrorCode::shape_error, "CSV rows have different lengths");
  return from_rows(rows);
}

/// Format chosen by extension (.json / .csv), otherwise by the first
/// non-blank character.
inline Matrix load_matrix(const std::string& path) {
  const auto text = read_text(path);
  return looks_like_json(path, text) ? matrix_from_json(parse_json_text(text)) : matrix_from_csv(text);
}

/// A flat JSON array, an object with "x", or CSV holding one row or column.
inline Vector load_vector(const std::string& path) {
  const auto text = read_text(path);
  if (looks_like_json(path, text)) {
    const auto j = parse_json_text(text);
    if (j.is_object()) {
      if (!j.contains("x")) throw Error(ErrorCode::parse_error, "JSON object has no \"x\" field");
      return vector_from_json(j.at("x"));
    }
    return vector_from_json(j);
  }
  const Matrix a = matrix_from_csv(text);
  if (a.rows() != 1 && a.cols() != 1) throw Error(ErrorCode::shape_error, "CSV vector must be one row or one column");
  return a.rows() == 1 ? Vector(a.row(0).transpose()) : Vector(a.col(0));
}

inline std::string format_double(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

inline std::string matrix_to_csv(const Matrix& a) {
  std::string out;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (j) out += ',';
      out += format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

// ---- report types ------------------------------------------------------------

inline Json index_set_to_json(const IndexSet& s) { return s.one_based(); }

inline IndexSet index_set_from_json(const Json& j, int n) {
  if (!j.is_array()) throw Error(ErrorCode::parse_error, "index set must be an array");
  return IndexSet::one_based(j.get<std::vector<int>>(), n);
}

inline Json to_json(const SignCountReport& r) {
  Json j;
  j["sigma"] = r.sigma ? Json(*r.sigma) : Json(nullptr);
  j["s_minus"] = r.s_minus;
  j["s_plus"] = r.s_plus;
  j["sc_minus"] = r.sc_minus;
  j["sc_plus"] = r.sc_plus;
  j["in_V"] = r.in_V;
  j["in_Vc"] = r.in_Vc;
  return j;
}

inline SignCountReport sign_report_from_json(const Json& j) {
  SignCountReport r;
  if (!j.at("sigma").is_null()) r.sigma = j.at("sigma").get<int>();
  r.s_minus = j.at("s_minus").get<int>();
  r.s_plus = j.at("s_plus").get<int>();
  r.sc_minus = j.at("sc_minus").get<int>();
  r.sc_plus = j.at("sc_plus").get<int>();
  r.in_V = j.at("in_V").get<bool>();
  r.in_Vc = j.at("in_Vc").get<bool>();
  return r;
}

inline Json to_json(const CompoundMatrix& c) {
  auto labels = [](const std::vector<IndexSet>& sets) {
    Json out = Json::array();
    for (const auto& s : sets) out.push_back(index_set_to_json(s));
    return out;
  };
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = to_string(c.kind);
  j["order"] = c.order;
  j["ambient_dim"] = c.ambient_dim;
  j["ambient_cols"] = c.ambient_cols;
  j["row_labels"] = labels(c.row_labels());
  j["col_labels"] = labels(c.col_labels());
  j["entries"] = matrix_to_json(c.entries);
  return j;
}

inline CompoundMatrix compound_from_json(const Json& j) {
  CompoundMatrix c;
  const auto kind = j.at("kind").get<std::string>();
  if (kind != "additive" && kind != "multiplicative") throw Error(ErrorCode::parse_error, "unknown compound kind");
  c.kind = kind == "additive" ? CompoundKind::additive : CompoundKind::multiplicative;
  c.order = j.at("order").get<int>();
  c.ambient_dim = j.at("ambient_dim").get<int>();
  c.ambient_cols = j.value("ambient_cols", c.ambient_dim);
  c.entries = matrix_from_json(j.at("entries"));
  return c;
}

inline Json to_json(const MinorWitness& w) {
  return Json{{"rows", index_set_to_json(w.rows)}, {"cols", index_set_to_json(w.cols)}, {"value", w.value}};
}

inline Json to_json(const SsrVerdict& v) {
  Json ws = Json::array();
  for (const auto& w : v.witness) ws.push_back(to_json(w));
  return Json{{"order", v.order}, {"status", to_string(v.status)}, {"sign", v.sign}, {"witness", ws}};
}

inline SsrVerdict ssr_verdict_from_json(const Json& j, int rows, int cols) {
  SsrVerdict v;
  v.order = j.at("order").get<int>();
  const auto status = j.at("status").get<std::string>();
  if (status == "strictly_signed") v.status = SsrStatus::strictly_signed;
  else if (status == "weakly_signed") v.status = SsrStatus::weakly_signed;
  else if (status == "mixed") v.status = SsrStatus::mixed;
  else throw Error(ErrorCode::parse_error, "unknown sign-regularity status " + status);
  v.sign = j.at("sign").get<int>();
  for (const auto& w : j.at("witness"))
    v.witness.push_back(MinorWitness{index_set_from_json(w.at("rows"), rows), index_set_from_json(w.at("cols"), cols),
                                     w.at("value").get<double>()});
  return v;
}

inline Json to_json(const ClassificationReport& r) {
  Json ssr = Json::array();
  for (const auto& v : r.ssr) ssr.push_back(to_json(v));
  Json j;
  j["schema"] = kSchemaVersion;
  j["rows"] = r.rows;
  j["cols"] = r.cols;
  j["ssr"] = ssr;
  j["metzler"] = r.metzler;
  j["irreducible"] = r.irreducible;
  j["in_M"] = r.in_M;
  j["in_M_plus"] = r.in_M_plus;
  j["in_Q"] = r.in_Q;
  j["in_Q_plus"] = r.in_Q_plus;
  j["cvds"] = r.cvds;
  j["tpds"] = r.tpds;
  j["reason"] = r.reason;
  return j;
}

inline ClassificationReport classification_from_json(const Json& j) {
  ClassificationReport r;
  r.rows = j.at("rows").get<int>();
  r.cols = j.at("cols").get<int>();
  for (const auto& v : j.at("ssr")) r.ssr.push_back(ssr_verdict_from_json(v, r.rows, r.cols));
  r.metzler = j.at("metzler").get<bool>();
  r.irreducible = j.at("irreducible").get<bool>();
  r.in_M = j.at("in_M").get<bool>();
  r.in_M_plus = j.at("in_M_plus").get<bool>();
  r.in_Q = j.at("in_Q").get<bool>();
  r.in_Q_plus = j.at("in_Q_plus").get<bool>();
  r.cvds = j.at("cvds").get<bool>();
  r.tpds = j.at("tpds").get<bool>();
  r.reason = j.at("reason").get<std::string>();
  return r;
}

inline Json to_json(const Counterexample& c) {
  Json j;
  j["x"] = vector_to_json(c.x);
  j["ax"] = vector_to_json(c.ax);
  j["before"] = to_json(c.before);
  j["after"] = to_json(c.after);
  j["source"] = c.source;
  j["sample_index"] = c.sample_index ? Json(*c.sample_index) : Json(nullptr);
  return j;
}

inline Counterexample counterexample_from_json(const Json& j) {
  Counterexample c;
  c.x = vector_from_json(j.at("x"));
  c.ax = vector_from_json(j.at("ax"));
  c.before = sign_report_from_json(j.at("before"));
  c.after = sign_report_from_json(j.at("after"));
  c.source = j.at("source").get<std::string>();
  if (!j.at("sample_index").is_null()) c.sample_index = j.at("sample_index").get<std::size_t>();
  return c;
}

inline Json to_json(const VdpVerdict& v) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["property"] = to_string(v.property);
  j["p"] = v.p;
  j["holds"] = v.holds;
  j["method"] = v.method == Method::structural ? "structural" : "sampled";
  j["num_samples"] = v.num_samples;
  j["seed"] = v.seed;
  j["sampling_agrees"] = v.sampling_agrees ? Json(*v.sampling_agrees) : Json(nullptr);
  j["counterexample"] = v.counterexample ? to_json(*v.counterexample) : Json(nullptr);
  return j;
}

inline Property property_from_string(const std::string& s) {
  for (auto p : {Property::nonstandard, Property::scvdp, Property::weak_cvdp, Property::svdp, Property::prop_sv1})
    if (to_string(p) == s) return p;
  throw Error(ErrorCode::parse_error, "unknown property " + s);
}

inline VdpVerdict vdp_verdict_from_json(const Json& j) {
  VdpVerdict v;
  v.property = property_from_string(j.at("property").get<std::string>());
  v.p = j.at("p").get<int>();
  v.holds = j.at("holds").get<bool>();
  v.method = j.at("method").get<std::string>() == "sampled" ? Method::sampled : Method::structural;
  v.num_samples = j.at("num_samples").get<std::size_t>();
  v.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("sampling_agrees").is_null()) v.sampling_agrees = j.at("sampling_agrees").get<bool>();
  if (!j.at("counterexample").is_null()) v.counterexample = counterexample_from_json(j.at("counterexample"));
  return v;
}

inline Json to_json(const SignEvent& e) {
  return Json{{"t_lo", e.t_lo},
              {"t_hi", e.t_hi},
              {"kind", to_string(e.kind)},
              {"before", to_json(e.before)},
              {"after", to_json(e.after)}};
}

inline SignEvent sign_event_from_json(const Json& j) {
  SignEvent e;
  e.t_lo = j.at("t_lo").get<double>();
  e.t_hi = j.at("t_hi").get<double>();
  const auto kind = j.at("kind").get<std::string>();
  bool known = false;
  for (auto k : {EventKind::sc_minus_drop, EventKind::sc_minus_rise, EventKind::s_minus_increase,
                 EventKind::s_minus_decrease})
    if (to_string(k) == kind) {
      e.kind = k;
      known = true;
    }
  if (!known) throw Error(ErrorCode::parse_error, "unknown event kind " + kind);
  e.before = sign_report_from_json(j.at("before"));
  e.after = sign_report_from_json(j.at("after"));
  return e;
}

inline Json events_to_json(const std::vector<SignEvent>& events, std::optional<double> settling) {
  Json list = Json::array();
  for (const auto& e : events) list.push_back(to_json(e));
  return Json{{"schema", kSchemaVersion},
              {"events", list},
              {"observed_settling_time", settling ? Json(*settling) : Json(nullptr)}};
}

inline Json to_json(const CvdsVerdict& v) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["holds"] = v.holds;
  if (v.first_violation) {
    const auto& f = *v.first_violation;
    j["first_violation"] = Json{{"t", f.t},
                                {"order", f.order},
                                {"rows", index_set_to_json(f.rows)},
                                {"cols", index_set_to_json(f.cols)},
                                {"value", f.value}};
  } else {
    j["first_violation"] = nullptr;
  }
  return j;
}

inline CvdsVerdict cvds_verdict_from_json(const Json& j, int n) {
  CvdsVerdict v;
  v.holds = j.at("holds").get<bool>();
  if (!j.at("first_violation").is_null()) {
    const auto& f = j.at("first_violation");
    v.first_violation = MinorViolation{f.at("t").get<double>(), f.at("order").get<int>(),
                                       index_set_from_json(f.at("rows"), n), index_set_from_json(f.at("cols"), n),
                                       f.at("value").get<double>()};
  }
  return v;
}

inline Json error_to_json(const Error& e) {
  return Json{{"schema", kSchemaVersion},
              {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}};
}

// ---- system specifications ---------------------------------------------------

/// {"generator": "constant", "matrix": [[...]]}
/// {"generator": "piecewise_constant", "breakpoints": [...], "matrices": [...]}
/// {"generator": "sampled", "times": [...], "matrices": [...], "interpolation": "hold" | "linear"}
inline LtvSystem system_from_json(const Json& j) {
  try {
    const auto kind = j.value("generator", std::string("constant"));
    auto matrices = [&] {
      std::vector<Matrix> ms;
      for (const auto& m : j.at("matrices")) ms.push_back(matrix_from_json(m));
      return ms;
    };
    auto times = [&](const char* key) {
      std::vector<double> ts;
      for (const auto& t : j.at(key)) ts.push_back(number_from_json(t));
      return ts;
    };
    if (kind == "constant") return LtvSystem::constant(matrix_from_json(j.at("matrix")));
    if (kind == "piecewise_constant") return LtvSystem::piecewise_constant(times("breakpoints"), matrices());
    if (kind == "sampled") {
      const auto interp = j.value("interpolation", std::string("hold"));
      if (interp != "hold" && interp != "linear") throw Error(ErrorCode::parse_error, "unknown interpolation " + interp);
      return LtvSystem::sampled(times("times"), matrices(),
                                interp == "hold" ? Interpolation::hold : Interpolation::linear);
    }
    throw Error(ErrorCode::parse_error, "unknown generator kind " + kind);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed system spec: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw;
    throw Error(ErrorCode::shape_error, e.what());
  }
}

inline Json system_to_json(const LtvSystem& sys) {
  return std::visit(
      [](const auto& g) -> Json {
        using G = std::decay_t<decltype(g)>;
        auto ms = [](const std::vector<Matrix>& v) {
          Json out = Json::array();
          for (const auto& m : v) out.push_back(matrix_to_json(m));
          return out;
        };
        if constexpr (std::is_same_v<G, ConstantGenerator>) {
          return Json{{"generator", "constant"}, {"matrix", matrix_to_json(g.a)}};
        } else if constexpr (std::is_same_v<G, PiecewiseConstantGenerator>) {
          return Json{{"generator", "piecewise_constant"}, {"breakpoints", g.breakpoints}, {"matrices", ms(g.matrices)}};
        } else if constexpr (std::is_same_v<G, SampledGenerator>) {
          return Json{{"generator", "sampled"},
                      {"times", g.times},
                      {"matrices", ms(g.matrices)},
                      {"interpolation", g.interpolation == Interpolation::hold ? "hold" : "linear"}};
        } else {
          throw Error(ErrorCode::invalid_argument, "function generators cannot be serialized");
        }
      },
      sys.generator());
}

struct RfmrSpec {
  RfmrParams params;
  Vector x0;
  Vector z0;  // defaults to the vector field at x0
  double horizon = 10.0;
  double step = kDefaultStep;
};

inline RfmrSpec rfmr_spec_from_json(const Json& j) {
  try {
    RfmrSpec s;
    s.params.lambda = j.at("lambda").get<std::vector<double>>();
    if (j.contains("n") && j.at("n").get<int>() != s.params.n())
      throw Error(ErrorCode::shape_error, "n does not match the number of rates");
    s.x0 = vector_from_json(j.at("x0"));
    s.z0 = j.contains("z0") ? vector_from_json(j.at("z0")) : rfmr_rhs(s.params, s.x0);
    s.horizon = j.value("horizon", s.horizon);
    s.step = j.value("step", s.step);
    return s;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed ring model spec: ") + e.what());
  }
}

}  // namespace cvdp

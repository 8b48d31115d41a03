#include "qcl/serialization.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qcl {

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
  fail(Errc::SchemaError, what + " (at " + (where.empty() ? "/" : where) + ")");
}

const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name))
    schema_fail(where + "/" + name, "missing field");
  return j.at(name);
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) schema_fail(where, "expected a number");
  return j.get<double>();
}

Complex complex_at(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    schema_fail(where, "complex scalars are two-element [re, im] arrays");
  return {number_at(j[0], where + "/0"), number_at(j[1], where + "/1")};
}

std::string str_at(const Json& j, const std::string& where) {
  if (!j.is_string()) schema_fail(where, "expected a string");
  return j.get<std::string>();
}

RVector real_vector_at(const Json& j, const std::string& where) {
  if (!j.is_array()) schema_fail(where, "expected an array");
  RVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) = number_at(j[i], where + "/" + std::to_string(i));
  return v;
}

Json real_vector_json(const RVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(round_sig(v(i)));
  return out;
}

}  // namespace

double round_sig(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x == 0.0 ? 0.0 : x;
  double mag = std::floor(std::log10(std::abs(x)));
  double scale = std::pow(10.0, 11.0 - mag);
  return std::round(x * scale) / scale;
}

Json complex_json(Complex z) { return Json::array({round_sig(z.real()), round_sig(z.imag())}); }

Json matrix_payload(const CMatrix& m) {
  Json entries = Json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    entries.push_back(std::move(row));
  }
  Json out;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["entries"] = std::move(entries);
  return out;
}

CMatrix matrix_from_payload(const Json& j, const std::string& where) {
  auto rows_j = field(j, "rows", where), cols_j = field(j, "cols", where);
  if (!rows_j.is_number_integer() || !cols_j.is_number_integer())
    schema_fail(where + "/rows", "rows/cols must be integers");
  Index rows = rows_j.get<Index>(), cols = cols_j.get<Index>();
  if (rows < 1 || cols < 1) schema_fail(where + "/rows", "rows/cols must be >= 1");
  const Json& entries = field(j, "entries", where);
  if (!entries.is_array() || static_cast<Index>(entries.size()) != rows)
    schema_fail(where + "/entries", "entries must hold one array per row");
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = entries[static_cast<std::size_t>(i)];
    std::string row_where = where + "/entries/" + std::to_string(i);
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      schema_fail(row_where, "row has the wrong number of entries");
    for (Index c = 0; c < cols; ++c)
      m(i, c) = complex_at(row[static_cast<std::size_t>(c)],
                           row_where + "/" + std::to_string(c));
  }
  if (!all_finite(m)) schema_fail(where + "/entries", "entries must be finite");
  return m;
}

namespace {

MatrixMap map_from_json(const Json& j, const std::string& where) {
  std::string form = str_at(field(j, "form", where), where + "/form");
  if (form == "choi") {
    Index n_in = static_cast<Index>(number_at(field(j, "n_in", where), where + "/n_in"));
    Index n_out = static_cast<Index>(number_at(field(j, "n_out", where), where + "/n_out"));
    CMatrix choi = matrix_from_payload(field(j, "choi", where), where + "/choi");
    if (n_in < 1 || n_out < 1) schema_fail(where + "/n_in", "dimensions must be >= 1");
    if (choi.rows() != n_in * n_out || choi.cols() != n_in * n_out)
      schema_fail(where + "/choi", "Choi matrix must be (n_in*n_out) x (n_in*n_out)");
    return MatrixMap::from_choi(n_in, n_out, choi);
  }
  if (form == "schur") return make_schur(matrix_from_payload(field(j, "q", where), where + "/q"));
  if (form == "rank_one_state") {
    CMatrix omega = matrix_from_payload(field(j, "omega", where), where + "/omega");
    State::from_density(omega);  // validates
    return MatrixMap::rank_one_state_map(omega);
  }
  schema_fail(where + "/form", "unknown map form '" + form + "'");
}

PowersWeight weight_from_json(const Json& j, const std::string& where) {
  std::string family = str_at(field(j, "family", where), where + "/family");
  PowersWeight w = [&]() -> PowersWeight {
    if (family == "indicator")
      return PowersWeight::indicator(number_at(field(j, "a", where), where + "/a"),
                                     number_at(field(j, "b", where), where + "/b"));
    if (family == "exponential") return PowersWeight::exponential();
    if (family == "power_law") return PowersWeight::power_law();
    if (family == "grid")
      return PowersWeight::grid(real_vector_at(field(j, "xs", where), where + "/xs"),
                                real_vector_at(field(j, "fs", where), where + "/fs"));
    schema_fail(where + "/family", "unknown weight family '" + family + "'");
  }();
  if (j.contains("scale")) {
    double s = number_at(j.at("scale"), where + "/scale");
    if (!(s > 0.0)) schema_fail(where + "/scale", "scale must be positive");
    w = PowersWeight::scaled(w, s);
  }
  return w;
}

}  // namespace

Document load_document(const Json& j) {
  std::string kind = str_at(field(j, "kind", ""), "/kind");
  if (kind == "matrix") return {Document::Kind::Matrix, matrix_from_payload(j, "")};
  if (kind == "map") return {Document::Kind::Map, map_from_json(j, "")};
  if (kind == "state")
    return {Document::Kind::State,
            State::from_density(matrix_from_payload(field(j, "omega", ""), "/omega"))};
  if (kind == "weight") return {Document::Kind::Weight, weight_from_json(j, "")};
  if (kind == "gauge_element") {
    double x = number_at(field(j, "x", ""), "/x");
    CMatrix unitary = matrix_from_payload(field(j, "X", ""), "/X");
    State s = State::from_density(matrix_from_payload(field(j, "omega", ""), "/omega"));
    return {Document::Kind::GaugeElement, GaugeElement::make(x, unitary, s)};
  }
  schema_fail("/kind", "unknown document kind '" + kind + "'");
}

Document load_document_text(const std::string& text) {
  Json j = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) fail(Errc::SchemaError, "invalid JSON");
  return load_document(j);
}

Document load_document_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::SchemaError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_document_text(buf.str());
}

Json save_matrix(const CMatrix& m) {
  Json out;
  out["kind"] = "matrix";
  Json payload = matrix_payload(m);
  out["rows"] = payload["rows"];
  out["cols"] = payload["cols"];
  out["entries"] = payload["entries"];
  return out;
}

Json save_map(const MatrixMap& m) {
  if (!m.square()) fail(Errc::SchemaError, "only square-algebra maps are serializable");
  Json out;
  out["kind"] = "map";
  out["form"] = "choi";
  out["n_in"] = m.n_in();
  out["n_out"] = m.n_out();
  out["choi"] = matrix_payload(m.choi());
  return out;
}

Json save_state(const qcl::State& s) {
  Json out;
  out["kind"] = "state";
  out["omega"] = matrix_payload(s.omega());
  return out;
}

Json save_weight(const PowersWeight& w) {
  Json out;
  out["kind"] = "weight";
  switch (w.family()) {
    case WeightFamily::Indicator:
      out["family"] = "indicator";
      out["a"] = round_sig(w.indicator_a());
      out["b"] = round_sig(w.indicator_b());
      break;
    case WeightFamily::Exponential:
      out["family"] = "exponential";
      break;
    case WeightFamily::PowerLaw:
      out["family"] = "power_law";
      break;
    case WeightFamily::Grid:
      out["family"] = "grid";
      out["xs"] = real_vector_json(w.grid_xs());
      out["fs"] = real_vector_json(w.grid_fs());
      break;
  }
  if (w.scale() != 1.0) out["scale"] = round_sig(w.scale());
  return out;
}

Json save_gauge_element(const GaugeElement& g) {
  Json out;
  out["kind"] = "gauge_element";
  out["x"] = round_sig(g.x());
  out["X"] = matrix_payload(g.X());
  out["omega"] = matrix_payload(g.omega());
  return out;
}

Json save_document(const Document& doc) {
  switch (doc.kind) {
    case Document::Kind::Matrix: return save_matrix(doc.matrix());
    case Document::Kind::Map: return save_map(doc.map());
    case Document::Kind::State: return save_state(doc.state());
    case Document::Kind::Weight: return save_weight(doc.weight());
    case Document::Kind::GaugeElement: return save_gauge_element(doc.gauge_element());
  }
  fail(Errc::SchemaError, "unknown document kind");
}

}  // namespace qcl

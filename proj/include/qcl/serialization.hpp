#pragma once

#include <iosfwd>
#include <optional>
#include <variant>

#include <json.hpp>

#include "qcl/bweight.hpp"
#include "qcl/cpmaps.hpp"
#include "qcl/state.hpp"

namespace qcl {

using Json = nlohmann::ordered_json;

//! Rounds to 12 significant digits; canonical float formatting for documents
//! and reports, so identical invocations emit byte-identical output.
double round_sig(double x);
Json complex_json(Complex z);

Json matrix_payload(const CMatrix& m);               // {rows, cols, entries}
CMatrix matrix_from_payload(const Json& j, const std::string& where);

//! Tagged documents. Complex scalars are always [re, im] pairs.
//!   {"kind":"matrix", "rows":r, "cols":c, "entries":[[[re,im],...],...]}
//!   {"kind":"map", "form":"choi"|"schur"|"rank_one_state", ...}
//!   {"kind":"state", "omega":{...}}
//!   {"kind":"weight", "family":"indicator"|"exponential"|"power_law"|"grid", ...}
//!   {"kind":"gauge_element", "x":x, "X":{...}, "omega":{...}}
struct Document {
  enum class Kind { Matrix, Map, State, Weight, GaugeElement };
  Kind kind;
  std::variant<CMatrix, MatrixMap, qcl::State, PowersWeight, GaugeElement> payload;

  const CMatrix& matrix() const { return std::get<CMatrix>(payload); }
  const MatrixMap& map() const { return std::get<MatrixMap>(payload); }
  const qcl::State& state() const { return std::get<qcl::State>(payload); }
  const PowersWeight& weight() const { return std::get<PowersWeight>(payload); }
  const GaugeElement& gauge_element() const { return std::get<GaugeElement>(payload); }
};

//! Parses a document; SchemaError carries a JSON-pointer-style location.
Document load_document(const Json& j);
Document load_document_text(const std::string& text);
Document load_document_file(const std::string& path);

//! Canonical serializations (save then load is the identity bit-exactly).
Json save_matrix(const CMatrix& m);
Json save_map(const MatrixMap& m);
Json save_state(const qcl::State& s);
Json save_weight(const PowersWeight& w);
Json save_gauge_element(const GaugeElement& g);
Json save_document(const Document& doc);

}  // namespace qcl

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cohft/correlator.hpp"
#include "cohft/euler.hpp"
#include "cohft/frobenius.hpp"
#include "cohft/series.hpp"

namespace cohft {

using Json = nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rationals travel as "p/q" (or "p") strings; complex numbers as a
// ["re", "im"] pair of decimal strings.
template <class S>
Json scalar_to_json(const S& x);

template <>
inline Json scalar_to_json<Rational>(const Rational& x) {
  return rational_to_string(x);
}

template <>
inline Json scalar_to_json<Complex>(const Complex& x) {
  return Json::array({real_to_string(x.re), real_to_string(x.im)});
}

template <class S>
S scalar_from_json(const Json& j);

template <>
inline Rational scalar_from_json<Rational>(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw SchemaError("expected rational as \"p/q\" string");
  try {
    return rational_from_string(j.get<std::string>());
  } catch (const std::exception& e) {
    throw SchemaError(std::string("bad rational: ") + e.what());
  }
}

template <>
inline Complex scalar_from_json<Complex>(const Json& j) {
  try {
    if (j.is_number_integer()) return Complex(j.get<long>());
    if (j.is_string()) {
      std::string s = j.get<std::string>();
      if (s.find('/') != std::string::npos) return Complex::from_rational(rational_from_string(s));
      return Complex(Real(s));
    }
    if (j.is_array() && j.size() == 2)
      return Complex(Real(j[0].get<std::string>()), Real(j[1].get<std::string>()));
  } catch (const SchemaError&) {
    throw;
  } catch (const std::exception& e) {
    throw SchemaError(std::string("bad complex value: ") + e.what());
  }
  throw SchemaError("expected complex as [\"re\", \"im\"], string, or integer");
}

template <class S>
Json vector_to_json(const std::vector<S>& v) {
  Json out = Json::array();
  for (const S& x : v) out.push_back(scalar_to_json(x));
  return out;
}

template <class S>
std::vector<S> vector_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("expected array of scalars");
  std::vector<S> out;
  for (const auto& e : j) out.push_back(scalar_from_json<S>(e));
  return out;
}

template <class S>
Json matrix_to_json(const Matrix<S>& m) {
  Json out = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

template <class S>
Matrix<S> matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw SchemaError("expected matrix as array of rows");
  int rows = static_cast<int>(j.size());
  int cols = static_cast<int>(j[0].size());
  Matrix<S> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[static_cast<size_t>(r)].size()) != cols)
      throw SchemaError("ragged matrix rows");
    for (int c = 0; c < cols; ++c)
      m(r, c) = scalar_from_json<S>(j[static_cast<size_t>(r)][static_cast<size_t>(c)]);
  }
  return m;
}

template <class S>
Json end_series_to_json(const EndSeries<S>& e) {
  Json coeffs = Json::array();
  for (int k = 0; k <= e.K; ++k) coeffs.push_back(matrix_to_json(e.c[static_cast<size_t>(k)]));
  return Json{{"order", e.K}, {"dim", e.N}, {"coefficients", coeffs}};
}

template <class S>
EndSeries<S> end_series_from_json(const Json& j) {
  if (!j.contains("order") || !j.contains("dim") || !j.contains("coefficients"))
    throw SchemaError("series needs order/dim/coefficients");
  EndSeries<S> e(j["order"].get<int>(), j["dim"].get<int>());
  const Json& coeffs = j["coefficients"];
  if (static_cast<int>(coeffs.size()) != e.K + 1)
    throw SchemaError("series coefficient count mismatch");
  for (int k = 0; k <= e.K; ++k) {
    Matrix<S> m = matrix_from_json<S>(coeffs[static_cast<size_t>(k)]);
    if (m.rows() != e.N || m.cols() != e.N) throw SchemaError("series matrix shape mismatch");
    e.c[static_cast<size_t>(k)] = std::move(m);
  }
  return e;
}

// Correlator tables serialize with sorted rows [g, [[i,a],...], value], in
// the orthonormal frame basis.
template <class S>
Json table_to_json(const CorrelatorTable<S>& t, const std::string& backend) {
  Json rows = Json::array();
  for (const auto& [key, val] : t.entries) {
    Json slots = Json::array();
    for (const auto& [i, a] : key.slots) slots.push_back(Json::array({i, a}));
    rows.push_back(Json::array({key.g, std::move(slots), scalar_to_json(val)}));
  }
  return Json{{"schema_version", kSchemaVersion},
              {"kind", "correlator_table"},
              {"backend", backend},
              {"basis", "orthonormal_frame"},
              {"dim", t.dim()},
              {"g_max", t.g_max},
              {"n_bound", t.n_bound},
              {"sqrt_thetas", vector_to_json(t.sqrt_thetas)},
              {"entries", std::move(rows)}};
}

template <class S>
CorrelatorTable<S> table_from_json(const Json& j) {
  for (const char* field : {"g_max", "n_bound", "sqrt_thetas", "entries"})
    if (!j.contains(field)) throw SchemaError(std::string("table missing field ") + field);
  CorrelatorTable<S> t;
  t.sqrt_thetas = vector_from_json<S>(j["sqrt_thetas"]);
  t.g_max = j["g_max"].get<int>();
  t.n_bound = j["n_bound"].get<std::vector<int>>();
  if (static_cast<int>(t.n_bound.size()) != t.g_max + 1)
    throw SchemaError("n_bound length must be g_max+1");
  for (const auto& row : j["entries"]) {
    if (!row.is_array() || row.size() != 3) throw SchemaError("table row must be [g, slots, value]");
    TableKey key;
    key.g = row[0].get<int>();
    for (const auto& slot : row[1]) {
      if (!slot.is_array() || slot.size() != 2) throw SchemaError("slot must be [index, power]");
      key.slots.emplace_back(slot[0].get<int>(), slot[1].get<int>());
    }
    if (key.g < 0 || key.g > t.g_max ||
        static_cast<int>(key.slots.size()) > t.n_bound[static_cast<size_t>(key.g)])
      throw SchemaError("table row outside declared bounds");
    for (const auto& [i, a] : key.slots)
      if (i < 0 || i >= t.dim() || a < 0) throw SchemaError("slot index out of range");
    t.set(std::move(key), scalar_from_json<S>(row[2]));
  }
  return t;
}

template <class S>
Json algebra_to_json(const FrobeniusAlgebra<S>& alg) {
  Json structure = Json::array();
  for (const auto& m : alg.structure) structure.push_back(matrix_to_json(m));
  return Json{{"structure", std::move(structure)},
              {"pairing", matrix_to_json(alg.pairing)},
              {"unit", vector_to_json(alg.unit)}};
}

template <class S>
FrobeniusAlgebra<S> algebra_from_json(const Json& j) {
  FrobeniusAlgebra<S> alg;
  if (j.contains("thetas")) {
    return FrobeniusAlgebra<S>::semisimple_diagonal(vector_from_json<S>(j["thetas"]));
  }
  if (j.contains("sqrt_thetas")) {
    return FrobeniusAlgebra<S>::orthonormal_frame(vector_from_json<S>(j["sqrt_thetas"]));
  }
  for (const char* field : {"structure", "pairing", "unit"})
    if (!j.contains(field)) throw SchemaError(std::string("algebra missing field ") + field);
  for (const auto& m : j["structure"]) alg.structure.push_back(matrix_from_json<S>(m));
  alg.pairing = matrix_from_json<S>(j["pairing"]);
  alg.unit = vector_from_json<S>(j["unit"]);
  auto errs = alg.validate();
  if (!errs.empty()) throw SchemaError("algebra invalid: " + errs.front());
  return alg;
}

template <class S>
EulerData<S> euler_from_json(const Json& j) {
  for (const char* field : {"xi0", "mu", "d"})
    if (!j.contains(field)) throw SchemaError(std::string("euler data missing field ") + field);
  EulerData<S> data;
  data.xi0 = vector_from_json<S>(j["xi0"]);
  data.mu = matrix_from_json<S>(j["mu"]);
  data.d = scalar_from_json<Rational>(j["d"]);
  return data;
}

inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Temp-then-rename so a crashed run never leaves a half-written artifact.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

inline Json make_manifest(const std::string& command, const Json& config,
                          const std::vector<std::pair<std::string, double>>& timings,
                          std::uint64_t seed, int threads) {
  Json t = Json::object();
  for (const auto& [name, seconds] : timings) t[name] = seconds;
  return Json{{"schema_version", kSchemaVersion},
              {"tool", "cohft"},
              {"version", kVersion},
              {"command", command},
              {"config_hash", hash_hex(fnv1a64(config.dump()))},
              {"seed", seed},
              {"threads", threads},
              {"timings_seconds", std::move(t)}};
}

inline std::string config_schema_text() {
  return R"schema({
  "schema_version": 1,
  "backend": "rational | complex",
  "precision_bits": 256,
  "seed": 0,
  "output_dir": "out",
  "algebra": {
    "thetas": ["2", "3"],
    "...or sqrt_thetas": ["1", "1"],
    "...or explicit": {"structure": "[k][i][j] scalars", "pairing": "[i][j]", "unit": "[i]"}
  },
  "euler": {"xi0": ["0", "2"], "mu": [["<-1/2>", "0"], ["0", "1/2"]], "d": "1"},
  "e_series": {"order": 8, "dim": 2, "coefficients": "[k] matrices"},
  "bounds": {"g_max": 2, "n_max": 3},
  "order": 8,
  "u": ["0", "1"],
  "u_order": 4,
  "hodge_h": ["h1", "h3", "..."],
  "table_file": "path (for check/deform)",
  "signature": {"genus": 1, "inputs": 2, "outputs": 1}
})schema";
}

inline std::string table_schema_text() {
  return R"schema({
  "schema_version": 1,
  "kind": "correlator_table",
  "backend": "rational | complex",
  "basis": "orthonormal_frame",
  "dim": 2,
  "g_max": 2,
  "n_bound": [7, 5, 3],
  "sqrt_thetas": ["1", "1"],
  "entries": [["g", "[[i, a], ...] sorted", "value as p/q or [re, im]"]]
})schema";
}

}  // namespace cohft

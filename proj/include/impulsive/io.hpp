/*
 Copyright 2026 The impulsive-control Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef IMPULSIVE_IO_HPP
#define IMPULSIVE_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "impulsive/propagation.hpp"
#include "impulsive/system_model.hpp"
#include "impulsive/wave_model.hpp"

// JSON and CSV formats used by the command-line tool.
//
// System file:
//   { "schema": 1,
//     "generator": {"dense": [[...], ...]} | {"spectral_blocks": [m1, ...]},
//     "B": [[...], ...],            row-major n x m_u
//     "horizon_b": 1.0,
//     "stages": [{"t": 0.5, "C": [[...]], "D": [[...]]}, ...] }
//
// Control file:
//   { "u": {"grids": [N_1, ..., N_{p+1}], "values": [[[u...] x N_1], ...]}
//        | {"adjoint_feedback": [phi...]},
//     "v": [[v_1...], ..., [v_p...]] }
//
// Unknown fields are rejected everywhere. "schema" is optional; when present
// it must be 1.
namespace impulsive::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed input: bad JSON, missing or unknown fields, wrong shapes.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// 17 significant digits, round-trip safe.
inline std::string format_double(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing helpers
// ---------------------------------------------------------------------------

namespace detail {

inline void reject_unknown(const json& j, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) {
      throw ConfigError(where + ": unknown field '" + key + "'");
    }
  }
}

inline const json& require(const json& j, const std::string& where,
                           const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(where + ": missing required field '" + key + "'");
  }
  return j.at(key);
}

inline void check_schema(const json& j, const std::string& where) {
  if (!j.contains("schema")) return;
  const auto& s = j.at("schema");
  if (!s.is_number_integer() || s.get<int>() != kSchemaVersion) {
    throw ConfigError(where + ".schema: unsupported schema version (expected 1)");
  }
}

}  // namespace detail

inline double number_from_json(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  return j.get<double>();
}

inline std::vector<double> list_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline Vector vector_from_json(const json& j, const std::string& where) {
  const auto xs = list_from_json(j, where);
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

/// Row-major nested arrays. A flat array is read as a single column.
inline Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected a matrix (array of rows)");
  if (j.empty()) return Matrix(0, 0);
  if (!j[0].is_array()) return vector_from_json(j, where);
  const auto rows = j.size();
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != cols) {
      throw ConfigError(row_where + ": ragged matrix row");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          number_from_json(j[r][c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// System
// ---------------------------------------------------------------------------

/// Parses a system definition. Shapes are checked by validate_system, not here.
inline ImpulsiveSystem system_from_json(const json& j) {
  detail::reject_unknown(j, "system", {"schema", "generator", "B", "horizon_b", "stages"});
  detail::check_schema(j, "system");
  ImpulsiveSystem sys;

  const auto& gen = detail::require(j, "system", "generator");
  detail::reject_unknown(gen, "system.generator", {"dense", "spectral_blocks"});
  if (gen.size() != 1) {
    throw ConfigError(
        "system.generator: give exactly one of 'dense' or 'spectral_blocks'");
  }
  if (gen.contains("dense")) {
    sys.generator = DenseGenerator{matrix_from_json(gen.at("dense"), "system.generator.dense")};
  } else {
    sys.generator = SpectralBlocks{
        list_from_json(gen.at("spectral_blocks"), "system.generator.spectral_blocks")};
  }

  sys.b = matrix_from_json(detail::require(j, "system", "B"), "system.B");
  sys.horizon = number_from_json(detail::require(j, "system", "horizon_b"),
                                 "system.horizon_b");
  if (j.contains("stages")) {
    const auto& stages = j.at("stages");
    if (!stages.is_array()) throw ConfigError("system.stages: expected an array");
    for (std::size_t k = 0; k < stages.size(); ++k) {
      const std::string where = "system.stages[" + std::to_string(k) + "]";
      detail::reject_unknown(stages[k], where, {"t", "C", "D"});
      ImpulseStage st;
      st.time = number_from_json(detail::require(stages[k], where, "t"), where + ".t");
      st.c = matrix_from_json(detail::require(stages[k], where, "C"), where + ".C");
      st.d = matrix_from_json(detail::require(stages[k], where, "D"), where + ".D");
      sys.stages.push_back(std::move(st));
    }
  }
  return sys;
}

inline json to_json(const ImpulsiveSystem& sys) {
  json j;
  j["schema"] = kSchemaVersion;
  if (const auto* dense = std::get_if<DenseGenerator>(&sys.generator)) {
    j["generator"] = {{"dense", to_json(dense->a)}};
  } else {
    j["generator"] = {
        {"spectral_blocks", std::get<SpectralBlocks>(sys.generator).frequencies}};
  }
  j["B"] = to_json(sys.b);
  j["horizon_b"] = sys.horizon;
  j["stages"] = json::array();
  for (const auto& st : sys.stages) {
    j["stages"].push_back({{"t", st.time}, {"C", to_json(st.c)}, {"D", to_json(st.d)}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Control
// ---------------------------------------------------------------------------

/// Parses a control file for sys. A missing "u" means u = 0; a missing "v"
/// means zero impulse controls.
inline ControlPair control_from_json(const json& j, const ImpulsiveSystem& sys) {
  detail::reject_unknown(j, "control", {"schema", "u", "v"});
  detail::check_schema(j, "control");
  ControlPair w = zero_control(sys);
  const auto p = static_cast<std::size_t>(sys.num_stages());

  if (j.contains("u")) {
    const auto& u = j.at("u");
    detail::reject_unknown(u, "control.u", {"grids", "values", "adjoint_feedback"});
    if (u.contains("adjoint_feedback")) {
      if (u.size() != 1) {
        throw ConfigError("control.u: 'adjoint_feedback' excludes 'grids'/'values'");
      }
      const Vector phi = vector_from_json(u.at("adjoint_feedback"), "control.u.adjoint_feedback");
      if (phi.size() != sys.state_dim()) {
        throw ConfigError("control.u.adjoint_feedback: expected " +
                          std::to_string(sys.state_dim()) + " entries");
      }
      w.distributed = adjoint_feedback(sys, phi);
    } else {
      const auto& grids = detail::require(u, "control.u", "grids");
      const auto& values = detail::require(u, "control.u", "values");
      if (!grids.is_array() || grids.size() != p + 1) {
        throw ConfigError("control.u.grids: expected " + std::to_string(p + 1) +
                          " cell counts (one per impulse subinterval)");
      }
      if (!values.is_array() || values.size() != p + 1) {
        throw ConfigError("control.u.values: expected " + std::to_string(p + 1) +
                          " per-subinterval lists");
      }
      PiecewiseConstant law;
      for (std::size_t k = 0; k <= p; ++k) {
        const std::string gw = "control.u.grids[" + std::to_string(k) + "]";
        if (!grids[k].is_number_integer() || grids[k].get<long>() < 1) {
          throw ConfigError(gw + ": expected a positive integer");
        }
        const auto count = grids[k].get<std::size_t>();
        const std::string vw = "control.u.values[" + std::to_string(k) + "]";
        if (!values[k].is_array() || values[k].size() != count) {
          throw ConfigError(vw + ": expected " + std::to_string(count) + " samples");
        }
        std::vector<Vector> cells;
        for (std::size_t c = 0; c < count; ++c) {
          const std::string cw = vw + "[" + std::to_string(c) + "]";
          Vector val = values[k][c].is_array() ? vector_from_json(values[k][c], cw)
                                               : Vector::Constant(1, number_from_json(values[k][c], cw));
          if (val.size() != sys.input_dim()) {
            throw ConfigError(cw + ": expected " + std::to_string(sys.input_dim()) +
                              " entries");
          }
          cells.push_back(std::move(val));
        }
        law.cells.push_back(std::move(cells));
      }
      w.distributed = std::move(law);
    }
  }

  if (j.contains("v")) {
    const auto& v = j.at("v");
    if (!v.is_array() || v.size() != p) {
      throw ConfigError("control.v: expected " + std::to_string(p) + " impulse vectors");
    }
    for (std::size_t k = 0; k < p; ++k) {
      const std::string where = "control.v[" + std::to_string(k) + "]";
      Vector val = v[k].is_array() ? vector_from_json(v[k], where)
                                   : Vector::Constant(1, number_from_json(v[k], where));
      if (val.size() != sys.input_dim()) {
        throw ConfigError(where + ": expected " + std::to_string(sys.input_dim()) +
                          " entries");
      }
      w.impulses[k] = std::move(val);
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Wave model
// ---------------------------------------------------------------------------

inline WaveModel wave_model_from_json(const json& j) {
  detail::reject_unknown(j, "wave", {"schema", "modes", "gamma", "alpha", "beta",
                                     "impulses", "horizon_b"});
  detail::check_schema(j, "wave");
  WaveModel wm;
  const auto& modes = detail::require(j, "wave", "modes");
  if (!modes.is_number_integer()) throw ConfigError("wave.modes: expected an integer");
  wm.modes = modes.get<int>();
  wm.gamma = list_from_json(detail::require(j, "wave", "gamma"), "wave.gamma");
  const auto m = static_cast<std::size_t>(std::max(wm.modes, 0));
  wm.alpha = j.contains("alpha") ? list_from_json(j.at("alpha"), "wave.alpha")
                                 : std::vector<double>(m, 0.0);
  wm.beta = j.contains("beta") ? list_from_json(j.at("beta"), "wave.beta")
                               : std::vector<double>(m, 0.0);
  wm.horizon = number_from_json(detail::require(j, "wave", "horizon_b"), "wave.horizon_b");
  if (j.contains("impulses")) {
    const auto& imps = j.at("impulses");
    if (!imps.is_array()) throw ConfigError("wave.impulses: expected an array");
    for (std::size_t i = 0; i < imps.size(); ++i) {
      const std::string where = "wave.impulses[" + std::to_string(i) + "]";
      detail::reject_unknown(imps[i], where, {"t", "a", "b"});
      WaveImpulse imp;
      imp.time = number_from_json(detail::require(imps[i], where, "t"), where + ".t");
      imp.a = list_from_json(detail::require(imps[i], where, "a"), where + ".a");
      imp.b = list_from_json(detail::require(imps[i], where, "b"), where + ".b");
      wm.impulses.push_back(std::move(imp));
    }
  }
  return wm;
}

inline json to_json(const WaveModel& wm) {
  json j;
  j["schema"] = kSchemaVersion;
  j["modes"] = wm.modes;
  j["gamma"] = wm.gamma;
  j["alpha"] = wm.alpha;
  j["beta"] = wm.beta;
  j["horizon_b"] = wm.horizon;
  j["impulses"] = json::array();
  for (const auto& imp : wm.impulses) {
    j["impulses"].push_back({{"t", imp.time}, {"a", imp.a}, {"b", imp.b}});
  }
  return j;
}

/// {"alpha": [...], "beta": [...]}.
inline WaveCoefficients wave_coefficients_from_json(const json& j,
                                                    const std::string& where) {
  detail::reject_unknown(j, where, {"alpha", "beta"});
  return {list_from_json(detail::require(j, where, "alpha"), where + ".alpha"),
          list_from_json(detail::require(j, where, "beta"), where + ".beta")};
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json_text(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": malformed JSON (" + e.what() + ")");
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  return parse_json_text(read_text_file(path), path.string());
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_file_atomic(const std::filesystem::path& path,
                              const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline const char* side_tag(Side s) {
  switch (s) {
    case Side::kLeft:
      return "L";
    case Side::kRight:
      return "R";
    case Side::kNone:
      return "-";
  }
  return "-";
}

/// Columns t, side (L/R/-), x_1..x_n.
inline std::string trajectory_csv(const Trajectory& traj, Eigen::Index n) {
  std::ostringstream os;
  os << "t,side";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x_" << i;
  os << '\n';
  for (const auto& s : traj.samples) {
    os << format_double(s.t) << ',' << side_tag(s.side);
    for (Eigen::Index i = 0; i < s.x.size(); ++i) os << ',' << format_double(s.x(i));
    os << '\n';
  }
  return os.str();
}

/// Generic numeric table with a header row.
inline std::string table_csv(const std::vector<std::string>& header,
                             const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace impulsive::io

#endif  // IMPULSIVE_IO_HPP

#pragma once

#include "qil/classes.hpp"
#include "qil/matrix.hpp"
#include "qil/spectral.hpp"
#include "qil/structure.hpp"
#include "qil/suite.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace qil {

using Json = nlohmann::json;

/// Matrix wire format: {"rows": r, "cols": c, "data": [[[re,im], ...], ...]},
/// row-major, entries as two-element arrays of finite doubles.
inline Json matrix_to_json(const CMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    data.push_back(std::move(row));
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

inline CMatrix matrix_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
    throw InvalidInputError("matrix JSON must have rows, cols and data");
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  if (rows < 1 || cols < 1) throw InvalidInputError("matrix JSON: rows and cols must be positive");
  if (rows > kMaxKroneckerDim || cols > kMaxKroneckerDim)
    throw SizeError("matrix JSON: dimensions too large");
  const Json& data = j.at("data");
  if (!data.is_array() || static_cast<Eigen::Index>(data.size()) != rows)
    throw InvalidInputError("matrix JSON: data must have one entry per row");
  CMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = data.at(i);
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw InvalidInputError("matrix JSON: row length mismatch");
    for (Eigen::Index jj = 0; jj < cols; ++jj) {
      const Json& e = row.at(jj);
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() || !e.at(1).is_number())
        throw InvalidInputError("matrix JSON: entries must be [re, im] number pairs");
      m(i, jj) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  require_finite(m, "matrix JSON");
  return m;
}

namespace detail {

inline void json_escape(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

inline void dump_fixed(const Json& j, std::string& out) {
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned: out += j.dump(); break;
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (v == 0.0) v = 0.0;  // drop the sign of negative zero
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      break;
    }
    case Json::value_t::string: json_escape(j.get<std::string>(), out); break;
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& e : j) {
        if (!first) out.push_back(',');
        first = false;
        dump_fixed(e, out);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::object: {
      out.push_back('{');
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        json_escape(it.key(), out);
        out.push_back(':');
        dump_fixed(it.value(), out);
      }
      out.push_back('}');
      break;
    }
    default: out += "null";
  }
}

}  // namespace detail

/// Deterministic serialization: object keys sorted (nlohmann default), doubles
/// rendered with fixed 17-significant-digit formatting.
inline std::string dump_json(const Json& j) {
  std::string out;
  detail::dump_fixed(j, out);
  out.push_back('\n');
  return out;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw InvalidInputError("JSON parse error in " + path + ": " + e.what());
  }
  return j;
}

inline CMatrix load_matrix_file(const std::string& path) {
  return matrix_from_json(load_json_file(path));
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

inline Json violations_to_json(const std::vector<std::pair<std::string, double>>& v) {
  Json out = Json::array();
  for (const auto& [name, mag] : v) out.push_back(Json{{"name", name}, {"magnitude", mag}});
  return out;
}

inline Json certificate_to_json(const Certificate& c) {
  return Json{{"class", to_string(c.spec.family)},
              {"m", c.spec.m},
              {"n", c.spec.n},
              {"residual_norm", c.residual_norm},
              {"scale", c.scale},
              {"passed", c.passed},
              {"hypothesis_violations", violations_to_json(c.hypothesis_violations)},
              {"recipe", c.recipe},
              {"seed", c.seed}};
}

inline Json certificate_to_json(const ConstructionCertificate& c, bool include_payload = true) {
  Json residuals = Json::object();
  for (const auto& [name, value] : c.residuals) residuals[name] = value;
  Json j{{"name", c.name},
         {"passed", c.passed},
         {"vacuous", c.vacuous},
         {"residuals", std::move(residuals)},
         {"hypothesis_violations", violations_to_json(c.hypothesis_violations)},
         {"seed", c.seed},
         {"recipe", c.recipe}};
  if (!c.note.empty()) j["note"] = c.note;
  if (include_payload) {
    Json payload = Json::object();
    for (const auto& [name, m] : c.payload) payload[name] = matrix_to_json(m);
    j["payload"] = std::move(payload);
  }
  return j;
}

inline Json suite_report_to_json(const SuiteReport& rep) {
  Json suites = Json::object();
  for (const auto& s : rep.suites) {
    Json exemplars = Json::array();
    Json details = Json::array();
    for (const auto& f : s.failures) {
      exemplars.push_back(f.sub_seed);
      details.push_back(Json{{"trial", f.trial}, {"seed", f.sub_seed}, {"detail", f.detail}});
    }
    suites[s.name] = Json{{"trials", s.trials},
                          {"passed", s.passed},
                          {"vacuous", s.vacuous},
                          {"failed", s.failed},
                          {"worst_residual", s.worst_residual},
                          {"exemplar_seeds", std::move(exemplars)},
                          {"failure_details", std::move(details)}};
  }
  Json config{{"suites", rep.config.suites},
              {"trials", rep.config.trials},
              {"dims", Json::array({rep.config.dim_min, rep.config.dim_max})},
              {"seed", rep.config.seed},
              {"sabotage", rep.config.sabotage},
              {"tol", Json{{"zero_rel", rep.config.tol.zero_rel},
                           {"rank_rel", rep.config.tol.rank_rel},
                           {"abs_floor", rep.config.tol.abs_floor}}}};
  return Json{{"suites", std::move(suites)}, {"overall", rep.overall}, {"config", std::move(config)}};
}

inline Json spectral_report_to_json(const SpectralReport& rep) {
  Json eigenvalues = Json::array();
  for (const auto& e : rep.eigenvalues) {
    eigenvalues.push_back(Json{{"value", Json::array({e.value.real(), e.value.imag()})},
                               {"algebraic_mult", e.algebraic},
                               {"geometric_mult", e.geometric},
                               {"ascent", e.ascent},
                               {"descent", e.descent},
                               {"pole_order", e.pole_order},
                               {"simple_pole", e.simple_pole},
                               {"selfadjoint_projection", e.selfadjoint_projection},
                               {"riesz_condition", e.riesz_condition},
                               {"riesz", matrix_to_json(e.riesz)}});
  }
  return Json{{"dim", rep.dim},
              {"eigenvalues", std::move(eigenvalues)},
              {"residuals",
               Json{{"resolution_identity", rep.resolution_residual},
                    {"idempotent", rep.idempotent_residual},
                    {"commutation", rep.commutation_residual},
                    {"cross_products", rep.cross_residual}}}};
}

}  // namespace qil

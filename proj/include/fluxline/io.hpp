#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/interference.hpp"
#include "fluxline/topology.hpp"

namespace fluxline {

/// Malformed input file: bad JSON syntax or a field of the wrong shape.
/// what() names the line/column or the offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

namespace io {

using Json = nlohmann::json;

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path + ": cannot open for writing");
  out << text;
  if (!out) throw Error(path + ": write failed");
}

/// Parses JSON text; syntax errors become SchemaError with a 1-based line
/// and column.
inline Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(source + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON");
  }
}

namespace detail {

inline const Json& require_field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(where + ": missing field '" + key + "'");
  return *it;
}

inline Point3 to_point(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(where + ": expected [x, y, z]");
  Point3 p;
  for (int k = 0; k < 3; ++k) {
    if (!j[k].is_number()) throw SchemaError(where + "[" + std::to_string(k) + "]: expected a number");
    p[k] = j[k].get<double>();
  }
  return p;
}

inline Json from_point(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

}  // namespace detail

/// {"points": [[x,y,z], ...]}; closure is implicit.
inline ClosedCurve curve_from_json(const Json& j, const std::string& source) {
  const Json& pts = detail::require_field(j, "points", source);
  if (!pts.is_array()) throw SchemaError(source + ": field 'points' must be an array");
  std::vector<Point3> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.push_back(detail::to_point(pts[i], source + ": points[" + std::to_string(i) + "]"));
  }
  try {
    return ClosedCurve(std::move(out));
  } catch (const InvalidArgument& e) {
    throw SchemaError(source + ": field 'points': " + e.what());
  }
}

inline Json curve_to_json(const ClosedCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.points()) pts.push_back(detail::from_point(p));
  return Json{{"points", pts}};
}

inline ClosedCurve read_curve(const std::string& path) {
  return curve_from_json(parse_json(read_text(path), path), path);
}

inline void write_curve(const std::string& path, const ClosedCurve& c) {
  write_text(path, curve_to_json(c).dump(1) + "\n");
}

/// {"vertices": [[x,y,z], ...], "triangles": [[i,j,k], ...]}.
inline TriangulatedSurface surface_from_json(const Json& j, const std::string& source) {
  const Json& vs = detail::require_field(j, "vertices", source);
  const Json& ts = detail::require_field(j, "triangles", source);
  if (!vs.is_array()) throw SchemaError(source + ": field 'vertices' must be an array");
  if (!ts.is_array()) throw SchemaError(source + ": field 'triangles' must be an array");
  TriangulatedSurface s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    s.vertices.push_back(detail::to_point(vs[i], source + ": vertices[" + std::to_string(i) + "]"));
  }
  for (std::size_t t = 0; t < ts.size(); ++t) {
    const std::string where = source + ": triangles[" + std::to_string(t) + "]";
    if (!ts[t].is_array() || ts[t].size() != 3) throw SchemaError(where + ": expected [i, j, k]");
    std::array<int, 3> tri{};
    for (int k = 0; k < 3; ++k) {
      if (!ts[t][k].is_number_integer()) throw SchemaError(where + ": expected integer indices");
      tri[k] = ts[t][k].get<int>();
    }
    s.triangles.push_back(tri);
  }
  try {
    validate(s);
  } catch (const Error& e) {
    throw SchemaError(source + ": " + e.what());
  }
  return s;
}

inline Json surface_to_json(const TriangulatedSurface& s) {
  Json vs = Json::array(), ts = Json::array();
  for (const auto& v : s.vertices) vs.push_back(detail::from_point(v));
  for (const auto& t : s.triangles) ts.push_back(Json::array({t[0], t[1], t[2]}));
  return Json{{"vertices", vs}, {"triangles", ts}};
}

inline TriangulatedSurface read_surface(const std::string& path) {
  return surface_from_json(parse_json(read_text(path), path), path);
}

inline void write_surface(const std::string& path, const TriangulatedSurface& s) {
  write_text(path, surface_to_json(s).dump(1) + "\n");
}

/// 15 significant digits, the fixed format of every CSV this library writes.
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline Json to_json(const TwoSlitConfig& c) {
  return Json{{"x0", c.x0}, {"b", c.b}, {"t_a", c.t_a}, {"t_b", c.t_b},
              {"m", c.m},   {"v", c.v}, {"hbar", TwoSlitConfig::hbar}};
}

inline std::string pattern_csv(const Pattern& p) {
  std::string out = "x_b,density\n";
  for (std::size_t i = 0; i < p.size(); ++i) out += fmt(p.x[i]) + "," + fmt(p.values[i]) + "\n";
  return out;
}

inline Json pattern_sidecar(const Pattern& p) {
  return Json{{"config", to_json(p.config)},
              {"alpha_ab", p.alpha},
              {"n_grid", p.size()},
              {"half_width", p.x.empty() ? 0.0 : p.x.back()}};
}

/// Writes `<stem>.csv` and the metadata sidecar `<stem>.json`.
inline void write_pattern(const std::string& stem, const Pattern& p) {
  write_text(stem + ".csv", pattern_csv(p));
  write_text(stem + ".json", pattern_sidecar(p).dump(2) + "\n");
}

}  // namespace io
}  // namespace fluxline

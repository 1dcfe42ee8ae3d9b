#ifndef SDDELAN_JSON_IO_HPP
#define SDDELAN_JSON_IO_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sddelan/error.hpp"
#include "sddelan/initial_path.hpp"
#include "sddelan/measure.hpp"
#include "sddelan/spectrum.hpp"

namespace sddelan {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Like json::dump but every float carries 17 significant digits and
/// non-finite values become the strings "inf", "-inf", "nan".
inline void write_json(std::ostream& os, const json& j, int indent = 2, int level = 0) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * level), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, level + 1);
      }
      os << "\n" << close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars = scalars && !v.is_structured();
      if (scalars) {
        os << "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, level + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, level + 1);
      }
      os << "\n" << close << "]";
      return;
    }
    case json::value_t::number_float: os << format_double(j.get<double>()); return;
    default: os << j.dump(); return;
  }
}

inline std::string to_json_string(const json& j) {
  std::ostringstream os;
  write_json(os, j);
  os << "\n";
  return os.str();
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

/// Reads a number that may be written as a string ("inf", "-inf", "pi",
/// "-pi/2" and similar multiples are accepted for convenience).
inline double number_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    double sign = 1.0;
    if (!s.empty() && s[0] == '-') {
      sign = -1.0;
      s = s.substr(1);
    }
    if (s == "inf") return sign * INFINITY;
    const auto pos = s.find("pi");
    if (pos != std::string::npos) {
      double mult = 1.0;
      if (pos > 0) mult = std::stod(s.substr(0, pos - (s[pos - 1] == '*' ? 1 : 0)));
      double div = 1.0;
      const auto slash = s.find('/', pos);
      if (slash != std::string::npos) div = std::stod(s.substr(slash + 1));
      return sign * mult * std::numbers::pi / div;
    }
    try {
      return sign * std::stod(s);
    } catch (const std::exception&) {
    }
  }
  throw InvalidArgument(what + ": expected a number");
}

inline SignedMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("r")) throw InvalidArgument("measure: missing 'r'");
  const double r = number_from_json(j.at("r"), "measure.r");
  std::vector<Atom> atoms;
  if (j.contains("atoms")) {
    for (const auto& at : j.at("atoms")) {
      atoms.push_back({number_from_json(at.at("u"), "atom.u"), number_from_json(at.at("w"), "atom.w")});
    }
  }
  std::vector<DensityPiece> pieces;
  if (j.contains("density")) {
    for (const auto& p : j.at("density")) {
      DensityPiece piece;
      piece.lo = number_from_json(p.at("lo"), "density.lo");
      piece.hi = number_from_json(p.at("hi"), "density.hi");
      for (const auto& c : p.at("coeffs")) piece.coeffs.push_back(number_from_json(c, "density.coeffs"));
      pieces.push_back(std::move(piece));
    }
  }
  std::optional<SampledDensity> sampled;
  if (j.contains("sampled")) {
    SampledDensity s;
    for (const auto& v : j.at("sampled").at("values")) s.values.push_back(v.get<double>());
    sampled = std::move(s);
  }
  return SignedMeasure(r, std::move(atoms), std::move(pieces), std::move(sampled));
}

inline json measure_to_json(const SignedMeasure& a) {
  json j;
  j["r"] = a.r();
  json atoms = json::array();
  for (const auto& at : a.atoms()) atoms.push_back({{"u", at.u}, {"w", at.w}});
  j["atoms"] = atoms;
  if (!a.density_pieces().empty()) {
    json dens = json::array();
    for (const auto& p : a.density_pieces()) dens.push_back({{"lo", p.lo}, {"hi", p.hi}, {"coeffs", p.coeffs}});
    j["density"] = dens;
  }
  if (a.sampled()) j["sampled"] = {{"values", a.sampled()->values}};
  return j;
}

/// Accepts a number (constant path), "zero", or an object
/// {"kind": "zero" | "constant" | "sampled", "value": c, "values": [...]}.
inline InitialPath initial_path_from_json(const json& j, double r) {
  if (j.is_null()) return InitialPath::zero();
  if (j.is_number()) return InitialPath::constant(j.get<double>());
  if (j.is_string()) {
    if (j.get<std::string>() == "zero") return InitialPath::zero();
    return InitialPath::constant(number_from_json(j, "x0"));
  }
  const std::string kind = j.value("kind", "constant");
  if (kind == "zero") return InitialPath::zero();
  if (kind == "constant") return InitialPath::constant(number_from_json(j.at("value"), "x0.value"));
  if (kind == "sampled") return InitialPath::sampled(r, j.at("values").get<std::vector<double>>());
  throw InvalidArgument("x0: unknown kind '" + kind + "'");
}

inline json initial_path_to_json(const InitialPath& x0) {
  switch (x0.kind()) {
    case InitialPath::Kind::kZero: return {{"kind", "zero"}};
    case InitialPath::Kind::kConstant: return {{"kind", "constant"}, {"value", x0.constant_value()}};
    case InitialPath::Kind::kSampled: return {{"kind", "sampled"}, {"values", x0.values()}};
  }
  return nullptr;
}

inline json double_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

inline json root_to_json(const CharRoot& rt) {
  json j;
  j["re"] = rt.lambda.real();
  j["im"] = rt.lambda.imag();
  j["multiplicity"] = rt.multiplicity;
  if (rt.m_tilde) {
    j["m_tilde"] = *rt.m_tilde;
  } else {
    j["m_tilde"] = "-inf";
  }
  json P = json::array();
  for (const auto& c : rt.P_poly) P.push_back({c.real(), c.imag()});
  j["P"] = P;
  return j;
}

inline json report_to_json(const RegimeReport& rep) {
  json j;
  j["theta"] = rep.theta;
  j["regime"] = to_string(rep.regime);
  j["v0"] = double_or_string(rep.v0);
  j["v_star"] = double_or_string(rep.v_star);
  if (rep.m_star) {
    j["m_star"] = *rep.m_star;
  } else {
    j["m_star"] = "-inf";
  }
  j["H"] = rep.H;
  j["D"] = rep.D ? json(*rep.D) : json(nullptr);
  j["period"] = rep.period() ? json(*rep.period()) : json(nullptr);
  j["scaling"] = rep.scaling.describe();
  j["cut"] = rep.cut;
  json contributing = json::array();
  for (const auto& rt : rep.contributing_roots) contributing.push_back(root_to_json(rt));
  j["contributing_roots"] = contributing;
  json roots = json::array();
  for (const auto& rt : rep.roots) roots.push_back(root_to_json(rt));
  j["roots"] = roots;
  j["warnings"] = rep.warnings;
  return j;
}

}  // namespace sddelan

#endif  // SDDELAN_JSON_IO_HPP

#pragma once

// Configuration parsing and report serialization for the command-line front end.
// Complex CSV cells are written as quoted "re,im" pairs with 17 significant digits
// under a header row c0,c1,...; the reader also accepts plain real cells.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <cmath>
#include <vector>

#include <json.hpp>

#include "kreinlab/backend.hpp"
#include "kreinlab/error.hpp"
#include "kreinlab/extensions.hpp"
#include "kreinlab/geometry.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/oracles/disk.hpp"
#include "kreinlab/oracles/interval.hpp"
#include "kreinlab/verify.hpp"

namespace kreinlab::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_not_found, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::spec_invalid, path.string() + ": " + e.what());
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::config_not_found, "cannot write " + path.string());
  out << text;
}

// ---------------------------------------------------------------------------
// Numbers

inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex(cplx z) {
  return "\"" + format_real(z.real()) + "," + format_real(z.imag()) + "\"";
}

inline double parse_real(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(Errc::spec_invalid, "not a number: '" + s + "'");
  }
  while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
  if (used != s.size()) throw Error(Errc::spec_invalid, "not a number: '" + s + "'");
  return v;
}

// Accepts "re,im", "a+bi", "a-bi", "bi" and plain reals.
inline cplx parse_complex(std::string s) {
  std::erase_if(s, [](char c) { return std::isspace(static_cast<unsigned char>(c)) || c == '"'; });
  if (s.empty()) throw Error(Errc::spec_invalid, "empty complex number");
  if (const auto comma = s.find(','); comma != std::string::npos)
    return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
  if (s.back() != 'i') return parse_real(s);
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto imag = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return parse_real(t);
  };
  if (split == std::string::npos) return {0.0, imag(s)};
  return {parse_real(s.substr(0, split)), imag(s.substr(split))};
}

// "a,b" as a real pair.
inline std::pair<double, double> parse_window(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw Error(Errc::spec_invalid, "window must be 'a,b'");
  return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
}

// "start:step:end" straight path in the complex plane; step is arc length.
inline std::vector<cplx> parse_path(const std::string& s) {
  const auto c1 = s.find(':'), c2 = s.rfind(':');
  if (c1 == std::string::npos || c1 == c2) throw Error(Errc::spec_invalid, "path must be 'start:step:end'");
  const cplx a = parse_complex(s.substr(0, c1)), b = parse_complex(s.substr(c2 + 1));
  const double step = parse_real(s.substr(c1 + 1, c2 - c1 - 1));
  if (!(step > 0.0)) throw Error(Errc::spec_invalid, "path step must be positive");
  const double len = std::abs(b - a);
  const long n = long(std::floor(len / step + 1e-9));
  if (n > 1'000'000) throw Error(Errc::window_too_wide, "path has more than 10^6 points");
  std::vector<cplx> out;
  for (long i = 0; i <= n; ++i) out.push_back(len == 0.0 ? a : a + (b - a) * (double(i) * step / len));
  if (len > 0.0 && std::abs(out.back() - b) > 1e-9 * len) out.push_back(b);
  return out;
}

// ---------------------------------------------------------------------------
// Matrix CSV

inline std::string matrix_csv(const CMat& a) {
  std::string out;
  for (Eigen::Index j = 0; j < a.cols(); ++j) out += (j ? ",c" : "c") + std::to_string(j);
  out += "\n";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out += (j ? "," : "") + format_complex(a(i, j));
    out += "\n";
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      cells.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cells.push_back(cur);
  return cells;
}

inline CMat parse_matrix_csv(const std::string& text, const std::string& origin = "matrix") {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<cplx>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (first && !cells.empty() && !cells[0].empty() && cells[0][0] == 'c') {
      first = false;
      continue;
    }
    first = false;
    std::vector<cplx> row;
    for (const auto& c : cells) row.push_back(parse_complex(c));
    if (!rows.empty() && row.size() != rows[0].size())
      throw Error(Errc::spec_invalid, origin + ": ragged rows");
    rows.push_back(std::move(row));
  }
  CMat a(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) a(i, j) = rows[i][j];
  return a;
}

inline CMat read_matrix_csv(const fs::path& path) { return parse_matrix_csv(read_text(path), path.string()); }

// ---------------------------------------------------------------------------
// Domains

inline json to_json(const geometry::CurveSpec& c) {
  json p;
  switch (c.kind) {
    case geometry::CurveKind::circle: p = {{"radius", c.a}}; break;
    case geometry::CurveKind::ellipse: p = {{"a", c.a}, {"b", c.b}}; break;
    case geometry::CurveKind::kite: p = json::object(); break;
    case geometry::CurveKind::star: p = {{"amplitude", c.a}, {"wavenumber", int(c.b)}}; break;
  }
  return {{"kind", c.name()}, {"params", p}};
}

struct Domain {
  enum class Kind { interval, disk, curve };
  Kind kind = Kind::interval;
  double radius = 1.0;  // disk model
  int cutoff = 32;      // disk model
  geometry::CurveSpec curve;

  std::string name() const {
    switch (kind) {
      case Kind::interval: return "interval";
      case Kind::disk: return "disk";
      case Kind::curve: return curve.name();
    }
    return "unknown";
  }
};

namespace detail {

inline double number(const json& params, const char* key, double fallback) {
  if (!params.contains(key)) return fallback;
  if (!params[key].is_number()) throw Error(Errc::spec_invalid, std::string("'") + key + "' must be a number");
  return params[key].get<double>();
}

}  // namespace detail

inline Domain domain_from_json(const json& j) {
  Domain d;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "interval") return d;
    if (s == "disk") {
      d.kind = Domain::Kind::disk;
      return d;
    }
    if (s == "kite") {
      d.kind = Domain::Kind::curve;
      d.curve = geometry::CurveSpec::kite();
      return d;
    }
    throw Error(Errc::spec_invalid, "unknown domain '" + s + "'");
  }
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw Error(Errc::spec_invalid, "domain needs a 'kind'");
  const auto kind = j["kind"].get<std::string>();
  const json params = j.value("params", json::object());
  using detail::number;
  if (kind == "interval") return d;
  if (kind == "disk") {
    d.kind = Domain::Kind::disk;
    d.radius = number(params, "radius", 1.0);
    const double cutoff = number(params, "cutoff", 32.0);
    if (!(d.radius > 0.0) || !(cutoff >= 0.0) || cutoff != std::floor(cutoff))
      throw Error(Errc::spec_invalid, "disk needs radius > 0 and an integer cutoff >= 0");
    d.cutoff = int(cutoff);
    return d;
  }
  d.kind = Domain::Kind::curve;
  if (kind == "circle") {
    d.curve = geometry::CurveSpec::circle(number(params, "radius", 1.0));
  } else if (kind == "ellipse") {
    d.curve = geometry::CurveSpec::ellipse(number(params, "a", 1.0), number(params, "b", 1.0));
  } else if (kind == "kite") {
    d.curve = geometry::CurveSpec::kite();
  } else if (kind == "star") {
    d.curve = {geometry::CurveKind::star, number(params, "amplitude", 0.2), number(params, "wavenumber", 5.0)};
  } else {
    throw Error(Errc::spec_invalid, "unknown domain kind '" + kind + "'");
  }
  d.curve.validate();
  return d;
}

// "interval", "disk", "kite", or a JSON file describing the domain.
inline Domain parse_domain(const std::string& arg) {
  if (arg == "interval" || arg == "disk" || arg == "kite") return domain_from_json(json(arg));
  return domain_from_json(read_json(arg));
}

// ---------------------------------------------------------------------------
// Extension specs
//
// {"backend": <domain>, "reference": "dirichlet"|"neumann", "z0": <number>,
//  "L": "krein"|"dirichlet"|"neumann"|"random"
//       | {"special": "robin", "theta": <number>} | {"special": "robin", "theta_csv": <file>}
//       | {"matrix_csv": <file>} | {"random": true},
//  "X": "full"|"zero"|{"projector_csv": <file>}}
// CSV paths are relative to the spec file. "random" draws a Hermitian L with
// entries uniform in [-1, 1] from the run seed.

struct ExtensionConfig {
  Domain domain;
  ext::ExtensionSpec spec;
};

namespace detail {

inline CMat load_matrix(const json& j, const char* key, const fs::path& base) {
  if (!j[key].is_string()) throw Error(Errc::spec_invalid, std::string("'") + key + "' must be a path");
  return read_matrix_csv(base / j[key].get<std::string>());
}

inline CMat seeded_hermitian(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return verify::detail::random_hermitian(n, rng);
}

inline int boundary_dim(const Domain& d, int nodes) {
  switch (d.kind) {
    case Domain::Kind::interval: return 2;
    case Domain::Kind::disk: return 2 * d.cutoff + 1;
    case Domain::Kind::curve: return nodes;
  }
  return 0;
}

}  // namespace detail

inline ExtensionConfig extension_from_json(const json& j, const fs::path& base, std::uint64_t seed, int nodes) {
  if (!j.is_object()) throw Error(Errc::spec_invalid, "extension spec must be a JSON object");
  ExtensionConfig c;
  c.domain = domain_from_json(j.value("backend", json("interval")));
  const int n = detail::boundary_dim(c.domain, nodes);

  const json l = j.value("L", json("krein"));
  if (l.is_string()) {
    const auto s = l.get<std::string>();
    if (s == "krein")
      c.spec = ext::ExtensionSpec::krein();
    else if (s == "dirichlet")
      c.spec = ext::ExtensionSpec::dirichlet();
    else if (s == "neumann")
      c.spec = ext::ExtensionSpec::neumann();
    else if (s == "random")
      c.spec = ext::ExtensionSpec::general(detail::seeded_hermitian(n, seed));
    else
      throw Error(Errc::spec_invalid, "unknown L '" + s + "'");
  } else if (l.is_object()) {
    const std::string special = l.value("special", std::string());
    if (special == "robin") {
      if (l.contains("theta_csv"))
        c.spec = ext::ExtensionSpec::robin(detail::load_matrix(l, "theta_csv", base));
      else
        c.spec = ext::ExtensionSpec::robin(detail::number(l, "theta", 1.0) * CMat::Identity(n, n));
    } else if (!special.empty()) {
      c.spec = extension_from_json({{"backend", j.value("backend", json("interval"))}, {"L", special}}, base,
                                   seed, nodes)
                   .spec;
    } else if (l.contains("matrix_csv")) {
      c.spec = ext::ExtensionSpec::general(detail::load_matrix(l, "matrix_csv", base));
    } else if (l.value("random", false)) {
      c.spec = ext::ExtensionSpec::general(detail::seeded_hermitian(n, seed));
    } else {
      throw Error(Errc::spec_invalid, "L object needs 'special', 'matrix_csv' or 'random'");
    }
  } else {
    throw Error(Errc::spec_invalid, "L must be a string or an object");
  }

  const std::string ref = j.value("reference", std::string("dirichlet"));
  if (ref == "neumann")
    c.spec.on(ext::Reference::neumann);
  else if (ref != "dirichlet")
    throw Error(Errc::spec_invalid, "reference must be 'dirichlet' or 'neumann'");

  if (j.contains("z0")) {
    if (!j["z0"].is_number()) throw Error(Errc::spec_invalid, "'z0' must be a number");
    c.spec.at(j["z0"].get<double>());
  }

  const json x = j.value("X", json("full"));
  if (x == "full") {
    c.spec.subspace = ext::Subspace::full;
  } else if (x == "zero") {
    c.spec.subspace = ext::Subspace::zero;
  } else if (x.is_object() && x.contains("projector_csv")) {
    c.spec.restricted_to(detail::load_matrix(x, "projector_csv", base));
  } else {
    throw Error(Errc::spec_invalid, "X must be 'full', 'zero' or {\"projector_csv\": ...}");
  }
  return c;
}

inline ExtensionConfig read_extension(const fs::path& path, std::uint64_t seed, int nodes) {
  return extension_from_json(read_json(path), path.parent_path(), seed, nodes);
}

// ---------------------------------------------------------------------------
// Reports

inline json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json to_json(const krein::SignEntry& e) {
  return {{"identity", e.identity},
          {"printed_sign", e.printed_sign},
          {"validated_sign", e.validated_sign},
          {"witness", e.witness},
          {"residual", finite_or_null(e.residual)},
          {"rejected_residual", finite_or_null(e.rejected_residual)},
          {"tolerance", e.tolerance},
          {"consistent", e.consistent()}};
}

inline json ledger_json(const verify::Report& r) {
  json entries = json::array();
  for (const auto& e : r.ledger.entries()) entries.push_back(to_json(e));
  return {{"consistent", r.ledger.consistent()}, {"violated", r.violated()}, {"entries", entries}};
}

inline json report_json(const verify::Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json item = {{"identity", c.identity},       {"paper_ref", c.paper_ref},
                 {"residual", finite_or_null(c.residual)}, {"tolerance", c.tolerance},
                 {"pass", c.pass},               {"sign_used", c.sign_used}};
    if (!c.error.empty()) item["error"] = c.error;
    checks.push_back(std::move(item));
  }
  return {{"target", verify::target_name(r.target)},
          {"seed", r.seed},
          {"pass", r.all_pass()},
          {"checks", checks},
          {"ledger", ledger_json(r)}};
}

inline json error_json(const Error& e) { return {{"error", errc_name(e.code())}, {"message", e.what()}}; }

}  // namespace kreinlab::io

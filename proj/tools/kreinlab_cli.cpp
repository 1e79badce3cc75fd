// kreinlab command-line front end: dtn, solve, spectrum, verify, mfunc-scan.
//
// Exit codes: 0 success, 1 verification failure, 2 missing configuration,
// 3 any other library error (error JSON on stdout), 4 unexpected failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kreinlab/io.hpp"
#include "kreinlab/kreinformulas.hpp"
#include "kreinlab/spectral.hpp"
#include "kreinlab/verify.hpp"
#include "kreinlab/weyl.hpp"

namespace kl = kreinlab;
namespace io = kreinlab::io;
using kl::cplx;
using kl::CMat;
using kl::CVec;
using kl::RVec;

namespace {

struct Globals {
  int nodes = 256;
  std::uint64_t seed = 1;
  std::string out;
  double tol = 1.0;
};

std::string out_or(const Globals& g, const std::string& fallback) { return g.out.empty() ? fallback : g.out; }

io::fs::path meta_path(const io::fs::path& out) {
  io::fs::path p = out;
  return p.replace_extension(".json");
}

void emit(const io::json& j) { std::cout << j.dump(2) << "\n"; }

io::json complex_json(cplx z) { return io::json::array({z.real(), z.imag()}); }

kl::BemBackend bem(const io::Domain& d, int nodes) {
  return kl::BemBackend(kl::geometry::make_grid(d.curve, nodes));
}

// Calls f with an Extension on the configured backend.
template <class F>
auto with_extension(const io::ExtensionConfig& c, int nodes, F&& f) {
  switch (c.domain.kind) {
    case io::Domain::Kind::interval:
      return f(kl::ext::Extension<kl::oracles::IntervalModel>(c.spec, kl::oracles::IntervalModel()));
    case io::Domain::Kind::disk:
      return f(kl::ext::Extension<kl::oracles::DiskModel>(c.spec,
                                                          kl::oracles::DiskModel(c.domain.radius, c.domain.cutoff)));
    case io::Domain::Kind::curve: break;
  }
  return f(kl::ext::Extension<kl::BemBackend>(c.spec, bem(c.domain, nodes)));
}

// ---------------------------------------------------------------------------
// dtn

int cmd_dtn(const Globals& g, const std::string& domain_arg, const std::string& z_arg) {
  const io::Domain d = io::parse_domain(domain_arg);
  const cplx z = io::parse_complex(z_arg);
  CMat m;
  double condition = 0.0;
  int n = 0;
  switch (d.kind) {
    case io::Domain::Kind::interval:
      m = kl::oracles::IntervalModel().dtn(z);
      condition = kl::la::condition_number(m);
      n = 2;
      break;
    case io::Domain::Kind::disk:
      m = kl::oracles::DiskModel(d.radius, d.cutoff).dtn(z);
      condition = kl::la::condition_number(m);
      n = int(m.rows());
      break;
    case io::Domain::Kind::curve: {
      const auto grid = kl::geometry::make_grid(d.curve, g.nodes);
      auto op = kl::weyl::dtn(grid, z);
      m = std::move(op.matrix);
      condition = op.condition;
      n = g.nodes;
      break;
    }
  }
  const io::fs::path out = out_or(g, "dtn.csv");
  io::write_text(out, io::matrix_csv(m));
  const io::json meta = {{"command", "dtn"},
                         {"domain", d.name()},
                         {"z", complex_json(z)},
                         {"N", n},
                         {"condition", io::finite_or_null(condition)},
                         {"csv", out.filename().string()}};
  io::write_text(meta_path(out), meta.dump(2) + "\n");
  emit(meta);
  return 0;
}

// ---------------------------------------------------------------------------
// solve

std::vector<cplx> parse_coeffs(const std::string& s) {
  std::vector<cplx> c;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto next = s.find(';', pos);
    c.push_back(io::parse_complex(s.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return c;
}

// Interval sources: poly:c0;c1;... | sin:f | cos:f (frequency f, in x).
kl::oracles::IntervalField interval_source(const std::string& s) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon), arg = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (kind == "poly") return kl::oracles::IntervalField::polynomial(parse_coeffs(arg));
  if (kind == "sin") return kl::oracles::IntervalField::sine(io::parse_real(arg));
  if (kind == "cos") return kl::oracles::IntervalField::cosine(io::parse_real(arg));
  throw kl::Error(kl::Errc::spec_invalid, "interval source must be poly:..., sin:f or cos:f");
}

// Disk sources: mode:k:c0;c1;... is (c0 r^|k| + c1 r^(|k|+2) + ...) e^{ik theta}; poly:... is mode 0.
kl::oracles::DiskField disk_source(const std::string& s, int cutoff) {
  if (s.rfind("poly:", 0) == 0) return kl::oracles::DiskField::mode(cutoff, 0, parse_coeffs(s.substr(5)));
  if (s.rfind("mode:", 0) == 0) {
    const auto colon = s.find(':', 5);
    if (colon == std::string::npos) throw kl::Error(kl::Errc::spec_invalid, "disk source mode:k:c0;c1;...");
    const int k = int(io::parse_real(s.substr(5, colon - 5)));
    if (std::abs(k) > cutoff) throw kl::Error(kl::Errc::spec_invalid, "source mode exceeds the disk cutoff");
    return kl::oracles::DiskField::mode(cutoff, k, parse_coeffs(s.substr(colon + 1)));
  }
  throw kl::Error(kl::Errc::spec_invalid, "disk source must be poly:... or mode:k:...");
}

int cmd_solve_extension(const Globals& g, const std::string& spec_path, cplx z, const std::string& source,
                        int samples) {
  const auto cfg = io::read_extension(spec_path, g.seed, g.nodes);
  const io::fs::path out = out_or(g, "solution.csv");
  std::string csv;
  double residual = 0.0, z0 = 0.0;
  if (cfg.domain.kind == io::Domain::Kind::interval) {
    kl::ext::Extension<kl::oracles::IntervalModel> e(cfg.spec, kl::oracles::IntervalModel());
    const auto u = kl::ext::apply_resolvent(e, z, interval_source(source));
    residual = kl::ext::boundary_residual(e, u);
    z0 = e.z0();
    csv = "x,u\n";
    for (int i = 0; i < samples; ++i) {
      const double x = samples > 1 ? double(i) / (samples - 1) : 0.5;
      csv += io::format_real(x) + "," + io::format_complex(u.value(x)) + "\n";
    }
  } else if (cfg.domain.kind == io::Domain::Kind::disk) {
    kl::ext::Extension<kl::oracles::DiskModel> e(cfg.spec,
                                                 kl::oracles::DiskModel(cfg.domain.radius, cfg.domain.cutoff));
    const auto u = kl::ext::apply_resolvent(e, z, disk_source(source, cfg.domain.cutoff));
    residual = kl::ext::boundary_residual(e, u);
    z0 = e.z0();
    csv = "r,theta,u\n";
    for (int i = 0; i < samples; ++i) {
      const double r = samples > 1 ? cfg.domain.radius * i / (samples - 1) : 0.0;
      for (int j = 0; j < samples; ++j) {
        const double t = 2.0 * kl::pi * j / samples;
        csv += io::format_real(r) + "," + io::format_real(t) + "," + io::format_complex(u.value(r, t)) + "\n";
      }
    }
  } else {
    throw kl::Error(kl::Errc::backend_unsupported, "extension resolvents need the interval or disk model");
  }
  io::write_text(out, csv);
  const io::json meta = {{"command", "solve"},         {"domain", cfg.domain.name()},
                         {"z", complex_json(z)},       {"z0", z0},
                         {"source", source},           {"boundary_residual", residual},
                         {"csv", out.filename().string()}};
  io::write_text(meta_path(out), meta.dump(2) + "\n");
  emit(meta);
  return 0;
}

// Boundary value problem on a curve with data e^{ik t} at the nodes.
int cmd_solve_curve(const Globals& g, const std::string& domain_arg, cplx z, const std::string& bc, int mode) {
  const io::Domain d = io::parse_domain(domain_arg);
  if (d.kind != io::Domain::Kind::curve)
    throw kl::Error(kl::Errc::spec_invalid, "boundary value problems use a curve domain; pass --spec for models");
  const auto grid = kl::geometry::make_grid(d.curve, g.nodes);
  CVec data(grid.n);
  for (int i = 0; i < grid.n; ++i) data[i] = std::polar(1.0, mode * grid.t[i]);
  kl::weyl::LayerField u;
  if (bc == "dirichlet")
    u = kl::weyl::solve_dirichlet(grid, z, data);
  else if (bc == "neumann")
    u = kl::weyl::solve_neumann(grid, z, data);
  else
    throw kl::Error(kl::Errc::spec_invalid, "--bc must be dirichlet or neumann");
  std::string csv = "t,x,y,trace_d,trace_n\n";
  for (int i = 0; i < grid.n; ++i)
    csv += io::format_real(grid.t[i]) + "," + io::format_real(grid.x(i, 0)) + "," + io::format_real(grid.x(i, 1)) +
           "," + io::format_complex(u.trace_d[i]) + "," + io::format_complex(u.trace_n[i]) + "\n";
  const io::fs::path out = out_or(g, "solution.csv");
  io::write_text(out, csv);
  const io::json meta = {{"command", "solve"}, {"domain", d.name()}, {"z", complex_json(z)},
                         {"N", grid.n},        {"bc", bc},           {"mode", mode},
                         {"condition", io::finite_or_null(u.condition)},
                         {"csv", out.filename().string()}};
  io::write_text(meta_path(out), meta.dump(2) + "\n");
  emit(meta);
  return 0;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const Globals& g, const std::string& spec_path, const std::string& window, int count,
                 double points_per_unit) {
  const auto cfg = io::read_extension(spec_path, g.seed, g.nodes);
  const auto [a, b] = io::parse_window(window);
  kl::spectral::ScanOptions opt;
  if (points_per_unit > 0.0)
    opt.points_per_unit = points_per_unit;
  else if (cfg.domain.kind == io::Domain::Kind::curve)
    opt.points_per_unit = 20.0;
  auto evs = with_extension(cfg, g.nodes, [&](const auto& e) { return kl::spectral::eigenvalues(e, a, b, opt); });
  if (count >= 0 && int(evs.size()) > count) evs.resize(count);
  std::string csv = "index,lambda,multiplicity,ratio\n";
  for (std::size_t i = 0; i < evs.size(); ++i)
    csv += std::to_string(i) + "," + io::format_real(evs[i].value) + "," + std::to_string(evs[i].multiplicity) +
           "," + io::format_real(evs[i].ratio) + "\n";
  const io::fs::path out = out_or(g, "eigs.csv");
  io::write_text(out, csv);
  io::json values = io::json::array();
  for (const auto& ev : evs) values.push_back(ev.value);
  emit({{"command", "spectrum"},
        {"domain", cfg.domain.name()},
        {"window", {a, b}},
        {"count", evs.size()},
        {"eigenvalues", values},
        {"csv", out.filename().string()}});
  return 0;
}

// ---------------------------------------------------------------------------
// mfunc-scan

int cmd_mfunc_scan(const Globals& g, const std::string& spec_path, const std::string& path_arg) {
  const auto cfg = io::read_extension(spec_path, g.seed, g.nodes);
  const auto path = io::parse_path(path_arg);
  for (const cplx z : path)
    if (!(z.imag() > 0.0)) throw kl::Error(kl::Errc::domain_error, "scan path must lie in the upper half plane");
  std::vector<RVec> rows(path.size());
  with_extension(cfg, g.nodes, [&](const auto& e) {
    if (!e.full_subspace()) throw kl::Error(kl::Errc::spec_invalid, "mfunc-scan needs X = full");
    using E = std::decay_t<decltype(e)>;
    kl::parallel_for(int(path.size()), [&](int i) {
      const CMat m = kl::ext::weyl_function(e, path[i]);
      if constexpr (std::is_same_v<E, kl::ext::Extension<kl::BemBackend>>)
        rows[i] = kl::weyl::resolved_imag_part_eigs(e.backend().grid(), m);
      else
        rows[i] = kl::la::imag_part_eigs(m, e.metric());
    });
    return 0;
  });
  const Eigen::Index cols = rows.empty() ? 0 : rows[0].size();
  std::string csv = "z";
  for (Eigen::Index j = 0; j < cols; ++j) csv += ",im_eig_" + std::to_string(j);
  csv += "\n";
  double floor = INFINITY;
  for (std::size_t i = 0; i < path.size(); ++i) {
    csv += io::format_complex(path[i]);
    for (Eigen::Index j = 0; j < cols; ++j) {
      csv += "," + io::format_real(rows[i][j]);
      floor = std::min(floor, rows[i][j]);
    }
    csv += "\n";
  }
  const io::fs::path out = out_or(g, "mfunc.csv");
  io::write_text(out, csv);
  emit({{"command", "mfunc-scan"},
        {"domain", cfg.domain.name()},
        {"points", path.size()},
        {"min_im_eigenvalue", io::finite_or_null(floor)},
        {"csv", out.filename().string()}});
  return 0;
}

// ---------------------------------------------------------------------------
// verify

int cmd_verify(const Globals& g, const std::string& suite_arg, const std::string& backend_arg,
               const std::vector<std::string>& inject) {
  const auto suite = kl::verify::parse_suite(suite_arg);
  std::vector<kl::verify::Target> targets;
  if (backend_arg == "all")
    targets = {kl::verify::Target::interval, kl::verify::Target::disk, kl::verify::Target::kite};
  else
    targets = {kl::verify::parse_target(backend_arg)};
  kl::verify::Options opt;
  opt.seed = g.seed;
  opt.nodes = g.nodes;
  opt.tol_scale = g.tol;
  opt.inject = {inject.begin(), inject.end()};

  io::json reports = io::json::array(), ledgers = io::json::array(), violated = io::json::array();
  bool pass = true, consistent = true;
  for (const auto t : targets) {
    const auto r = kl::verify::run(suite, t, opt);
    pass = pass && r.all_pass();
    consistent = consistent && r.ledger.consistent();
    for (const auto& v : r.violated()) violated.push_back(v);
    int failed = 0;
    for (const auto& c : r.checks) failed += !c.pass;
    std::cout << "verify " << suite_arg << " " << kl::verify::target_name(t) << ": " << r.checks.size()
              << " checks, " << failed << " failed, ledger " << (r.ledger.consistent() ? "consistent" : "violated")
              << "\n";
    for (const auto& c : r.checks)
      if (!c.pass) std::cout << "  FAIL " << c.identity << " residual " << io::format_real(c.residual) << " > "
                             << io::format_real(c.tolerance) << (c.error.empty() ? "" : " (" + c.error + ")") << "\n";
    for (const auto& v : r.violated()) std::cout << "  ledger violated: " << v << "\n";
    reports.push_back(io::report_json(r));
    io::json l = io::ledger_json(r);
    l["target"] = kl::verify::target_name(t);
    ledgers.push_back(std::move(l));
  }
  const io::fs::path dir = g.out.empty() ? io::fs::path(".") : io::fs::path(g.out);
  const io::json report = {{"suite", suite_arg}, {"backend", backend_arg}, {"seed", g.seed},
                           {"nodes", g.nodes},   {"tol_scale", g.tol},     {"inject", inject},
                           {"pass", pass},       {"reports", reports}};
  const io::json ledger = {{"seed", g.seed}, {"consistent", consistent}, {"violated", violated}, {"ledgers", ledgers}};
  io::write_text(dir / "report.json", report.dump(2) + "\n");
  io::write_text(dir / "ledger.json", ledger.dump(2) + "\n");
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kreinlab: boundary maps, Weyl functions and self-adjoint extensions of the Laplacian"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--nodes", g.nodes, "boundary nodes for curve domains")->capture_default_str();
  app.add_option("--seed", g.seed, "seed for randomized boundary operators")->capture_default_str();
  app.add_option("--out", g.out, "output file (directory for verify)");
  app.add_option("--tol", g.tol, "multiplier applied to verification tolerances")->capture_default_str();

  std::string domain, z = "0,0", spec, window, path, suite = "all", backend = "interval", source = "poly:1",
                      bc = "dirichlet";
  int count = -1, samples = 11, mode = 0;
  double ppu = 0.0;
  std::vector<std::string> inject;

  auto* dtn = app.add_subcommand("dtn", "Dirichlet-to-Neumann matrix at z");
  dtn->add_option("--domain", domain, "interval, disk, kite or a domain JSON file")->required();
  dtn->add_option("--z", z, "spectral parameter re,im")->capture_default_str();

  auto* solve = app.add_subcommand("solve", "extension resolvent (--spec) or boundary value problem (--domain)");
  solve->add_option("--spec", spec, "extension JSON");
  solve->add_option("--domain", domain, "curve domain for a boundary value problem");
  solve->add_option("--z", z, "spectral parameter re,im")->capture_default_str();
  solve->add_option("--source", source, "poly:c0;c1;... | sin:f | cos:f | mode:k:c0;c1;...")->capture_default_str();
  solve->add_option("--samples", samples, "samples per axis")->capture_default_str();
  solve->add_option("--bc", bc, "dirichlet or neumann (curve domains)")->capture_default_str();
  solve->add_option("--mode", mode, "boundary data e^{ikt} (curve domains)")->capture_default_str();
  solve->require_option(1, 0);

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues of an extension in a window");
  spectrum->add_option("--spec", spec, "extension JSON")->required();
  spectrum->add_option("--window", window, "a,b")->required();
  spectrum->add_option("--count", count, "keep at most this many eigenvalues");
  spectrum->add_option("--points-per-unit", ppu, "scan density");

  auto* verify = app.add_subcommand("verify", "run identity suites and the sign ledger");
  verify->add_option("--suite", suite, "weyl, traces, krein, abstract or all")->capture_default_str();
  verify->add_option("--backend", backend, "interval, disk, kite or all")->capture_default_str();
  verify->add_option("--inject", inject, "flip the recorded sign of a ledger identity");

  auto* scan = app.add_subcommand("mfunc-scan", "eigenvalues of Im M(z) along a path in the upper half plane");
  scan->add_option("--spec", spec, "extension JSON")->required();
  scan->add_option("--path", path, "start:step:end")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (dtn->parsed()) return cmd_dtn(g, domain, z);
    if (solve->parsed()) {
      if (!spec.empty()) return cmd_solve_extension(g, spec, io::parse_complex(z), source, samples);
      return cmd_solve_curve(g, domain, io::parse_complex(z), bc, mode);
    }
    if (spectrum->parsed()) return cmd_spectrum(g, spec, window, count, ppu);
    if (verify->parsed()) return cmd_verify(g, suite, backend, inject);
    if (scan->parsed()) return cmd_mfunc_scan(g, spec, path);
  } catch (const kl::Error& e) {
    emit(io::error_json(e));
    return e.code() == kl::Errc::config_not_found ? 2 : 3;
  } catch (const std::exception& e) {
    emit({{"error", "internal"}, {"message", e.what()}});
    return 4;
  }
  return 0;
}

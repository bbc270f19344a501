#include "prodsurf/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <json.hpp>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "prodsurf/fixtures.hpp"
#include "prodsurf/frame_reconstruct.hpp"
#include "prodsurf/io.hpp"
#include "prodsurf/parallel.hpp"
#include "prodsurf/sinh_gordon.hpp"

namespace prodsurf {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Global {
  int threads = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
};

std::string resolve(const Global& g, const std::string& path) {
  if (path.empty() || g.out_dir.empty() || fs::path(path).is_absolute()) return path;
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / path).string();
}

std::string to_text(const auto& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

void add_lab_options(CLI::App* cmd, LabOptions& o) {
  cmd->add_option("--isothermal-tol", o.isothermal_tol, "relative isothermality tolerance")->capture_default_str();
  cmd->add_option("--immersion-eps", o.immersion_eps, "smallest accepted e^{2u}")->capture_default_str();
  cmd->add_option("--clamp-tol", o.clamp_tol, "largest accepted |C|-1 before clamping")->capture_default_str();
  cmd->add_option("--complex-eps", o.complex_eps, "complex point when 1-C^2 is below this")->capture_default_str();
  cmd->add_option("--lagrangian-eps", o.lagrangian_eps, "Lagrangian when |C| is below this")->capture_default_str();
  cmd->add_option("--minimal-tol", o.minimal_tol, "|H| bound for minimal-surface formulas")->capture_default_str();
  cmd->add_option("--boundary-margin", o.boundary_margin, "edge band excluded from residual stats")
      ->capture_default_str();
}

json identity_json(const IdentityReport& r) {
  json j = json::object();
  for (const ResidualStat& s : r.entries)
    j[s.name] = {{"max", s.max}, {"mean", s.mean}, {"count", s.count}, {"skipped", s.skipped}};
  return j;
}

void print_identities(std::ostream& out, const IdentityReport& r, double tol) {
  out << std::left << std::setw(22) << "identity" << std::right << std::setw(12) << "max" << std::setw(12) << "mean"
      << std::setw(8) << "nodes" << std::setw(8) << "skipped" << "  status\n";
  for (const ResidualStat& s : r.entries)
    out << std::left << std::setw(22) << s.name << std::right << std::scientific << std::setprecision(3)
        << std::setw(12) << s.max << std::setw(12) << s.mean << std::defaultfloat << std::setw(8) << s.count
        << std::setw(8) << s.skipped << "  " << (s.max <= tol ? "ok" : "FAIL") << '\n';
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string patch, table, json_path;
  double residual_tol = 1e-5;
  LabOptions lab;
};

int cmd_analyze(const Global& g, const AnalyzeArgs& a, std::ostream& out) {
  const ImmersedPatch patch = load_patch(a.patch);
  const Analysis an = analyze(patch, a.lab);
  const double worst = an.identities.worst();
  const bool pass = worst <= a.residual_tol;
  out << "nodes " << patch.grid.nx << 'x' << patch.grid.ny << " (boundary band " << an.identities.boundary_nodes
      << ", complex nodes " << an.identities.complex_nodes << ")\n";
  out << "classification: " << an.classification.summary() << '\n';
  out << "max |H|: " << an.second.max_H << '\n';
  print_identities(out, an.identities, a.residual_tol);
  out << "residuals: " << (pass ? "pass" : "fail") << " (worst " << worst << ", tolerance " << a.residual_tol << ")\n";
  if (!a.table.empty()) save_text(resolve(g, a.table), to_text([&](std::ostream& os) { write_node_table(os, an); }));
  if (!a.json_path.empty()) {
    json j = {{"classification", an.classification.summary()},
              {"max_H", an.second.max_H},
              {"worst_residual", worst},
              {"residual_tol", a.residual_tol},
              {"pass", pass},
              {"identities", identity_json(an.identities)}};
    save_text(resolve(g, a.json_path), j.dump(2) + "\n");
  }
  return pass ? kExitOk : kExitNonConvergence;
}

// ----------------------------------------------------------------- sg-solve

struct SolveArgs {
  std::string grid = "64x64", bc = "periodic", init = "zero", scheme = "five-point", out;
  double tol = 1e-10, half = 1.5, amplitude = 0.1, damping = 1.0;
  int max_iter = 50;
};

int parse_square(const std::string& s) {
  const auto x = s.find('x');
  try {
    const int n = std::stoi(s.substr(0, x));
    if (x != std::string::npos && std::stoi(s.substr(x + 1)) != n)
      throw std::invalid_argument("grids must be square (NxN)");
    return n;
  } catch (const std::invalid_argument& e) {
    if (std::string(e.what()).find("square") != std::string::npos) throw;
    throw std::invalid_argument("bad grid '" + s + "', expected NxN");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string t; std::getline(ss, t, sep);) out.push_back(t);
  return out;
}

int cmd_sg_solve(const Global& g, const SolveArgs& a, std::ostream& out) {
  SolverConfig cfg;
  cfg.bc = a.bc == "periodic" ? Boundary::periodic : Boundary::dirichlet;
  cfg.scheme = a.scheme == "compact" ? Scheme::compact : Scheme::five_point;
  cfg.tol = a.tol;
  cfg.max_iter = a.max_iter;
  cfg.damping = a.damping;
  const int n = parse_square(a.grid);
  const GridSpec grid = cfg.bc == Boundary::periodic ? torus_grid(n) : square_grid(n, a.half);

  ScalarField X0(grid, 0.0);
  const auto parts = split(a.init, ':');
  if (parts[0] == "zero" && parts.size() == 1) {
  } else if (parts[0] == "random" && parts.size() <= 2) {
    std::mt19937_64 rng(parts.size() == 2 ? std::stoull(parts[1]) : g.seed);
    std::uniform_real_distribution<double> u(-a.amplitude, a.amplitude);
    for (double& v : X0.values) v = u(rng);
  } else if (parts[0] == "file" && parts.size() == 2) {
    X0 = load_field(parts[1]);
    if (X0.grid != grid) throw std::invalid_argument("initial field grid does not match --grid/--bc/--half");
  } else if (parts[0] == "profile" && parts.size() == 4) {
    const double r = std::hypot(grid.x(0), grid.y(0)) + std::hypot(grid.x(n - 1), grid.y(n - 1)) + 1.0;
    X0 = ProfileSolution(std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]), -r, r).sample(grid);
  } else {
    throw std::invalid_argument("--init must be zero, random[:seed], file:PATH or profile:ANGLE:VALUE:SLOPE");
  }

  const SolveResult r = solve(X0, cfg);
  out << "grid " << n << 'x' << n << " bc " << a.bc << " scheme " << a.scheme << '\n';
  out << "iterations " << r.iterations << " residual " << r.residual << '\n';
  if (!a.out.empty()) save_text(resolve(g, a.out), to_text([&](std::ostream& os) { write_field(os, r.X); }));
  return kExitOk;
}

// ------------------------------------------------- construct / reconstruct

struct ConstructArgs {
  std::string x1, x2, out, order = "xy";
  int flat = 0;
  double t = 0.0, drift_bound = 1e-3, tol = 1e-5;
  bool renormalize = false;
};

Theorem2Data load_data(const ConstructArgs& a) {
  if (a.flat > 0) {
    if (!a.x1.empty() || !a.x2.empty()) throw std::invalid_argument("--flat excludes --x1/--x2");
    const ScalarField zero(torus_grid(a.flat), 0.0);
    return build_data(zero, zero, a.t);
  }
  if (a.x1.empty() || a.x2.empty()) throw std::invalid_argument("need --x1 and --x2, or --flat N");
  return build_data(load_field(a.x1), load_field(a.x2), a.t);
}

Summary construct_summary(const Reconstruction& rec, const ValidationReport& v, double t) {
  auto num = [](double x) {
    std::ostringstream os;
    os << std::setprecision(6) << x;
    return os.str();
  };
  return {{"t", num(t)},
          {"quadric_drift", num(rec.drift.quadric)},
          {"algebraic_drift", num(rec.drift.algebraic)},
          {"j_relation_drift", num(rec.drift.j_relations)},
          {"metric_error_state", num(v.metric_state)},
          {"metric_error_stencil", num(v.metric_stencil)},
          {"kahler_error_state", num(v.kahler_state)},
          {"kahler_error_reanalysis", num(v.kahler_stencil)},
          {"closure_x", num(rec.drift.closure_x)},
          {"closure_y", num(rec.drift.closure_y)},
          {"aborted", rec.aborted ? "yes" : "no"}};
}

int cmd_construct(const Global& g, const ConstructArgs& a, bool round_trip, std::ostream& out) {
  const Theorem2Data data = load_data(a);
  IntegrateOptions opts;
  opts.order = a.order == "yx" ? IntegrationOrder::y_then_x : IntegrationOrder::x_then_y;
  opts.drift_bound = a.drift_bound;
  opts.renormalize = a.renormalize;
  const Reconstruction rec = integrate(data, opts);
  const ValidationReport v = validate(rec, data);
  const Summary s = construct_summary(rec, v, a.t);
  for (const auto& [k, val] : s) out << k << ' ' << val << '\n';
  if (!v.error.empty()) out << "reanalysis_error " << v.error << '\n';
  if (!a.out.empty())
    save_text(resolve(g, a.out), to_text([&](std::ostream& os) { write_patch(os, rec.patch, s); }));
  if (rec.aborted) {
    out << "aborted: " << rec.message << '\n';
    return kExitNonConvergence;
  }
  if (round_trip) {
    const bool ok = v.error.empty() && v.kahler_stencil <= a.tol;
    out << "round trip: " << (ok ? "pass" : "fail") << " (C1, C2 recovered to " << v.kahler_stencil
        << ", tolerance " << a.tol << ")\n";
    return ok ? kExitOk : kExitNonConvergence;
  }
  return kExitOk;
}

// --------------------------------------------------------------------- flow

TriMesh builtin_mesh(const std::string& spec) {
  const auto p = split(spec, ':');
  const std::string& name = p[0];
  const int level = p.size() > 1 ? std::stoi(p[1]) : -1;
  if (name == "slice-icosphere") return slice_icosphere(level < 0 ? 3 : level);
  if (name == "diagonal-icosphere") return diagonal_icosphere(level < 0 ? 3 : level);
  if (name == "great-circle-torus") return great_circle_torus(level < 0 ? 32 : level, level < 0 ? 32 : level);
  if (name == "geodesic-torus-h2") return geodesic_torus_h2(level < 0 ? 16 : level, level < 0 ? 16 : level, 1.0, 1.2);
  if (name == "hyperbolic-icosphere") return hyperbolic_icosphere(level < 0 ? 2 : level, 1.0);
  throw std::invalid_argument("unknown mesh '" + name + "'");
}

const std::vector<std::string>& builtin_mesh_names() {
  static const std::vector<std::string> n = {"slice-icosphere", "diagonal-icosphere", "great-circle-torus",
                                             "geodesic-torus-h2", "hyperbolic-icosphere"};
  return n;
}

struct FlowArgs {
  std::string mesh, builtin, factors, out, final_mesh, step = "backtracking", projection = "normal";
  double perturb = 0.0;
  FlowConfig cfg;
};

int cmd_flow(const Global& g, FlowArgs a, std::ostream& out) {
  if (a.mesh.empty() == a.builtin.empty()) throw std::invalid_argument("give exactly one of --mesh and --builtin");
  TriMesh mesh = a.mesh.empty() ? builtin_mesh(a.builtin) : load_mesh(a.mesh);
  if (!a.factors.empty()) {
    const auto f = split(a.factors, ',');
    if (f.size() != 2) throw std::invalid_argument("--factors needs two kinds, e.g. s2,s2");
    for (int k = 0; k < 2; ++k) {
      const std::string name = f[k] == "s2" ? "sphere" : f[k] == "h2" ? "hyperbolic" : f[k] == "r2" ? "flat" : f[k];
      if (factor_kind_from_string(name) != mesh.factors[k])
        throw std::invalid_argument("--factors does not match the mesh");
    }
  }
  validate_mesh(mesh);
  if (a.perturb > 0) mesh = perturb(mesh, a.perturb, g.seed);
  a.cfg.step = a.step == "fixed" ? StepPolicy::fixed : StepPolicy::backtracking;
  a.cfg.projection = a.projection == "full" ? GradientProjection::full : GradientProjection::normal;

  const FlowResult r = flow(mesh, a.cfg);
  const FlowSample& first = r.report.trajectory.front();
  const FlowSample& last = r.report.trajectory.back();
  out << std::setprecision(10);
  out << "status " << to_string(r.report.status) << '\n';
  out << "iterations " << r.report.iterations() << '\n';
  out << "area " << first.area << " -> " << last.area << " (area/4pi " << last.area / (4 * std::numbers::pi) << ")\n";
  out << "gradient " << last.grad_norm << " (full " << last.full_grad_norm << ")\n";
  out << "min_edge " << last.min_edge << " min_quality " << last.min_quality << '\n';
  out << "mean |C1| " << last.mean_abs_C1 << " mean |C2| " << last.mean_abs_C2 << '\n';
  out << "area_monotone " << (r.report.area_monotone ? "yes" : "no") << " quadric_violation "
      << r.report.max_quadric_violation << '\n';
  if (r.report.status != FlowStatus::degenerated) {
    const EulerReport e = euler_characteristic(r.mesh);
    out << "euler " << e.chi << " angle_defect_chi " << e.defect_chi << '\n';
  }
  for (const std::string& n : r.report.notes) out << "note: " << n << '\n';
  if (!a.out.empty())
    save_text(resolve(g, a.out), to_text([&](std::ostream& os) { write_trajectory_csv(os, r.report); }));
  if (!a.final_mesh.empty())
    save_text(resolve(g, a.final_mesh), to_text([&](std::ostream& os) { write_mesh(os, r.mesh); }));
  switch (r.report.status) {
    case FlowStatus::converged: return kExitOk;
    case FlowStatus::degenerated: return kExitDegenerated;
    default: return kExitNonConvergence;
  }
}

// ------------------------------------------------------------------- verify

struct Expectation {
  std::string classification;
  double mean_curvature;                  // expected max |H|
  std::vector<std::string> minimal_only;  // identities that must fail when H ≠ 0
};

Expectation expectation(const std::string& name) {
  if (name == "slice") return {"complex-J1 complex-J2", 0.0, {}};
  if (name == "geodesic-product") return {"lagrangian-O1 lagrangian-O2", 0.0, {}};
  if (name == "diagonal") return {"complex-J1 lagrangian-O2", 0.0, {}};
  if (name == "small-circle")
    return {"lagrangian-O1 lagrangian-O2", 0.5 / std::tan(1.0), {"C_z_1", "C_z_2", "f_norm_1", "f_norm_2"}};
  throw std::invalid_argument("unknown fixture '" + name + "'");
}

struct VerifyArgs {
  std::string fixtures = "all", dir, json_path;
  int n = 33;
  double residual_tol = 1e-5, curvature_tol = 1e-4;
  bool verbose = false;
  LabOptions lab;
};

int cmd_verify(const Global& g, const VerifyArgs& a, std::ostream& out) {
  const std::vector<std::string> names = a.fixtures == "all" ? fixture_names() : split(a.fixtures, ',');
  bool all = true;
  json report = json::object();
  out << std::left << std::setw(18) << "fixture" << std::setw(30) << "classification" << std::setw(14)
      << "identities" << std::setw(12) << "|H|" << "result\n";
  for (const std::string& name : names) {
    const Expectation ex = expectation(name);
    const ImmersedPatch patch = a.dir.empty() ? named_fixture(name, a.n) : load_patch((fs::path(a.dir) / (name + ".patch")).string());
    const Analysis an = analyze(patch, a.lab);
    const bool cls = an.classification.summary() == ex.classification;
    int ok = 0;
    for (const ResidualStat& s : an.identities.entries) {
      const bool minimal_only =
          std::find(ex.minimal_only.begin(), ex.minimal_only.end(), s.name) != ex.minimal_only.end();
      ok += minimal_only ? s.max > a.residual_tol : s.max <= a.residual_tol;
    }
    const bool ids = ok == static_cast<int>(an.identities.entries.size());
    const bool H = std::abs(an.second.max_H - ex.mean_curvature) <= a.curvature_tol;
    const bool pass = cls && ids && H;
    all = all && pass;
    std::ostringstream idc;
    idc << ok << '/' << an.identities.entries.size();
    out << std::left << std::setw(18) << name << std::setw(30) << (an.classification.summary() + (cls ? "" : " (!)"))
        << std::setw(14) << idc.str() << std::setw(12) << (H ? "ok" : "FAIL") << (pass ? "pass" : "FAIL") << '\n';
    if (a.verbose) print_identities(out, an.identities, a.residual_tol);
    report[name] = {{"classification", an.classification.summary()},
                    {"expected_classification", ex.classification},
                    {"max_H", an.second.max_H},
                    {"pass", pass},
                    {"identities", identity_json(an.identities)}};
  }
  out << (all ? "all fixtures pass" : "some fixtures FAIL") << '\n';
  if (!a.json_path.empty()) save_text(resolve(g, a.json_path), report.dump(2) + "\n");
  return all ? kExitOk : kExitNonConvergence;
}

// ------------------------------------------------------------------ fixture

struct FixtureArgs {
  std::string name, out, dir;
  int n = 33;
};

int cmd_fixture(const Global& g, const FixtureArgs& a, std::ostream& out) {
  auto write_one = [&](const std::string& name, const std::string& path) {
    const auto names = fixture_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) {
      const ImmersedPatch p = named_fixture(name, a.n);
      save_text(path, to_text([&](std::ostream& os) { write_patch(os, p, {{"fixture", name}}); }));
    } else {
      const TriMesh m = builtin_mesh(name);
      save_text(path, to_text([&](std::ostream& os) { write_mesh(os, m); }));
    }
    out << "wrote " << path << '\n';
  };
  if (a.name == "all") {
    if (a.dir.empty()) throw std::invalid_argument("fixture all needs --dir");
    fs::create_directories(resolve(g, a.dir));
    for (const std::string& n : fixture_names()) write_one(n, (fs::path(resolve(g, a.dir)) / (n + ".patch")).string());
    for (const std::string& n : builtin_mesh_names()) write_one(n, (fs::path(resolve(g, a.dir)) / (n + ".off")).string());
    return kExitOk;
  }
  if (a.out.empty()) throw std::invalid_argument("fixture needs --out");
  write_one(a.name, resolve(g, a.out));
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical lab for surfaces in products of surfaces"};
  app.name("prodsurf");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI file with option values");
  Global g;
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--seed", g.seed, "seed for every random step")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for relative output paths");

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "analyze a patch file");
  c_an->add_option("patch", an.patch, "patch file")->required();
  c_an->add_option("--table", an.table, "node table CSV");
  c_an->add_option("--json", an.json_path, "summary JSON");
  c_an->add_option("--residual-tol", an.residual_tol, "identity residual tolerance")->capture_default_str();
  add_lab_options(c_an, an.lab);

  SolveArgs sg;
  auto* c_sg = app.add_subcommand("sg-solve", "solve X_zzbar + sinh(2X)/2 = 0");
  c_sg->add_option("--grid", sg.grid, "NxN")->capture_default_str();
  c_sg->add_option("--bc", sg.bc)->check(CLI::IsMember({"periodic", "dirichlet"}))->capture_default_str();
  c_sg->add_option("--scheme", sg.scheme)->check(CLI::IsMember({"five-point", "compact"}))->capture_default_str();
  c_sg->add_option("--tol", sg.tol)->capture_default_str();
  c_sg->add_option("--max-iter", sg.max_iter)->capture_default_str();
  c_sg->add_option("--damping", sg.damping)->capture_default_str();
  c_sg->add_option("--init", sg.init, "zero | random[:seed] | file:PATH | profile:ANGLE:VALUE:SLOPE")
      ->capture_default_str();
  c_sg->add_option("--amplitude", sg.amplitude, "random initial amplitude")->capture_default_str();
  c_sg->add_option("--half", sg.half, "Dirichlet square half-width")->capture_default_str();
  c_sg->add_option("--out", sg.out, "field file");

  ConstructArgs co;
  auto add_construct = [](CLI::App* c, ConstructArgs& a) {
    c->add_option("--x1", a.x1, "field file");
    c->add_option("--x2", a.x2, "field file");
    c->add_option("--flat", a.flat, "use X1 = X2 = 0 on an NxN torus grid");
    c->add_option("--t", a.t, "family parameter")->capture_default_str();
    c->add_option("--order", a.order, "xy or yx")->check(CLI::IsMember({"xy", "yx"}))->capture_default_str();
    c->add_option("--drift-bound", a.drift_bound)->capture_default_str();
    c->add_flag("--renormalize", a.renormalize, "project to the spheres after every step");
    c->add_option("--out", a.out, "surface file");
  };
  auto* c_co = app.add_subcommand("construct", "integrate the frame system for (X1, X2, t)");
  add_construct(c_co, co);
  ConstructArgs re;
  auto* c_re = app.add_subcommand("reconstruct", "construct, re-analyze and compare C1, C2");
  add_construct(c_re, re);
  c_re->add_option("--tol", re.tol, "largest accepted C1/C2 recovery error")->capture_default_str();

  FlowArgs fl;
  auto* c_fl = app.add_subcommand("flow", "discrete area-decreasing flow of a mesh");
  c_fl->add_option("--mesh", fl.mesh, "OFF mesh file");
  c_fl->add_option("--builtin", fl.builtin, "NAME[:LEVEL]");
  c_fl->add_option("--factors", fl.factors, "expected factors, e.g. s2,s2");
  c_fl->add_option("--grad-tol", fl.cfg.grad_tol)->capture_default_str();
  c_fl->add_option("--max-iters", fl.cfg.max_iters)->capture_default_str();
  c_fl->add_option("--step", fl.step)->check(CLI::IsMember({"backtracking", "fixed"}))->capture_default_str();
  c_fl->add_option("--step-size", fl.cfg.step_size)->capture_default_str();
  c_fl->add_option("--projection", fl.projection)->check(CLI::IsMember({"normal", "full"}))->capture_default_str();
  c_fl->add_option("--min-edge-ratio", fl.cfg.min_edge_ratio)->capture_default_str();
  c_fl->add_option("--min-quality", fl.cfg.min_quality)->capture_default_str();
  c_fl->add_option("--armijo", fl.cfg.armijo)->capture_default_str();
  c_fl->add_option("--perturb", fl.perturb, "random tangent perturbation amplitude (uses --seed)");
  c_fl->add_option("--out", fl.out, "trajectory CSV");
  c_fl->add_option("--final-mesh", fl.final_mesh, "final mesh OFF");

  VerifyArgs ve;
  auto* c_ve = app.add_subcommand("verify", "run the identity suite on fixtures");
  c_ve->add_option("--fixtures", ve.fixtures, "all or comma-separated names")->capture_default_str();
  c_ve->add_option("--dir", ve.dir, "load <name>.patch files from here instead of building them");
  c_ve->add_option("--n", ve.n, "fixture grid size")->capture_default_str();
  c_ve->add_option("--residual-tol", ve.residual_tol)->capture_default_str();
  c_ve->add_option("--curvature-tol", ve.curvature_tol, "tolerance on max |H|")->capture_default_str();
  c_ve->add_option("--json", ve.json_path, "report JSON");
  c_ve->add_flag("--verbose", ve.verbose, "print every identity");
  add_lab_options(c_ve, ve.lab);

  FixtureArgs fx;
  auto* c_fx = app.add_subcommand("fixture", "write a fixture patch or mesh");
  c_fx->add_option("name", fx.name, "fixture or mesh name, or 'all'")->required();
  c_fx->add_option("--n", fx.n, "patch grid size")->capture_default_str();
  c_fx->add_option("--out", fx.out, "output file");
  c_fx->add_option("--dir", fx.dir, "output directory for 'all'");

  std::vector<std::string> argv_store{"prodsurf"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_store) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  const int old_threads = thread_count();
  set_thread_count(g.threads);
  int code = kExitInternal;
  try {
    if (*c_an) code = cmd_analyze(g, an, out);
    else if (*c_sg) code = cmd_sg_solve(g, sg, out);
    else if (*c_co) code = cmd_construct(g, co, false, out);
    else if (*c_re) code = cmd_construct(g, re, true, out);
    else if (*c_fl) code = cmd_flow(g, fl, out);
    else if (*c_ve) code = cmd_verify(g, ve, out);
    else if (*c_fx) code = cmd_fixture(g, fx, out);
  } catch (const SolveError& e) {
    err << "error: " << e.what() << '\n';
    code = kExitNonConvergence;
  } catch (const FormatError& e) {
    err << "input error: " << e.what() << '\n';
    code = kExitInput;
  } catch (const AnalysisError& e) {
    err << "input error: " << e.what() << '\n';
    code = kExitInput;
  } catch (const ReconstructionError& e) {
    err << "input error: " << e.what() << '\n';
    code = kExitInput;
  } catch (const std::invalid_argument& e) {
    err << "input error: " << e.what() << '\n';
    code = kExitInput;
  } catch (const std::domain_error& e) {
    err << "input error: " << e.what() << '\n';
    code = kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    code = kExitInternal;
  }
  set_thread_count(old_threads);
  return code;
}

}  // namespace prodsurf

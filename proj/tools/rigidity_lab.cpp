// rigidity_lab: command-line driver for the ray tracer, hodograph tables and the inequality checks.
//
// Exit codes: 0 all checks pass, 1 a checked inequality or identity fails, 2 configuration or
// command-line error, 3 numerical failure.

#include <CLI11.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "output.hpp"
#include "rigidity/errors.hpp"
#include "rigidity/hodograph.hpp"
#include "rigidity/parallel.hpp"
#include "rigidity/reconstruction.hpp"
#include "rigidity/rigidity_suite.hpp"
#include "rigidity/scenario.hpp"
#include "rigidity/tracer.hpp"

namespace {

using namespace rigidity;
using nlohmann::json;
namespace fs = std::filesystem;

// A check failed. The message names the statement being checked.
struct CheckFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::string grid;
  int threads = 0;
};

Scenario default_scenario() {
  Scenario s;
  s.media.push_back(constant_spec(1.0));
  s.media.push_back(bumps_spec(1.0, {{0.1, {0.3, 0.0}, 0.25}}, true));
  s.perturbation = bumps_spec(0.0, {{1.0, {0.3, 0.1}, 0.25}}, true);
  return s;
}

Scenario scenario_from(const Globals& g) {
  Scenario s = g.config.empty() ? default_scenario() : load_scenario(g.config);
  if (g.seed) s.seed = *g.seed;
  if (!g.grid.empty()) s.grid = parse_grid_flag(g.grid);
  return s;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// A medium file holds either a medium object or a scenario with a "medium" key.
MediumSpec load_medium(const std::string& path) {
  json j = read_json(path);
  fs::path base = fs::path(path).parent_path();
  if (j.is_object() && j.contains("medium")) return parse_medium(j["medium"], base, path + ": medium");
  return parse_medium(j, base, path);
}

MediumSpec medium_or(const std::string& path, const Scenario& s, std::size_t index, const char* what) {
  if (!path.empty()) return load_medium(path);
  if (s.media.size() <= index) throw ConfigError(std::string(what) + ": scenario has no media[" + std::to_string(index) + "]");
  return s.media[index];
}

Vec2 parse_point(const std::string& text) {
  double x = 0.0, y = 0.0;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> x >> comma >> y) || comma != ',' || !(in >> std::ws).eof())
    throw ConfigError("point \"" + text + "\": expected x,y");
  return {x, y};
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ConfigError(std::string(flag) + ": cannot parse \"" + text + "\"");
    }
  }
  return v;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void require_non_trapping(const RefractionField& n, const Domain& d, std::uint64_t seed, const std::string& name,
                          json& sidecar) {
  NonTrappingReport r = non_trapping_check(n, d, 200, seed);
  sidecar["non_trapping"][name] = {{"ok", r.ok},
                                   {"samples", r.samples},
                                   {"trapped", r.trapped},
                                   {"tangent_exits", r.tangent_exits},
                                   {"worst_exit_cosine", r.worst_exit_cosine},
                                   {"max_path_length", r.max_path_length}};
  if (!r.ok)
    throw NumericalError(ErrorKind::Trapped, name + " fails the non-trapping check (" + std::to_string(r.trapped) +
                                                 " trapped, " + std::to_string(r.tangent_exits) + " tangent exits)");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// --- trace ------------------------------------------------------------------------------------

struct TraceArgs {
  std::string medium;
  std::string x = "0,0";
  std::string phi = "0";
  bool chord = false;
  std::string s = "0";
  bool forward = false;
  int fan = 0;
};

int run_trace(const Globals& g, const TraceArgs& a) {
  Scenario sc = scenario_from(g);
  Domain d = make_domain(sc.domain);
  RefractionField n = make_medium(medium_or(a.medium, sc, 0, "trace"), d);
  TracerOptions o;
  o.node_spacing = 0.01 * d.diameter();
  double phi = parse_angle(a.phi);
  GeodesicPath p;
  if (a.chord) {
    double s = parse_list(a.s, "--s").at(0);
    p = trace_chord(s, phi, n, d, o);
  } else if (a.forward) {
    p = trace_forward(parse_point(a.x), phi, n, d, o);
  } else {
    p = trace_backward(parse_point(a.x), phi, n, d, o);
  }
  lab::CsvWriter csv({"sigma", "x", "y", "phi", "tau"});
  std::vector<Vec2> pts;
  for (const RayState& r : p.nodes) {
    csv.row({r.sigma, r.x.x, r.x.y, r.phi, r.tau});
    pts.push_back(r.x);
  }
  fs::path out = g.out;
  lab::write_file(out, "path.csv", csv.str());

  BoundingBox box = d.bounds();
  double pad = 0.05 * d.diameter();
  lab::Svg svg(box.lo.x - pad, box.lo.y - pad, box.hi.x + pad, box.hi.y + pad);
  svg.polyline(lab::boundary_polyline(d), "black", 1.5, true);
  if (a.chord && a.fan > 0) {
    // Fan of chords from the same entry point.
    double s = parse_list(a.s, "--s").at(0);
    TracerOptions fo = o;
    for (int k = 0; k < a.fan; ++k) {
      double nu = std::atan2(d.boundary().inward_conormal(s).y, d.boundary().inward_conormal(s).x);
      double ph = nu - 0.5 * kPi + kPi * (k + 0.5) / a.fan;
      try {
        GeodesicPath q = trace_chord(s, ph, n, d, fo);
        std::vector<Vec2> qp;
        for (const RayState& r : q.nodes) qp.push_back(r.x);
        svg.polyline(qp, "#7fa7d9", 0.8);
      } catch (const NumericalError&) {
        // grazing rays are left out of the picture
      }
    }
  }
  svg.polyline(pts, "#c0392b", 2.0);
  lab::write_file(out, "ray.svg", svg.str());

  std::printf("status        %s\n", to_string(p.status));
  std::printf("entry         s=%.12g  point=(%.12g, %.12g)  cos=%.6g\n", p.entry_s, p.entry_point().x,
              p.entry_point().y, p.entry_cosine);
  if (!std::isnan(p.exit_s))
    std::printf("exit          s=%.12g  phi=%.12g  cos=%.6g\n", p.exit_s, p.exit_phi, p.exit_cosine);
  std::printf("travel time   %.15g\n", p.travel_time());
  std::printf("length        %.15g\n", p.length());
  std::printf("nodes         %zu  (steps %d accepted, %d rejected)\n", p.nodes.size(), p.accepted_steps,
              p.rejected_steps);
  std::printf("wrote         %s, %s\n", (out / "path.csv").c_str(), (out / "ray.svg").c_str());
  return 0;
}

// --- hodograph --------------------------------------------------------------------------------

int run_hodograph(const Globals& g, const std::string& medium) {
  Scenario sc = scenario_from(g);
  Domain d = make_domain(sc.domain);
  MediumSpec spec = medium_or(medium, sc, 0, "hodograph");
  RefractionField n = make_medium(spec, d);
  json side;
  require_non_trapping(n, d, sc.seed, "medium", side);
  HodographTable t = build_hodograph(n, d, sc.grid.n_s, sc.grid.n_phi);
  const BoundaryGrid& bg = t.grid;
  lab::CsvWriter csv({"s", "phi", "tau", "exit_s", "exit_phi"});
  for (int i = 0; i < bg.n_s; ++i)
    for (int j = 0; j < bg.n_phi; ++j) {
      std::size_t k = bg.index(i, j);
      if (bg.mask[k]) csv.row({bg.s(i), bg.phi(j), t.tau[k], t.exit_s[k], t.exit_phi[k]});
    }
  side["n_s"] = bg.n_s;
  side["n_phi"] = bg.n_phi;
  side["ds"] = bg.ds();
  side["dphi"] = bg.dphi();
  side["total_length"] = bg.total_length;
  side["tangency_margin"] = bg.margin;
  side["included_cells"] = bg.included_count();
  side["medium"] = to_json(spec);
  side["domain"] = to_json(sc.domain);
  fs::path out = g.out;
  lab::write_file(out, "hodograph.csv", csv.str());
  lab::write_file(out, "hodograph.json", dump(side));
  std::printf("hodograph %d x %d, %d included cells (tangency margin %.3g)\n", bg.n_s, bg.n_phi, bg.included_count(),
              bg.margin);
  std::printf("wrote %s, %s\n", (out / "hodograph.csv").c_str(), (out / "hodograph.json").c_str());
  return 0;
}

// --- verify -----------------------------------------------------------------------------------

int run_verify(const Globals& g, const std::vector<std::string>& pair, const std::string& fine_grid) {
  Scenario sc = scenario_from(g);
  if (!fine_grid.empty()) sc.fine_grid = parse_grid_flag(fine_grid);
  Domain d = make_domain(sc.domain);
  if (!pair.empty() && pair.size() != 2) throw ConfigError("--pair: expected two medium files");
  MediumSpec a = pair.empty() ? medium_or("", sc, 0, "verify") : load_medium(pair[0]);
  MediumSpec b = pair.empty() ? medium_or("", sc, 1, "verify") : load_medium(pair[1]);
  RefractionField n1 = make_medium(a, d), n2 = make_medium(b, d);
  if (!vanishes_on_boundary(n2.field() + n1.field().scaled(-1.0), d))
    throw ConfigError("verify: the pair differs on the boundary (need n1 = n2 there)");

  json out_json;
  require_non_trapping(n1, d, sc.seed, "n1", out_json);
  require_non_trapping(n2, d, sc.seed, "n2", out_json);
  InequalityReport rep = verify_inequality(n1, n2, d, sc.grid, sc.fine_grid);
  rep.label = "Theorem (ineq): lhs = int (n2/cos w2 - n1/cos w1)^2, rhs = -int d_s rho d_phi rho";
  UniquenessReport u = uniqueness_demo(n1, n2, d, sc.grid.n_s, sc.grid.n_phi);

  out_json["report"] = lab::report_json(rep);
  out_json["uniqueness"] = {{"hodograph_sup_distance", u.hodograph_sup_distance},
                            {"fields_distance", u.fields_distance},
                            {"noise_floor", u.noise_floor},
                            {"cells", u.cells}};
  out_json["pair"] = {to_json(a), to_json(b)};
  fs::path out = g.out;
  lab::write_file(out, "report.json", dump(out_json));
  lab::write_file(out, "margin.svg", lab::margin_svg(rep));

  std::fputs(rep.summary().c_str(), stdout);
  std::printf("uniqueness: sup |tau1 - tau2| = %.3e (noise floor %.3e), ||n2 - n1||_L2 = %.3e\n",
              u.hodograph_sup_distance, u.noise_floor, u.fields_distance);
  std::printf("wrote %s, %s\n", (out / "report.json").c_str(), (out / "margin.svg").c_str());
  if (!rep.holds)
    throw CheckFailed("Theorem (ineq) violated: lhs=" + fmt("%.6e", rep.lhs) + ", rhs=" + fmt("%.6e", rep.rhs) +
                      ", tol_grid=" + fmt("%.3e", rep.tol_grid));
  return 0;
}

// --- xray -------------------------------------------------------------------------------------

int run_xray(const Globals& g, const std::string& medium, const std::string& perturbation) {
  Scenario sc = scenario_from(g);
  Domain d = make_domain(sc.domain);
  RefractionField n = make_medium(medium_or(medium, sc, 0, "xray"), d);
  MediumSpec fspec;
  if (!perturbation.empty())
    fspec = load_medium(perturbation);
  else if (sc.perturbation)
    fspec = *sc.perturbation;
  else
    throw ConfigError("xray: no perturbation given (--f or scenario \"perturbation\")");
  ScalarField f = build_field(fspec, d);
  if (!vanishes_on_boundary(f, d)) throw ConfigError("xray: perturbation must vanish on the boundary");

  json rep_json;
  require_non_trapping(n, d, sc.seed, "medium", rep_json);
  BoundaryGrid bg = BoundaryGrid::make(d, sc.grid.n_s, sc.grid.n_phi);
  XrayTable x = build_xray_table(f, n, d, bg);
  lab::CsvWriter csv({"s", "phi", "g"});
  for (int i = 0; i < bg.n_s; ++i)
    for (int j = 0; j < bg.n_phi; ++j) {
      std::size_t k = bg.index(i, j);
      if (bg.mask[k]) csv.row({bg.s(i), bg.phi(j), x.g[k]});
    }

  InequalityReport rep = fg_inequality(f, n, d, sc.grid, sc.fine_grid);
  rep.label = "(fg): lhs = int f^2/cos^2 w, rhs = -int d_s g d_phi g";
  std::vector<LinearizationCheck> lin;
  for (double eps : {1e-2, 1e-3}) lin.push_back(linearization_check(f, n, d, eps, 32, 32));

  rep_json["report"] = lab::report_json(rep);
  for (const auto& l : lin)
    rep_json["linearization"].push_back({{"eps", l.eps},
                                         {"two_point_error", l.two_point_error},
                                         {"direction_pinned_error", l.direction_pinned_error},
                                         {"chords", l.chords}});
  fs::path out = g.out;
  lab::write_file(out, "xray.csv", csv.str());
  lab::write_file(out, "fg_report.json", dump(rep_json));
  lab::write_file(out, "fg_margin.svg", lab::margin_svg(rep));

  std::fputs(rep.summary().c_str(), stdout);
  for (const auto& l : lin)
    std::printf("linearization eps=%.0e: two-point %.3e, direction-pinned %.3e (%d chords)\n", l.eps,
                l.two_point_error, l.direction_pinned_error, l.chords);
  std::printf("wrote %s, %s, %s\n", (out / "xray.csv").c_str(), (out / "fg_report.json").c_str(),
              (out / "fg_margin.svg").c_str());
  if (!rep.holds)
    throw CheckFailed("(fg) violated: lhs=" + fmt("%.6e", rep.lhs) + ", rhs=" + fmt("%.6e", rep.rhs));
  for (const auto& l : lin)
    if (l.two_point_error > 5.0 * l.eps)
      throw CheckFailed("(fg) linearization (T_{n+eps f} - T_n)/eps -> g violated at eps=" + fmt("%.0e", l.eps) +
                        ": relative error " + fmt("%.3e", l.two_point_error));
  return 0;
}

// --- fanbeam-check ------------------------------------------------------------------------------

int run_fanbeam(const Globals& g) {
  Scenario sc = scenario_from(g);
  if (sc.domain.type != "disc") throw ConfigError("fanbeam-check: needs the unit disc domain");
  Domain d = make_domain(sc.domain);
  MediumSpec fspec = sc.perturbation ? *sc.perturbation : bumps_spec(0.0, {{1.0, {0.3, 0.1}, 0.25}}, true);
  ScalarField f = build_field(fspec, d);
  ParallelBeam G = straight_parallel_beam(f, 128);
  ChainRuleResidual cr = chain_rule_residual(G);
  double rhs_p = fanbeam_rhs(G);
  RefractionField one = make_medium(constant_spec(1.0), d);
  BoundaryGrid bg = BoundaryGrid::make(d, 128, 128);
  XrayTable x = build_xray_table(f, one, d, bg);
  StokesIntegral st = stokes_integral(bg, x.g);
  double rel = std::abs(st.value - rhs_p) / std::abs(rhs_p);

  json j{{"chain_rule", {{"max_s", cr.max_s}, {"max_phi", cr.max_phi}, {"cells", cr.cells}}},
         {"rhs_fanbeam", rhs_p},
         {"rhs_stokes", st.value},
         {"rhs_stokes_richardson_error", st.richardson_error},
         {"rhs_relative_difference", rel}};
  fs::path out = g.out;
  lab::write_file(out, "fanbeam.json", dump(j));
  std::printf("chain rule: max |g_s + sqrt(1-p^2) G_p| = %.3e, max |g_phi - ...| = %.3e over %d cells\n", cr.max_s,
              cr.max_phi, cr.cells);
  std::printf("rhs: fan-beam form %.10g, Stokes form %.10g, relative difference %.3e\n", rhs_p, st.value, rel);
  std::printf("wrote %s\n", (out / "fanbeam.json").c_str());
  if (std::max(cr.max_s, cr.max_phi) >= 1e-5)
    throw CheckFailed("fan-beam chain rule violated: residual " + fmt("%.3e", std::max(cr.max_s, cr.max_phi)));
  if (rel > 1e-2) throw CheckFailed("fan-beam rhs disagrees with the Stokes form: relative " + fmt("%.3e", rel));
  return 0;
}

// --- disc-example -------------------------------------------------------------------------------

int run_disc(const Globals& g, const std::string& radii, int n_phi) {
  std::vector<double> rs = parse_list(radii, "--r");
  lab::CsvWriter csv({"r", "closed_form", "quadrature", "rel_err", "straight_line", "rel_err_straight_line"});
  std::printf("       r     closed_form      quadrature     rel_err   straight_line\n");
  std::string first_bad;
  for (double r : rs) {
    double cf = disc_weight_closed_form(r);
    double q = disc_weight_quadrature(r, n_phi);
    double sl = disc_weight_straight_line(r);
    double e = std::abs(cf - q) / std::abs(q), es = std::abs(sl - q) / std::abs(q);
    csv.row({r, cf, q, e, sl, es});
    std::printf("%8.4f %15.10f %15.10f %11.3e %15.10f\n", r, cf, q, e, sl);
    if (e >= 1e-4 && first_bad.empty())
      first_bad = "r=" + fmt("%g", r) + ": closed_form=" + fmt("%.10g", cf) + ", quadrature=" + fmt("%.10g", q);
  }
  fs::path out = g.out;
  lab::write_file(out, "disc_example.csv", csv.str());
  std::printf("wrote %s\n", (out / "disc_example.csv").c_str());
  if (!first_bad.empty()) throw CheckFailed("unit disc weight 2 pi sqrt((1+r)/(1-r)) mismatch at " + first_bad);
  return 0;
}

// --- exit-angle ---------------------------------------------------------------------------------

struct ExitArgs {
  std::string medium;
  int count = 50;
  double s_y = std::numeric_limits<double>::quiet_NaN();
  double s_x = std::numeric_limits<double>::quiet_NaN();
  double ds_factor = 1e-3;
};

int run_exit_angle(const Globals& g, const ExitArgs& a) {
  Scenario sc = scenario_from(g);
  Domain d = make_domain(sc.domain);
  MediumSpec spec = medium_or(a.medium, sc, 0, "exit-angle");
  RefractionField n = make_medium(spec, d);
  const double L = d.boundary().total_length();
  std::vector<std::pair<double, double>> chords;
  if (!std::isnan(a.s_y) && !std::isnan(a.s_x)) {
    chords.push_back({a.s_y, a.s_x});
  } else {
    std::mt19937_64 rng(sc.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < a.count; ++k) {
      double sy = u(rng) * L;
      double gap = (0.05 + 0.9 * u(rng)) * L;
      chords.push_back({sy, std::fmod(sy + gap, L)});
    }
  }
  const bool analytic = d.is_unit_disc() && spec.kind == MediumKind::constant;
  std::vector<ExitAngle> res(chords.size());
  std::vector<double> traced(chords.size());
  parallel_for(Execution::parallel, chords.size(), [&](std::size_t k) {
    TwoPointTable t = build_two_point_table(n, d, chords[k].first, chords[k].second, a.ds_factor * L);
    res[k] = exit_angle_from_hodograph(t, n, d);
    traced[k] = t.exit_phi[t.s_x.size() / 2];
  });
  lab::CsvWriter csv({"s_y", "s_x", "dT_ds", "sin_psi", "psi", "phi_recovered", "phi_traced", "phi_error",
                      "sin_psi_analytic"});
  double worst = 0.0;
  for (std::size_t k = 0; k < chords.size(); ++k) {
    double err = std::abs(wrap_signed(res[k].phi - traced[k]));
    worst = std::max(worst, err);
    double an = analytic ? std::cos(0.5 * wrap_angle(chords[k].second - chords[k].first))
                         : std::numeric_limits<double>::quiet_NaN();
    csv.row({chords[k].first, chords[k].second, res[k].dT_ds, res[k].sin_psi, res[k].psi, res[k].phi, traced[k], err,
             an});
  }
  fs::path out = g.out;
  lab::write_file(out, "exit_angle.csv", csv.str());
  std::printf("%zu chords, max |phi_recovered - phi_traced| = %.3e\n", chords.size(), worst);
  std::printf("wrote %s\n", (out / "exit_angle.csv").c_str());
  if (worst >= 1e-4)
    throw CheckFailed("exit angle from the hodograph (sin psi = dT/ds / n) violated: max error " + fmt("%.3e", worst));
  return 0;
}

// --- reconstruct --------------------------------------------------------------------------------

struct ReconArgs {
  std::string truth;
  std::string truth_coeffs;
  std::string basis;
  int iters = 8;
  double tol = 1e-6;
};

ModelParameterization load_basis(const std::string& path, const Domain& d, const fs::path& base_dir) {
  if (path.empty()) return ModelParameterization::radial(ScalarField::constant(1.0), 3, d);
  json j = read_json(path);
  if (!j.is_object() || !j.contains("type")) throw ConfigError(path + ": missing key \"type\"");
  ScalarField base = ScalarField::constant(1.0);
  if (j.contains("base")) base = build_field(parse_medium(j["base"], base_dir, path + ": base"), d);
  std::string type = j["type"].is_string() ? j["type"].get<std::string>() : "";
  if (type == "radial") {
    if (!j.contains("count") || !j["count"].is_number_integer() || j["count"].get<int>() <= 0)
      throw ConfigError(path + ": count: expected a positive integer");
    return ModelParameterization::radial(base, j["count"].get<int>(), d);
  }
  if (type == "bumps") {
    if (!j.contains("bumps") || !j["bumps"].is_array()) throw ConfigError(path + ": bumps: expected an array");
    std::vector<Bump> shapes;
    for (const auto& b : j["bumps"]) {
      if (!b.contains("c") || !b["c"].is_array() || b["c"].size() != 2 || !b.contains("sigma") ||
          !b["sigma"].is_number())
        throw ConfigError(path + ": bumps: each needs \"c\": [x, y] and \"sigma\"");
      shapes.push_back({1.0, {b["c"][0].get<double>(), b["c"][1].get<double>()}, b["sigma"].get<double>()});
    }
    return ModelParameterization::bumps(base, shapes, d);
  }
  throw ConfigError(path + ": type: expected \"radial\" or \"bumps\"");
}

int run_reconstruct(const Globals& g, const ReconArgs& a) {
  Scenario sc = scenario_from(g);
  Domain d = make_domain(sc.domain);
  ModelParameterization param = load_basis(a.basis, d, sc.base_dir);
  std::optional<std::vector<double>> true_c;
  RefractionField truth = [&] {
    if (!a.truth_coeffs.empty()) {
      true_c = parse_list(a.truth_coeffs, "--truth-coeffs");
      if (true_c->size() != param.size())
        throw ConfigError("--truth-coeffs: expected " + std::to_string(param.size()) + " values");
      return param.medium(*true_c, d);
    }
    if (!a.truth.empty()) return make_medium(load_medium(a.truth), d);
    std::vector<double> c(param.size(), 0.0);
    c[0] = 0.1;
    true_c = c;
    return param.medium(c, d);
  }();
  json j;
  require_non_trapping(truth, d, sc.seed, "truth", j);
  TomographyProblem prob = make_problem(d, param, truth, sc.grid.n_s, sc.grid.n_phi);
  GaussNewtonResult r = gauss_newton_solve(prob, a.iters, a.tol);

  std::vector<std::string> header{"iteration", "rms_residual"};
  for (const auto& nm : param.names()) header.push_back(nm);
  lab::CsvWriter csv(header);
  for (std::size_t it = 0; it < r.residual_history.size(); ++it) {
    std::vector<double> row{double(it), r.residual_history[it]};
    row.insert(row.end(), r.coefficient_history[it].begin(), r.coefficient_history[it].end());
    csv.row(row);
  }
  json table = json::array();
  for (std::size_t k = 0; k < param.size(); ++k) {
    json e{{"name", param.names()[k]}, {"recovered", r.coefficients[k]}};
    if (true_c) {
      e["true"] = (*true_c)[k];
      e["error"] = r.coefficients[k] - (*true_c)[k];
    } else {
      e["true"] = nullptr;
    }
    table.push_back(e);
  }
  j["coefficients"] = table;
  j["iterations"] = r.iterations;
  j["data"] = prob.data.size();
  j["final_rms_residual"] = r.residual_history.back();
  fs::path out = g.out;
  lab::write_file(out, "residual_history.csv", csv.str());
  lab::write_file(out, "coefficients.json", dump(j));
  std::printf("%zu two-point data, %d Gauss-Newton iterations, rms residual %.3e -> %.3e\n", prob.data.size(),
              r.iterations, r.residual_history.front(), r.residual_history.back());
  for (std::size_t k = 0; k < param.size(); ++k) {
    if (true_c)
      std::printf("  %-22s recovered %+.10f  true %+.10f\n", param.names()[k].c_str(), r.coefficients[k],
                  (*true_c)[k]);
    else
      std::printf("  %-22s recovered %+.10f\n", param.names()[k].c_str(), r.coefficients[k]);
  }
  std::printf("wrote %s, %s\n", (out / "residual_history.csv").c_str(), (out / "coefficients.json").c_str());
  return 0;
}

// --- identity-check -----------------------------------------------------------------------------

int run_identity(const Globals& g, int count) {
  Scenario sc = scenario_from(g);
  std::mt19937_64 rng(sc.seed);
  std::uniform_real_distribution<double> w(-1.4, 1.4), dv(-10.0, 10.0), nv(0.5, 2.0);
  double worst_printed = 0.0, worst_corrected = 0.0, min_bracket = std::numeric_limits<double>::infinity();
  lab::CsvWriter csv({"w1", "w2", "d1", "d2", "residual_printed", "residual_corrected"});
  for (int k = 0; k < count; ++k) {
    double w1 = w(rng), w2 = w(rng), d1 = dv(rng), d2 = dv(rng), n1 = nv(rng), n2 = nv(rng);
    double rp = lemma_phi_identity_residual(w1, w2, d1, d2);
    double rc = lemma_phi_identity_residual_corrected(w1, w2, d1, d2);
    // Relative to the size of the terms.
    double scale = 1.0 + std::abs(d1) / (std::cos(w1) * std::cos(w1)) + std::abs(d2) / (std::cos(w2) * std::cos(w2));
    worst_printed = std::max(worst_printed, rp / scale);
    worst_corrected = std::max(worst_corrected, rc / scale);
    min_bracket = std::min(min_bracket, rnn_bracket(n1, n2, w1, w2));
    if (k < 1000) csv.row({w1, w2, d1, d2, rp, rc});
  }
  json j{{"samples", count},
         {"max_relative_residual_printed", worst_printed},
         {"max_relative_residual_corrected", worst_corrected},
         {"min_rnn_bracket", min_bracket}};
  fs::path out = g.out;
  lab::write_file(out, "identity.json", dump(j));
  lab::write_file(out, "identity_samples.csv", csv.str());
  std::printf("%d samples\n", count);
  std::printf("  phi-derivative identity, as stated (sin(w2-w1)):  max relative residual %.3e\n", worst_printed);
  std::printf("  phi-derivative identity with sin(w1-w2):          max relative residual %.3e\n", worst_corrected);
  std::printf("  (n2/cos w2)^2 + (n1/cos w1)^2 - 2cos(w1-w2)n1n2/(cos w1 cos w2): min %.6g\n", min_bracket);
  std::printf("wrote %s\n", (out / "identity.json").c_str());
  if (min_bracket < 0.0) throw CheckFailed("Lemma (rnn) bracket negative: " + fmt("%.6g", min_bracket));
  if (worst_printed >= 1e-12)
    throw CheckFailed("Lemma (rnn) phi-derivative identity violated: max residual " + fmt("%.3e", worst_printed));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rigidity_lab: ray tracing, hodographs and boundary rigidity checks for conformal media"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "scenario JSON file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "random seed (overrides the scenario)");
  app.add_option("--grid", g.grid, "coarse grid Nx,Nphi,Ns (overrides the scenario)");
  app.add_option("--threads", g.threads, "worker threads (default: RIGIDITY_LAB_THREADS or all cores)");

  auto* trace = app.add_subcommand("trace", "trace one ray and write path.csv and ray.svg")->fallthrough();
  TraceArgs ta;
  trace->add_option("--medium", ta.medium, "medium JSON file (default: first scenario medium)");
  trace->add_option("--x", ta.x, "start point x,y")->capture_default_str();
  trace->add_option("--phi", ta.phi, "direction (radians, or with a deg suffix)")->capture_default_str();
  trace->add_flag("--chord", ta.chord, "trace the chord entering at arc length --s");
  trace->add_option("--s", ta.s, "entry arc length for --chord")->capture_default_str();
  trace->add_flag("--forward", ta.forward, "trace forward from --x instead of backward");
  trace->add_option("--fan", ta.fan, "with --chord, also draw this many chords from the same entry");

  auto* hod = app.add_subcommand("hodograph", "boundary hodograph table")->fallthrough();
  std::string hod_medium;
  hod->add_option("--medium", hod_medium, "medium JSON file");

  auto* verify = app.add_subcommand("verify", "check the integral inequality for a pair of media")->fallthrough();
  std::vector<std::string> pair;
  std::string fine;
  verify->add_option("--pair", pair, "two medium JSON files")->expected(2);
  verify->add_option("--fine-grid", fine, "fine grid Nx,Nphi,Ns");

  auto* xray = app.add_subcommand("xray", "X-ray transform of a perturbation and the (fg) inequality")->fallthrough();
  std::string x_medium, x_f;
  xray->add_option("--medium", x_medium, "background medium JSON file");
  xray->add_option("--f", x_f, "perturbation JSON file (a medium spec vanishing on the boundary)");

  auto* fan = app.add_subcommand("fanbeam-check", "fan-beam chain rule and rhs on the unit disc")->fallthrough();

  auto* disc = app.add_subcommand("disc-example", "unit disc weight, closed form against quadrature")->fallthrough();
  std::string radii = "0,0.25,0.5,0.75";
  int disc_nphi = 4096;
  disc->add_option("--r", radii, "comma-separated radii")->capture_default_str();
  disc->add_option("--n-phi", disc_nphi, "directions in the quadrature")->capture_default_str();

  auto* exit = app.add_subcommand("exit-angle", "exit directions recovered from two-point travel times")->fallthrough();
  ExitArgs ea;
  exit->add_option("--medium", ea.medium, "medium JSON file");
  exit->add_option("--count", ea.count, "random chords")->capture_default_str();
  exit->add_option("--sy", ea.s_y, "entry arc length of a single chord");
  exit->add_option("--sx", ea.s_x, "exit arc length of a single chord");
  exit->add_option("--ds", ea.ds_factor, "stencil step as a fraction of the boundary length")->capture_default_str();

  auto* recon = app.add_subcommand("reconstruct", "Gauss-Newton travel-time tomography")->fallthrough();
  ReconArgs ra;
  recon->add_option("--truth", ra.truth, "true medium JSON file");
  recon->add_option("--truth-coeffs", ra.truth_coeffs, "true coefficients in the basis, comma-separated");
  recon->add_option("--basis", ra.basis, "basis JSON file (default: 3 radial terms over n = 1)");
  recon->add_option("--iters", ra.iters, "maximum iterations")->capture_default_str();
  recon->add_option("--tol", ra.tol, "relative residual decrease to stop at")->capture_default_str();

  auto* ident = app.add_subcommand("identity-check", "phi-derivative identity and bracket statistics")->fallthrough();
  int id_count = 100000;
  ident->add_option("--count", id_count, "random samples")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    configure_threads(g.threads);
    if (*trace) return run_trace(g, ta);
    if (*hod) return run_hodograph(g, hod_medium);
    if (*verify) return run_verify(g, pair, fine);
    if (*xray) return run_xray(g, x_medium, x_f);
    if (*fan) return run_fanbeam(g);
    if (*disc) return run_disc(g, radii, disc_nphi);
    if (*exit) return run_exit_angle(g, ea);
    if (*recon) return run_reconstruct(g, ra);
    if (*ident) return run_identity(g, id_count);
  } catch (const CheckFailed& e) {
    std::fprintf(stderr, "FAILED: %s\n", e.what());
    return 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error [%s]: %s\n", to_string(e.kind()), e.what());
    return 3;
  }
  return 0;
}

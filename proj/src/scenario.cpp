#include "rigidity/scenario.hpp"

#include <fstream>
#include <sstream>

#include "rigidity/errors.hpp"

namespace rigidity {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

double number(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int positive_int(const json& j, const std::string& where) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) fail(where, "expected a positive integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

Bump parse_bump(const json& j, const std::string& where) {
  Bump b;
  b.amplitude = number(require(j, "a", where), where + ".a");
  auto c = numbers(require(j, "c", where), where + ".c");
  if (c.size() != 2) fail(where + ".c", "expected [x, y]");
  b.center = {c[0], c[1]};
  b.sigma = number(require(j, "sigma", where), where + ".sigma");
  if (!(b.sigma > 0.0)) fail(where + ".sigma", "must be positive");
  return b;
}

GridSamples parse_inline_grid(const json& j, const std::string& where) {
  GridSamples g;
  g.x0 = number(require(j, "x0", where), where + ".x0");
  g.y0 = number(require(j, "y0", where), where + ".y0");
  g.dx = number(require(j, "dx", where), where + ".dx");
  g.dy = number(require(j, "dy", where), where + ".dy");
  g.nx = positive_int(require(j, "nx", where), where + ".nx");
  g.ny = positive_int(require(j, "ny", where), where + ".ny");
  g.values = numbers(require(j, "values", where), where + ".values");
  if (g.values.size() != std::size_t(g.nx) * g.ny) fail(where + ".values", "expected nx*ny entries");
  return g;
}

}  // namespace

Domain make_domain(const DomainSpec& spec) {
  if (spec.type == "disc") return unit_disc();
  if (spec.type == "star") return star_shaped_domain(RadiusProfile::fourier(spec.fourier_coeffs));
  throw ConfigError("domain.type: unknown domain type \"" + spec.type + "\"");
}

DomainSpec parse_domain(const json& j) {
  DomainSpec d;
  const json& t = require(j, "type", "domain");
  if (!t.is_string()) fail("domain.type", "expected a string");
  d.type = t.get<std::string>();
  if (d.type == "star") {
    d.fourier_coeffs = numbers(require(j, "fourier_coeffs", "domain"), "domain.fourier_coeffs");
    if (d.fourier_coeffs.empty()) fail("domain.fourier_coeffs", "needs at least a0");
  } else if (d.type != "disc") {
    fail("domain.type", "expected \"disc\" or \"star\"");
  }
  return d;
}

MediumSpec parse_medium(const json& j, const std::filesystem::path& base_dir, const std::string& where) {
  if (j.is_number()) return constant_spec(j.get<double>());
  const json& k = require(j, "kind", where);
  if (!k.is_string()) fail(where + ".kind", "expected a string");
  const std::string kind = k.get<std::string>();
  MediumSpec s;
  if (kind == "constant") {
    s = constant_spec(number(require(j, "value", where), where + ".value"));
  } else if (kind == "radial_polynomial") {
    s = radial_spec(numbers(require(j, "coeffs", where), where + ".coeffs"));
    if (s.radial_coeffs.empty()) fail(where + ".coeffs", "needs at least one coefficient");
  } else if (kind == "gaussian_bumps") {
    std::vector<Bump> bumps;
    const json& bj = require(j, "bumps", where);
    if (!bj.is_array()) fail(where + ".bumps", "expected an array");
    for (std::size_t i = 0; i < bj.size(); ++i)
      bumps.push_back(parse_bump(bj[i], where + ".bumps[" + std::to_string(i) + "]"));
    bool cutoff = false;
    if (auto c = j.find("cutoff"); c != j.end()) {
      if (!c->is_string() || (*c != "boundary" && *c != "none")) fail(where + ".cutoff", "expected \"boundary\" or \"none\"");
      cutoff = *c == "boundary";
    }
    auto b = j.find("base");
    if (b == j.end() || b->is_number())
      s = bumps_spec(b == j.end() ? 1.0 : b->get<double>(), std::move(bumps), cutoff);
    else
      s = bumps_over(parse_medium(*b, base_dir, where + ".base"), std::move(bumps), cutoff);
  } else if (kind == "grid_spline") {
    s.kind = MediumKind::grid_spline;
    if (auto c = j.find("csv"); c != j.end()) {
      if (!c->is_string()) fail(where + ".csv", "expected a path");
      std::filesystem::path p = c->get<std::string>();
      if (p.is_relative()) p = base_dir / p;
      try {
        s.grid = read_grid_csv(p.string());
      } catch (const ConfigError& e) {
        fail(where + ".csv", e.what());
      }
    } else {
      s.grid = parse_inline_grid(require(j, "grid", where), where + ".grid");
    }
  } else {
    fail(where + ".kind", "unknown kind \"" + kind + "\"");
  }
  return s;
}

GridSpec parse_grid(const json& j) {
  GridSpec g;
  g.n_x = positive_int(require(j, "n_x", "grid"), "grid.n_x");
  g.n_phi = positive_int(require(j, "n_phi", "grid"), "grid.n_phi");
  g.n_s = positive_int(require(j, "n_s", "grid"), "grid.n_s");
  return g;
}

GridSpec parse_grid_flag(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      int n = std::stoi(part, &used);
      if (used != part.size() || n <= 0) throw std::invalid_argument(part);
      v.push_back(n);
    } catch (const std::exception&) {
      fail("--grid", "expected Nx,Nphi,Ns with positive integers, got \"" + text + "\"");
    }
  }
  if (v.size() != 3) fail("--grid", "expected Nx,Nphi,Ns, got \"" + text + "\"");
  return {v[0], v[1], v[2]};
}

Scenario parse_scenario(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) fail("scenario", "expected a JSON object");
  Scenario s;
  s.base_dir = base_dir;
  if (auto d = j.find("domain"); d != j.end()) s.domain = parse_domain(*d);
  if (auto m = j.find("media"); m != j.end()) {
    if (!m->is_array()) fail("media", "expected an array");
    for (std::size_t i = 0; i < m->size(); ++i)
      s.media.push_back(parse_medium((*m)[i], base_dir, "media[" + std::to_string(i) + "]"));
  }
  if (auto m = j.find("medium"); m != j.end()) s.media.insert(s.media.begin(), parse_medium(*m, base_dir, "medium"));
  if (auto p = j.find("perturbation"); p != j.end()) s.perturbation = parse_medium(*p, base_dir, "perturbation");
  if (auto g = j.find("grid"); g != j.end()) s.grid = parse_grid(*g);
  if (auto g = j.find("fine_grid"); g != j.end()) s.fine_grid = parse_grid(*g);
  if (auto sd = j.find("seed"); sd != j.end()) {
    if (!sd->is_number_unsigned()) fail("seed", "expected a non-negative integer");
    s.seed = sd->get<std::uint64_t>();
  }
  if (auto o = j.find("options"); o != j.end()) {
    if (!o->is_object()) fail("options", "expected an object");
    s.options = *o;
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return parse_scenario(j, path.parent_path());
}

json to_json(const DomainSpec& spec) {
  json j{{"type", spec.type}};
  if (spec.type == "star") j["fourier_coeffs"] = spec.fourier_coeffs;
  return j;
}

json to_json(const MediumSpec& s) {
  switch (s.kind) {
    case MediumKind::constant:
      return {{"kind", "constant"}, {"value", s.constant}};
    case MediumKind::radial_polynomial:
      return {{"kind", "radial_polynomial"}, {"coeffs", s.radial_coeffs}};
    case MediumKind::gaussian_bumps: {
      json bumps = json::array();
      for (const Bump& b : s.bumps) bumps.push_back({{"a", b.amplitude}, {"c", {b.center.x, b.center.y}}, {"sigma", b.sigma}});
      json j{{"kind", "gaussian_bumps"}, {"bumps", bumps}, {"cutoff", s.boundary_cutoff ? "boundary" : "none"}};
      if (s.base)
        j["base"] = to_json(*s.base);
      else
        j["base"] = s.base_value;
      return j;
    }
    case MediumKind::grid_spline: {
      const GridSamples& g = s.grid;
      return {{"kind", "grid_spline"},
              {"grid", {{"x0", g.x0}, {"y0", g.y0}, {"dx", g.dx}, {"dy", g.dy}, {"nx", g.nx}, {"ny", g.ny}, {"values", g.values}}}};
    }
    case MediumKind::composite:
      break;
  }
  throw ConfigError("composite media have no scenario form");
}

json to_json(const GridSpec& g) { return {{"n_x", g.n_x}, {"n_phi", g.n_phi}, {"n_s", g.n_s}}; }

json to_json(const Scenario& s) {
  json media = json::array();
  for (const auto& m : s.media) media.push_back(to_json(m));
  json j{{"domain", to_json(s.domain)},
         {"media", media},
         {"grid", to_json(s.grid)},
         {"fine_grid", to_json(s.fine_grid)},
         {"seed", s.seed},
         {"options", s.options}};
  if (s.perturbation) j["perturbation"] = to_json(*s.perturbation);
  return j;
}

double parse_angle(const std::string& text) {
  std::string t = text;
  double scale = 1.0;
  auto ends_with = [&](const std::string& suf) {
    return t.size() > suf.size() && t.compare(t.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends_with("rad")) {
    t.resize(t.size() - 3);
  } else if (ends_with("deg")) {
    t.resize(t.size() - 3);
    scale = kPi / 180.0;
  } else if (ends_with("d")) {
    t.resize(t.size() - 1);
    scale = kPi / 180.0;
  }
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(text);
    return v * scale;
  } catch (const std::exception&) {
    throw ConfigError("angle \"" + text + "\": expected radians or a value with a deg suffix");
  }
}

}  // namespace rigidity

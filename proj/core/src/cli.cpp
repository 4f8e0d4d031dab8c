#include "suitaeq/cli.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>

#include "suitaeq/search.hpp"

namespace suitaeq::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kCommands[] = {
    "solve-dirichlet", "green",          "capacity",
    "harmonic-measures", "check-equality", "search-equality",
    "build-counterexample", "certify-counterexample", "annulus-check",
    "product-check",   "dump-field"};

[[noreturn]] void fail(const std::string& message) { throw ConfigError("config: " + message); }

void check_keys(const ordered_json& obj, const char* where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) fail(std::string(where) + " must be an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (std::string_view key : allowed) known = known || item.key() == key;
    if (!known) fail("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const ordered_json& v, const char* where) {
  if (!v.is_number()) fail(std::string(where) + " must be a number");
  return v.get<double>();
}

long long integer(const ordered_json& v, const char* where) {
  if (v.is_number_integer()) return v.get<long long>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d == std::floor(d) && std::abs(d) < 1e15) return (long long)d;
  }
  fail(std::string(where) + " must be an integer");
}

ordered_json norm_point(const ordered_json& v, const char* where) {
  if (!v.is_array() || v.size() != 2) fail(std::string(where) + " must be [x, y]");
  return ordered_json::array({number(v[0], where), number(v[1], where)});
}

// complex entries may be written as a plain real number
ordered_json norm_complex(const ordered_json& v, const char* where) {
  if (v.is_number()) return ordered_json::array({v.get<double>(), 0.0});
  return norm_point(v, where);
}

ordered_json norm_circle(const ordered_json& v, const char* where) {
  check_keys(v, where, {"c", "r"});
  if (!v.contains("c") || !v.contains("r")) fail(std::string(where) + " needs 'c' and 'r'");
  const double r = number(v["r"], where);
  if (!(r > 0.0)) fail(std::string(where) + " radius must be positive");
  return ordered_json{{"c", norm_point(v["c"], where)}, {"r", r}};
}

ordered_json norm_domain(const ordered_json& d) {
  if (d.is_null()) return ordered_json{{"kind", "disk"}};
  if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string())
    fail("domain needs a 'kind' string");
  const std::string kind = d["kind"];
  if (kind == "disk") {
    check_keys(d, "domain", {"kind"});
    return ordered_json{{"kind", "disk"}};
  }
  if (kind == "annulus") {
    check_keys(d, "domain", {"kind", "R"});
    if (!d.contains("R")) fail("annulus domain needs 'R'");
    const double R = number(d["R"], "domain.R");
    if (!(R > 1.0)) fail("annulus 'R' must exceed 1");
    return ordered_json{{"kind", "annulus"}, {"R", R}};
  }
  if (kind == "circular") {
    check_keys(d, "domain", {"kind", "outer", "holes"});
    if (!d.contains("outer")) fail("circular domain needs 'outer'");
    ordered_json holes = ordered_json::array();
    if (d.contains("holes")) {
      if (!d["holes"].is_array()) fail("domain.holes must be an array");
      for (const auto& h : d["holes"]) holes.push_back(norm_circle(h, "domain.holes[]"));
    }
    return ordered_json{{"kind", "circular"},
                        {"outer", norm_circle(d["outer"], "domain.outer")},
                        {"holes", std::move(holes)}};
  }
  fail("unknown domain kind '" + kind + "'");
}

ordered_json norm_weight(const ordered_json& w) {
  ordered_json g = ordered_json::array({ordered_json::array({1.0, 0.0})});
  ordered_json u = ordered_json{{"zero", true}};
  ordered_json profile =
      ordered_json{{"terms", ordered_json::array({{{"weight", 1.0}, {"decay", 0.0}}})}};
  if (w.is_null()) return ordered_json{{"g", g}, {"u", u}, {"profile", profile}};

  check_keys(w, "weight", {"g", "u", "profile"});
  if (w.contains("g")) {
    if (!w["g"].is_array() || w["g"].empty()) fail("weight.g must be a nonempty array");
    g = ordered_json::array();
    for (const auto& c : w["g"]) g.push_back(norm_complex(c, "weight.g[]"));
  }
  if (w.contains("u")) {
    const ordered_json& uj = w["u"];
    check_keys(uj, "weight.u", {"zero", "measures", "boundary"});
    if (uj.size() != 1) fail("weight.u must carry exactly one of zero/measures/boundary");
    if (uj.contains("zero")) {
      if (uj["zero"] != true) fail("weight.u.zero must be true");
      u = ordered_json{{"zero", true}};
    } else if (uj.contains("measures")) {
      if (!uj["measures"].is_array()) fail("weight.u.measures must be an array");
      ordered_json lambdas = ordered_json::array();
      for (const auto& l : uj["measures"]) lambdas.push_back(number(l, "weight.u.measures[]"));
      u = ordered_json{{"measures", std::move(lambdas)}};
    } else {
      if (!uj["boundary"].is_array()) fail("weight.u.boundary must be an array per component");
      ordered_json comps = ordered_json::array();
      for (const auto& comp : uj["boundary"]) {
        if (!comp.is_array()) fail("weight.u.boundary entries must be sample arrays");
        ordered_json samples = ordered_json::array();
        for (const auto& s : comp) samples.push_back(number(s, "weight.u.boundary[][]"));
        comps.push_back(std::move(samples));
      }
      u = ordered_json{{"boundary", std::move(comps)}};
    }
  }
  if (w.contains("profile")) {
    const ordered_json& pj = w["profile"];
    check_keys(pj, "weight.profile", {"kind", "decay", "weight", "terms"});
    ordered_json terms = ordered_json::array();
    if (pj.contains("terms")) {
      if (pj.contains("kind")) fail("weight.profile takes either 'kind' or 'terms'");
      if (!pj["terms"].is_array() || pj["terms"].empty())
        fail("weight.profile.terms must be a nonempty array");
      for (const auto& t : pj["terms"]) {
        check_keys(t, "weight.profile.terms[]", {"weight", "decay"});
        if (!t.contains("weight") || !t.contains("decay"))
          fail("profile terms need 'weight' and 'decay'");
        terms.push_back({{"weight", number(t["weight"], "profile weight")},
                         {"decay", number(t["decay"], "profile decay")}});
      }
    } else {
      if (!pj.contains("kind") || !pj["kind"].is_string())
        fail("weight.profile needs 'kind' or 'terms'");
      const std::string kind = pj["kind"];
      if (kind == "constant") {
        terms.push_back({{"weight", 1.0}, {"decay", 0.0}});
      } else if (kind == "exponential") {
        const double decay = pj.contains("decay") ? number(pj["decay"], "profile decay") : 0.0;
        const double wt = pj.contains("weight") ? number(pj["weight"], "profile weight") : 1.0;
        terms.push_back({{"weight", wt}, {"decay", decay}});
      } else {
        fail("unknown profile kind '" + kind + "'");
      }
    }
    profile = ordered_json{{"terms", std::move(terms)}};
  }
  return ordered_json{{"g", std::move(g)}, {"u", std::move(u)}, {"profile", std::move(profile)}};
}

ordered_json norm_jets(const ordered_json& j, bool fill_unit_amplitudes = false) {
  ordered_json points = ordered_json::array();
  ordered_json orders = ordered_json::array();
  ordered_json amplitudes = ordered_json::array();
  ordered_json weights = ordered_json::array();
  if (!j.is_null()) {
    check_keys(j, "jets", {"points", "orders", "amplitudes", "weights"});
    if (j.contains("points"))
      for (const auto& p : j["points"]) points.push_back(norm_point(p, "jets.points[]"));
    if (j.contains("orders"))
      for (const auto& k : j["orders"]) orders.push_back(integer(k, "jets.orders[]"));
    if (j.contains("amplitudes"))
      for (const auto& a : j["amplitudes"])
        amplitudes.push_back(norm_complex(a, "jets.amplitudes[]"));
    if (j.contains("weights"))
      for (const auto& p : j["weights"]) weights.push_back(number(p, "jets.weights[]"));
  }
  if (orders.size() != points.size()) fail("jets.orders must match jets.points");
  if (fill_unit_amplitudes && amplitudes.empty())
    for (std::size_t i = 0; i < points.size(); ++i)
      amplitudes.push_back(ordered_json::array({1.0, 0.0}));
  if (!amplitudes.empty() && amplitudes.size() != points.size())
    fail("jets.amplitudes must be empty or match jets.points");
  if (!weights.empty() && weights.size() != points.size())
    fail("jets.weights must be empty or match jets.points");
  return ordered_json{{"points", std::move(points)},
                      {"orders", std::move(orders)},
                      {"amplitudes", std::move(amplitudes)},
                      {"weights", std::move(weights)}};
}

ordered_json norm_solver(const ordered_json& s) {
  long long degree = 24, boundary_nodes = 0, area_nodes = 24000;
  double tolerance = 1e-6;
  if (!s.is_null()) {
    check_keys(s, "solver", {"degree", "boundary_nodes", "area_nodes", "tolerance"});
    if (s.contains("degree")) degree = integer(s["degree"], "solver.degree");
    if (s.contains("boundary_nodes"))
      boundary_nodes = integer(s["boundary_nodes"], "solver.boundary_nodes");
    if (s.contains("area_nodes")) area_nodes = integer(s["area_nodes"], "solver.area_nodes");
    if (s.contains("tolerance")) tolerance = number(s["tolerance"], "solver.tolerance");
  }
  if (degree < 4) fail("solver.degree must be at least 4");
  if (boundary_nodes < 0) fail("solver.boundary_nodes must be nonnegative");
  if (area_nodes < 100) fail("solver.area_nodes must be at least 100");
  if (!(tolerance > 0.0)) fail("solver.tolerance must be positive");
  return ordered_json{{"degree", degree},
                      {"boundary_nodes", boundary_nodes},
                      {"area_nodes", area_nodes},
                      {"tolerance", tolerance}};
}

ordered_json norm_probes(const ordered_json& o, const char* where) {
  ordered_json probes = ordered_json::array();
  if (!o.is_array()) fail(std::string(where) + " must be an array of points");
  for (const auto& p : o) probes.push_back(norm_point(p, where));
  return probes;
}

ordered_json norm_options(const ordered_json& o, const std::string& command) {
  const ordered_json opts = o.is_null() ? ordered_json::object() : o;
  ordered_json out;

  if (command == "solve-dirichlet") {
    check_keys(opts, "options", {"data", "probes"});
    ordered_json data = ordered_json{{"constant", 1.0}};
    if (opts.contains("data")) {
      const ordered_json& dj = opts["data"];
      check_keys(dj, "options.data", {"constant", "indicator", "log_distance", "samples"});
      if (dj.size() != 1) fail("options.data must carry exactly one entry");
      if (dj.contains("constant"))
        data = ordered_json{{"constant", number(dj["constant"], "data.constant")}};
      else if (dj.contains("indicator")) {
        const long long k = integer(dj["indicator"], "data.indicator");
        if (k < 0) fail("data.indicator must be nonnegative");
        data = ordered_json{{"indicator", k}};
      } else if (dj.contains("log_distance"))
        data = ordered_json{{"log_distance", norm_point(dj["log_distance"], "data.log_distance")}};
      else {
        if (!dj["samples"].is_array()) fail("data.samples must be an array per component");
        ordered_json comps = ordered_json::array();
        for (const auto& comp : dj["samples"]) {
          ordered_json vals = ordered_json::array();
          if (!comp.is_array()) fail("data.samples entries must be arrays");
          for (const auto& v : comp) vals.push_back(number(v, "data.samples[][]"));
          comps.push_back(std::move(vals));
        }
        data = ordered_json{{"samples", std::move(comps)}};
      }
    }
    out["data"] = std::move(data);
    out["probes"] = opts.contains("probes") ? norm_probes(opts["probes"], "options.probes")
                                            : ordered_json::array();
    return out;
  }

  if (command == "green" || command == "capacity") {
    if (command == "green")
      check_keys(opts, "options", {"pole", "probes"});
    else
      check_keys(opts, "options", {"pole"});
    if (!opts.contains("pole")) fail(command + " needs options.pole");
    out["pole"] = norm_point(opts["pole"], "options.pole");
    if (command == "green")
      out["probes"] = opts.contains("probes") ? norm_probes(opts["probes"], "options.probes")
                                              : ordered_json::array();
    return out;
  }

  if (command == "harmonic-measures") {
    check_keys(opts, "options", {"probes"});
    out["probes"] = opts.contains("probes") ? norm_probes(opts["probes"], "options.probes")
                                            : ordered_json::array();
    return out;
  }

  if (command == "check-equality") {
    check_keys(opts, "options", {"basis_degree"});
    const long long deg =
        opts.contains("basis_degree") ? integer(opts["basis_degree"], "basis_degree") : 16;
    if (deg < 1) fail("options.basis_degree must be positive");
    out["basis_degree"] = deg;
    return out;
  }

  if (command == "search-equality") {
    check_keys(opts, "options", {"m", "q_max", "trials", "max_iterations", "separation"});
    if (!opts.contains("m") || !opts.contains("q_max"))
      fail("search-equality needs options.m and options.q_max");
    out["m"] = integer(opts["m"], "options.m");
    out["q_max"] = integer(opts["q_max"], "options.q_max");
    out["trials"] = opts.contains("trials") ? integer(opts["trials"], "options.trials") : 100;
    out["max_iterations"] = opts.contains("max_iterations")
                                ? integer(opts["max_iterations"], "options.max_iterations")
                                : 60;
    out["separation"] =
        opts.contains("separation") ? number(opts["separation"], "options.separation") : 1e-4;
    return out;
  }

  if (command == "build-counterexample" || command == "certify-counterexample") {
    const bool certify = command == "certify-counterexample";
    if (certify)
      check_keys(opts, "options", {"m", "n", "M", "a", "extra_holes", "samples"});
    else
      check_keys(opts, "options", {"m", "n", "M", "a", "extra_holes"});
    for (const char* key : {"m", "n", "M", "a"})
      if (!opts.contains(key)) fail(command + " needs options." + std::string(key));
    out["m"] = integer(opts["m"], "options.m");
    out["n"] = integer(opts["n"], "options.n");
    out["M"] = integer(opts["M"], "options.M");
    out["a"] = number(opts["a"], "options.a");
    ordered_json extras = ordered_json::array();
    if (opts.contains("extra_holes"))
      for (const auto& h : opts["extra_holes"])
        extras.push_back(norm_circle(h, "options.extra_holes[]"));
    out["extra_holes"] = std::move(extras);
    if (certify)
      out["samples"] = opts.contains("samples") ? integer(opts["samples"], "options.samples") : 200;
    return out;
  }

  if (command == "annulus-check") {
    check_keys(opts, "options", {});
    return ordered_json::object();
  }

  if (command == "product-check") {
    check_keys(opts, "options", {"factors"});
    if (!opts.contains("factors") || !opts["factors"].is_array() || opts["factors"].empty())
      fail("product-check needs a nonempty options.factors array");
    ordered_json factors = ordered_json::array();
    for (const auto& f : opts["factors"]) {
      check_keys(f, "options.factors[]", {"domain", "weight", "jets"});
      ordered_json nf;
      nf["domain"] = norm_domain(f.contains("domain") ? f["domain"] : ordered_json());
      nf["weight"] = norm_weight(f.contains("weight") ? f["weight"] : ordered_json());
      nf["jets"] = norm_jets(f.contains("jets") ? f["jets"] : ordered_json());
      factors.push_back(std::move(nf));
    }
    out["factors"] = std::move(factors);
    return out;
  }

  if (command == "dump-field") {
    check_keys(opts, "options", {"field", "index", "pole", "nx", "ny"});
    if (!opts.contains("field") || !opts["field"].is_string())
      fail("dump-field needs options.field");
    const std::string field = opts["field"];
    out["field"] = field;
    if (field == "measure") {
      if (opts.contains("pole")) fail("options.pole only applies to field 'green'");
      out["index"] = opts.contains("index") ? integer(opts["index"], "options.index") : 0;
    } else if (field == "green") {
      if (opts.contains("index")) fail("options.index only applies to field 'measure'");
      if (!opts.contains("pole")) fail("field 'green' needs options.pole");
      out["pole"] = norm_point(opts["pole"], "options.pole");
    } else {
      fail("options.field must be 'measure' or 'green'");
    }
    const long long nx = opts.contains("nx") ? integer(opts["nx"], "options.nx") : 101;
    const long long ny = opts.contains("ny") ? integer(opts["ny"], "options.ny") : 101;
    if (nx < 2 || ny < 2) fail("grid must be at least 2x2");
    out["nx"] = nx;
    out["ny"] = ny;
    return out;
  }

  fail("unknown command '" + command + "'");
}

ordered_json normalize_impl(const ordered_json& raw, const std::string& command) {
  check_keys(raw, "config",
             {"domain", "weight", "jets", "solver", "seed", "tolerance", "options"});
  auto field = [&](const char* key) {
    return raw.contains(key) ? raw[key] : ordered_json();
  };
  ordered_json out;
  out["domain"] = norm_domain(field("domain"));
  out["weight"] = norm_weight(field("weight"));
  out["jets"] = norm_jets(field("jets"), command == "check-equality");
  out["solver"] = norm_solver(field("solver"));
  long long seed = 12345;
  if (raw.contains("seed")) seed = integer(raw["seed"], "seed");
  if (seed < 0) fail("seed must be nonnegative");
  out["seed"] = seed;
  double tolerance = command == "search-equality" ? 1e-8 : 1e-6;
  if (raw.contains("tolerance")) tolerance = number(raw["tolerance"], "tolerance");
  if (!(tolerance > 0.0)) fail("tolerance must be positive");
  out["tolerance"] = tolerance;
  out["options"] = norm_options(field("options"), command);
  return out;
}

// ---------------------------------------------------------------------------
// Canonical config -> runtime objects.

Complex get_complex(const ordered_json& v) { return {v[0].get<double>(), v[1].get<double>()}; }

ordered_json jcomplex(Complex z) { return ordered_json::array({z.real(), z.imag()}); }

DomainSpec make_domain_spec(const ordered_json& d) {
  const std::string kind = d["kind"];
  if (kind == "disk") return DomainSpec::disk();
  if (kind == "annulus") return DomainSpec::annulus(d["R"].get<double>());
  std::vector<Circle> holes;
  for (const auto& h : d["holes"]) holes.push_back({get_complex(h["c"]), h["r"].get<double>()});
  return DomainSpec::circular({get_complex(d["outer"]["c"]), d["outer"]["r"].get<double>()},
                              std::move(holes));
}

SolveOptions make_solve_options(const ordered_json& cfg) {
  SolveOptions so;
  so.degree = cfg["solver"]["degree"].get<int>();
  so.nodes_per_component = cfg["solver"]["boundary_nodes"].get<int>();
  so.flag_tolerance = cfg["solver"]["tolerance"].get<double>();
  return so;
}

EqualityOptions make_equality_options(const ordered_json& cfg) {
  EqualityOptions eq;
  eq.criterion_tolerance = cfg["tolerance"].get<double>();
  eq.mesh_target = cfg["solver"]["area_nodes"].get<int>();
  eq.solver = make_solve_options(cfg);
  return eq;
}

JetConfig make_jets(const ordered_json& j) {
  JetConfig jets;
  for (const auto& p : j["points"]) jets.points.push_back(get_complex(p));
  for (const auto& k : j["orders"]) jets.orders.push_back(k.get<int>());
  for (const auto& a : j["amplitudes"]) jets.amplitudes.push_back(get_complex(a));
  for (const auto& p : j["weights"]) jets.weights.push_back(p.get<double>());
  return jets;
}

WeightSpec make_weight(const ordered_json& w, std::shared_ptr<const Domain> domain,
                       const SolveOptions& solve_options) {
  WeightSpec spec;
  spec.g.clear();
  for (const auto& c : w["g"]) spec.g.push_back(get_complex(c));
  spec.profile.terms.clear();
  for (const auto& t : w["profile"]["terms"])
    spec.profile.terms.push_back({t["weight"].get<double>(), t["decay"].get<double>()});

  const ordered_json& u = w["u"];
  if (u.contains("measures")) {
    std::vector<double> lambdas;
    for (const auto& l : u["measures"]) lambdas.push_back(l.get<double>());
    DirichletSolver solver(domain, solve_options);
    const auto measures = harmonic_measures(solver);
    if (lambdas.size() != measures.size())
      fail("weight.u.measures needs one coefficient per hole (" +
           std::to_string(measures.size()) + ")");
    spec.u = HarmonicFunction::linear_combination(lambdas, measures);
  } else if (u.contains("boundary")) {
    std::vector<std::vector<double>> samples;
    for (const auto& comp : u["boundary"]) {
      samples.emplace_back();
      for (const auto& v : comp) samples.back().push_back(v.get<double>());
    }
    spec.u = dirichlet_solve(domain, BoundaryData::samples(std::move(samples)), solve_options);
  }
  spec.validate();
  return spec;
}

std::vector<Complex> make_probes(const ordered_json& probes,
                                 const std::shared_ptr<const Domain>& domain) {
  std::vector<Complex> out;
  for (const auto& p : probes) {
    const Complex z = get_complex(p);
    if (!domain->contains_closure(z)) fail("probe outside the domain closure");
    out.push_back(z);
  }
  return out;
}

ordered_json serialize_deltas(const std::vector<DeltaEntry>& deltas) {
  ordered_json out = ordered_json::array();
  for (const DeltaEntry& e : deltas)
    out.push_back({{"delta", e.delta}, {"integer_distance", e.integer_distance}});
  return out;
}

// ---------------------------------------------------------------------------
// Command handlers. Each fills outputs/residuals and returns the exit code.

int cmd_solve_dirichlet(const ordered_json& cfg, ordered_json& outputs,
                        ordered_json& residuals) {
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  DirichletSolver solver(domain, make_solve_options(cfg));

  const ordered_json& data = cfg["options"]["data"];
  BoundaryData bd = BoundaryData::constant(1.0);
  if (data.contains("constant")) {
    bd = BoundaryData::constant(data["constant"].get<double>());
  } else if (data.contains("indicator")) {
    const int k = data["indicator"].get<int>();
    if (k > domain->hole_count()) fail("data.indicator out of range");
    bd = BoundaryData::indicator(k);
  } else if (data.contains("log_distance")) {
    bd = BoundaryData::log_distance(get_complex(data["log_distance"]));
  } else {
    std::vector<std::vector<double>> samples;
    for (const auto& comp : data["samples"]) {
      samples.emplace_back();
      for (const auto& v : comp) samples.back().push_back(v.get<double>());
    }
    bd = BoundaryData::samples(std::move(samples));
  }

  const HarmonicFunction u = solver.solve(bd);
  outputs["boundary_residual"] = u.boundary_residual();
  outputs["flagged"] = u.flagged();
  ordered_json periods = ordered_json::array();
  for (int k = 0; k < domain->hole_count(); ++k) periods.push_back(u.conjugate_period(k));
  outputs["conjugate_periods"] = std::move(periods);
  ordered_json values = ordered_json::array();
  for (Complex z : make_probes(cfg["options"]["probes"], domain)) values.push_back(u.value(z));
  outputs["probe_values"] = std::move(values);
  residuals["dirichlet"] = u.boundary_residual();
  return u.flagged() ? kExitNumeric : kExitOk;
}

int cmd_green(const ordered_json& cfg, ordered_json& outputs, ordered_json& residuals,
              bool full) {
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  const Complex pole = get_complex(cfg["options"]["pole"]);
  const GreenFunction g = green_function(domain, pole, make_solve_options(cfg));

  outputs["pole"] = jcomplex(pole);
  outputs["robin_constant"] = g.robin_constant();
  outputs["log_capacity"] = g.log_capacity();
  if (full) {
    ordered_json flux = ordered_json::array();
    for (int k = 0; k <= domain->hole_count(); ++k) flux.push_back(g.boundary_flux(k));
    outputs["boundary_flux"] = std::move(flux);
    ordered_json periods = ordered_json::array();
    for (int k = 0; k < domain->hole_count(); ++k) periods.push_back(g.cycle_period(k));
    outputs["cycle_periods"] = std::move(periods);
    ordered_json values = ordered_json::array();
    for (Complex z : make_probes(cfg["options"]["probes"], domain)) values.push_back(g.value(z));
    outputs["probe_values"] = std::move(values);
  }
  residuals["dirichlet"] = g.boundary_residual();
  return g.correction().flagged() ? kExitNumeric : kExitOk;
}

int cmd_harmonic_measures(const ordered_json& cfg, ordered_json& outputs,
                          ordered_json& residuals) {
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  DirichletSolver solver(domain, make_solve_options(cfg));
  const auto measures = harmonic_measures(solver);
  const auto probes = make_probes(cfg["options"]["probes"], domain);

  outputs["count"] = measures.size();
  double worst = 0.0;
  bool flagged = false;
  ordered_json res = ordered_json::array();
  ordered_json periods = ordered_json::array();
  ordered_json values = ordered_json::array();
  for (const HarmonicFunction& u : measures) {
    res.push_back(u.boundary_residual());
    worst = std::max(worst, u.boundary_residual());
    flagged = flagged || u.flagged();
    ordered_json row = ordered_json::array();
    for (int k = 0; k < domain->hole_count(); ++k) row.push_back(u.conjugate_period(k));
    periods.push_back(std::move(row));
    ordered_json vals = ordered_json::array();
    for (Complex z : probes) vals.push_back(u.value(z));
    values.push_back(std::move(vals));
  }
  outputs["boundary_residuals"] = std::move(res);
  outputs["conjugate_periods"] = std::move(periods);
  outputs["probe_values"] = std::move(values);
  residuals["dirichlet"] = worst;
  return flagged ? kExitNumeric : kExitOk;
}

int cmd_check_equality(const ordered_json& cfg, ordered_json& outputs,
                       ordered_json& residuals) {
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  const SolveOptions so = make_solve_options(cfg);
  const WeightSpec w = make_weight(cfg["weight"], domain, so);
  const JetConfig jets = make_jets(cfg["jets"]);
  const int degree = cfg["options"]["basis_degree"].get<int>();

  const EqualityReport rep = equality_defect(domain, w, jets, degree, make_equality_options(cfg));

  outputs["verdict"] = std::string(to_string(rep.verdict));
  outputs["deltas"] = serialize_deltas(rep.deltas);
  outputs["necessary_condition_ok"] = rep.necessary_condition_ok;
  outputs["weight_integral"] = rep.weight_integral;
  outputs["rhs"] = rep.rhs;
  outputs["minimal_integral"] = rep.minimal_integral;
  outputs["bergman"] = rep.bergman;
  outputs["defect"] = rep.defect;
  outputs["truncation_error"] = rep.truncation_error;
  ordered_json amps = ordered_json::array();
  for (Complex a : rep.extremal_amplitudes) amps.push_back(jcomplex(a));
  outputs["extremal_amplitudes"] = std::move(amps);
  outputs["extremal_flagged"] = rep.extremal_flagged;
  residuals["truncation"] = rep.truncation_error;

  switch (rep.verdict) {
    case Verdict::EqualityCapable: return kExitOk;
    case Verdict::NotEquality:
    case Verdict::ImpossibleByCount: return kExitNegative;
    case Verdict::Undetermined: return kExitNumeric;
  }
  return kExitNumeric;
}

int cmd_search_equality(const ordered_json& cfg, ordered_json& outputs,
                        ordered_json& residuals) {
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  const SolveOptions so = make_solve_options(cfg);
  const WeightSpec w = make_weight(cfg["weight"], domain, so);
  const ordered_json& opts = cfg["options"];

  SearchOptions search;
  search.trials = opts["trials"].get<int>();
  search.max_iterations = opts["max_iterations"].get<int>();
  search.tolerance = cfg["tolerance"].get<double>();
  search.separation = opts["separation"].get<double>();
  search.seed = cfg["seed"].get<unsigned>();
  search.solver = so;

  const SearchResult res =
      find_equality_config(domain, w, opts["m"].get<int>(), opts["q_max"].get<int>(), search);

  outputs["status"] = std::string(to_string(res.status));
  ordered_json points = ordered_json::array();
  for (Complex z : res.points) points.push_back(jcomplex(z));
  outputs["points"] = std::move(points);
  outputs["orders"] = res.orders;
  ordered_json amps = ordered_json::array();
  for (Complex a : res.amplitudes) amps.push_back(jcomplex(a));
  outputs["amplitudes"] = std::move(amps);
  outputs["deltas"] = res.deltas;
  outputs["residual"] = res.residual;
  outputs["iterations"] = res.iterations;
  residuals["integrality"] = res.residual;

  switch (res.status) {
    case SearchStatus::Found: return kExitOk;
    case SearchStatus::NotFound: return kExitNegative;
    case SearchStatus::RankDeficient: return kExitNumeric;
  }
  return kExitNumeric;
}

CounterexampleSpec make_counterexample(const ordered_json& opts) {
  std::vector<Circle> extras;
  for (const auto& h : opts["extra_holes"])
    extras.push_back({get_complex(h["c"]), h["r"].get<double>()});
  return build_counterexample_domain(opts["m"].get<int>(), opts["n"].get<int>(),
                                     opts["M"].get<int>(), opts["a"].get<double>(), extras);
}

void serialize_counterexample(const CounterexampleSpec& spec, ordered_json& outputs) {
  outputs["r0"] = spec.r0;
  outputs["epsilon"] = spec.epsilon;
  ordered_json centers = ordered_json::array();
  for (Complex b : spec.mobius_centers) centers.push_back(jcomplex(b));
  outputs["mobius_centers"] = std::move(centers);
  ordered_json holes = ordered_json::array();
  for (int k = 0; k < spec.domain->hole_count(); ++k) {
    const Circle c = spec.domain->hole_circle(k);
    holes.push_back({{"c", jcomplex(c.center)}, {"r", c.radius}});
  }
  outputs["holes"] = std::move(holes);
  outputs["threshold"] = 1.0 / ((spec.M + 1.0) * spec.m);
}

int cmd_build_counterexample(const ordered_json& cfg, ordered_json& outputs) {
  serialize_counterexample(make_counterexample(cfg["options"]), outputs);
  return kExitOk;
}

int cmd_certify_counterexample(const ordered_json& cfg, ordered_json& outputs) {
  const CounterexampleSpec spec = make_counterexample(cfg["options"]);

  SearchOptions search;
  search.seed = cfg["seed"].get<unsigned>();
  search.solver = make_solve_options(cfg);
  const CounterexampleCertificate cert =
      certify_no_equality(spec, cfg["options"]["samples"].get<int>(), search);

  serialize_counterexample(spec, outputs);
  outputs["samples"] = cert.samples;
  outputs["passed"] = cert.passed;
  outputs["worst_margin"] = cert.worst_margin;
  outputs["comparison_slack"] = cert.comparison_slack;
  ordered_json records = ordered_json::array();
  for (const BoundRecord& rec : cert.records)
    records.push_back(
        {{"pigeonhole_index", rec.pigeonhole_index}, {"max_measure", rec.max_measure}});
  outputs["records"] = std::move(records);
  return cert.passed ? kExitOk : kExitNumeric;
}

int cmd_annulus_check(const ordered_json& cfg, ordered_json& outputs) {
  if (cfg["domain"]["kind"] != "annulus") fail("annulus-check needs an annulus domain");
  const double R = cfg["domain"]["R"].get<double>();
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  const SolveOptions so = make_solve_options(cfg);
  const WeightSpec w = make_weight(cfg["weight"], domain, so);
  const JetConfig jets = make_jets(cfg["jets"]);

  const double u_period = w.u ? w.u->conjugate_period(0) : 0.0;
  const AnnulusCriterion crit =
      annulus_criterion(R, u_period, jets, cfg["tolerance"].get<double>());

  outputs["satisfied"] = crit.satisfied;
  outputs["nearest_exponent"] = crit.nearest_exponent;
  outputs["log_residual"] = crit.log_residual;
  outputs["u_period"] = u_period;
  return crit.satisfied ? kExitOk : kExitNegative;
}

int cmd_product_check(const ordered_json& cfg, ordered_json& outputs) {
  const SolveOptions so = make_solve_options(cfg);
  std::vector<ProductFactor> factors;
  ordered_json per_factor = ordered_json::array();
  for (const auto& fj : cfg["options"]["factors"]) {
    auto domain = build_domain(make_domain_spec(fj["domain"]));
    const WeightSpec w = make_weight(fj["weight"], domain, so);
    const JetConfig jets = make_jets(fj["jets"]);
    ProductFactor factor;
    factor.deltas = integrality_deltas(domain, w, jets, so);
    factor.orders = jets.orders;
    for (int j = 0; j < jets.size(); ++j) factor.weights.push_back(jets.weight(j));
    per_factor.push_back({{"deltas", serialize_deltas(factor.deltas)}});
    factors.push_back(std::move(factor));
  }
  const bool combined = product_combine(factors, cfg["tolerance"].get<double>());
  outputs["combined"] = combined;
  outputs["factors"] = std::move(per_factor);
  return combined ? kExitOk : kExitNegative;
}

int cmd_dump_field(const ordered_json& cfg, const Flags& flags, ordered_json& outputs,
                   ordered_json& residuals) {
  if (flags.out_path.empty()) fail("dump-field needs --out for the CSV grid");
  auto domain = build_domain(make_domain_spec(cfg["domain"]));
  const ordered_json& opts = cfg["options"];

  std::function<double(Complex)> value;
  double residual = 0.0;
  if (opts["field"] == "measure") {
    DirichletSolver solver(domain, make_solve_options(cfg));
    const auto measures = harmonic_measures(solver);
    const int index = opts["index"].get<int>();
    if (index < 0 || index >= int(measures.size()))
      fail("options.index must name one of the " + std::to_string(measures.size()) +
           " harmonic measures");
    const HarmonicFunction u = measures[index];
    residual = u.boundary_residual();
    value = [u](Complex z) { return u.value(z); };
  } else {
    const GreenFunction g =
        green_function(domain, get_complex(opts["pole"]), make_solve_options(cfg));
    residual = g.boundary_residual();
    value = [g](Complex z) {
      if (z == g.pole()) return std::numeric_limits<double>::infinity();
      return g.value(z);
    };
  }

  const Circle outer = domain->outer_circle();
  const int nx = opts["nx"].get<int>(), ny = opts["ny"].get<int>();
  const double x0 = outer.center.real() - outer.radius, x1 = outer.center.real() + outer.radius;
  const double y0 = outer.center.imag() - outer.radius, y1 = outer.center.imag() + outer.radius;

  std::ofstream csv(flags.out_path);
  if (!csv) fail("cannot open '" + flags.out_path + "' for writing");
  csv << "x,y,value\n";
  char line[128];
  long long inside = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const double x = x0 + (x1 - x0) * ix / (nx - 1);
      const double y = y0 + (y1 - y0) * iy / (ny - 1);
      const Complex z{x, y};
      double v = std::numeric_limits<double>::quiet_NaN();
      if (domain->contains(z)) {
        v = value(z);
        ++inside;
      }
      std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", x, y, v);
      csv << line;
    }
  csv.close();
  if (!csv) fail("failed while writing '" + flags.out_path + "'");

  outputs["csv_path"] = flags.out_path;
  outputs["field"] = opts["field"];
  outputs["nx"] = nx;
  outputs["ny"] = ny;
  outputs["x_range"] = ordered_json::array({x0, x1});
  outputs["y_range"] = ordered_json::array({y0, y1});
  outputs["inside_count"] = inside;
  residuals["dirichlet"] = residual;
  return kExitOk;
}

int dispatch(const std::string& command, const ordered_json& cfg, const Flags& flags,
             ordered_json& outputs, ordered_json& residuals) {
  if (command == "solve-dirichlet") return cmd_solve_dirichlet(cfg, outputs, residuals);
  if (command == "green") return cmd_green(cfg, outputs, residuals, true);
  if (command == "capacity") return cmd_green(cfg, outputs, residuals, false);
  if (command == "harmonic-measures") return cmd_harmonic_measures(cfg, outputs, residuals);
  if (command == "check-equality") return cmd_check_equality(cfg, outputs, residuals);
  if (command == "search-equality") return cmd_search_equality(cfg, outputs, residuals);
  if (command == "build-counterexample") return cmd_build_counterexample(cfg, outputs);
  if (command == "certify-counterexample") return cmd_certify_counterexample(cfg, outputs);
  if (command == "annulus-check") return cmd_annulus_check(cfg, outputs);
  if (command == "product-check") return cmd_product_check(cfg, outputs);
  if (command == "dump-field") return cmd_dump_field(cfg, flags, outputs, residuals);
  fail("unknown command '" + command + "'");
}

}  // namespace

std::span<const std::string_view> command_names() { return kCommands; }

std::string normalize_config(const std::string& config_json, const std::string& command) {
  ordered_json raw;
  try {
    raw = ordered_json::parse(config_json);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("invalid JSON: ") + e.what());
  }
  return normalize_impl(raw, command).dump(2);
}

int run_text(const std::string& command, const std::string& config_json, const Flags& flags,
             std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  bool known = false;
  for (std::string_view c : kCommands) known = known || command == c;
  if (!known) {
    err << "unknown command '" << command << "'\n";
    return kExitConfig;
  }

  try {
    ordered_json raw;
    try {
      raw = ordered_json::parse(config_json);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
    }
    if (!raw.is_object()) fail("top level must be an object");
    if (flags.seed) raw["seed"] = *flags.seed;
    if (flags.tolerance) raw["tolerance"] = *flags.tolerance;
    if (flags.degree) {
      if (!raw.contains("solver")) raw["solver"] = ordered_json::object();
      raw["solver"]["degree"] = *flags.degree;
    }
    const ordered_json cfg = normalize_impl(raw, command);

    ordered_json outputs = ordered_json::object();
    ordered_json residuals = ordered_json::object();
    const int code = dispatch(command, cfg, flags, outputs, residuals);

    ordered_json report;
    report["tool"] = "suitaeq";
    report["version"] = std::string(kVersion);
    report["command"] = command;
    report["config"] = cfg;
    report["outputs"] = std::move(outputs);
    report["residuals"] = std::move(residuals);
    if (flags.timings) {
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      report["timings"] = ordered_json{{"total_ms", ms}};
    }
    out << report.dump(2) << "\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumeric;
  }
}

int run(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err) {
  std::ifstream in(flags.config_path);
  if (!in) {
    err << "cannot read config '" << flags.config_path << "'\n";
    return kExitConfig;
  }
  std::ostringstream text;
  text << in.rdbuf();

  std::ostringstream report;
  const int code = run_text(command, text.str(), flags, report, err);
  out << report.str();
  if (!flags.out_path.empty() && command != "dump-field" && !report.str().empty()) {
    std::ofstream dst(flags.out_path);
    if (!dst) {
      err << "cannot write report to '" << flags.out_path << "'\n";
      return kExitConfig;
    }
    dst << report.str();
  }
  return code;
}

}  // namespace suitaeq::cli

#include "nlspread/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <set>
#include <thread>

#include <omp.h>

#include "nlspread/audit.hpp"
#include "nlspread/error.hpp"
#include "nlspread/evolve.hpp"
#include "nlspread/front.hpp"
#include "nlspread/hamiltonian.hpp"
#include "nlspread/io.hpp"

#ifndef NLSPREAD_VERSION
#define NLSPREAD_VERSION "0.0.0"
#endif

namespace nlspread {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kCommands{"simulate", "speed-empirical", "speed-eigen", "audit", "compare", "sweep"};

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [k, _] : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
      throw InvalidInput(where + ": unknown key '" + k + "'");
  }
}

template <class T>
T get(const json& j, const std::string& where, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(where + "." + key + ": wrong type");
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / std::max(1, n - 1);
  return v;
}

json resolve_grid(const json& g, const std::string& where, double half_width, double dx) {
  if (g.is_null()) return resolve_grid(json{{"half_width", half_width}, {"dx", dx}}, where, half_width, dx);
  only_keys(g, where, {"half_width", "dx", "x_min", "n"});
  const double d = get(g, where, "dx", dx);
  SpatialGrid grid;
  if (g.contains("n")) {
    grid = SpatialGrid(get(g, where, "x_min", 0.0), d, get<std::size_t>(g, where, "n", 2));
  } else {
    const double hw = get(g, where, "half_width", half_width);
    if (!(hw > 0.0) || !(d > 0.0)) throw InvalidInput(where + ": half_width and dx must be positive");
    grid = SpatialGrid::symmetric(hw, d);
  }
  return json{{"x_min", grid.x_min}, {"dx", grid.dx}, {"n", grid.n}};
}

SpatialGrid grid_of(const json& g) {
  return SpatialGrid(g.at("x_min").get<double>(), g.at("dx").get<double>(), g.at("n").get<std::size_t>());
}

json resolve_sections(const json& raw, const std::string& command) {
  json out;
  out["command"] = command;
  out["output_dir"] = get<std::string>(raw, "config", "output_dir", "nlspread-out");
  if (!raw.contains("kernel")) throw InvalidInput("config: 'kernel' is required");
  if (!raw.contains("reaction")) throw InvalidInput("config: 'reaction' is required");
  const Kernel kernel = kernel_from_json(raw.at("kernel"));
  const ReactionKPP reaction = reaction_from_json(raw.at("reaction"));
  out["kernel"] = kernel;
  out["reaction"] = reaction;
  out["grid"] = resolve_grid(raw.value("grid", json()), "grid", 100.0, 0.05);
  const SpatialGrid grid = grid_of(out["grid"]);

  const json init = raw.value("initial", json::object());
  only_keys(init, "initial", {"kind", "half_width", "value"});
  const auto kind = get<std::string>(init, "initial", "kind", "bump");
  if (kind != "bump" && kind != "constant" && kind != "heaviside")
    throw InvalidInput("initial.kind: expected bump, constant or heaviside");
  const double value = get(init, "initial", "value", 1.0);
  if (!(value > 0.0 && value <= 1.0)) throw InvalidInput("initial.value must lie in (0,1]");
  out["initial"] = {{"kind", kind}, {"half_width", get(init, "initial", "half_width", 2.0)}, {"value", value}};

  const json sim = raw.value("simulation", json::object());
  only_keys(sim, "simulation", {"horizon", "dt", "dt_value", "snapshot_interval", "extension", "thresholds",
                                "delta_bulk", "fit_fraction", "directions", "write_snapshots", "rescaled"});
  json s;
  s["horizon"] = get(sim, "simulation", "horizon", 60.0);
  if (!(s["horizon"].get<double>() >= 0.0)) throw InvalidInput("simulation.horizon must be nonnegative");
  s["extension"] = get<std::string>(sim, "simulation", "extension", "zero");
  const Extension ext = extension_from_string(s["extension"].get<std::string>());
  if (sim.contains("dt") && !sim.at("dt").is_null()) {
    s["dt"] = get(sim, "simulation", "dt", 0.0);
    s["dt_value"] = s["dt"];
  } else {
    s["dt"] = nullptr;
    s["dt_value"] = EvolutionOperator(kernel, reaction, grid, ext).default_dt();
  }
  s["snapshot_interval"] = get(sim, "simulation", "snapshot_interval", 1.0);
  if (!(s["snapshot_interval"].get<double>() > 0.0)) throw InvalidInput("simulation.snapshot_interval must be positive");
  s["thresholds"] = get(sim, "simulation", "thresholds", std::vector<double>{0.01, 0.1, 0.5});
  s["delta_bulk"] = get(sim, "simulation", "delta_bulk", 0.05);
  s["fit_fraction"] = get(sim, "simulation", "fit_fraction", 0.6);
  const auto dirs = get(sim, "simulation", "directions", std::vector<std::string>{"right", "left"});
  for (const auto& d : dirs) direction_from_string(d);
  s["directions"] = dirs;
  s["write_snapshots"] = get(sim, "simulation", "write_snapshots", true);
  if (sim.contains("rescaled")) {
    const json& r = sim.at("rescaled");
    only_keys(r, "simulation.rescaled", {"eps", "t", "x"});
    s["rescaled"] = {{"eps", get(r, "simulation.rescaled", "eps", 0.05)},
                     {"t", get(r, "simulation.rescaled", "t", std::vector<double>{1.0})},
                     {"x", get(r, "simulation.rescaled", "x", linspace(-1.0, 1.0, 21))}};
  }
  out["simulation"] = s;

  const json eig = raw.value("eigen", json::object());
  only_keys(eig, "eigen", {"method", "p_grid", "eps_schedule", "tol", "cell_nodes", "grid", "window", "extension",
                           "rel_tol", "central", "p_min", "p_max", "dump_regularized"});
  json e;
  const auto method = get<std::string>(eig, "eigen", "method", "auto");
  if (method != "auto") eigen_method_from_string(method);
  e["method"] = method;
  e["p_grid"] = get(eig, "eigen", "p_grid", linspace(-3.0, 3.0, 13));
  e["eps_schedule"] = get(eig, "eigen", "eps_schedule", std::vector<double>{0.2, 0.1, 0.05, 0.025});
  e["tol"] = get(eig, "eigen", "tol", 1e-9);
  e["cell_nodes"] = get<std::size_t>(eig, "eigen", "cell_nodes", 256);
  e["grid"] = resolve_grid(eig.value("grid", json()), "eigen.grid", 100.0, 0.1);
  const SpatialGrid eg = grid_of(e["grid"]);
  const double third = 0.5 * (eg.x_max() - eg.x_min) / 3.0;
  const double centre = 0.5 * (eg.x_max() + eg.x_min);
  const auto window = get(eig, "eigen", "window", std::vector<double>{centre - third, centre + third});
  if (window.size() != 2 || !(window[0] < window[1])) throw InvalidInput("eigen.window: expected [left, right]");
  e["window"] = window;
  e["extension"] = get<std::string>(eig, "eigen", "extension", "constant");
  extension_from_string(e["extension"].get<std::string>());
  e["rel_tol"] = get(eig, "eigen", "rel_tol", 1e-6);
  e["central"] = get(eig, "eigen", "central", true);
  e["p_min"] = get(eig, "eigen", "p_min", 0.02);
  e["p_max"] = get(eig, "eigen", "p_max", 0.0);
  e["dump_regularized"] = get(eig, "eigen", "dump_regularized", false);
  out["eigen"] = e;

  const json aud = raw.value("audit", json::object());
  only_keys(aud, "audit", {"window_radius", "tilts", "tail_tolerance", "tail_radius", "delta", "eps0", "samples"});
  const AuditParams ap;
  out["audit"] = {{"window_radius", get(aud, "audit", "window_radius", ap.window_radius)},
                  {"tilts", get(aud, "audit", "tilts", ap.tilts)},
                  {"tail_tolerance", get(aud, "audit", "tail_tolerance", ap.tail_tolerance)},
                  {"tail_radius", get(aud, "audit", "tail_radius", ap.tail_radius)},
                  {"delta", get(aud, "audit", "delta", ap.delta)},
                  {"eps0", get(aud, "audit", "eps0", ap.eps0)},
                  {"samples", get(aud, "audit", "samples", ap.samples)}};

  const json cmp = raw.value("compare", json::object());
  only_keys(cmp, "compare", {"tolerance"});
  out["compare"] = {{"tolerance", get(cmp, "compare", "tolerance", 0.05)}};
  return out;
}

Field initial_field(const json& cfg, const SpatialGrid& grid) {
  const auto& init = cfg.at("initial");
  const auto kind = init.at("kind").get<std::string>();
  const double v = init.at("value").get<double>();
  const double hw = init.at("half_width").get<double>();
  if (kind == "constant") return Field(grid, v);
  if (kind == "heaviside") return Field::sample(grid, [v](double x) { return x <= 0.0 ? v : 0.0; });
  return Field::sample(grid, [v, hw](double x) { return std::abs(x) <= hw ? v : 0.0; });
}

struct Context {
  const json& cfg;
  fs::path out;
  std::vector<std::string> files;

  bool writing() const { return !out.empty(); }
  fs::path file(const std::string& name) {
    files.push_back(name);
    return out / name;
  }
};

Trajectory run_simulation(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const Kernel kernel = kernel_from_json(cfg.at("kernel"));
  const ReactionKPP reaction = reaction_from_json(cfg.at("reaction"));
  const SpatialGrid grid = grid_of(cfg.at("grid"));
  const auto& s = cfg.at("simulation");
  const double horizon = s.at("horizon").get<double>();
  const double every = s.at("snapshot_interval").get<double>();
  std::vector<double> times;
  for (int k = 0; k * every <= horizon * (1.0 + 1e-12); ++k) times.push_back(k * every);
  EvolveOptions opts;
  opts.dt = s.at("dt_value").get<double>();
  opts.extension = extension_from_string(s.at("extension").get<std::string>());
  auto traj = evolve(initial_field(cfg, grid), kernel, reaction, horizon, times, opts);
  if (ctx.writing() && s.at("write_snapshots").get<bool>()) {
    io::write_snapshots_csv(ctx.file("snapshots.csv"), traj);
    io::write_snapshots_binary(ctx.file("snapshots.bin"), ctx.file("snapshots.json"), traj);
  }
  return traj;
}

std::vector<Direction> directions_of(const json& cfg) {
  std::vector<Direction> dirs;
  for (const auto& d : cfg.at("simulation").at("directions")) dirs.push_back(direction_from_string(d.get<std::string>()));
  return dirs;
}

json empirical(Context& ctx, const Trajectory& traj) {
  const auto& s = ctx.cfg.at("simulation");
  const auto thresholds = s.at("thresholds").get<std::vector<double>>();
  SpeedFitOptions fit;
  fit.delta_bulk = s.at("delta_bulk").get<double>();
  fit.fit_fraction = s.at("fit_fraction").get<double>();
  json rep = json::object();
  std::vector<io::FrontSeries> series;
  for (Direction d : directions_of(ctx.cfg)) {
    rep[to_string(d)] = estimate_speeds(traj, thresholds, d, fit);
    for (double th : thresholds) series.push_back({d, th, front_history(traj, th, d)});
  }
  if (ctx.writing()) io::write_fronts_csv(ctx.file("fronts.csv"), series);
  return rep;
}

json simulate_summary(Context& ctx, const Trajectory& traj) {
  const auto [first, last] = traj.clean_range();
  json fronts = json::object();
  std::vector<io::FrontSeries> series;
  for (Direction d : directions_of(ctx.cfg))
    for (double th : ctx.cfg.at("simulation").at("thresholds").get<std::vector<double>>())
      series.push_back({d, th, front_history(traj, th, d)});
  if (ctx.writing()) io::write_fronts_csv(ctx.file("fronts.csv"), series);
  json rep = {{"steps", static_cast<long long>(std::llround(traj.horizon / traj.dt))},
              {"dt", traj.dt},
              {"snapshots", traj.snapshots.size()},
              {"speed_bound", traj.speed_bound},
              {"max_excursion", traj.max_excursion},
              {"clean_range", {first, last}}};
  if (ctx.cfg.at("simulation").contains("rescaled")) {
    const auto& r = ctx.cfg.at("simulation").at("rescaled");
    const auto pts = rescaled_log_profile(traj, r.at("eps").get<double>(), r.at("t").get<std::vector<double>>(),
                                          r.at("x").get<std::vector<double>>());
    if (ctx.writing()) io::write_rescaled_csv(ctx.file("rescaled.csv"), pts);
    rep["rescaled_points"] = pts.size();
  }
  return rep;
}

EigenProblem problem_of(const json& cfg) {
  const auto& e = cfg.at("eigen");
  auto prob = make_eigen_problem(kernel_from_json(cfg.at("kernel")), reaction_from_json(cfg.at("reaction")),
                                 grid_of(e.at("grid")));
  prob.extension = extension_from_string(e.at("extension").get<std::string>());
  prob.cell_nodes = e.at("cell_nodes").get<std::size_t>();
  prob.eps_schedule = e.at("eps_schedule").get<std::vector<double>>();
  prob.regularized.tol = e.at("tol").get<double>();
  const auto w = e.at("window").get<std::vector<double>>();
  prob.regularized.window = Window{w[0], w[1]};
  return prob;
}

json eigen(Context& ctx) {
  const auto& e = ctx.cfg.at("eigen");
  const auto prob = problem_of(ctx.cfg);
  const auto m = e.at("method").get<std::string>();
  const EigenMethod method = m == "auto" ? best_method(prob) : eigen_method_from_string(m);
  const auto p_grid = e.at("p_grid").get<std::vector<double>>();
  const auto curve = hamiltonian_curve(prob, p_grid, method);
  SpeedSearchOptions so;
  so.rel_tol = e.at("rel_tol").get<double>();
  so.central = e.at("central").get<bool>();
  so.p_min = e.at("p_min").get<double>();
  so.p_max = e.at("p_max").get<double>();
  json rep = {{"method", to_string(method)}, {"curve", curve}};
  json speeds = json::object();
  for (Direction d : directions_of(ctx.cfg)) {
    const auto s = speed_from_hamiltonian(curve, d, so);
    json sj = s;
    sj["bracket"] = {s.bracket_low(), s.bracket_high()};
    speeds[to_string(d)] = sj;
    if (d == Direction::right && method == EigenMethod::discount_limit && e.at("dump_regularized").get<bool>()) {
      const TiltedOperator op{prob.kernel, prob.a, -s.argmin_central};
      const auto dl = discount_limit(op, prob.grid, prob.extension, prob.eps_schedule, prob.regularized);
      if (ctx.writing()) io::write_json(ctx.file("regularized.json"), json{{"p", op.p}, {"discount", dl}, {"finest", dl.finest}});
    }
  }
  rep["speeds"] = speeds;
  if (ctx.writing()) io::write_hamiltonian_csv(ctx.file("hamiltonian.csv"), curve);
  return rep;
}

json audit(Context& ctx) {
  const auto& a = ctx.cfg.at("audit");
  AuditParams p;
  p.window_radius = a.at("window_radius").get<double>();
  p.tilts = a.at("tilts").get<std::vector<double>>();
  p.tail_tolerance = a.at("tail_tolerance").get<double>();
  p.tail_radius = a.at("tail_radius").get<double>();
  p.delta = a.at("delta").get<double>();
  p.eps0 = a.at("eps0").get<double>();
  p.samples = a.at("samples").get<int>();
  return audit_assumptions(kernel_from_json(ctx.cfg.at("kernel")), reaction_from_json(ctx.cfg.at("reaction")), p);
}

json compare(const json& emp, const json& eig, double tol) {
  json dirs = json::object();
  bool all = true;
  for (const auto& [d, est] : emp.items()) {
    const auto& sp = eig.at("speeds").at(d);
    const double lo = sp.at("bracket").at(0).get<double>() * (1.0 - tol);
    const double hi = sp.at("bracket").at(1).get<double>() * (1.0 + tol);
    const double w = est.at("omega_upper").get<double>();
    const bool ok = w >= lo && w <= hi;
    all = all && ok;
    dirs[d] = {{"empirical_omega_upper", w},
               {"empirical_omega_lower", est.at("omega_lower")},
               {"eigen_bracket", sp.at("bracket")},
               {"tolerance", tol},
               {"consistent", ok}};
  }
  return {{"directions", dirs}, {"flag", all ? "consistent" : "inconsistent"}};
}

json run_single(Context& ctx) {
  const auto cmd = ctx.cfg.at("command").get<std::string>();
  if (cmd == "audit") {
    json rep = audit(ctx);
    if (ctx.writing()) io::write_json(ctx.file("audit.json"), rep);
    return rep;
  }
  if (cmd == "speed-eigen") {
    json rep = eigen(ctx);
    if (ctx.writing()) io::write_json(ctx.file("eigen.json"), rep);
    return rep;
  }
  const auto traj = run_simulation(ctx);
  if (cmd == "simulate") {
    json rep = simulate_summary(ctx, traj);
    if (ctx.writing()) io::write_json(ctx.file("summary.json"), rep);
    return rep;
  }
  json emp = empirical(ctx, traj);
  if (cmd == "speed-empirical") {
    if (ctx.writing()) io::write_json(ctx.file("speeds.json"), emp);
    return emp;
  }
  json eig = eigen(ctx);
  json rep = {{"empirical", emp}, {"eigen", eig},
              {"comparison", compare(emp, eig, ctx.cfg.at("compare").at("tolerance").get<double>())}};
  if (ctx.writing()) io::write_json(ctx.file("compare.json"), rep);
  return rep;
}

std::string csv_cell(const json& j) {
  if (j.is_null()) return "";
  if (j.is_number()) return io::format_number(j.get<double>());
  if (j.is_boolean()) return j.get<bool>() ? "true" : "false";
  std::string s = j.is_string() ? j.get<std::string>() : j.dump();
  for (char& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

json run_sweep(Context& ctx) {
  const auto& sw = ctx.cfg.at("sweep");
  std::vector<std::string> keys;
  std::vector<std::vector<json>> values;
  for (const auto& [k, v] : sw.at("parameters").items()) {
    keys.push_back(k);
    values.push_back(v.get<std::vector<json>>());
  }
  std::size_t total = 1;
  for (const auto& v : values) total *= v.size();
  if (total > sw.at("max_jobs").get<std::size_t>())
    throw InvalidInput("sweep: " + std::to_string(total) + " jobs exceed the cap of " +
                       std::to_string(sw.at("max_jobs").get<std::size_t>()));

  json base = ctx.cfg;
  base.erase("sweep");
  base["command"] = sw.at("command");
  std::vector<json> points(total), rows(total);
  for (std::size_t j = 0; j < total; ++j) {
    std::size_t rest = j;
    json point = json::object();
    for (std::size_t k = keys.size(); k-- > 0;) {
      point[keys[k]] = values[k][rest % values[k].size()];
      rest /= values[k].size();
    }
    points[j] = point;
  }

  int threads = sw.at("concurrency").get<int>();
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto count = static_cast<std::ptrdiff_t>(total);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t j = 0; j < count; ++j) {
    const auto& point = points[static_cast<std::size_t>(j)];
    json row = {{"job", j}, {"parameters", point}};
    try {
      json job = base;
      for (const auto& [k, v] : point.items()) job[json::json_pointer(k)] = v;
      const json resolved = resolve_config(job);
      Context inner{resolved, fs::path(), {}};
      row["report"] = run_single(inner);
      row["status"] = "ok";
    } catch (const std::exception& e) {
      row["status"] = "error";
      row["error"] = e.what();
    }
    rows[static_cast<std::size_t>(j)] = std::move(row);
  }

  std::string csv = "job";
  for (const auto& k : keys) csv += "," + k;
  csv += ",status,omega_eigen_lower,omega_eigen_upper,omega_eigen_central,argmin_p,omega_empirical_upper,"
         "omega_empirical_lower,residual,consistent,error\n";
  for (const auto& row : rows) {
    csv += std::to_string(row.at("job").get<long long>());
    for (const auto& k : keys) csv += "," + csv_cell(row.at("parameters").at(k));
    csv += "," + row.at("status").get<std::string>();
    json eig, emp, cmp;
    if (row.contains("report")) {
      const auto& r = row.at("report");
      if (r.contains("speeds")) eig = r;
      if (r.contains("eigen")) eig = r.at("eigen");
      if (r.contains("empirical")) emp = r.at("empirical");
      if (r.contains("right") && r.at("right").contains("omega_upper")) emp = r;
      if (r.contains("comparison")) cmp = r.at("comparison");
    }
    auto field = [](const json& j, std::initializer_list<const char*> path) {
      const json* cur = &j;
      for (const char* p : path) {
        if (!cur->is_object() || !cur->contains(p)) return json();
        cur = &cur->at(p);
      }
      return *cur;
    };
    for (const char* key : {"omega_lower", "omega_upper", "omega_central", "argmin_central"})
      csv += "," + csv_cell(field(eig, {"speeds", "right", key}));
    for (const char* key : {"omega_upper", "omega_lower", "residual"}) csv += "," + csv_cell(field(emp, {"right", key}));
    csv += "," + csv_cell(field(cmp, {"flag"}));
    csv += "," + csv_cell(row.value("error", json())) + "\n";
  }
  if (ctx.writing()) {
    io::write_text(ctx.file("sweep.csv"), csv);
    io::write_json(ctx.file("sweep.json"), rows);
  }
  return json{{"jobs", total}, {"rows", rows}};
}

}  // namespace

static json resolve_unchecked(const json& raw) {
  if (!raw.is_object() || raw.empty()) throw InvalidInput("config: expected a non-empty object");
  only_keys(raw, "config", {"command", "output_dir", "kernel", "reaction", "grid", "initial", "simulation", "eigen",
                            "audit", "compare", "sweep"});
  const auto command = get<std::string>(raw, "config", "command", "");
  if (!kCommands.count(command)) throw InvalidInput("config: 'command' must be one of simulate, speed-empirical, "
                                                    "speed-eigen, audit, compare, sweep");
  if (command != "sweep") {
    if (raw.contains("sweep")) throw InvalidInput("config: 'sweep' section requires command 'sweep'");
    return resolve_sections(raw, command);
  }
  if (!raw.contains("sweep")) throw InvalidInput("config: command 'sweep' needs a 'sweep' section");
  const json& sw = raw.at("sweep");
  only_keys(sw, "sweep", {"parameters", "command", "max_jobs", "concurrency"});
  const auto inner = get<std::string>(sw, "sweep", "command", "compare");
  if (inner == "sweep" || !kCommands.count(inner)) throw InvalidInput("sweep.command: not a single-run command");
  json out = resolve_sections(raw, "sweep");
  json params = json::object();
  if (!sw.contains("parameters") || !sw.at("parameters").is_object() || sw.at("parameters").empty())
    throw InvalidInput("sweep.parameters: expected a non-empty object of JSON pointers");
  for (const auto& [k, v] : sw.at("parameters").items()) {
    if (k.empty() || k[0] != '/') throw InvalidInput("sweep.parameters: '" + k + "' is not a JSON pointer");
    if (!v.is_array() || v.empty()) throw InvalidInput("sweep.parameters." + k + ": expected a non-empty list");
    auto vals = v.get<std::vector<json>>();
    std::stable_sort(vals.begin(), vals.end());
    params[k] = vals;
  }
  out["sweep"] = {{"parameters", params},
                  {"command", inner},
                  {"max_jobs", get<std::size_t>(sw, "sweep", "max_jobs", 256)},
                  {"concurrency", get(sw, "sweep", "concurrency", 0)}};
  return out;
}

json resolve_config(const json& raw) {
  try {
    return resolve_unchecked(raw);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
}

std::string semantic_hash(const json& resolved) {
  json j = resolved;
  j.erase("output_dir");
  if (j.contains("sweep")) j["sweep"].erase("concurrency");
  return io::hex(io::config_hash(j));
}

ExperimentOutput run_resolved(const json& resolved, const fs::path& out_dir) {
  Context ctx{resolved, out_dir, {}};
  json report = resolved.at("command") == "sweep" ? run_sweep(ctx) : run_single(ctx);
  std::sort(ctx.files.begin(), ctx.files.end());
  return ExperimentOutput{std::move(report), std::move(ctx.files)};
}

int run_experiment(const fs::path& config_path, const std::string& command, std::ostream& log) {
  fs::path out_dir;
  try {
    json raw = io::read_json(config_path);
    if (!raw.is_object()) throw InvalidInput("config: expected an object");
    if (command == "audit") raw["command"] = "audit";
    if (command == "sweep" && raw.value("command", std::string()) != "sweep")
      throw InvalidInput("config: the sweep subcommand needs command 'sweep'");
    const json cfg = resolve_config(raw);
    out_dir = cfg.at("output_dir").get<std::string>();
    if (out_dir.is_relative()) {
      if (const char* root = std::getenv(kOutputRootVariable); root != nullptr && *root != '\0') out_dir = fs::path(root) / out_dir;
    }
    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto result = run_resolved(cfg, out_dir);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.files.push_back("manifest.json");
    json manifest = {{"tool", "nlspread"},
                     {"version", NLSPREAD_VERSION},
                     {"command", cfg.at("command")},
                     {"config_hash", semantic_hash(cfg)},
                     {"config", cfg},
                     {"files", result.files}};
    io::write_json(out_dir / "manifest.json", manifest);
    io::write_json(out_dir / "timings.json", json{{"wall_seconds", wall}, {"max_threads", omp_get_max_threads()}});
    log << "nlspread: " << cfg.at("command").get<std::string>() << " finished; outputs in " << out_dir.string() << "\n";
    return 0;
  } catch (const InvalidInput& e) {
    log << "nlspread: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    log << "nlspread: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const NumericalFailure& e) {
    log << "nlspread: numerical failure in " << e.module() << ": " << e.what() << "\n";
    if (!out_dir.empty()) {
      try {
        io::write_json(out_dir / "failure.json", json{{"module", e.module()}, {"message", e.what()}});
      } catch (const std::exception&) {
      }
    }
    return 3;
  } catch (const std::exception& e) {
    log << "nlspread: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace nlspread

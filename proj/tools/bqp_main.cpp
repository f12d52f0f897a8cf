// Command-line driver: stationary profiles, fixed points, quasi-potential,
// excursion paths and action checks, inviscid analysis, the phase transition
// and the two viscosity scans.  Exit codes: 0 success, 1 solver failure,
// 2 configuration error.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "CLI11.hpp"

#include "bqp/dynamics.hpp"
#include "bqp/functionals.hpp"
#include "bqp/grid.hpp"
#include "bqp/inviscid.hpp"
#include "bqp/io.hpp"
#include "bqp/minimization.hpp"
#include "bqp/selftest.hpp"
#include "bqp/stationary.hpp"

namespace fs = std::filesystem;
using bqp::json;

namespace {

struct RunConfig {
  double rho0 = 0.25, rho1 = 0.75;
  double eps = -1.0;         // absolute viscosity; -1 = unset
  double eps_factor = -1.0;  // relative to eps0; -1 = unset
  int grid_n = 401;
  double dt = 0.0;  // 0 = solver default
  double T = 1.0;   // forward-path horizon
  double relax_tol = 1e-6;
  double t_cap = 400.0;
  double picard_tol = 1e-10;
  double a_tol = 1e-12;
  double gf_tol = 1e-9;
  double root_tol = 1e-8;
  double dedup_tol = 1e-4;
  int seed_steps = 9;
  unsigned rng_seed = 0;
  std::string density = "stationary";
  std::string density_file;
  std::string out = "out";
  std::string path_dir;
  std::string config_path;
  std::string eps_factors = "0.4,0.2,0.1,0.05";
  int jobs = 1;
  int stride = 1;
  double y_minus = 0.25, y0 = 0.5, y_plus = 0.75;
  double amplitude = -1.0;  // -1 = 0.6 * band width
  double delta = 0.005;
};

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--config", cfg.config_path, "JSON config file (flags override it)");
  sub->add_option("--rho0", cfg.rho0, "left boundary density");
  sub->add_option("--rho1", cfg.rho1, "right boundary density");
  auto* oe = sub->add_option("--eps", cfg.eps, "viscosity (absolute)");
  auto* of = sub->add_option("--eps-factor", cfg.eps_factor, "viscosity as a multiple of eps0");
  oe->excludes(of);
  sub->add_option("--n", cfg.grid_n, "grid nodes");
  sub->add_option("--dt", cfg.dt, "time step (0 = solver default)");
  sub->add_option("--T", cfg.T, "forward horizon for `path` inputs");
  sub->add_option("--relax-tol", cfg.relax_tol, "relaxation distance tolerance");
  sub->add_option("--t-cap", cfg.t_cap, "relaxation time cap");
  sub->add_option("--picard-tol", cfg.picard_tol, "fixed-point iteration tolerance");
  sub->add_option("--a-tol", cfg.a_tol, "normalization solve tolerance");
  sub->add_option("--gf-tol", cfg.gf_tol, "gradient-flow residual tolerance");
  sub->add_option("--root-tol", cfg.root_tol, "bisection tolerance on g(alpha)");
  sub->add_option("--dedup-tol", cfg.dedup_tol, "fixed-point dedup distance");
  sub->add_option("--seed-steps", cfg.seed_steps, "smoothed-step seeds in the bank");
  sub->add_option("--rng-seed", cfg.rng_seed, "seed-bank jitter key (0 = off)");
  sub->add_option("--density", cfg.density,
                  "generator: stationary | constant:<v> | sine:<mean>:<amp>:<k> | mina[:<y->:<y0>:<y+>:<amp>]");
  sub->add_option("--density-file", cfg.density_file, "density profile CSV (overrides --density)");
  sub->add_option("--out", cfg.out, "output directory");
  sub->add_option("--path-dir", cfg.path_dir, "time-path directory to read");
  sub->add_option("--eps-factors", cfg.eps_factors, "comma list of eps/eps0 for scans");
  sub->add_option("--jobs", cfg.jobs, "parallel scan workers");
  sub->add_option("--stride", cfg.stride, "store every stride-th frame");
  sub->add_option("--y-minus", cfg.y_minus, "two-well geometry y-");
  sub->add_option("--y0", cfg.y0, "two-well geometry y0");
  sub->add_option("--y-plus", cfg.y_plus, "two-well geometry y+");
  sub->add_option("--amplitude", cfg.amplitude, "two-well amplitude (-1 = 0.6 * band)");
  sub->add_option("--delta", cfg.delta, "perturbation half-range for the root search");
}

// file values fill in whatever the command line left untouched
void apply_config_file(CLI::App* sub, RunConfig& cfg) {
  if (cfg.config_path.empty()) return;
  const json j = bqp::read_json_file(cfg.config_path);
  auto unset = [&](const char* flag) {
    const CLI::Option* o = sub->get_option_no_throw(flag);
    return o != nullptr && o->count() == 0;
  };
  auto num = [&](const char* key, const char* flag, auto& field) {
    if (j.contains(key) && unset(flag)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  const bool eps_from_flags =
      sub->get_option("--eps")->count() > 0 || sub->get_option("--eps-factor")->count() > 0;
  num("rho0", "--rho0", cfg.rho0);
  num("rho1", "--rho1", cfg.rho1);
  if (!eps_from_flags) {
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("eps_factor")) cfg.eps_factor = j.at("eps_factor").get<double>();
  }
  num("grid_n", "--n", cfg.grid_n);
  num("dt", "--dt", cfg.dt);
  num("T", "--T", cfg.T);
  num("relax_tol", "--relax-tol", cfg.relax_tol);
  num("t_cap", "--t-cap", cfg.t_cap);
  num("picard_tol", "--picard-tol", cfg.picard_tol);
  num("a_tol", "--a-tol", cfg.a_tol);
  num("gf_tol", "--gf-tol", cfg.gf_tol);
  num("root_tol", "--root-tol", cfg.root_tol);
  num("dedup_tol", "--dedup-tol", cfg.dedup_tol);
  num("seed_steps", "--seed-steps", cfg.seed_steps);
  num("rng_seed", "--rng-seed", cfg.rng_seed);
  num("density", "--density", cfg.density);
  num("density_file", "--density-file", cfg.density_file);
  num("out", "--out", cfg.out);
  num("path_dir", "--path-dir", cfg.path_dir);
  num("eps_factors", "--eps-factors", cfg.eps_factors);
  num("jobs", "--jobs", cfg.jobs);
  num("stride", "--stride", cfg.stride);
  num("y_minus", "--y-minus", cfg.y_minus);
  num("y0", "--y0", cfg.y0);
  num("y_plus", "--y-plus", cfg.y_plus);
  num("amplitude", "--amplitude", cfg.amplitude);
  num("delta", "--delta", cfg.delta);
}

struct Resolved {
  bqp::Params P;
  double eps = 0.0;
  bqp::Grid grid;
};

Resolved resolve(const RunConfig& cfg) {
  if (!(cfg.rho0 > 0.0 && cfg.rho0 < cfg.rho1 && cfg.rho1 < 1.0))
    throw std::invalid_argument("config: need 0 < rho0 < rho1 < 1");
  if (cfg.grid_n < 11) throw std::invalid_argument("config: grid_n >= 11");
  for (double t : {cfg.picard_tol, cfg.a_tol, cfg.gf_tol, cfg.root_tol,
                   cfg.dedup_tol, cfg.relax_tol})
    if (!(t > 0.0)) throw std::invalid_argument("config: tolerances must be > 0");
  Resolved r{bqp::Params(cfg.rho0, cfg.rho1), 0.0, bqp::Grid(cfg.grid_n)};
  if (cfg.eps > 0.0 && cfg.eps_factor > 0.0)
    throw std::invalid_argument("config: give either eps or eps_factor, not both");
  if (cfg.eps > 0.0)
    r.eps = cfg.eps;
  else if (cfg.eps_factor > 0.0)
    r.eps = cfg.eps_factor * r.P.eps0;
  else
    r.eps = r.P.eps0;
  return r;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::vector<double> parse_eps_list(const std::string& s, const bqp::Params& P) {
  std::vector<double> eps;
  for (const std::string& tok : split(s, ',')) {
    const double f = std::stod(tok);
    if (!(f > 0.0)) throw std::invalid_argument("config: eps factors must be > 0");
    eps.push_back(f * P.eps0);
  }
  if (eps.empty()) throw std::invalid_argument("config: empty eps list");
  return eps;
}

bqp::TransitionGeometry geometry_of(const RunConfig& cfg) {
  return bqp::TransitionGeometry{cfg.y_minus, cfg.y0, cfg.y_plus};
}

double amplitude_of(const RunConfig& cfg, const bqp::Params& P) {
  if (cfg.amplitude > 0.0) return cfg.amplitude;
  const bqp::Thresholds th = bqp::thresholds(P);
  return 0.6 * std::min(th.a - th.a_minus, th.a_plus - th.a);
}

bqp::Profile make_density(const RunConfig& cfg, const Resolved& r) {
  if (!cfg.density_file.empty()) return bqp::read_profile_csv(cfg.density_file);
  const std::vector<std::string> parts = split(cfg.density, ':');
  const std::string& kind = parts[0];
  if (kind == "stationary")
    return bqp::stationary_profile(r.P, r.eps, r.grid).rho_bar;
  if (kind == "constant") {
    if (parts.size() != 2) throw std::invalid_argument("config: constant:<v>");
    const double v = std::stod(parts[1]);
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("config: constant density must be in (0,1)");
    return bqp::Profile(r.grid, v);
  }
  if (kind == "sine") {
    if (parts.size() != 4)
      throw std::invalid_argument("config: sine:<mean>:<amp>:<k>");
    const double mean = std::stod(parts[1]), amp = std::stod(parts[2]),
                 k = std::stod(parts[3]);
    bqp::Profile p(r.grid);
    for (int i = 0; i < r.grid.n; ++i) {
      p[i] = mean + amp * std::sin(k * 3.14159265358979323846 * r.grid.x(i));
      if (!(p[i] > 0.0 && p[i] < 1.0))
        throw std::invalid_argument("config: sine density leaves (0,1)");
    }
    return p;
  }
  if (kind == "mina") {
    bqp::TransitionGeometry geom = geometry_of(cfg);
    double amp = amplitude_of(cfg, r.P);
    if (parts.size() == 5) {
      geom.y_minus = std::stod(parts[1]);
      geom.y0 = std::stod(parts[2]);
      geom.y_plus = std::stod(parts[3]);
      amp = std::stod(parts[4]);
    } else if (parts.size() != 1) {
      throw std::invalid_argument("config: mina[:<y->:<y0>:<y+>:<amp>]");
    }
    return bqp::build_test_density(r.grid, r.P, geom, amp);
  }
  throw std::invalid_argument("config: unknown density generator '" + kind + "'");
}

json config_json(const RunConfig& cfg, const Resolved& r) {
  return json{{"rho0", cfg.rho0},
              {"rho1", cfg.rho1},
              {"eps", r.eps},
              {"eps_factor", r.eps / r.P.eps0},
              {"eps0", r.P.eps0},
              {"grid_n", cfg.grid_n},
              {"dt", cfg.dt},
              {"T", cfg.T},
              {"relax_tol", cfg.relax_tol},
              {"t_cap", cfg.t_cap},
              {"picard_tol", cfg.picard_tol},
              {"a_tol", cfg.a_tol},
              {"gf_tol", cfg.gf_tol},
              {"root_tol", cfg.root_tol},
              {"dedup_tol", cfg.dedup_tol},
              {"seed_steps", cfg.seed_steps},
              {"rng_seed", cfg.rng_seed},
              {"density", cfg.density},
              {"density_file", cfg.density_file},
              {"out", cfg.out},
              {"path_dir", cfg.path_dir},
              {"eps_factors", cfg.eps_factors},
              {"jobs", cfg.jobs},
              {"stride", cfg.stride},
              {"y_minus", cfg.y_minus},
              {"y0", cfg.y0},
              {"y_plus", cfg.y_plus},
              {"amplitude", cfg.amplitude},
              {"delta", cfg.delta}};
}

struct Manifest {
  fs::path dir;
  json body;
  std::vector<std::string> outputs;

  Manifest(const std::string& out_dir, const std::string& command,
           const RunConfig& cfg, const Resolved& r)
      : dir(out_dir) {
    fs::create_directories(dir);
    body["command"] = command;
    body["config"] = config_json(cfg, r);
    body["params"] = bqp::json_of(r.P, r.eps);
  }

  std::string path(const std::string& name) {
    outputs.push_back(name);
    return (dir / name).string();
  }

  void finish(double seconds, const std::string& status = "ok") {
    body["outputs"] = outputs;
    body["elapsed_seconds"] = seconds;
    body["status"] = status;
    bqp::write_json_file((dir / "manifest.json").string(), body);
  }
};

bqp::EnumerateOptions enumerate_options(const RunConfig& cfg) {
  bqp::EnumerateOptions opt;
  opt.picard.tol = cfg.picard_tol;
  opt.picard.a_tol = cfg.a_tol;
  opt.flow.resid_tol = cfg.gf_tol;
  opt.seeds.n_steps = cfg.seed_steps;
  opt.seeds.rng_seed = cfg.rng_seed;
  opt.dedup_tol = cfg.dedup_tol;
  return opt;
}

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int run_stationary(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "stationary", cfg, r);
  const bqp::StationaryResult st = bqp::stationary_profile(r.P, r.eps, r.grid);
  bqp::write_profile_csv(st.rho_bar, man.path("rho_bar.csv"));
  json side = bqp::json_of(st);
  side["j_eps"] = st.current;
  side["j0"] = bqp::current_bound(r.P);
  side["eps"] = r.eps;
  side["eps0"] = r.P.eps0;
  side["rho_mid"] = st.rho_bar[(r.grid.n - 1) / 2];
  bqp::write_json_file(man.path("stationary.json"), side);
  man.body["stationary"] = side;
  man.finish(seconds_since(t0));
  std::cout << "stationary: J_eps = " << st.current
            << ", residual_sup = " << st.residual_sup << ", wrote "
            << (man.dir / "rho_bar.csv").string() << "\n";
  return 0;
}

int run_fixed_points(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "fixed-points", cfg, r);
  const bqp::Profile rho = make_density(cfg, r);
  const auto fps = bqp::enumerate_fixed_points(rho, r.eps, r.P, enumerate_options(cfg));
  bqp::write_profile_csv(rho, man.path("rho.csv"));
  json list = json::array();
  for (size_t k = 0; k < fps.size(); ++k) {
    bqp::write_profile_csv(fps[k].phi, man.path("phi_" + std::to_string(k) + ".csv"));
    list.push_back(bqp::json_of(fps[k]));
  }
  json rep{{"n_fixed_points", fps.size()},
           {"s_naught", fps.front().g_value},
           {"fixed_points", list}};
  bqp::write_json_file(man.path("fixed_points.json"), rep);
  man.body["report"] = rep;
  man.finish(seconds_since(t0));
  std::cout << "fixed-points: found " << fps.size() << ", lowest value "
            << fps.front().g_value << "\n";
  return 0;
}

int run_quasipotential(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "quasipotential", cfg, r);
  const bqp::Profile rho = make_density(cfg, r);
  const bqp::MinimizationReport rep =
      bqp::quasi_potential(rho, r.eps, r.P, enumerate_options(cfg));
  bqp::write_profile_csv(rho, man.path("rho.csv"));
  bqp::write_profile_csv(rep.rho_bar, man.path("rho_bar.csv"));
  for (size_t k = 0; k < rep.fixed_points.size(); ++k)
    bqp::write_profile_csv(rep.fixed_points[k].phi,
                           man.path("phi_" + std::to_string(k) + ".csv"));
  bqp::write_json_file(man.path("quasipotential.json"), bqp::json_of(rep));
  man.body["report"] = bqp::json_of(rep);
  man.finish(seconds_since(t0));
  std::cout << "quasipotential: s_eps = " << rep.s_eps << " ("
            << rep.n_minimizers << " minimizer(s))\n";
  return 0;
}

int run_path(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "path", cfg, r);
  const bqp::Profile rho = make_density(cfg, r);
  const bqp::MinimizationReport mr =
      bqp::quasi_potential(rho, r.eps, r.P, enumerate_options(cfg));
  const bqp::FixedPointResult& fp = mr.fixed_points.front();
  bqp::ExcursionOptions eo;
  eo.dt = cfg.dt;
  eo.relax_tol = cfg.relax_tol;
  eo.t_cap = cfg.t_cap;
  const bqp::ExcursionResult ex = bqp::excursion_path(rho, fp, r.eps, r.P, eo);
  const double stat = fp.g_value - mr.s_naught_stationary;
  const bqp::ActionReport act =
      bqp::action_of_controlled_path(ex.u, ex.control, r.eps, stat);

  json extra{{"action", act.action},
             {"static_value", stat},
             {"rel_gap", act.rel_gap},
             {"eps", r.eps},
             {"rho0", r.P.rho0},
             {"rho1", r.P.rho1},
             {"u0_recon_defect", ex.u0_recon_defect},
             {"boundary_defect", ex.boundary_defect},
             {"relax_converged", ex.relax_converged},
             {"relax_final_dist", ex.relax_final_dist},
             {"t_horizon", ex.t_horizon}};
  bqp::write_time_path((man.dir / "excursion").string(), ex.u, extra, cfg.stride);
  man.outputs.push_back("excursion/");
  bqp::write_time_path((man.dir / "control").string(), ex.control,
                       json{{"eps", r.eps}}, cfg.stride);
  man.outputs.push_back("control/");
  bqp::write_json_file(man.path("action.json"), bqp::json_of(act));
  man.body["action"] = bqp::json_of(act);
  man.body["excursion"] = extra;
  man.finish(seconds_since(t0));
  std::cout << "path: action = " << act.action << ", static value = " << stat
            << ", rel gap = " << act.rel_gap << ", frames = " << ex.u.n_frames()
            << "\n";
  return 0;
}

int run_action_check(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  RunConfig local = cfg;
  if (local.path_dir.empty())
    local.path_dir = (fs::path(cfg.out) / "excursion").string();
  const json pj = bqp::read_json_file(
      (fs::path(local.path_dir) / "path.json").string());
  if (pj.contains("rho0")) local.rho0 = pj.at("rho0").get<double>();
  if (pj.contains("rho1")) local.rho1 = pj.at("rho1").get<double>();
  if (local.eps < 0.0 && local.eps_factor < 0.0 && pj.contains("eps")) {
    local.eps = pj.at("eps").get<double>();
  }
  const Resolved r = resolve(local);
  Manifest man(local.out, "action-check", local, r);
  const bqp::TimePath u = bqp::read_time_path(local.path_dir);
  const double stat = pj.contains("static_value")
                          ? pj.at("static_value").get<double>()
                          : std::numeric_limits<double>::quiet_NaN();
  const bqp::ActionReport act = bqp::action_via_elliptic(u, r.eps, r.P, stat);
  json rep = bqp::json_of(act);
  if (pj.contains("action")) {
    const double manifest_action = pj.at("action").get<double>();
    rep["manifest_action"] = manifest_action;
    rep["rel_gap_routes"] =
        std::fabs(act.action - manifest_action) /
        std::max({std::fabs(act.action), std::fabs(manifest_action), 1e-12});
  }
  bqp::write_json_file(man.path("action_check.json"), rep);
  man.body["report"] = rep;
  man.finish(seconds_since(t0));
  std::cout << "action-check: elliptic action = " << act.action;
  if (rep.contains("rel_gap_routes"))
    std::cout << ", gap to stored action = " << rep["rel_gap_routes"].dump();
  std::cout << "\n";
  return 0;
}

int run_inviscid(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "inviscid", cfg, r);
  const bqp::Profile rho = make_density(cfg, r);
  const bqp::Thresholds th = bqp::thresholds(r.P);
  const bqp::InviscidMin im = bqp::minimize_inviscid(rho, r.P);
  const double s_inv = bqp::inviscid_s(rho, r.P);
  bqp::write_profile_csv(rho, man.path("rho.csv"));
  json rep{{"thresholds", bqp::json_of(th)},
           {"minimum", bqp::json_of(im)},
           {"s_inviscid", s_inv}};
  bqp::write_json_file(man.path("inviscid.json"), rep);
  man.body["report"] = rep;
  man.finish(seconds_since(t0));
  std::cout << "inviscid: value = " << im.value << ", argmins = " << im.argmins.size()
            << (im.flat ? " (flat)" : "") << ", s_inviscid = " << s_inv << "\n";
  return 0;
}

// transition-style subcommands default to the two-well density
bqp::Profile transition_density(const RunConfig& cfg, const Resolved& r,
                                CLI::App* sub) {
  const bool density_given = sub->get_option("--density")->count() > 0 ||
                             sub->get_option("--density-file")->count() > 0 ||
                             cfg.density != "stationary";
  if (density_given) return make_density(cfg, r);
  return bqp::build_test_density(r.grid, r.P, geometry_of(cfg),
                                 amplitude_of(cfg, r.P));
}

int run_transition(const RunConfig& cfg, CLI::App* sub) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "transition", cfg, r);
  const bqp::Profile rho = transition_density(cfg, r, sub);
  const bqp::Profile lam = bqp::raised_cosine_bump(r.grid, cfg.y_minus, cfg.y0);
  const bqp::TransitionReport rep = bqp::find_transition(
      rho, lam, cfg.delta, r.eps, r.P, geometry_of(cfg), cfg.root_tol);
  bqp::write_profile_csv(rho, man.path("rho_base.csv"));
  bqp::write_profile_csv(rep.minimizer_minus.phi, man.path("minimizer_minus.csv"));
  bqp::write_profile_csv(rep.minimizer_plus.phi, man.path("minimizer_plus.csv"));
  bqp::write_json_file(man.path("transition.json"), bqp::json_of(rep));
  man.body["report"] = bqp::json_of(rep);
  man.finish(seconds_since(t0));
  std::cout << "transition: alpha0 = " << rep.alpha0
            << ", separation = " << rep.separation << "\n";
  return 0;
}

int run_bifurcation_scan(const RunConfig& cfg, CLI::App* sub) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "bifurcation-scan", cfg, r);
  const bqp::Profile rho = transition_density(cfg, r, sub);
  const bqp::Profile lam = bqp::raised_cosine_bump(r.grid, cfg.y_minus, cfg.y0);
  const std::vector<double> eps_list = parse_eps_list(cfg.eps_factors, r.P);
  const auto rows = bqp::bifurcation_scan(rho, lam, cfg.delta, eps_list, r.P,
                                          geometry_of(cfg), cfg.root_tol, cfg.jobs);
  std::vector<std::vector<double>> table;
  json jrows = json::array();
  for (const auto& row : rows) {
    table.push_back({row.eps, row.eps / r.P.eps0, row.bracket_ok ? 1.0 : 0.0,
                     row.alpha0, static_cast<double>(row.n_minimizers),
                     row.separation, row.g_minus, row.g_plus});
    jrows.push_back(bqp::json_of(row));
  }
  bqp::write_table_csv(man.path("bifurcation.csv"),
                       {"eps", "eps_factor", "bracket_ok", "alpha0",
                        "n_minimizers_at_alpha0", "separation", "g_minus", "g_plus"},
                       table);
  bqp::write_json_file(man.path("bifurcation.json"), jrows);
  man.body["rows"] = jrows;
  man.finish(seconds_since(t0));
  std::cout << "bifurcation-scan: " << rows.size() << " viscosities scanned\n";
  return 0;
}

int run_gamma_scan(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "gamma-scan", cfg, r);
  const bqp::Profile rho = make_density(cfg, r);
  const std::vector<double> eps_list = parse_eps_list(cfg.eps_factors, r.P);
  const bqp::GammaScanReport rep = bqp::gamma_scan(rho, eps_list, r.P, cfg.jobs);
  std::vector<std::vector<double>> table;
  for (const auto& row : rep.rows)
    table.push_back({row.eps, row.eps / r.P.eps0, row.s_eps, row.s_inviscid,
                     row.gap, row.sup_dist, row.l1_dist});
  bqp::write_table_csv(man.path("gamma.csv"),
                       {"eps", "eps_factor", "s_eps", "s_inviscid", "gap",
                        "sup_dist", "l1_dist"},
                       table);
  bqp::write_json_file(man.path("gamma.json"), bqp::json_of(rep));
  man.body["report"] = bqp::json_of(rep);
  man.finish(seconds_since(t0));
  std::cout << "gamma-scan: " << rep.rows.size() << " rows, gap monotone = "
            << (rep.gap_monotone ? "yes" : "no") << "\n";
  return 0;
}

int run_selftest_cmd(const RunConfig& cfg) {
  const auto t0 = Clock::now();
  const Resolved r = resolve(cfg);
  Manifest man(cfg.out, "selftest", cfg, r);
  const bool ok = bqp::run_selftest(std::cout);
  man.body["selftest_ok"] = ok;
  man.finish(seconds_since(t0), ok ? "ok" : "selftest failures");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"boundary-driven Burgers quasi-potential toolkit"};
  app.require_subcommand(1);
  RunConfig cfg;

  std::map<std::string, CLI::App*> subs;
  for (const char* name :
       {"stationary", "fixed-points", "quasipotential", "path", "action-check",
        "inviscid", "transition", "bifurcation-scan", "gamma-scan", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name, "");
    add_common(sub, cfg);
    subs[name] = sub;
  }
  subs["stationary"]->description("stationary profile and current");
  subs["fixed-points"]->description("enumerate critical points of the trial functional");
  subs["quasipotential"]->description("quasi-potential of a density");
  subs["path"]->description("optimal excursion path and its action");
  subs["action-check"]->description("recompute a stored path's action via the elliptic route");
  subs["inviscid"]->description("thresholds and the single-jump minimization");
  subs["transition"]->description("two-minimizer coexistence point alpha0");
  subs["bifurcation-scan"]->description("sweep viscosities for coexistence");
  subs["gamma-scan"]->description("quasi-potential against its inviscid limit");
  subs["selftest"]->description("closed-form oracle suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    apply_config_file(sub, cfg);
    const std::string name = sub->get_name();
    if (name == "stationary") return run_stationary(cfg);
    if (name == "fixed-points") return run_fixed_points(cfg);
    if (name == "quasipotential") return run_quasipotential(cfg);
    if (name == "path") return run_path(cfg);
    if (name == "action-check") return run_action_check(cfg);
    if (name == "inviscid") return run_inviscid(cfg);
    if (name == "transition") return run_transition(cfg, sub);
    if (name == "bifurcation-scan") return run_bifurcation_scan(cfg, sub);
    if (name == "gamma-scan") return run_gamma_scan(cfg);
    if (name == "selftest") return run_selftest_cmd(cfg);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  }
}

#include "bqp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace bqp {

namespace {

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

std::string frame_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d.csv", k);
  return buf;
}

}  // namespace

json json_of(const Params& P, double eps) {
  return json{{"rho0", P.rho0},       {"rho1", P.rho1}, {"phi0", P.phi0},
              {"phi1", P.phi1},       {"eps0", P.eps0}, {"eps", eps},
              {"eps_factor", eps / P.eps0}};
}

json json_of(const StationaryResult& r) {
  return json{{"current", r.current},
              {"endpoint_defect", r.endpoint_defect},
              {"residual_sup", r.residual_sup},
              {"n", r.rho_bar.n()}};
}

json json_of(const FixedPointResult& fp) {
  return json{{"log_a", fp.log_a},
              {"a_const", finite_or_null(fp.a_const)},
              {"k_residual", fp.k_residual},
              {"el_residual", fp.el_residual},
              {"g_value", fp.g_value},
              {"min_eig", fp.min_eig},
              {"eig_scale", fp.eig_scale},
              {"delta_observed", fp.delta_observed},
              {"kind", fp.kind},
              {"iterations", fp.iterations},
              {"converged", fp.converged}};
}

json json_of(const MinimizationReport& r) {
  json fps = json::array();
  for (const auto& fp : r.fixed_points) fps.push_back(json_of(fp));
  return json{{"s_naught", r.s_naught},
              {"s_naught_stationary", r.s_naught_stationary},
              {"s_eps", r.s_eps},
              {"n_minimizers", r.n_minimizers},
              {"fixed_points", fps}};
}

json json_of(const ActionReport& r) {
  return json{{"action", r.action},
              {"t0", r.t0},
              {"t1", r.t1},
              {"dt", r.dt},
              {"n_frames", r.n_frames},
              {"static_value", r.has_static ? json(r.static_value) : json()},
              {"rel_gap", r.has_static ? json(r.rel_gap) : json()},
              {"has_static", r.has_static}};
}

json json_of(const StaticDynamicRow& r) {
  return json{{"g_value", r.g_value},
              {"static_value", r.static_value},
              {"action_control", r.action_control},
              {"action_elliptic", r.action_elliptic},
              {"rel_gap_control", r.rel_gap_control},
              {"rel_gap_routes", r.rel_gap_routes},
              {"u0_recon_defect", r.u0_recon_defect},
              {"kind", r.kind}};
}

json json_of(const StaticDynamicReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(json_of(row));
  return json{{"s_naught", r.s_naught},
              {"s_naught_stationary", r.s_naught_stationary},
              {"s_eps", r.s_eps},
              {"max_rel_gap", r.max_rel_gap},
              {"rows", rows}};
}

json json_of(const Thresholds& t) {
  return json{{"a", t.a},
              {"a_plus", t.a_plus},
              {"a_minus", t.a_minus},
              {"phibar", t.phibar}};
}

json json_of(const InviscidMin& m) {
  return json{{"value", m.value}, {"argmins", m.argmins}, {"flat", m.flat}};
}

json json_of(const TransitionReport& r) {
  json trace = json::array();
  for (const auto& [a, g] : r.g_trace) trace.push_back(json{a, g});
  return json{{"eps", r.eps},
              {"alpha0", r.alpha0},
              {"bracket_width", r.bracket_width},
              {"g_trace", trace},
              {"minimizer_minus", json_of(r.minimizer_minus)},
              {"minimizer_plus", json_of(r.minimizer_plus)},
              {"separation", r.separation}};
}

json json_of(const BifurcationRow& r) {
  return json{{"eps", r.eps},
              {"bracket_ok", r.bracket_ok},
              {"alpha0", finite_or_null(r.alpha0)},
              {"n_minimizers", r.n_minimizers},
              {"separation", r.separation},
              {"g_minus", r.g_minus},
              {"g_plus", r.g_plus},
              {"note", r.note}};
}

json json_of(const GammaScanRow& r) {
  return json{{"eps", r.eps},         {"s_eps", r.s_eps},
              {"s_inviscid", r.s_inviscid}, {"gap", r.gap},
              {"sup_dist", r.sup_dist},     {"l1_dist", r.l1_dist}};
}

json json_of(const GammaScanReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back(json_of(row));
  return json{{"rows", rows},
              {"s_inviscid", r.s_inviscid},
              {"inviscid_argmins", r.inviscid_argmins},
              {"gap_monotone", r.gap_monotone}};
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_json_file: cannot open " + path);
  f << j.dump(2) << "\n";
  if (!f) throw std::runtime_error("write_json_file: write failed on " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_json_file: cannot open " + path);
  json j;
  f >> j;
  return j;
}

void write_time_path(const std::string& dir, const TimePath& path,
                     const json& extra, int stride) {
  if (path.n_frames() < 1)
    throw std::invalid_argument("write_time_path: empty path");
  if (stride < 1) throw std::invalid_argument("write_time_path: stride >= 1");
  fs::create_directories(dir);

  std::vector<int> kept;
  for (int j = 0; j < path.n_frames(); j += stride) kept.push_back(j);
  if (kept.back() != path.n_frames() - 1) kept.push_back(path.n_frames() - 1);

  json files = json::array();
  json times = json::array();
  for (size_t k = 0; k < kept.size(); ++k) {
    const std::string name = frame_name(static_cast<int>(k));
    write_profile_csv(path.frames[kept[k]], (fs::path(dir) / name).string());
    files.push_back(name);
    times.push_back(path.t(kept[k]));
  }
  json manifest{{"t0", path.t0},
                {"t1", path.t1},
                {"dt", path.dt},
                {"n_frames", path.n_frames()},
                {"stride", stride},
                {"files", files},
                {"times", times}};
  for (auto it = extra.begin(); it != extra.end(); ++it)
    manifest[it.key()] = it.value();
  write_json_file((fs::path(dir) / "path.json").string(), manifest);
}

TimePath read_time_path(const std::string& dir) {
  const json manifest = read_json_file((fs::path(dir) / "path.json").string());
  const auto& files = manifest.at("files");
  const auto& times = manifest.at("times");
  if (files.size() != times.size() || files.empty())
    throw std::runtime_error("read_time_path: corrupt manifest in " + dir);

  TimePath path;
  path.t0 = times.front().get<double>();
  path.t1 = times.back().get<double>();
  for (size_t k = 0; k < files.size(); ++k) {
    Profile p = read_profile_csv(
        (fs::path(dir) / files[k].get<std::string>()).string());
    if (k == 0)
      path.grid = p.grid;
    else if (p.grid != path.grid)
      throw std::runtime_error("read_time_path: frames on different grids");
    path.frames.push_back(std::move(p));
  }
  if (files.size() > 1) {
    path.dt = (path.t1 - path.t0) / (static_cast<double>(files.size()) - 1);
    for (size_t k = 0; k < times.size(); ++k)
      if (std::fabs(times[k].get<double>() - (path.t0 + path.dt * k)) >
          1e-12 * std::max(1.0, std::fabs(path.t1)))
        throw std::runtime_error("read_time_path: non-uniform sampling");
  } else {
    path.dt = manifest.value("dt", 0.0);
  }
  return path;
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_table_csv: cannot open " + path);
  for (size_t c = 0; c < header.size(); ++c)
    f << header[c] << (c + 1 < header.size() ? "," : "\n");
  char buf[64];
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("write_table_csv: ragged row");
    for (size_t c = 0; c < row.size(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
      f << buf << (c + 1 < row.size() ? "," : "\n");
    }
  }
  if (!f) throw std::runtime_error("write_table_csv: write failed on " + path);
}

}  // namespace bqp

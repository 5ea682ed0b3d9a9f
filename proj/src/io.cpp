#include "nlspread/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "nlspread/error.hpp"

namespace nlspread::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t config_hash(const nlohmann::json& config) {
  const std::string s = config.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ostringstream os;
  os << "t,x,u\n";
  for (const auto& s : traj.snapshots)
    for (std::size_t i = 0; i < s.u.size(); ++i)
      os << format_number(s.time) << ',' << format_number(traj.grid.x(i)) << ',' << format_number(s.u[i]) << '\n';
  write_text(path, os.str());
}

namespace {

nlohmann::json mask_ranges(const std::vector<bool>& mask) {
  nlohmann::json ranges = nlohmann::json::array();
  std::size_t i = 0;
  while (i < mask.size()) {
    if (!mask[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < mask.size() && mask[j]) ++j;
    ranges.push_back({i, j});
    i = j;
  }
  return ranges;
}

}  // namespace

void write_snapshots_binary(const std::filesystem::path& bin, const std::filesystem::path& sidecar,
                            const Trajectory& traj) {
  static_assert(std::endian::native == std::endian::little, "binary snapshots assume a little-endian host");
  std::string data;
  data.reserve(traj.snapshots.size() * traj.grid.n * sizeof(double));
  std::vector<double> times;
  for (const auto& s : traj.snapshots) {
    times.push_back(s.time);
    data.append(reinterpret_cast<const char*>(s.u.values().data()), s.u.size() * sizeof(double));
  }
  write_text(bin, data);
  nlohmann::json meta = {{"format", "float64-le"},
                         {"layout", "snapshot-major"},
                         {"file", bin.filename().string()},
                         {"grid", {{"x_min", traj.grid.x_min}, {"dx", traj.grid.dx}, {"n", traj.grid.n}}},
                         {"times", times},
                         {"dt", traj.dt},
                         {"horizon", traj.horizon},
                         {"speed_bound", traj.speed_bound},
                         {"truncation_radius", traj.truncation_radius},
                         {"contaminated_ranges", mask_ranges(traj.contaminated)}};
  write_json(sidecar, meta);
}

Trajectory read_snapshots_binary(const std::filesystem::path& bin, const std::filesystem::path& sidecar) {
  const auto meta = read_json(sidecar);
  Trajectory traj;
  traj.grid = SpatialGrid(meta.at("grid").at("x_min").get<double>(), meta.at("grid").at("dx").get<double>(),
                          meta.at("grid").at("n").get<std::size_t>());
  traj.dt = meta.at("dt").get<double>();
  traj.horizon = meta.at("horizon").get<double>();
  traj.speed_bound = meta.at("speed_bound").get<double>();
  traj.truncation_radius = meta.at("truncation_radius").get<double>();
  traj.contaminated.assign(traj.grid.n, false);
  for (const auto& r : meta.at("contaminated_ranges"))
    for (std::size_t i = r.at(0).get<std::size_t>(); i < r.at(1).get<std::size_t>(); ++i) traj.contaminated[i] = true;
  std::ifstream in(bin, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + bin.string());
  for (double t : meta.at("times").get<std::vector<double>>()) {
    std::vector<double> u(traj.grid.n);
    in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(u.size() * sizeof(double)));
    if (!in) throw InvalidInput(bin.string() + ": truncated snapshot file");
    traj.snapshots.push_back(Snapshot{t, Field(traj.grid, std::move(u))});
  }
  return traj;
}

void write_fronts_csv(const std::filesystem::path& path, std::span<const FrontSeries> series) {
  std::ostringstream os;
  os << "direction,threshold,t,front_x\n";
  for (const auto& s : series)
    for (const auto& [t, x] : s.points)
      os << to_string(s.direction) << ',' << format_number(s.threshold) << ',' << format_number(t) << ','
         << (std::isfinite(x) ? format_number(x) : "") << '\n';
  write_text(path, os.str());
}

void write_rescaled_csv(const std::filesystem::path& path, std::span<const RescaledPoint> pts) {
  std::ostringstream os;
  os << "t,x,z,masked\n";
  for (const auto& p : pts)
    os << format_number(p.t) << ',' << format_number(p.x) << ',' << format_number(p.z) << ',' << (p.masked ? 1 : 0)
       << '\n';
  write_text(path, os.str());
}

void write_hamiltonian_csv(const std::filesystem::path& path, const HamiltonianCurve& curve) {
  std::ostringstream os;
  os << "p,H_lower,H_upper,H_central,method,failure\n";
  for (std::size_t i = 0; i < curve.p_samples.size(); ++i) {
    os << format_number(curve.p_samples[i]) << ',';
    if (curve.failures[i].empty()) {
      os << format_number(curve.H_lower[i]) << ',' << format_number(curve.H_upper[i]) << ','
         << format_number(curve.H_central[i]) << ',' << to_string(curve.methods[i]) << ",\n";
    } else {
      std::string f = curve.failures[i];
      for (char& c : f)
        if (c == ',' || c == '\n') c = ';';
      os << ",,," << to_string(curve.methods[i]) << ',' << f << '\n';
    }
  }
  write_text(path, os.str());
}

}  // namespace nlspread::io

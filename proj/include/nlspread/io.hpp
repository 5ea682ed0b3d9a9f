#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlspread/evolve.hpp"
#include "nlspread/front.hpp"
#include "nlspread/hamiltonian.hpp"

namespace nlspread::io {

/// Shortest round-trip decimal representation (locale independent).
std::string format_number(double v);

/// 64-bit FNV-1a of the canonical (sorted-key, compact) JSON dump.
std::uint64_t config_hash(const nlohmann::json& config);
std::string hex(std::uint64_t v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

/// Columns t,x,u; one row per node per snapshot.
void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Raw little-endian float64 samples, snapshot-major, with a JSON sidecar describing
/// grid, times and the contamination mask.
void write_snapshots_binary(const std::filesystem::path& bin, const std::filesystem::path& sidecar,
                            const Trajectory& traj);
/// Reads back what write_snapshots_binary wrote.
Trajectory read_snapshots_binary(const std::filesystem::path& bin, const std::filesystem::path& sidecar);

struct FrontSeries {
  Direction direction = Direction::right;
  double threshold = 0.5;
  std::vector<std::pair<double, double>> points;  ///< (t, front_x)
};
/// Columns direction,threshold,t,front_x (empty front_x where the front was lost).
void write_fronts_csv(const std::filesystem::path& path, std::span<const FrontSeries> series);
/// Columns t,x,z,masked.
void write_rescaled_csv(const std::filesystem::path& path, std::span<const RescaledPoint> pts);
/// Columns p,H_lower,H_upper,H_central,method,failure.
void write_hamiltonian_csv(const std::filesystem::path& path, const HamiltonianCurve& curve);

}  // namespace nlspread::io

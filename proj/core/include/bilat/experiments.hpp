#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bilat/analysis.hpp"
#include "bilat/error.hpp"
#include "bilat/system.hpp"

namespace bilat {

/// One published parameter set for the coupled oscillators.
struct Preset {
  std::string name;  // e.g. "fig1a-vdp"
  OscillatorKind kind = OscillatorKind::VanDerPol;
  OscillatorParams params;
  double horizon = 50.0;
  double dt = 0.01;
};

[[nodiscard]] const std::vector<Preset>& preset_registry();
/// Throws UnknownPreset.
[[nodiscard]] const Preset& find_preset(std::string_view name);
[[nodiscard]] VectorDelaySystem preset_system(const Preset& preset, double x01);

struct ManifestFile {
  std::string name;
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunManifest {
  std::string command;
  std::string source;  // preset name or config path
  double x01 = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  std::filesystem::path outdir;
  std::vector<ManifestFile> files;
  int exit_code = 0;  // 0 ok, 2 numeric failure recorded in report.json
  std::string error;
};

[[nodiscard]] std::string manifest_to_json(const RunManifest& manifest);
[[nodiscard]] std::string sha256_hex(std::string_view data);

struct RunOptions {
  std::optional<double> x01;      // scales the first history component; preset default 0.1
  std::optional<double> horizon;  // default: preset horizon, 50 for configs
  std::optional<double> dt;       // default: preset step, min(h_lo / 2, 0.01) for configs
  double threshold = 1e5;
  bool bounds_only = false;
};

struct RegionOptions {
  RegionScanConfig scan;
  double display_scale = 1.0;  // applied to the inner curve in region.svg only
};

/// simulate + bounds + enclosure + classification. Writes norms.csv,
/// trajectory.csv, bounds.csv, report.json, plot.svg and manifest.json
/// (norms.csv and trajectory.csv are skipped with bounds_only).
RunManifest run_preset(std::string_view name, const RunOptions& options, const std::filesystem::path& outdir);
RunManifest run_system(const VectorDelaySystem& sys, const std::string& source, const RunOptions& options,
                       const std::filesystem::path& outdir);

/// Writes region.csv, region.svg, report.json and manifest.json.
RunManifest run_region(std::string_view name, const RegionOptions& options, const std::filesystem::path& outdir);
RunManifest run_region_system(const VectorDelaySystem& sys, const std::string& source,
                              const RegionOptions& options, const std::filesystem::path& outdir);

/// FTS (and FTCS with eta3) of |V| Z and of |x| with the same constants.
RunManifest run_fts(std::string_view name, const FtsSpec& spec, const RunOptions& options,
                    const std::filesystem::path& outdir);

/// Loads a JSON system and dispatches to simulate, bounds or region.
RunManifest run_config(const std::filesystem::path& path, std::string_view command, const RunOptions& options,
                       const RegionOptions& region, const std::filesystem::path& outdir);

/// True for error kinds caused by user input (exit code 3) rather than numerics.
[[nodiscard]] bool is_input_error(ErrorKind kind) noexcept;

}  // namespace bilat

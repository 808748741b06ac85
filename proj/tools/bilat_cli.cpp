#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "bilat/config.hpp"
#include "bilat/error.hpp"
#include "bilat/experiments.hpp"

namespace {

constexpr int kNumericFailure = 2;
constexpr int kInputError = 3;

struct CommonFlags {
  std::string preset;
  std::optional<double> x01;
  std::optional<double> horizon;
  std::optional<double> dt;
  double threshold = 1e5;
  std::string out;
};

void add_run_flags(CLI::App* cmd, CommonFlags& f, bool preset_required) {
  auto* preset = cmd->add_option("--preset", f.preset, "preset name, e.g. fig1a-vdp");
  if (preset_required) preset->required();
  cmd->add_option("--x01", f.x01, "first history component (default 0.1)")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", f.horizon, "integration horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--dt", f.dt, "step size (at most h_lo / 2)")->check(CLI::PositiveNumber);
  cmd->add_option("--threshold", f.threshold, "blowup threshold")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "output directory")->required();
}

bilat::RunOptions run_options(const CommonFlags& f) {
  bilat::RunOptions o;
  o.x01 = f.x01;
  o.horizon = f.horizon;
  o.dt = f.dt;
  o.threshold = f.threshold;
  return o;
}

std::pair<std::size_t, std::size_t> parse_plane(const std::string& text) {
  std::size_t i = 0, j = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> i >> sep >> j) || sep != ',' || i == 0 || j == 0) {
    throw bilat::Error(bilat::ErrorKind::InvalidParam, "--plane expects two 1-based indices like 1,2");
  }
  return {i - 1, j - 1};
}

int report(const bilat::RunManifest& m) {
  std::cout << bilat::manifest_to_json(m);
  if (m.exit_code != 0) std::cerr << "numeric failure: " << m.error << '\n';
  return m.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bilateral norm bounds for nonlinear delay systems"};
  app.require_subcommand(1);

  CommonFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "vector simulation, bounds, enclosure check and plot");
  add_run_flags(simulate, sim_flags, true);

  CommonFlags bnd_flags;
  auto* bounds = app.add_subcommand("bounds", "scalar bounds only");
  add_run_flags(bounds, bnd_flags, true);

  CommonFlags reg_flags;
  double theta_step = std::numbers::pi / 60.0;
  std::string plane = "1,2";
  double display_scale = 1.0;
  double tol = 1e-2;
  double c_max = 1e3;
  auto* region = app.add_subcommand("region", "stability region projection scan");
  region->add_option("--preset", reg_flags.preset, "preset name")->required();
  region->add_option("--theta-step", theta_step, "ray spacing in radians")->check(CLI::PositiveNumber);
  region->add_option("--threshold", reg_flags.threshold, "blowup threshold")->check(CLI::PositiveNumber);
  region->add_option("--horizon", reg_flags.horizon, "scan horizon")->check(CLI::PositiveNumber);
  region->add_option("--dt", reg_flags.dt, "step size")->check(CLI::PositiveNumber);
  region->add_option("--plane", plane, "projection plane, 1-based, e.g. 1,2");
  region->add_option("--tol", tol, "radius bisection tolerance")->check(CLI::PositiveNumber);
  region->add_option("--c-max", c_max, "radius search cap")->check(CLI::PositiveNumber);
  region->add_option("--display-scale", display_scale, "scale of the inner curve in region.svg")
      ->check(CLI::PositiveNumber);
  region->add_option("--out", reg_flags.out, "output directory")->required();

  CommonFlags fts_flags;
  double eta1 = 0, eta2 = 0;
  std::optional<double> eta3;
  auto* fts = app.add_subcommand("fts", "finite-time stability of the upper bound and the vector system");
  add_run_flags(fts, fts_flags, true);
  fts->add_option("--eta1", eta1, "history level")->required();
  fts->add_option("--eta2", eta2, "solution level")->required();
  fts->add_option("--eta3", eta3, "contraction level");

  CommonFlags cfg_flags;
  std::string config_path;
  std::string cfg_cmd = "simulate";
  auto* run = app.add_subcommand("run", "run a JSON system description");
  run->add_option("--config", config_path, "system JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("--cmd", cfg_cmd, "simulate | bounds | region")
      ->check(CLI::IsMember({"simulate", "bounds", "region"}));
  add_run_flags(run, cfg_flags, false);
  run->add_option("--theta-step", theta_step, "ray spacing in radians (region)")->check(CLI::PositiveNumber);
  run->add_option("--plane", plane, "projection plane, 1-based (region)");

  std::string export_preset, export_out;
  double export_x01 = 0.1;
  auto* exp = app.add_subcommand("export-config", "write a preset as a JSON system description");
  exp->add_option("--preset", export_preset, "preset name")->required();
  exp->add_option("--x01", export_x01, "first history component")->check(CLI::PositiveNumber);
  exp->add_option("--out", export_out, "output file (stdout if omitted)");

  app.add_subcommand("presets", "list preset names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  try {
    auto region_options = [&](const CommonFlags& f) {
      bilat::RegionOptions o;
      o.scan.theta_step = theta_step;
      o.scan.threshold = f.threshold;
      if (f.horizon) o.scan.horizon = *f.horizon;
      if (f.dt) o.scan.step.dt = *f.dt;
      o.scan.plane = parse_plane(plane);
      o.scan.search.tol = tol;
      o.scan.search.c_max = c_max;
      o.display_scale = display_scale;
      return o;
    };

    if (*simulate) return report(bilat::run_preset(sim_flags.preset, run_options(sim_flags), sim_flags.out));
    if (*bounds) {
      auto o = run_options(bnd_flags);
      o.bounds_only = true;
      return report(bilat::run_preset(bnd_flags.preset, o, bnd_flags.out));
    }
    if (*region) return report(bilat::run_region(reg_flags.preset, region_options(reg_flags), reg_flags.out));
    if (*fts) {
      bilat::FtsSpec spec;
      spec.eta1 = eta1;
      spec.eta2 = eta2;
      spec.eta3 = eta3;
      spec.T = fts_flags.horizon.value_or(50.0);
      return report(bilat::run_fts(fts_flags.preset, spec, run_options(fts_flags), fts_flags.out));
    }
    if (*run) {
      return report(bilat::run_config(config_path, cfg_cmd, run_options(cfg_flags), region_options(cfg_flags),
                                      cfg_flags.out));
    }
    if (*exp) {
      const auto sys = bilat::preset_system(bilat::find_preset(export_preset), export_x01);
      const std::string text = bilat::system_config_to_json(sys);
      if (export_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(export_out, std::ios::binary) << text;
      }
      return 0;
    }
    for (const auto& p : bilat::preset_registry()) std::cout << p.name << '\n';
    return 0;
  } catch (const bilat::Error& e) {
    std::cerr << e.what() << '\n';
    return bilat::is_input_error(e.kind()) ? kInputError : kNumericFailure;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kInputError;
  }
}

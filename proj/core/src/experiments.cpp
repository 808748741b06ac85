#include "bilat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

#include "bilat/bounds.hpp"
#include "bilat/config.hpp"
#include "bilat/error.hpp"
#include "bilat/majorant.hpp"
#include "bilat/svg.hpp"

namespace bilat {
namespace {

using ojson = nlohmann::ordered_json;

Preset make_preset(const std::string& figure, OscillatorKind kind, double mu, double a, double b, double chi1,
                   double chi2, double h1, double h2, double F01, double F02) {
  Preset p;
  p.name = figure + (kind == OscillatorKind::VanDerPol ? "-vdp" : "-duf");
  p.kind = kind;
  p.params.mu1 = p.params.mu2 = mu;
  p.params.a1 = p.params.a2 = a;
  p.params.b1 = p.params.b2 = b;
  p.params.chi1 = chi1;
  p.params.chi2 = chi2;
  p.params.h1 = h1;
  p.params.h2 = h2;
  p.params.F01 = F01;
  p.params.F02 = F02;
  return p;
}

std::vector<Preset> build_registry() {
  struct Row {
    const char* figure;
    double mu, a, b, chi1, chi2, h1, h2, F01, F02;
  };
  // fig1e carries no forcing; fig2a and fig2c share one parameter set.
  const Row rows[] = {
      {"fig1a", -3.0, 0.0, 0.0, 0.4, 0.4, 10.0, 12.0, 0.0, 0.0},
      {"fig1b", -0.5, 0.1, 0.1, 0.2, 0.4, 1.0, 2.0, 0.0, 0.0},
      {"fig1c", -0.01, 0.0, 0.1, 0.2, 0.4, 10.0, 12.0, 0.0, 0.001},
      {"fig1d", -0.01, 0.0, 0.1, 0.6, 0.6, 10.0, 12.0, 0.0, 0.001},
      {"fig1e", -0.01, 0.0, 0.1, 0.6, 0.6, 10.0, 12.0, 0.0, 0.0},
      {"fig2a", -3.0, 0.0, 0.0, 0.6, 0.6, 10.0, 12.0, 0.0, 0.0},
      {"fig2c", -3.0, 0.0, 0.0, 0.6, 0.6, 10.0, 12.0, 0.0, 0.0},
      {"fig3a", -3.0, 0.0, 0.0, 0.4, 0.4, 10.0, 12.0, 0.0, 0.0},
      {"fig3b", -0.3, 0.0, 0.0, 0.2, 0.4, 10.0, 12.0, 0.0, 0.0},
      {"fig3c", -0.01, 0.0, 0.0, 0.2, 0.4, 10.0, 12.0, 0.0, 0.001},
  };
  std::vector<Preset> out;
  for (const auto& r : rows) {
    for (auto kind : {OscillatorKind::VanDerPol, OscillatorKind::Duffing}) {
      out.push_back(make_preset(r.figure, kind, r.mu, r.a, r.b, r.chi1, r.chi2, r.h1, r.h2, r.F01, r.F02));
    }
  }
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class OutputDir {
 public:
  OutputDir(const std::filesystem::path& dir, RunManifest& manifest) : dir_(dir), manifest_(manifest) {
    std::filesystem::create_directories(dir_);
    manifest_.outdir = dir_;
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidParam, "cannot write " + (dir_ / name).string());
    out << content;
    out.close();
    manifest_.files.push_back({name, sha256_hex(content), content.size()});
  }

  void finish() {
    const std::string text = manifest_to_json(manifest_);
    std::ofstream out(dir_ / "manifest.json", std::ios::binary | std::ios::trunc);
    out << text;
  }

 private:
  std::filesystem::path dir_;
  RunManifest& manifest_;
};

ojson decomposition_json(const EigenDecomposition& d) {
  ojson j;
  j["alphas"] = d.alphas;
  j["betas"] = d.betas;
  j["norm_V"] = d.norm_V;
  j["norm_V_inv"] = d.norm_V_inv;
  j["conjugate_pairs"] = d.n1;
  return j;
}

ojson majorant_json(const Majorant& L, double t0) {
  ojson terms = ojson::array();
  for (const auto& term : L.terms()) {
    ojson factors = ojson::array();
    for (const auto& f : term.factors) factors.push_back({{"slot", f.slot}, {"power", f.power}});
    terms.push_back({{"magnitude_at_t0", eval_or_zero(term.magnitude, t0)}, {"factors", factors}});
  }
  return {{"slots", L.slots()}, {"terms", terms}};
}

ojson blowup_json(const Trajectory& traj) {
  if (!traj.blowup()) return nullptr;
  const auto& b = *traj.blowup();
  return {{"time", b.time}, {"norm", std::isfinite(b.norm) ? ojson(b.norm) : ojson("overflow")}};
}

ojson error_json(const Error& e) {
  return {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

std::string csv_of(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

double x01_of(const VectorDelaySystem& sys) { return sys.history.x0.empty() ? 0.0 : sys.history.x0[0]; }

struct Pipeline {
  EigenDecomposition decomp;
  Majorant L;
  ScalarBoundProblem upper;
  ScalarBoundProblem lower;
};

Pipeline prepare(const VectorDelaySystem& sys, double t_end, const StepConfig& step) {
  Pipeline p;
  p.decomp = eigendecompose(sys.A_star);
  const auto esys = to_eigenbasis(sys, p.decomp);
  p.L = build_majorant(sys.nonlinearity, p.decomp, esys.slots());
  p.upper = build_upper(esys, p.L).tabulated(t_end, step);
  p.lower = build_lower(esys, p.L).tabulated(t_end, step);
  return p;
}

double resolve_dt(const VectorDelaySystem& sys, const RunOptions& options, double preset_dt) {
  if (options.dt) return *options.dt;
  if (preset_dt > 0.0) return preset_dt;
  return default_step(sys.delays.to_delay_set());
}

}  // namespace

bool is_input_error(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::UnknownPreset:
    case ErrorKind::ConfigParse:
    case ErrorKind::SchemaMismatch:
    case ErrorKind::InvalidParam:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::StepTooLarge:
    case ErrorKind::EmptyInterval:
      return true;
    default:
      return false;
  }
}

const std::vector<Preset>& preset_registry() {
  static const std::vector<Preset> registry = build_registry();
  return registry;
}

const Preset& find_preset(std::string_view name) {
  for (const auto& p : preset_registry()) {
    if (p.name == name) return p;
  }
  throw Error(ErrorKind::UnknownPreset, "unknown preset '" + std::string(name) + "'");
}

VectorDelaySystem preset_system(const Preset& preset, double x01) {
  if (!(x01 > 0.0)) throw Error(ErrorKind::InvalidParam, "x01 must be positive");
  OscillatorParams params = preset.params;
  params.x01 = x01;
  return make_oscillators(preset.kind, params);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::InvalidParam, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string manifest_to_json(const RunManifest& m) {
  ojson j;
  j["command"] = m.command;
  j["source"] = m.source;
  j["x01"] = m.x01;
  j["horizon"] = m.horizon;
  j["dt"] = m.dt;
  j["outdir"] = m.outdir.string();
  ojson files = ojson::array();
  for (const auto& f : m.files) files.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  j["files"] = files;
  j["exit_code"] = m.exit_code;
  if (!m.error.empty()) j["error"] = m.error;
  return j.dump(2) + "\n";
}

RunManifest run_preset(std::string_view name, const RunOptions& options, const std::filesystem::path& outdir) {
  const Preset& preset = find_preset(name);
  RunOptions local = options;
  if (!local.horizon) local.horizon = preset.horizon;
  if (!local.dt) local.dt = preset.dt;
  const auto sys = preset_system(preset, options.x01.value_or(0.1));
  return run_system(sys, preset.name, local, outdir);
}

RunManifest run_system(const VectorDelaySystem& sys_in, const std::string& source, const RunOptions& options,
                       const std::filesystem::path& outdir) {
  VectorDelaySystem sys = sys_in;
  if (options.x01 && !sys.history.x0.empty()) sys.history.x0[0] = *options.x01;
  sys.validate();
  RunManifest man;
  man.command = options.bounds_only ? "bounds" : "simulate";
  man.source = source;
  man.x01 = x01_of(sys);
  man.horizon = options.horizon.value_or(50.0);
  man.dt = resolve_dt(sys, options, 0.0);
  if (!(man.horizon > 0.0)) throw Error(ErrorKind::InvalidParam, "horizon must be positive");
  OutputDir out(outdir, man);

  const double t_end = sys.t0 + man.horizon;
  StepConfig step;
  step.dt = man.dt;
  step.blowup_threshold = options.threshold;

  ojson report;
  report["source"] = source;
  report["command"] = man.command;
  report["x01"] = man.x01;
  report["horizon"] = man.horizon;
  report["dt"] = man.dt;
  report["threshold"] = options.threshold;
  report["enclosure"] = {{"verdict", "error"}};
  report["classification"] = {{"verdict", "error"}};

  try {
    const Pipeline p = prepare(sys, t_end, step);
    report["decomposition"] = decomposition_json(p.decomp);
    report["majorant"] = majorant_json(p.L, sys.t0);
    const BoundPair pair = solve_bounds(p.upper, p.lower, t_end, step);
    report["upper_blowup"] = blowup_json(pair.Z);
    report["lower_blowup"] = blowup_json(pair.z);

    SvgPlot plot;
    plot.title = source + ", x01 = " + fmt17(man.x01);
    plot.x_label = "t";
    plot.y_label = "norm";
    SvgSeries upper{"|V| Z", {}, {}, LineStyle::Dashed, "#b03a2e"};
    SvgSeries lower{"z / |V^-1|", {}, {}, LineStyle::DashDot, "#1e8449"};

    if (options.bounds_only) {
      report["enclosure"] = {{"verdict", "skipped"}};
    } else {
      const Simulation sim = simulate(sys, t_end, step);
      report["vector_blowup"] = blowup_json(sim.trajectory);
      out.write("trajectory.csv", csv_of([&](std::ostream& os) { write_trajectory_csv(sim.trajectory, os); }));

      const double end = std::min(sim.trajectory.t_end(), pair.common_end());
      std::size_t count = 0;
      while (count < sim.times.size() && sim.times[count] <= end + 1e-9) ++count;
      const std::span<const double> times(sim.times.data(), count);
      const std::span<const double> norms(sim.norms.data(), count);
      const Tolerance tol{1e-6, 1e-6};
      const auto enc = check_enclosure(times, norms, pair, tol);
      report["enclosure"] = {{"verdict", enc.pass ? "pass" : "fail"},
                             {"worst_margin", enc.worst_margin},
                             {"worst_time", enc.worst_time},
                             {"worst_side", enc.worst_is_upper ? "upper" : "lower"},
                             {"samples", enc.samples},
                             {"checked_until", end},
                             {"tolerance", "1e-6 * (1 + bound)"}};

      std::ostringstream norms_csv;
      norms_csv << "t,norm,upper,lower\n";
      SvgSeries vec{"|x|", {}, {}, LineStyle::Solid, "#1f4e79"};
      for (std::size_t k = 0; k < count; ++k) {
        const double up = pair.upper(times[k]);
        const double lo = pair.lower(times[k]);
        norms_csv << fmt17(times[k]) << ',' << fmt17(norms[k]) << ',' << fmt17(up) << ',' << fmt17(lo) << '\n';
        vec.x.push_back(times[k]);
        vec.y.push_back(norms[k]);
      }
      out.write("norms.csv", norms_csv.str());
      plot.series.push_back(std::move(vec));
    }

    const double end = pair.common_end();
    for (std::size_t k = 0; k < pair.Z.node_count() && pair.Z.node_time(k) <= end + 1e-9; ++k) {
      const double t = pair.Z.node_time(k);
      upper.x.push_back(t);
      upper.y.push_back(pair.upper(t));
      lower.x.push_back(t);
      lower.y.push_back(pair.lower(t));
    }
    plot.series.push_back(std::move(upper));
    plot.series.push_back(std::move(lower));
    out.write("bounds.csv", csv_of([&](std::ostream& os) { write_bounds_csv(pair, os); }));

    const auto cls = classify(pair, man.horizon);
    report["classification"] = ojson::parse(classification_to_json(cls));
    out.write("plot.svg", csv_of([&](std::ostream& os) { write_svg(plot, os); }));
  } catch (const Error& e) {
    if (is_input_error(e.kind())) throw;
    report["error"] = error_json(e);
    man.exit_code = 2;
    man.error = e.what();
  }
  out.write("report.json", report.dump(2) + "\n");
  out.finish();
  return man;
}

RunManifest run_region(std::string_view name, const RegionOptions& options, const std::filesystem::path& outdir) {
  const Preset& preset = find_preset(name);
  RegionOptions local = options;
  if (local.scan.step.dt <= 0.0) local.scan.step.dt = preset.dt;
  return run_region_system(preset_system(preset, 0.1), preset.name, local, outdir);
}

RunManifest run_region_system(const VectorDelaySystem& sys, const std::string& source, const RegionOptions& options,
                              const std::filesystem::path& outdir) {
  RunManifest man;
  man.command = "region";
  man.source = source;
  man.horizon = options.scan.horizon;
  man.dt = options.scan.step.dt > 0.0 ? options.scan.step.dt : default_step(sys.delays.to_delay_set());
  OutputDir out(outdir, man);
  ojson report;
  report["source"] = source;
  report["command"] = "region";
  report["plane"] = {options.scan.plane.first, options.scan.plane.second};
  report["theta_step"] = options.scan.theta_step;
  report["threshold"] = options.scan.threshold;
  report["horizon"] = options.scan.horizon;
  report["dt"] = man.dt;
  report["tolerance"] = options.scan.search.tol;
  report["display_scale"] = options.display_scale;
  try {
    RegionScanConfig scan = options.scan;
    scan.step.dt = man.dt;
    const auto region = estimate_region_projection(sys, scan);
    report["rays"] = region.rays.size();
    report["scalar_radius"] = region.scalar_radius;
    report["scalar_all_good"] = region.scalar_all_good;
    report["containment"] = region.containment_holds;
    report["outer_all_good_rays"] = std::count_if(region.rays.begin(), region.rays.end(),
                                                  [](const RayEstimate& r) { return r.outer_all_good; });
    out.write("region.csv", csv_of([&](std::ostream& os) { write_region_csv(region, os); }));

    SvgPlot plot;
    plot.title = source + " stability region, plane (" + std::to_string(scan.plane.first + 1) + ", " +
                 std::to_string(scan.plane.second + 1) + ")";
    plot.x_label = "x" + std::to_string(scan.plane.first + 1);
    plot.y_label = "x" + std::to_string(scan.plane.second + 1);
    plot.equal_aspect = true;
    SvgSeries outer{"vector system", {}, {}, LineStyle::Solid, "#1f4e79"};
    SvgSeries inner{options.display_scale == 1.0 ? "scalar bound" : "scalar bound x" + fmt17(options.display_scale),
                    {}, {}, LineStyle::Dashed, "#b03a2e"};
    auto add = [](SvgSeries& s, double r, double theta, bool ok) {
      s.x.push_back(ok ? r * std::cos(theta) : std::nan(""));
      s.y.push_back(ok ? r * std::sin(theta) : std::nan(""));
    };
    for (const auto& ray : region.rays) {
      add(outer, ray.outer_r, ray.theta, !ray.outer_all_good);
      add(inner, options.display_scale * ray.inner_r, ray.theta, !ray.inner_all_good);
    }
    if (!region.rays.empty()) {
      add(outer, region.rays.front().outer_r, region.rays.front().theta, !region.rays.front().outer_all_good);
      add(inner, options.display_scale * region.rays.front().inner_r, region.rays.front().theta,
          !region.rays.front().inner_all_good);
    }
    plot.series.push_back(std::move(outer));
    plot.series.push_back(std::move(inner));
    out.write("region.svg", csv_of([&](std::ostream& os) { write_svg(plot, os); }));
  } catch (const Error& e) {
    if (is_input_error(e.kind())) throw;
    report["error"] = error_json(e);
    man.exit_code = 2;
    man.error = e.what();
  }
  out.write("report.json", report.dump(2) + "\n");
  out.finish();
  return man;
}

RunManifest run_fts(std::string_view name, const FtsSpec& spec, const RunOptions& options,
                    const std::filesystem::path& outdir) {
  spec.validate();
  const Preset& preset = find_preset(name);
  const auto sys = preset_system(preset, options.x01.value_or(0.1));
  RunManifest man;
  man.command = "fts";
  man.source = preset.name;
  man.x01 = x01_of(sys);
  man.horizon = options.horizon.value_or(spec.T);
  man.dt = resolve_dt(sys, options, preset.dt);
  if (man.horizon < spec.T) throw Error(ErrorKind::InvalidParam, "horizon must cover T");
  OutputDir out(outdir, man);
  const double t_end = sys.t0 + man.horizon;
  StepConfig step;
  step.dt = man.dt;
  step.blowup_threshold = options.threshold;

  ojson report;
  report["source"] = preset.name;
  report["command"] = "fts";
  report["x01"] = man.x01;
  report["eta1"] = spec.eta1;
  report["eta2"] = spec.eta2;
  report["T"] = spec.T;
  if (spec.eta3) report["eta3"] = *spec.eta3;
  try {
    const Pipeline p = prepare(sys, t_end, step);
    const BoundPair pair = solve_bounds(p.upper, p.lower, t_end, step);
    const Simulation sim = simulate(sys, t_end, step);
    const double phi_norm = sys.history.to_function().sup_norm(sys.t0, sys.delays.h_hi);
    report["history_norm"] = phi_norm;
    report["history_below_eta1"] = phi_norm < spec.eta1;

    std::vector<double> up_t, up_v;
    for (std::size_t k = 0; k < pair.Z.node_count(); ++k) {
      up_t.push_back(pair.Z.node_time(k));
      up_v.push_back(pair.scale_up * pair.Z.node(k)[0]);
    }
    // An escaping series has left every finite level before the horizon.
    auto fts = [&](const std::vector<double>& t, const std::vector<double>& v, bool escaped) {
      return !escaped && check_fts(t, v, spec, sys.t0);
    };
    const bool upper_fts = fts(up_t, up_v, pair.Z.blowup().has_value());
    const bool vector_fts = fts(sim.times, sim.norms, sim.trajectory.blowup().has_value());
    report["upper_fts"] = upper_fts;
    report["vector_fts"] = vector_fts;
    report["transfer_consistent"] = !upper_fts || vector_fts;
    if (spec.eta3) {
      auto ftcs_json = [&](const std::vector<double>& t, const std::vector<double>& v, bool escaped) {
        if (escaped) return ojson{{"holds", false}, {"t1", nullptr}};
        const auto r = check_ftcs(t, v, spec, sys.t0);
        return ojson{{"holds", r.holds}, {"t1", r.t1 ? ojson(*r.t1) : ojson(nullptr)}};
      };
      report["upper_ftcs"] = ftcs_json(up_t, up_v, pair.Z.blowup().has_value());
      report["vector_ftcs"] = ftcs_json(sim.times, sim.norms, sim.trajectory.blowup().has_value());
    }
    out.write("bounds.csv", csv_of([&](std::ostream& os) { write_bounds_csv(pair, os); }));
    out.write("trajectory.csv", csv_of([&](std::ostream& os) { write_trajectory_csv(sim.trajectory, os); }));
  } catch (const Error& e) {
    if (is_input_error(e.kind())) throw;
    report["error"] = error_json(e);
    man.exit_code = 2;
    man.error = e.what();
  }
  out.write("report.json", report.dump(2) + "\n");
  out.finish();
  return man;
}

RunManifest run_config(const std::filesystem::path& path, std::string_view command, const RunOptions& options,
                       const RegionOptions& region, const std::filesystem::path& outdir) {
  const auto sys = load_system_config(path);
  const std::string source = path.filename().string();
  if (command == "simulate" || command == "bounds") {
    RunOptions local = options;
    local.bounds_only = command == "bounds";
    return run_system(sys, source, local, outdir);
  }
  if (command == "region") return run_region_system(sys, source, region, outdir);
  throw Error(ErrorKind::InvalidParam, "unknown command '" + std::string(command) + "'");
}

}  // namespace bilat

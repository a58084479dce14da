// liewave command-line driver: simulate, lifespan, verify.
//
// Exit codes: 0 ok, 1 check failure, 2 usage/config error, 3 numerical
// abort, 4 too few finite lifespans.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "liewave/blowup.hpp"
#include "liewave/io.hpp"
#include "liewave/run_config.hpp"
#include "liewave/semilinear.hpp"
#include "liewave/verification.hpp"

namespace fs = std::filesystem;
using namespace liewave;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3, kInsufficient = 4 };

struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_config_options(CLI::App& cmd, ConfigOptions& opts) {
  cmd.add_option("--config", opts.config_path, "key=value configuration file");
  for (const auto& key : RunConfig::keys())
    cmd.add_option("--" + key, opts.overrides[key], "override '" + key + "'");
}

RunConfig resolve_config(const ConfigOptions& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) cfg = load_run_config(opts.config_path);
  for (const auto& [key, value] : opts.overrides)
    if (!value.empty()) cfg.set(key, value);
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

RunManifest manifest_for(const RunConfig& cfg, const std::string& outcome, double final_time,
                         double epsilon, const std::string& hash) {
  RunManifest m;
  m.group = cfg.group_spec().name();
  m.bandlimit = cfg.bandlimit;
  m.alpha = cfg.alpha;
  m.b = cfg.b;
  m.m2 = cfg.m2;
  m.p = cfg.p;
  m.dt = cfg.dt;
  m.scheme = to_string(cfg.scheme_config().scheme);
  m.seed = cfg.seed;
  m.outcome = outcome;
  m.final_time = final_time;
  m.epsilon = epsilon;
  m.manifest_hash = hash;
  return m;
}

int cmd_simulate(const RunConfig& cfg) {
  const SpectralBasis basis(cfg.group_spec());
  const GridField u0 = build_data(cfg.u0, basis, cfg.epsilon);
  const GridField u1 = build_data(cfg.u1, basis, cfg.epsilon);
  const SimulationResult res =
      simulate(basis, cfg.wave_params(), u0, u1, cfg.t_end, cfg.scheme_config());

  const std::string hash = cfg.hash();
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "trace.csv");
    write_trace_csv(out, res.trace, hash);
  }
  {
    auto out = open_output(dir / "manifest.json");
    write_manifest_json(out, manifest_for(cfg, to_string(res.outcome), res.final_time,
                                          cfg.epsilon, hash));
  }
  const size_t last = res.trace.size() - 1;
  std::printf("simulate: outcome=%s final_time=%s l2=%s x_norm=%s hash=%s\n",
              to_string(res.outcome).c_str(), format_double(res.final_time).c_str(),
              format_double(res.trace.l2[last]).c_str(),
              format_double(res.trace.x_norm_running[last]).c_str(), hash.c_str());
  return res.outcome == Outcome::Blowup ? kNumerical : kOk;
}

int cmd_lifespan(const RunConfig& cfg, const std::vector<double>& epsilons,
                 const std::string& method_name) {
  if (epsilons.size() < 4) {
    std::fprintf(stderr, "lifespan: at least 4 epsilons are required\n");
    return kUsage;
  }
  LifespanMethod method;
  try {
    method = parse_lifespan_method(method_name);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "lifespan: %s\n", e.what());
    return kUsage;
  }
  const SpectralBasis basis(cfg.group_spec());
  ScanSetup setup;
  setup.basis = &basis;
  setup.params = cfg.wave_params();
  setup.u0 = build_data(cfg.u0, basis, 1.0);
  setup.u1 = build_data(cfg.u1, basis, 1.0);
  setup.cfg = cfg.scheme_config();
  setup.threshold = cfg.threshold;
  if (method == LifespanMethod::FullPDE) setup.t_max = cfg.t_end;
  const ScanResult scan = lifespan_scan(cfg.p, epsilons, method, setup);

  std::string canon = cfg.canonical() + "method=" + to_string(method) + "\nepsilons=";
  for (double e : epsilons) canon += format_double(e) + ",";
  const std::string hash = fnv1a_hex(canon);
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "scan.csv");
    write_scan_csv(out, scan, hash);
  }
  {
    auto out = open_output(dir / "fit.json");
    write_fit_json(out, scan, cfg.p, hash);
  }
  if (method == LifespanMethod::FullPDE) {
    for (size_t i = 0; i < scan.records.size(); ++i) {
      const auto& r = scan.records[i];
      auto out = open_output(dir / ("manifest_eps" + std::to_string(i) + ".json"));
      write_manifest_json(out, manifest_for(cfg, r.finite() ? "blowup" : "completed",
                                            r.finite() ? *r.lifespan : cfg.t_end, r.epsilon,
                                            hash));
    }
  }
  for (const auto& w : scan.warnings) std::fprintf(stderr, "lifespan: warning: %s\n", w.c_str());
  std::printf("lifespan: method=%s finite=%d slope=%s ci=%s expected=%s hash=%s\n",
              to_string(method).c_str(), scan.finite_count, format_double(scan.slope).c_str(),
              format_double(scan.slope_ci).c_str(), format_double(scan.expected_slope).c_str(),
              hash.c_str());
  return scan.finite_count < 4 ? kInsufficient : kOk;
}

int cmd_verify(const std::string& suite, const std::string& calibration_path,
               bool calibrate, const std::string& output_dir) {
  static const std::vector<std::string> known{"plancherel", "modes", "decay", "gn", "energy", "all"};
  if (std::find(known.begin(), known.end(), suite) == known.end()) {
    std::fprintf(stderr, "verify: unknown suite '%s'\n", suite.c_str());
    return kUsage;
  }
  if (calibrate) {
    calibrate_standard().save(calibration_path);
    std::printf("verify: calibration written to %s\n", calibration_path.c_str());
  }
  const Calibration cal = Calibration::load(calibration_path);
  const auto reports = run_suite(suite, cal);
  const std::string hash = fnv1a_hex("suite=" + suite + "\n");
  const fs::path dir(output_dir);
  fs::create_directories(dir);
  {
    auto out = open_output(dir / "report.json");
    write_report_json(out, reports, hash);
  }
  int failed = 0;
  for (const auto& r : reports) {
    std::printf("%s %s worst=%s tol=%s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                format_double(r.worst_ratio).c_str(), format_double(r.tolerance).c_str());
    failed += r.passed ? 0 : 1;
  }
  std::printf("verify: %zu checks, %d failed\n", reports.size(), failed);
  return failed ? kCheckFailed : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral solver for damped fractional wave equations on compact groups"};
  app.require_subcommand(1);

  ConfigOptions sim_opts, life_opts;
  auto* sim = app.add_subcommand("simulate", "run one simulation");
  add_config_options(*sim, sim_opts);

  auto* life = app.add_subcommand("lifespan", "scan blow-up times over epsilon");
  add_config_options(*life, life_opts);
  std::vector<double> epsilons;
  std::string method = "comparison";
  life->add_option("--epsilons", epsilons, "comma-separated amplitudes")
      ->required()
      ->delimiter(',');
  life->add_option("--method", method, "comparison | pde");

  auto* ver = app.add_subcommand("verify", "run verification suites");
  std::string suite = "all";
  std::string calibration_path = default_calibration_path();
  std::string verify_out = "out";
  bool calibrate = false;
  ver->add_option("--suite", suite, "plancherel | modes | decay | gn | energy | all");
  ver->add_option("--calibration", calibration_path, "calibration JSON");
  ver->add_option("--output_dir", verify_out, "directory for report.json");
  ver->add_flag("--calibrate", calibrate, "recompute calibrated constants first");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim) return cmd_simulate(resolve_config(sim_opts));
    if (*life) return cmd_lifespan(resolve_config(life_opts), epsilons, method);
    return cmd_verify(suite, calibration_path, calibrate, verify_out);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kUsage;
  } catch (const BlowupOverflow& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kNumerical;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numerical abort: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kNumerical;
  }
}

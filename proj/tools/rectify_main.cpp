// rectify: command-line front end.
//
//   rectify run --config <path> [--out <dir>]
//   rectify constants --group <tag> [--samples N] [--seed S]
//   rectify bench-holo [--config <path>] [--out <dir>]
//   rectify validate --config <path>
//
// The default output directory is $RECTIFY_OUT_DIR, or ./out when unset.

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rectify/harness.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("RECTIFY_OUT_DIR");
  return env && *env ? env : "out";
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rectify::Error(rectify::ErrorKind::ConfigError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw rectify::Error(rectify::ErrorKind::ConfigError, "cannot parse " + path + ": " + e.what());
  }
}

int cmd_run(const std::string& config, const std::string& out) {
  const rectify::ExperimentConfig cfg = rectify::load_config(config);
  const rectify::RunReport rep = rectify::run_and_persist(cfg, out);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << (rep.pass ? "PASS" : "FAIL") << " reason=" << rep.reason
            << " iterations=" << rep.iterations << " initial_defect=" << rep.initial_defect
            << " final_defect=" << rep.final_defect << " report=" << (std::filesystem::path(out) / cfg.report_file).string()
            << '\n';
  if (!rep.message.empty()) std::cerr << rep.message << '\n';
  return rep.exit_code;
}

int cmd_constants(const std::string& group, const std::string& raw_norm, int samples,
                  std::uint64_t seed, double safety, double w_radius, double k_radius) {
  const rectify::AmbientSets sets{w_radius, k_radius};
  sets.validate();
  const rectify::NormedAlgebra alg = rectify::normalize_algebra_norm(
      rectify::parse_group_id(group), rectify::parse_raw_norm(raw_norm), std::max(1.0, k_radius));
  const rectify::BchConstants k = rectify::estimate_bch_constants(alg, sets, samples, safety, seed);
  const rectify::BchValidation v = rectify::validate_bch_constants(k, alg, samples, seed + 1);
  const rectify::AdmissibleRadius c = rectify::admissible_radius(k);
  nlohmann::json out{{"group", group},
                     {"scale", alg.scale()},
                     {"injectivity_margin", alg.injectivity_margin()},
                     {"constants", rectify::to_json(k)},
                     {"admissible_c", c.value},
                     {"validation",
                      {{"seed", seed + 1},
                       {"checked", v.checked},
                       {"violations", {v.violations_c, v.violations_c_prime, v.violations_c_dprime}},
                       {"worst_ratio", {v.worst_ratio_c, v.worst_ratio_c_prime, v.worst_ratio_c_dprime}},
                       {"passed", v.passed()}}}};
  std::cout << out.dump(2) << '\n';
  return v.passed() ? 0 : 1;
}

int cmd_bench_holo(const std::string& config, const std::string& out) {
  const rectify::HoloConfig cfg =
      rectify::parse_holo_config(config.empty() ? nlohmann::json::object() : read_json(config));
  const rectify::HoloReport rep = rectify::run_holo_bench(cfg);
  const std::string text = rectify::to_json(rep).dump(2) + "\n";
  rectify::write_atomic(std::filesystem::path(out) / "holo_report.json", text);
  std::cout << text;
  return rep.pass ? 0 : 1;
}

int cmd_validate(const std::string& config) {
  const rectify::ExperimentConfig cfg = rectify::load_config(config);
  bool ok = false;
  const nlohmann::json report = rectify::validate_config(cfg, &ok);
  std::cout << report.dump(2) << '\n';
  return ok ? 0 : rectify::kExitPrecondition;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Haar-averaging rectification of almost morphisms"};
  app.require_subcommand(1);

  std::string config;
  std::string out = default_out_dir();
  auto* run = app.add_subcommand("run", "Run an experiment config and persist trace and report");
  run->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "Output directory (default $RECTIFY_OUT_DIR or ./out)");

  std::string group;
  std::string raw_norm = "frobenius";
  int samples = 2000;
  std::uint64_t seed = 1;
  double safety = 1.25;
  double w_radius = 1.5;
  double k_radius = 2.5;
  auto* constants = app.add_subcommand("constants", "Estimate and re-validate the BCH constants");
  constants->add_option("--group", group, "u1 | so2 | so3 | su2")->required();
  constants->add_option("--raw-norm", raw_norm, "euclidean | frobenius | max_angle")->capture_default_str();
  constants->add_option("--samples", samples, "Sample count (>= 1000)")->capture_default_str();
  constants->add_option("--seed", seed, "Estimation seed; validation uses seed + 1")->capture_default_str();
  constants->add_option("--safety", safety, "Safety factor (>= 1)")->capture_default_str();
  constants->add_option("--W", w_radius, "Radius of W")->capture_default_str();
  constants->add_option("--K", k_radius, "Radius of the ambient compact set")->capture_default_str();

  std::string holo_config;
  auto* holo = app.add_subcommand("bench-holo", "Run the holomorphic averaging benchmark");
  holo->add_option("--config", holo_config, "Bench config (JSON); defaults when omitted")->check(CLI::ExistingFile);
  holo->add_option("--out", out, "Output directory (default $RECTIFY_OUT_DIR or ./out)");

  auto* validate = app.add_subcommand("validate", "Check groupoid, core and density axioms only");
  validate->add_option("--config", config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out);
    if (*constants) return cmd_constants(group, raw_norm, samples, seed, safety, w_radius, k_radius);
    if (*holo) return cmd_bench_holo(holo_config, out);
    if (*validate) return cmd_validate(config);
  } catch (const rectify::Error& e) {
    std::cerr << "error: " << rectify::to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == rectify::ErrorKind::LogDomainError ||
                   e.kind() == rectify::ErrorKind::NormalizationFailure
               ? rectify::kExitNumericDomain
               : rectify::kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

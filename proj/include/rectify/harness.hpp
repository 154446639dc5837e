#pragma once

// Experiment plumbing: JSON configs, exact-morphism and perturbation
// generators, end-to-end runs with persisted traces and reports.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rectify/group_kernel.hpp"
#include "rectify/groupoid.hpp"
#include "rectify/holomorphic.hpp"
#include "rectify/rectifier.hpp"

namespace rectify {

/// Exit codes of `rectify run`.
enum ExitCode : int {
  kExitPass = 0,
  kExitFailure = 1,
  kExitPrecondition = 2,
  kExitNonContraction = 3,
  kExitNumericDomain = 4,
};

struct GroupoidSpec {
  std::string kind = "pair";      // "pair" | "action"
  int size = 3;                   // pair groupoid objects
  int group_order = 3;            // action: Z_n
  int space_size = 3;             // action: {0..m-1}
  std::string action = "translate";  // "translate": (g + x) mod m, "trivial": x
};

struct MorphismSpec {
  /// "coboundary": g_{t(p)} rho(p) g_{s(p)}^{-1} with random g_x of size
  /// `spread` (rho from `homomorphism`, trivial on pair groupoids);
  /// "homomorphism": rho alone.
  std::string kind = "coboundary";
  /// "trivial" or "character": Z_n -> maximal torus, g -> exp(2 pi i c g / n).
  std::string homomorphism = "trivial";
  int character = 1;
  double spread = 0.7;
  std::uint64_t seed = 1;
};

struct PerturbationSpec {
  double epsilon = 0.0;
  std::uint64_t seed = 1;
  std::string side = "right";  // "right": phi exp(w), "left": exp(w) phi
  bool perturb_units = true;
};

struct ConstantsSpec {
  int sample_count = 2000;
  double safety_factor = 1.25;
  std::uint64_t seed = 1;
  double w_radius = 1.5;
  double k_radius = 2.5;
};

struct IterationSpec {
  double tol = 1e-12;
  int max_iter = 50;
};

struct ExperimentConfig {
  GroupId group = GroupId::SO3;
  RawNorm raw_norm = RawNorm::Frobenius;
  GroupoidSpec groupoid;
  std::optional<std::vector<ArrowId>> core_arrows;  // nullopt: full core
  std::optional<std::vector<double>> weights;       // nullopt: uniform
  MorphismSpec morphism;
  PerturbationSpec perturbation;
  ConstantsSpec constants;
  IterationSpec iteration;
  std::string trace_file = "trace.csv";
  std::string report_file = "report.json";
  nlohmann::json raw;
  std::string digest;

  AmbientSets sets() const { return AmbientSets{constants.w_radius, constants.k_radius}; }
};

/// Throws ConfigError on unknown keys, wrong types or out-of-range values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
/// FNV-1a (64 bit) of the key-sorted compact dump, as 16 hex digits.
std::string config_digest(const nlohmann::json& j);

FiniteGroupoid build_groupoid(const GroupoidSpec& spec);

/// Everything a run needs, built from a config. The groupoid lives behind a
/// unique_ptr so the core and density keep valid references when moved.
struct Instance {
  std::unique_ptr<FiniteGroupoid> groupoid;
  std::unique_ptr<Core> core;
  std::unique_ptr<HaarDensity> density;
  ValidationReport groupoid_report;
  ValidationReport density_report;
};
Instance build_instance(const ExperimentConfig& cfg);

struct GeneratedMorphism {
  std::vector<GroupElement> values;
  std::vector<std::string> warnings;
};

/// Exact morphism for the groupoid. Pair groupoids get coboundaries
/// g_j g_i^{-1}; action groupoids of Z_n get rho(g) or the twisted coboundary
/// h_{gx} rho(g) h_x^{-1}. A character request on a pair groupoid falls back
/// to the trivial homomorphism with a warning.
GeneratedMorphism generate_exact_morphism(const FiniteGroupoid& g, const GroupoidSpec& spec,
                                          const NormedAlgebra& alg, const MorphismSpec& morphism);

/// phi_0(p) = phi(p) exp(w_p) (or exp(w_p) phi(p)), w_p uniform in the ball of
/// radius epsilon. Throws RangeEscape when the result leaves W.
AlmostMorphism perturb_morphism(const AlmostMorphism& phi, const FiniteGroupoid& g,
                                const NormedAlgebra& alg, const PerturbationSpec& spec,
                                const AmbientSets& sets);

struct RunReport {
  std::string digest;
  bool pass = false;
  int exit_code = kExitFailure;
  std::string reason = "ok";  // "ok" or an ErrorKind name / failure tag
  std::string message;
  std::vector<std::string> warnings;
  std::optional<BchConstants> constants;
  std::optional<AdmissibleRadius> admissible;
  double initial_defect = 0.0;
  double final_defect = 0.0;
  double range_certificate = 0.0;
  int iterations = 0;
  std::string terminated;
  int q_certified_steps = 0;
  int steps = 0;
  bool all_q_certified = false;
  bool proof_bound_all = false;  // |A| <= (d/d') Delta on every step
  double max_step_move = 0.0;
  double total_displacement = 0.0;
  double cauchy_bound = 0.0;
  std::optional<MorphismResidual> residual;
  double residual_contract = 0.0;  // (d'/d) tol
  std::optional<IterationTrace> trace;
};

/// Runs the full pipeline and captures every library error into the report.
RunReport run_experiment(const ExperimentConfig& cfg);

nlohmann::json to_json(const BchConstants& k);
nlohmann::json to_json(const RunReport& r);

std::string trace_csv(const IterationTrace& trace);
/// Writes via a temporary file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);
/// Runs and persists the trace (when present) and the report under `out_dir`.
RunReport run_and_persist(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

/// Dry-run axiom validation of groupoid, core and density.
nlohmann::json validate_config(const ExperimentConfig& cfg, bool* ok);

struct HoloConfig {
  ComplexModelParams model;
  std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  int half_width = 2;
  C2 center{Complex(0.3, 0.1), Complex(-0.2, 0.05)};
  int trig_degree = 6;
  std::uint64_t seed = 7;
  nlohmann::json raw;
};

HoloConfig parse_holo_config(const nlohmann::json& j);

struct HoloReport {
  ModelCheck model_check;
  double invariant_error = 0.0;
  double weight_one_max = 0.0;
  std::vector<double> cr_residuals;
  std::vector<double> cr_orders;
  double cr_min_order = 0.0;
  double anti_holomorphic_residual = 0.0;
  double projection_error = 0.0;
  bool orbit_invariance_exact = false;
  double real_restriction = 0.0;
  bool pass = false;
};

/// The holomorphic benchmark: invariant and weight-one inputs, CR order over
/// the step list, projection and invariance of the average, and
/// real-restriction consistency on a random real trigonometric polynomial.
HoloReport run_holo_bench(const HoloConfig& cfg);
nlohmann::json to_json(const HoloReport& r);

}  // namespace rectify

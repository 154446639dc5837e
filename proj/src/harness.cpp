#include "rectify/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "sampling.hpp"

namespace rectify {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) config_error(where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(where + "." + key + " has the wrong type");
  }
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::LogDomainError:
    case ErrorKind::DefectOverflow:
    case ErrorKind::NormalizationFailure:
      return kExitNumericDomain;
    case ErrorKind::NonContraction:
      return kExitNonContraction;
    default:
      return kExitPrecondition;
  }
}

// cos and sin of 2 pi k / n, exact at quarter turns.
std::pair<double, double> turn(long long k, long long n) {
  k %= n;
  if (k < 0) k += n;
  if ((4 * k) % n == 0) {
    switch ((4 * k) / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
  return {std::cos(t), std::sin(t)};
}

// Z_n -> maximal torus, g -> exp(2 pi i c g / n).
GroupElement character_value(GroupId id, int c, int g, int n) {
  const auto [cs, sn] = turn(static_cast<long long>(c) * g, n);
  Matrix m;
  switch (id) {
    case GroupId::U1:
      m = Matrix::Constant(1, 1, Complex(cs, sn));
      break;
    case GroupId::SO2:
      m = Matrix::Zero(2, 2);
      m << cs, -sn, sn, cs;
      break;
    case GroupId::SO3:
      m = Matrix::Identity(3, 3);
      m(0, 0) = cs;
      m(0, 1) = -sn;
      m(1, 0) = sn;
      m(1, 1) = cs;
      break;
    case GroupId::SU2:
      m = Matrix::Zero(2, 2);
      m(0, 0) = Complex(cs, sn);
      m(1, 1) = Complex(cs, -sn);
      break;
    case GroupId::Finite:
      throw Error(ErrorKind::InvalidArgument, "no character into a finite target");
  }
  return GroupElement(std::move(m), id);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string config_digest(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  check_keys(j, "config",
             {"group", "groupoid", "core", "density", "morphism", "perturbation", "constants",
              "iteration", "output"});
  cfg.raw = j;
  cfg.digest = config_digest(j);

  if (!j.contains("group")) config_error("config.group is required");
  const json& g = j.at("group");
  check_keys(g, "group", {"tag", "raw_norm"});
  std::string tag;
  read(g, "tag", "group", tag);
  cfg.group = parse_group_id(tag);
  if (cfg.group == GroupId::Finite) config_error("the target group must be a Lie group");
  std::string raw_norm = "frobenius";
  read(g, "raw_norm", "group", raw_norm);
  cfg.raw_norm = parse_raw_norm(raw_norm);

  if (!j.contains("groupoid")) config_error("config.groupoid is required");
  const json& gd = j.at("groupoid");
  check_keys(gd, "groupoid", {"kind", "size", "group_order", "space_size", "action"});
  read(gd, "kind", "groupoid", cfg.groupoid.kind);
  read(gd, "size", "groupoid", cfg.groupoid.size);
  read(gd, "group_order", "groupoid", cfg.groupoid.group_order);
  read(gd, "space_size", "groupoid", cfg.groupoid.space_size);
  read(gd, "action", "groupoid", cfg.groupoid.action);
  if (cfg.groupoid.kind != "pair" && cfg.groupoid.kind != "action") {
    config_error("groupoid.kind must be 'pair' or 'action'");
  }
  if (cfg.groupoid.action != "translate" && cfg.groupoid.action != "trivial") {
    config_error("groupoid.action must be 'translate' or 'trivial'");
  }
  if (cfg.groupoid.size < 1 || cfg.groupoid.group_order < 1 || cfg.groupoid.space_size < 1) {
    config_error("groupoid sizes must be positive");
  }

  if (j.contains("core")) {
    const json& c = j.at("core");
    if (c.is_string()) {
      if (c.get<std::string>() != "full") config_error("core must be \"full\" or {\"arrows\": [...]}");
    } else {
      check_keys(c, "core", {"arrows"});
      std::vector<ArrowId> arrows;
      read(c, "arrows", "core", arrows);
      cfg.core_arrows = std::move(arrows);
    }
  }
  if (j.contains("density")) {
    const json& d = j.at("density");
    if (d.is_string()) {
      if (d.get<std::string>() != "uniform") {
        config_error("density must be \"uniform\" or {\"weights\": [...]}");
      }
    } else {
      check_keys(d, "density", {"weights"});
      std::vector<double> w;
      read(d, "weights", "density", w);
      cfg.weights = std::move(w);
    }
  }
  if (j.contains("morphism")) {
    const json& m = j.at("morphism");
    check_keys(m, "morphism", {"kind", "homomorphism", "character", "spread", "seed"});
    read(m, "kind", "morphism", cfg.morphism.kind);
    read(m, "homomorphism", "morphism", cfg.morphism.homomorphism);
    read(m, "character", "morphism", cfg.morphism.character);
    read(m, "spread", "morphism", cfg.morphism.spread);
    read(m, "seed", "morphism", cfg.morphism.seed);
    if (cfg.morphism.kind != "coboundary" && cfg.morphism.kind != "homomorphism") {
      config_error("morphism.kind must be 'coboundary' or 'homomorphism'");
    }
    if (cfg.morphism.homomorphism != "trivial" && cfg.morphism.homomorphism != "character") {
      config_error("morphism.homomorphism must be 'trivial' or 'character'");
    }
    if (!(cfg.morphism.spread >= 0.0)) config_error("morphism.spread must be >= 0");
  }
  if (j.contains("perturbation")) {
    const json& p = j.at("perturbation");
    check_keys(p, "perturbation", {"epsilon", "seed", "side", "perturb_units"});
    read(p, "epsilon", "perturbation", cfg.perturbation.epsilon);
    read(p, "seed", "perturbation", cfg.perturbation.seed);
    read(p, "side", "perturbation", cfg.perturbation.side);
    read(p, "perturb_units", "perturbation", cfg.perturbation.perturb_units);
    if (!(cfg.perturbation.epsilon >= 0.0)) config_error("perturbation.epsilon must be >= 0");
    if (cfg.perturbation.side != "right" && cfg.perturbation.side != "left") {
      config_error("perturbation.side must be 'right' or 'left'");
    }
  }
  if (j.contains("constants")) {
    const json& k = j.at("constants");
    check_keys(k, "constants", {"sample_count", "safety_factor", "seed", "W_radius", "K_radius"});
    read(k, "sample_count", "constants", cfg.constants.sample_count);
    read(k, "safety_factor", "constants", cfg.constants.safety_factor);
    read(k, "seed", "constants", cfg.constants.seed);
    read(k, "W_radius", "constants", cfg.constants.w_radius);
    read(k, "K_radius", "constants", cfg.constants.k_radius);
    if (cfg.constants.sample_count < 1000) config_error("constants.sample_count must be >= 1000");
    if (!(cfg.constants.safety_factor >= 1.0)) config_error("constants.safety_factor must be >= 1");
  }
  try {
    cfg.sets().validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (j.contains("iteration")) {
    const json& it = j.at("iteration");
    check_keys(it, "iteration", {"tol", "max_iter"});
    read(it, "tol", "iteration", cfg.iteration.tol);
    read(it, "max_iter", "iteration", cfg.iteration.max_iter);
    if (!(cfg.iteration.tol > 0.0) || cfg.iteration.max_iter < 0) {
      config_error("iteration.tol must be > 0 and max_iter >= 0");
    }
  }
  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "output", {"trace", "report"});
    read(o, "trace", "output", cfg.trace_file);
    read(o, "report", "output", cfg.report_file);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    config_error("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

FiniteGroupoid build_groupoid(const GroupoidSpec& spec) {
  if (spec.kind == "pair") return build_pair_groupoid(spec.size);
  const int m = spec.space_size;
  if (spec.action == "trivial") {
    return build_action_groupoid(FiniteGroup::cyclic(spec.group_order), m,
                                 [](int, int x) { return x; });
  }
  return build_action_groupoid(FiniteGroup::cyclic(spec.group_order), m,
                               [m](int g, int x) { return (g + x) % m; });
}

Instance build_instance(const ExperimentConfig& cfg) {
  Instance inst;
  inst.groupoid = std::make_unique<FiniteGroupoid>(build_groupoid(cfg.groupoid));
  inst.groupoid_report = validate_groupoid(*inst.groupoid);
  if (!inst.groupoid_report.passed) {
    const Violation& v = inst.groupoid_report.violations.front();
    throw Error(ErrorKind::ConfigError, "groupoid violates the " + v.axiom + " axiom", v.witness,
                v.axiom);
  }
  if (cfg.core_arrows) {
    inst.core = std::make_unique<Core>(build_core(*inst.groupoid, *cfg.core_arrows));
  } else {
    inst.core = std::make_unique<Core>(full_core(*inst.groupoid));
  }
  if (cfg.weights) {
    inst.density_report = validate_density(*inst.core, *cfg.weights);
    inst.density = std::make_unique<HaarDensity>(attach_haar_density(*inst.core, *cfg.weights));
  } else {
    inst.density = std::make_unique<HaarDensity>(uniform_haar_density(*inst.core));
  }
  return inst;
}

GeneratedMorphism generate_exact_morphism(const FiniteGroupoid& g, const GroupoidSpec& spec,
                                          const NormedAlgebra& alg, const MorphismSpec& morphism) {
  GeneratedMorphism out;
  std::mt19937_64 rng(morphism.seed);
  std::vector<GroupElement> h;
  const bool twist = morphism.kind == "coboundary";
  if (twist) {
    for (ObjectId x = 0; x < g.object_count(); ++x) {
      h.push_back(exp_map(detail::uniform_ball(rng, alg, morphism.spread), alg));
    }
  }
  bool character = morphism.homomorphism == "character";
  if (character && spec.kind != "action") {
    out.warnings.push_back(
        "character homomorphism needs an action groupoid; trivial homomorphism substituted");
    character = false;
  }
  const GroupElement e = GroupElement::identity(alg.id());
  out.values.reserve(g.arrow_count());
  for (ArrowId p = 0; p < g.arrow_count(); ++p) {
    GroupElement rho = e;
    if (character) {
      const int group_elt = p / spec.space_size;
      rho = character_value(alg.id(), morphism.character, group_elt, spec.group_order);
    }
    if (twist) {
      out.values.push_back(h[g.target(p)] * rho * h[g.source(p)].inverse());
    } else {
      out.values.push_back(rho);
    }
  }
  return out;
}

AlmostMorphism perturb_morphism(const AlmostMorphism& phi, const FiniteGroupoid& g,
                                const NormedAlgebra& alg, const PerturbationSpec& spec,
                                const AmbientSets& sets) {
  if (!(spec.epsilon >= 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be >= 0");
  std::vector<GroupElement> values = phi.values();
  if (spec.epsilon > 0.0) {
    std::mt19937_64 rng(spec.seed);
    std::vector<bool> is_unit(values.size(), false);
    for (ArrowId u : g.units()) is_unit[u] = true;
    for (std::size_t p = 0; p < values.size(); ++p) {
      const GroupElement w = exp_map(detail::uniform_ball(rng, alg, spec.epsilon), alg);
      if (is_unit[p] && !spec.perturb_units) continue;
      values[p] = spec.side == "left" ? w * values[p] : values[p] * w;
    }
  }
  AlmostMorphism out(std::move(values), alg);
  if (out.range_certificate() > sets.w_radius) {
    throw Error(ErrorKind::RangeEscape, "perturbed map leaves W (range " +
                                            std::to_string(out.range_certificate()) + ")");
  }
  return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  RunReport rep;
  rep.digest = cfg.digest;
  try {
    const Instance inst = build_instance(cfg);
    const AmbientSets sets = cfg.sets();
    const NormedAlgebra alg =
        normalize_algebra_norm(cfg.group, cfg.raw_norm, std::max(1.0, sets.k_radius));
    const BchConstants k = estimate_bch_constants(alg, sets, cfg.constants.sample_count,
                                                  cfg.constants.safety_factor, cfg.constants.seed);
    rep.constants = k;
    rep.admissible = admissible_radius(k);
    rep.residual_contract = (k.d_prime / k.d) * cfg.iteration.tol;

    GeneratedMorphism gen = generate_exact_morphism(*inst.groupoid, cfg.groupoid, alg, cfg.morphism);
    rep.warnings = gen.warnings;
    const AlmostMorphism exact(std::move(gen.values), alg);
    const AlmostMorphism phi0 = perturb_morphism(exact, *inst.groupoid, alg, cfg.perturbation, sets);
    rep.range_certificate = phi0.range_certificate();
    rep.initial_defect = defect(phi0, *inst.core, alg);

    IterationOptions opts;
    opts.tol = cfg.iteration.tol;
    opts.max_iter = cfg.iteration.max_iter;
    IterationResult res = iterate(phi0, *inst.density, alg, k, sets, opts);
    const IterationTrace& tr = res.trace;
    rep.final_defect = tr.deltas.back();
    rep.iterations = tr.iterations();
    rep.terminated = std::string(to_string(tr.terminated));
    rep.steps = static_cast<int>(tr.q_certified.size()) - 1;
    for (int n = 0; n < rep.steps; ++n) {
      rep.q_certified_steps += tr.q_certified[n] ? 1 : 0;
      rep.max_step_move = std::max(rep.max_step_move, tr.step_moves[n]);
    }
    rep.all_q_certified = tr.all_certified();
    rep.proof_bound_all = true;
    for (bool b : tr.within_proof_bound) rep.proof_bound_all = rep.proof_bound_all && b;
    rep.total_displacement = tr.total_displacement;
    rep.cauchy_bound = tr.cauchy_bound;
    rep.residual = verify_core_morphism(res.limit, *inst.core, alg);

    const bool residual_ok = rep.residual->core <= rep.residual_contract &&
                             (!inst.core->is_full() || rep.residual->full <= rep.residual_contract);
    rep.pass = rep.final_defect <= cfg.iteration.tol && rep.all_q_certified && residual_ok;
    if (rep.pass) {
      rep.exit_code = kExitPass;
      rep.reason = "ok";
    } else if (tr.non_contraction) {
      rep.exit_code = kExitNonContraction;
      rep.reason = "NonContraction";
      rep.message = "a step violated the q(C) certificate";
    } else {
      rep.exit_code = kExitFailure;
      rep.reason = rep.final_defect <= cfg.iteration.tol ? "residual" : rep.terminated;
    }
    rep.trace = std::move(res.trace);
  } catch (const Error& e) {
    rep.pass = false;
    rep.reason = std::string(to_string(e.kind()));
    rep.message = e.what();
    rep.exit_code = exit_code_for(e.kind());
  }
  return rep;
}

json to_json(const BchConstants& k) {
  return json{{"c", k.c},
              {"c_prime", k.c_prime},
              {"c_dprime", k.c_dprime},
              {"d", k.d},
              {"d_prime", k.d_prime},
              {"c_l", k.c_l},
              {"c_d", k.c_d},
              {"sample_count", k.sample_count},
              {"safety_factor", k.safety_factor},
              {"seed", k.seed},
              {"excluded_fraction", k.excluded_fraction},
              {"empirical",
               {{"c", k.empirical.c},
                {"c_prime", k.empirical.c_prime},
                {"c_dprime", k.empirical.c_dprime},
                {"lip_min", k.empirical.lip_min},
                {"lip_max", k.empirical.lip_max},
                {"adjoint", k.empirical.adjoint}}}};
}

json to_json(const RunReport& r) {
  json j{{"config_digest", r.digest},
         {"pass", r.pass},
         {"exit_code", r.exit_code},
         {"reason", r.reason},
         {"message", r.message},
         {"warnings", r.warnings}};
  if (r.constants) j["constants"] = to_json(*r.constants);
  if (r.admissible) {
    j["admissible_c"] = {{"value", r.admissible->value},
                         {"inverse_c_l", r.admissible->inverse_c_l},
                         {"step_guard", r.admissible->step_guard},
                         {"half_root", r.admissible->half_root}};
  }
  if (r.trace) {
    j["range_certificate"] = r.range_certificate;
    j["initial_defect"] = r.initial_defect;
    j["final_defect"] = r.final_defect;
    j["iterations"] = r.iterations;
    j["terminated"] = r.terminated;
    j["q_certification"] = {{"steps", r.steps},
                            {"certified", r.q_certified_steps},
                            {"all_certified", r.all_q_certified}};
    j["proof_bounds"] = {{"correction_within_d_over_d_prime", r.proof_bound_all},
                         {"max_step_move", r.max_step_move},
                         {"step_guard_1_over_c_d", 1.0 / r.constants->c_d}};
    j["cauchy"] = {{"total_displacement", r.total_displacement}, {"bound", r.cauchy_bound}};
  }
  if (r.residual) {
    j["morphism_residual"] = {{"core", r.residual->core},
                              {"non_core", r.residual->non_core},
                              {"full", r.residual->full},
                              {"contract", r.residual_contract}};
  }
  return j;
}

std::string trace_csv(const IterationTrace& trace) {
  std::ostringstream out;
  out << "n,delta,correction_norm,step_move,q_bound,q_certified\n";
  for (std::size_t n = 0; n < trace.deltas.size(); ++n) {
    out << n << ',' << format_double(trace.deltas[n]) << ','
        << format_double(trace.correction_norms[n]) << ',' << format_double(trace.step_moves[n])
        << ',' << format_double(trace.q_bounds[n]) << ',' << (trace.q_certified[n] ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::ConfigError, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunReport run_and_persist(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
  RunReport rep = run_experiment(cfg);
  if (rep.trace) write_atomic(out_dir / cfg.trace_file, trace_csv(*rep.trace));
  write_atomic(out_dir / cfg.report_file, to_json(rep).dump(2) + "\n");
  return rep;
}

json validate_config(const ExperimentConfig& cfg, bool* ok) {
  json out;
  bool passed = true;
  auto violations = [](const ValidationReport& r) {
    json arr = json::array();
    for (const Violation& v : r.violations) arr.push_back({{"axiom", v.axiom}, {"witness", v.witness}});
    return arr;
  };
  std::optional<FiniteGroupoid> g;
  try {
    g.emplace(build_groupoid(cfg.groupoid));
  } catch (const Error& e) {
    out["groupoid"] = {{"passed", false},
                       {"error", to_string(e.kind())},
                       {"tag", e.tag()},
                       {"witness", e.witness()},
                       {"message", e.what()}};
    if (ok) *ok = false;
    return out;
  }
  const ValidationReport gr = validate_groupoid(*g);
  passed = passed && gr.passed;
  out["groupoid"] = {{"passed", gr.passed},
                     {"objects", g->object_count()},
                     {"arrows", g->arrow_count()},
                     {"domain_size", g->domain_size()},
                     {"violations", violations(gr)}};
  std::optional<Core> core;
  try {
    core.emplace(cfg.core_arrows ? build_core(*g, *cfg.core_arrows) : full_core(*g));
    out["core"] = {{"passed", true}, {"arrows", core->arrows().size()}, {"full", core->is_full()}};
  } catch (const Error& e) {
    passed = false;
    out["core"] = {{"passed", false},
                   {"error", to_string(e.kind())},
                   {"axiom", e.tag()},
                   {"witness", e.witness()},
                   {"message", e.what()}};
  }
  if (core) {
    const std::vector<double> w =
        cfg.weights ? *cfg.weights : std::vector<double>(core->arrows().size(), 1.0);
    const ValidationReport dr = validate_density(*core, w);
    passed = passed && dr.passed;
    out["density"] = {{"passed", dr.passed}, {"violations", violations(dr)}};
  }
  out["passed"] = passed;
  if (ok) *ok = passed;
  return out;
}

HoloConfig parse_holo_config(const json& j) {
  HoloConfig cfg;
  check_keys(j, "holo config", {"model", "steps", "half_width", "center", "trig_degree", "seed"});
  cfg.raw = j;
  if (j.contains("model")) {
    const json& m = j.at("model");
    check_keys(m, "model", {"r", "eta_max", "angle_nodes", "radial_levels", "eta_steps"});
    read(m, "r", "model", cfg.model.r);
    read(m, "eta_max", "model", cfg.model.eta_max);
    read(m, "angle_nodes", "model", cfg.model.angle_nodes);
    read(m, "radial_levels", "model", cfg.model.radial_levels);
    read(m, "eta_steps", "model", cfg.model.eta_steps);
  }
  read(j, "steps", "holo config", cfg.steps);
  read(j, "half_width", "holo config", cfg.half_width);
  read(j, "trig_degree", "holo config", cfg.trig_degree);
  read(j, "seed", "holo config", cfg.seed);
  if (j.contains("center")) {
    std::vector<std::vector<double>> c;
    read(j, "center", "holo config", c);
    if (c.size() != 2 || c[0].size() != 2 || c[1].size() != 2) {
      config_error("center must be [[re, im], [re, im]]");
    }
    cfg.center = C2{Complex(c[0][0], c[0][1]), Complex(c[1][0], c[1][1])};
  }
  if (cfg.steps.size() < 2) config_error("steps needs at least two grid spacings");
  if (cfg.trig_degree < 0 || cfg.trig_degree >= cfg.model.angle_nodes) {
    config_error("trig_degree must lie in [0, angle_nodes)");
  }
  return cfg;
}

HoloReport run_holo_bench(const HoloConfig& cfg) {
  HoloReport rep;
  const ComplexModel model(cfg.model);
  rep.model_check = check_complexified_model(model);
  constexpr Complex kI{0.0, 1.0};

  // Probe points: a stride through the grid plus the CR center.
  std::vector<C2> probes{cfg.center};
  const int stride = std::max(1, model.point_count() / 257);
  for (int x = 0; x < model.point_count(); x += stride) probes.push_back(model.coords(x));

  const ComplexFn invariant = [](const C2& z) { return z[0] * z[0] + z[1] * z[1]; };
  const ComplexFn invariant_avg = core_average_function(invariant, model);
  for (const C2& z : probes) {
    rep.invariant_error = std::max(rep.invariant_error, std::abs(invariant_avg(z) - invariant(z)));
  }

  const ComplexFn mode1 = [kI](const C2& z) { return z[0] + kI * z[1]; };
  const ComplexFn mode2 = [kI](const C2& z) {
    const Complex wp = z[0] + kI * z[1];
    const Complex wm = z[0] - kI * z[1];
    return wp * wp * wm;
  };
  for (const ComplexFn& f : {mode1, mode2}) {
    const ComplexFn avg = core_average_function(f, model);
    for (const C2& z : probes) rep.weight_one_max = std::max(rep.weight_one_max, std::abs(avg(z)));
  }

  const ComplexFn smooth = [kI](const C2& z) {
    return std::exp(z[0]) + 0.5 * std::exp(kI * z[1]) + z[0] * z[0] * z[1];
  };
  const ComplexFn smooth_avg = core_average_function(smooth, model);
  for (double h : cfg.steps) {
    rep.cr_residuals.push_back(cr_residual(sample_function(smooth_avg, cfg.center, h, cfg.half_width)));
  }
  rep.cr_min_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < cfg.steps.size(); ++i) {
    const double order = std::log(rep.cr_residuals[i - 1] / rep.cr_residuals[i]) /
                         std::log(cfg.steps[i - 1] / cfg.steps[i]);
    rep.cr_orders.push_back(order);
    rep.cr_min_order = std::min(rep.cr_min_order, order);
  }
  const ComplexFn anti = [](const C2& z) { return std::conj(z[0]); };
  rep.anti_holomorphic_residual = cr_residual(sample_function(anti, cfg.center, cfg.steps.front(), cfg.half_width));

  const ComplexFn twice = core_average_function(smooth_avg, model);
  for (const C2& z : probes) {
    rep.projection_error = std::max(rep.projection_error, std::abs(twice(z) - smooth_avg(z)));
  }

  std::vector<Complex> node_avg(model.point_count());
  for (int x = 0; x < model.point_count(); ++x) node_avg[x] = core_average_at(smooth, model, x);
  rep.orbit_invariance_exact = true;
  for (int x = 0; x < model.point_count() && rep.orbit_invariance_exact; ++x) {
    for (int j = 0; j < model.angle_nodes(); ++j) {
      if (node_avg[*model.act(ComplexArrow{j, 0, x})] != node_avg[x]) {
        rep.orbit_invariance_exact = false;
        break;
      }
    }
  }

  // Real trigonometric polynomial: sum c_ab w+^a w-^b + conj(c_ab) w+^b w-^a.
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  struct Term {
    int a, b;
    Complex c;
  };
  std::vector<Term> terms;
  for (int a = 0; a <= cfg.trig_degree; ++a) {
    for (int b = 0; a + b <= cfg.trig_degree; ++b) {
      const double re = normal(rng);
      const double im = normal(rng);
      terms.push_back({a, b, Complex(re, im)});
    }
  }
  const ComplexFn trig = [terms, kI](const C2& z) {
    const Complex wp = z[0] + kI * z[1];
    const Complex wm = z[0] - kI * z[1];
    Complex sum = 0.0;
    for (const Term& t : terms) {
      sum += t.c * std::pow(wp, t.a) * std::pow(wm, t.b) +
             std::conj(t.c) * std::pow(wp, t.b) * std::pow(wm, t.a);
    }
    return sum;
  };
  const FiniteGroupoid real = model.real_action_groupoid();
  const Core real_core = full_core(real);
  const HaarDensity real_density = uniform_haar_density(real_core);
  rep.real_restriction = real_restriction_check(trig, model, real_density);

  rep.pass = rep.model_check.passed() && rep.invariant_error <= 1e-14 &&
             rep.weight_one_max <= 1e-13 && rep.cr_min_order >= 1.9 &&
             rep.projection_error <= 1e-13 && rep.orbit_invariance_exact &&
             rep.real_restriction <= 1e-13;
  return rep;
}

json to_json(const HoloReport& r) {
  return json{{"model_check",
               {{"real_arrows_compared", r.model_check.real_arrows_compared},
                {"real_mismatches", r.model_check.real_mismatches},
                {"core_pairs_checked", r.model_check.core_pairs_checked},
                {"core_pairs_escaping", r.model_check.core_pairs_escaping}}},
              {"invariant_error", r.invariant_error},
              {"weight_one_max", r.weight_one_max},
              {"cr_residuals", r.cr_residuals},
              {"cr_orders", r.cr_orders},
              {"cr_min_order", r.cr_min_order},
              {"anti_holomorphic_residual", r.anti_holomorphic_residual},
              {"projection_error", r.projection_error},
              {"orbit_invariance_exact", r.orbit_invariance_exact},
              {"real_restriction", r.real_restriction},
              {"pass", r.pass}};
}

}  // namespace rectify

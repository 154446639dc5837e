#include "rectify/rectifier.hpp"

#include <cmath>
#include <limits>

namespace rectify {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_distance(const GroupElement& g, const NormedAlgebra& alg) {
  try {
    return distance_to_identity(g, alg);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::LogDomainError) return kInf;
    throw;
  }
}

double safe_left_distance(const GroupElement& g, const GroupElement& h, const NormedAlgebra& alg) {
  return safe_distance(g.inverse() * h, alg);
}

void require_sized(const AlmostMorphism& phi, const FiniteGroupoid& g) {
  if (static_cast<int>(phi.size()) != g.arrow_count()) {
    throw Error(ErrorKind::InvalidArgument, "almost morphism must have one value per arrow");
  }
}

}  // namespace

AlmostMorphism::AlmostMorphism(std::vector<GroupElement> values, const NormedAlgebra& alg)
    : values_(std::move(values)), group_(alg.id()), range_(0.0) {
  for (std::size_t p = 0; p < values_.size(); ++p) {
    if (values_[p].group() != group_) {
      throw Error(ErrorKind::InvalidGroupElement, "value lies in a different group",
                  {static_cast<std::int64_t>(p)});
    }
    range_ = std::max(range_, safe_distance(values_[p], alg));
  }
}

GroupElement defect_element(const AlmostMorphism& phi, const Core& core, ArrowId k, ArrowId p) {
  const FiniteGroupoid& g = core.parent();
  require_sized(phi, g);
  if (k < 0 || p < 0 || k >= g.arrow_count() || p >= g.arrow_count() || !core.contains(k)) {
    throw Error(ErrorKind::NotComposable, "left factor must be a core arrow", {k, p});
  }
  const auto kp = g.compose(k, p);
  if (!kp || g.source(k) != g.target(p)) {
    throw Error(ErrorKind::NotComposable, "(k, p) is not multipliable", {k, p});
  }
  return kernels::psi_value(phi.values(), CorePair{k, p, *kp});
}

DefectWitness defect_witness(const AlmostMorphism& phi, const Core& core, const NormedAlgebra& alg,
                             kernels::Backend backend) {
  require_sized(phi, core.parent());
  const kernels::PsiField psi = kernels::psi_logs(phi.values(), core, alg, backend);
  if (psi.first_failure >= 0) {
    const CorePair& bad = core.pairs()[psi.first_failure];
    throw Error(ErrorKind::DefectOverflow, "defect beyond the log domain", {bad.k, bad.p});
  }
  const kernels::DefectScan scan = kernels::defect_scan(psi.norms, backend);
  DefectWitness out;
  out.value = scan.value;
  if (scan.argmax >= 0) out.pair = core.pairs()[scan.argmax];
  return out;
}

double defect(const AlmostMorphism& phi, const Core& core, const NormedAlgebra& alg,
              kernels::Backend backend) {
  return defect_witness(phi, core, alg, backend).value;
}

Correction average_correction(const AlmostMorphism& phi, const HaarDensity& density,
                              const NormedAlgebra& alg, const BchConstants& k,
                              kernels::Backend backend) {
  const Core& core = density.core();
  require_sized(phi, core.parent());
  const kernels::PsiField psi = kernels::psi_logs(phi.values(), core, alg, backend);
  if (psi.first_failure >= 0) {
    const CorePair& bad = core.pairs()[psi.first_failure];
    throw Error(ErrorKind::DefectOverflow, "defect beyond the log domain", {bad.k, bad.p});
  }
  Correction out;
  out.delta = kernels::defect_scan(psi.norms, backend).value;
  if (out.delta > 1.0 / k.c_l) {
    throw Error(ErrorKind::DefectTooLarge,
                "defect " + std::to_string(out.delta) + " exceeds 1/c_l = " +
                    std::to_string(1.0 / k.c_l));
  }
  const std::vector<Coords> sums = kernels::fiber_averages(psi, density, alg, backend);
  out.values.reserve(sums.size());
  for (const Coords& s : sums) {
    out.values.push_back(exp_map(s, alg));
    out.max_norm = std::max(out.max_norm, safe_distance(out.values.back(), alg));
  }
  out.within_proof_bound = out.max_norm <= (k.d / k.d_prime) * out.delta + 1e-9;
  return out;
}

CorrectionStep correct_step(const AlmostMorphism& phi, const HaarDensity& density,
                            const NormedAlgebra& alg, const BchConstants& k,
                            const AmbientSets& sets, kernels::Backend backend) {
  Correction corr = average_correction(phi, density, alg, k, backend);
  const GroupElement e = GroupElement::identity(alg.id());
  std::vector<GroupElement> next;
  next.reserve(phi.size());
  double step = 0.0;
  for (std::size_t p = 0; p < phi.size(); ++p) {
    if (corr.values[p].matrix() == e.matrix()) {
      next.push_back(phi(static_cast<ArrowId>(p)));
      continue;
    }
    next.push_back(phi(static_cast<ArrowId>(p)) * corr.values[p]);
    const double before = safe_distance(phi(static_cast<ArrowId>(p)), alg);
    const double after = safe_distance(next.back(), alg);
    if (before <= sets.k_radius && after > sets.k_radius) {
      throw Error(ErrorKind::RangeEscape, "corrected value leaves the ambient compact set",
                  {static_cast<std::int64_t>(p)});
    }
    step = std::max(step, safe_left_distance(phi(static_cast<ArrowId>(p)), next.back(), alg));
  }
  return CorrectionStep{AlmostMorphism(std::move(next), alg), std::move(corr), step};
}

AlmostMorphism correct_once(const AlmostMorphism& phi, const HaarDensity& density,
                            const NormedAlgebra& alg, const BchConstants& k,
                            const AmbientSets& sets, kernels::Backend backend) {
  return correct_step(phi, density, alg, k, sets, backend).next;
}

double q_bound(double C, const BchConstants& k) {
  if (C < 0.0) throw Error(ErrorKind::InvalidArgument, "q_bound needs C >= 0");
  const double c = k.c;
  const double cl = k.c_l;
  const double dp = k.d_prime;
  return 2.0 * c * cl * (dp * cl + 2.0 * dp + c * cl * C) / (dp * dp) * C * C;
}

AdmissibleRadius admissible_radius(const BchConstants& k) {
  AdmissibleRadius r;
  r.inverse_c_l = 1.0 / k.c_l;
  r.step_guard = k.d / (2.0 * k.d_prime * k.c_d);
  // q(C) = a C^2 + b C^3, so q(C) = C/2 at the positive root of b C^2 + a C - 1/2.
  const double dp2 = k.d_prime * k.d_prime;
  const double a = 2.0 * k.c * k.c_l * (k.d_prime * k.c_l + 2.0 * k.d_prime) / dp2;
  const double b = 2.0 * k.c * k.c * k.c_l * k.c_l / dp2;
  if (b > 0.0) {
    r.half_root = (-a + std::sqrt(a * a + 2.0 * b)) / (2.0 * b);
  } else if (a > 0.0) {
    r.half_root = 1.0 / (2.0 * a);
  } else {
    r.half_root = kInf;
  }
  r.value = std::min({r.inverse_c_l, r.step_guard, r.half_root});
  return r;
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIterations: return "max_iterations";
    case Termination::DefectGrowth: return "defect_growth";
  }
  return "unknown";
}

bool IterationTrace::all_certified() const {
  for (bool b : q_certified) {
    if (!b) return false;
  }
  return true;
}

IterationResult iterate(const AlmostMorphism& phi0, const HaarDensity& density,
                        const NormedAlgebra& alg, const BchConstants& k, const AmbientSets& sets,
                        const IterationOptions& options) {
  sets.validate();
  const Core& core = density.core();
  if (phi0.range_certificate() > sets.w_radius) {
    throw Error(ErrorKind::RangeEscape, "initial map leaves W (range " +
                                            std::to_string(phi0.range_certificate()) + ")");
  }
  IterationTrace trace;
  trace.constants_used = k;
  trace.admissible_c = admissible_radius(k).value;
  double delta = defect(phi0, core, alg, options.backend);
  if (delta > trace.admissible_c) {
    throw Error(ErrorKind::DefectTooLarge, "initial defect " + std::to_string(delta) +
                                               " exceeds the admissible radius " +
                                               std::to_string(trace.admissible_c));
  }
  trace.cauchy_bound = 2.0 * (k.d_prime / k.d) * delta;

  AlmostMorphism phi = phi0;
  auto terminal_row = [&](double d) {
    trace.deltas.push_back(d);
    trace.correction_norms.push_back(0.0);
    trace.step_moves.push_back(0.0);
    trace.q_bounds.push_back(q_bound(d, k));
    trace.q_certified.push_back(true);
    trace.within_proof_bound.push_back(true);
  };

  for (int n = 0;; ++n) {
    if (delta <= options.tol) {
      trace.terminated = Termination::Converged;
      terminal_row(delta);
      break;
    }
    if (n == options.max_iter) {
      trace.terminated = Termination::MaxIterations;
      terminal_row(delta);
      break;
    }
    CorrectionStep step = [&] {
      try {
        return correct_step(phi, density, alg, k, sets, options.backend);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::DefectTooLarge) throw;
        return CorrectionStep{phi, Correction{}, -1.0};
      }
    }();
    if (step.step_move < 0.0) {
      trace.terminated = Termination::DefectGrowth;
      terminal_row(delta);
      break;
    }
    const double next_delta = defect(step.next, core, alg, options.backend);
    const double q = q_bound(delta, k);
    const bool certified = next_delta <= q + kQSlack;
    trace.deltas.push_back(delta);
    trace.correction_norms.push_back(step.correction.max_norm);
    trace.step_moves.push_back(step.step_move);
    trace.q_bounds.push_back(q);
    trace.q_certified.push_back(certified);
    trace.within_proof_bound.push_back(step.correction.within_proof_bound);
    trace.total_displacement += step.step_move;
    if (!certified) trace.non_contraction = true;
    phi = std::move(step.next);
    delta = next_delta;
  }
  return IterationResult{std::move(phi), std::move(trace)};
}

MorphismResidual verify_core_morphism(const AlmostMorphism& phi, const Core& core,
                                      const NormedAlgebra& alg) {
  const FiniteGroupoid& g = core.parent();
  require_sized(phi, g);
  MorphismResidual r;
  for (const CorePair& pr : core.pairs()) {
    r.core = std::max(r.core, safe_left_distance(phi(pr.k) * phi(pr.p), phi(pr.kp), alg));
  }
  for (const auto& [q, p] : g.domain_pairs()) {
    if (core.contains(q)) continue;
    const ArrowId qp = *g.compose(q, p);
    r.non_core = std::max(r.non_core, safe_left_distance(phi(q) * phi(p), phi(qp), alg));
  }
  r.full = std::max(r.core, r.non_core);
  return r;
}

}  // namespace rectify

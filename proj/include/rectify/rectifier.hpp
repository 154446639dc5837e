#pragma once

// The averaging iteration: defect psi, defect size Delta, Haar-average
// correction A, one-step correction phi * A, the iteration with per-step
// certification against q(C), and the morphism check of the limit.

#include <cstdint>
#include <string_view>
#include <vector>

#include "rectify/group_kernel.hpp"
#include "rectify/groupoid.hpp"
#include "rectify/kernels.hpp"

namespace rectify {

/// Arrow-indexed map into a compact group.
class AlmostMorphism {
 public:
  AlmostMorphism(std::vector<GroupElement> values, const NormedAlgebra& alg);

  const GroupElement& operator()(ArrowId p) const { return values_[p]; }
  const std::vector<GroupElement>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  GroupId target_group() const noexcept { return group_; }
  /// max_p d(phi(p), e); +inf when some value is outside the log domain.
  double range_certificate() const noexcept { return range_; }

 private:
  std::vector<GroupElement> values_;
  GroupId group_;
  double range_;
};

/// Throws NotComposable unless k is a core arrow and (k, p) is multipliable.
GroupElement defect_element(const AlmostMorphism& phi, const Core& core, ArrowId k, ArrowId p);

struct DefectWitness {
  double value = 0.0;
  CorePair pair{-1, -1, -1};
};

/// max over H^(2)_K of d(psi(k, p), e). Throws DefectOverflow when some psi
/// leaves the log domain.
DefectWitness defect_witness(const AlmostMorphism& phi, const Core& core, const NormedAlgebra& alg,
                             kernels::Backend backend = kernels::Backend::Parallel);
double defect(const AlmostMorphism& phi, const Core& core, const NormedAlgebra& alg,
              kernels::Backend backend = kernels::Backend::Parallel);

struct Correction {
  std::vector<GroupElement> values;  // A(p), indexed by arrow
  double delta = 0.0;                // Delta(phi) at the time of averaging
  double max_norm = 0.0;             // max_p d(A(p), e)
  /// max_norm <= (d/d') delta + 1e-9.
  bool within_proof_bound = false;
};

/// A(p) = exp(sum_{k in K_t(p)} w(k) log psi(k, p)). Throws DefectTooLarge when
/// Delta(phi) > 1/c_l.
Correction average_correction(const AlmostMorphism& phi, const HaarDensity& density,
                              const NormedAlgebra& alg, const BchConstants& k,
                              kernels::Backend backend = kernels::Backend::Parallel);

struct CorrectionStep {
  AlmostMorphism next;
  Correction correction;
  double step_move = 0.0;  // max_p d(next(p), phi(p))
};

/// phi_hat(p) = phi(p) A(p). Throws RangeEscape when a value that was inside
/// the ambient compact ball leaves it.
CorrectionStep correct_step(const AlmostMorphism& phi, const HaarDensity& density,
                            const NormedAlgebra& alg, const BchConstants& k,
                            const AmbientSets& sets,
                            kernels::Backend backend = kernels::Backend::Parallel);
AlmostMorphism correct_once(const AlmostMorphism& phi, const HaarDensity& density,
                            const NormedAlgebra& alg, const BchConstants& k,
                            const AmbientSets& sets,
                            kernels::Backend backend = kernels::Backend::Parallel);

/// q(C) = 2 c c_l (d' c_l + 2 d' + c c_l C) / d'^2 * C^2.
double q_bound(double C, const BchConstants& k);

struct AdmissibleRadius {
  double value = 0.0;
  double inverse_c_l = 0.0;
  double step_guard = 0.0;   // d / (2 d' c_d)
  double half_root = 0.0;    // largest C with q(C) <= C/2 (+inf when q == 0)
};
AdmissibleRadius admissible_radius(const BchConstants& k);

enum class Termination { Converged, MaxIterations, DefectGrowth };
std::string_view to_string(Termination t);

inline constexpr double kQSlack = 1e-12;

/// One row per iterate n. Row n carries Delta(phi_n), the correction applied
/// to phi_n, its step, q(Delta(phi_n)) and whether Delta(phi_{n+1}) <= q + slack.
/// The last row is the terminal iterate with zero correction and flag 1.
struct IterationTrace {
  std::vector<double> deltas;
  std::vector<double> correction_norms;
  std::vector<double> step_moves;
  std::vector<double> q_bounds;
  std::vector<bool> q_certified;
  std::vector<bool> within_proof_bound;
  BchConstants constants_used;
  double admissible_c = 0.0;
  Termination terminated = Termination::MaxIterations;
  bool non_contraction = false;
  double total_displacement = 0.0;
  /// 2 (d'/d) Delta_0: geometric bound on the total displacement of a
  /// certified run.
  double cauchy_bound = 0.0;

  int iterations() const { return static_cast<int>(deltas.size()) - 1; }
  bool all_certified() const;
};

struct IterationOptions {
  double tol = 1e-12;
  int max_iter = 50;
  kernels::Backend backend = kernels::Backend::Parallel;
};

struct IterationResult {
  AlmostMorphism limit;
  IterationTrace trace;
};

/// Throws RangeEscape when phi_0 leaves W and DefectTooLarge when
/// Delta(phi_0) exceeds the admissible radius.
IterationResult iterate(const AlmostMorphism& phi0, const HaarDensity& density,
                        const NormedAlgebra& alg, const BchConstants& k, const AmbientSets& sets,
                        const IterationOptions& options = {});

struct MorphismResidual {
  double core = 0.0;      // max over H^(2)_K of d(Phi(kp), Phi(k) Phi(p))
  double non_core = 0.0;  // same over composable pairs with q outside K
  double full = 0.0;      // max of the two
};

MorphismResidual verify_core_morphism(const AlmostMorphism& phi, const Core& core,
                                      const NormedAlgebra& alg);

}  // namespace rectify

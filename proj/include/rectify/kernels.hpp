#pragma once

// Inner loops of the averaging iteration. The serial namespace is the
// reference; the parallel one distributes the same loops over OpenMP threads
// and returns bit-identical results (every output entry is produced by one
// thread in a fixed order, and the max reduction breaks ties by index).

#include <cstdint>
#include <vector>

#include "rectify/group_kernel.hpp"
#include "rectify/groupoid.hpp"

namespace rectify::kernels {

enum class Backend { Serial, Parallel };

/// log psi(k, p) for every pair of core.pairs(), in that order.
struct PsiField {
  std::vector<Coords> logs;
  std::vector<double> norms;
  /// Lowest pair index whose psi left the log domain, or -1.
  std::int64_t first_failure = -1;
};

struct DefectScan {
  double value = 0.0;
  std::int64_t argmax = -1;  // lowest index attaining the max
};

namespace serial {
PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg);
DefectScan defect_scan(const std::vector<double>& norms);
/// sum_{k in K_t(p)} w(k) log psi(k, p) for every arrow p, compensated sum in
/// pair order.
std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg);
}  // namespace serial

namespace parallel {
PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg);
DefectScan defect_scan(const std::vector<double>& norms);
std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg);
}  // namespace parallel

PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg, Backend backend);
DefectScan defect_scan(const std::vector<double>& norms, Backend backend);
std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg, Backend backend);

/// psi(k, p) = phi(p)^{-1} phi(k)^{-1} phi(kp), multiplied left to right.
inline GroupElement psi_value(const std::vector<GroupElement>& values, const CorePair& pair) {
  return values[pair.p].inverse() * values[pair.k].inverse() * values[pair.kp];
}

}  // namespace rectify::kernels

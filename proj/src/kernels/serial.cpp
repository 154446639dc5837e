#include <limits>

#include "common.hpp"

namespace rectify::kernels::serial {

PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg) {
  const auto& pairs = core.pairs();
  PsiField out;
  out.logs.resize(pairs.size());
  out.norms.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    bool failed = false;
    detail::psi_entry(values, pairs[i], alg, out.logs[i], out.norms[i], failed);
    if (failed && out.first_failure < 0) out.first_failure = static_cast<std::int64_t>(i);
  }
  return out;
}

DefectScan defect_scan(const std::vector<double>& norms) {
  DefectScan scan;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    if (scan.argmax < 0 || norms[i] > scan.value) {
      scan.value = norms[i];
      scan.argmax = static_cast<std::int64_t>(i);
    }
  }
  return scan;
}

std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg) {
  const int n = density.core().parent().arrow_count();
  std::vector<Coords> out(n);
  for (ArrowId p = 0; p < n; ++p) out[p] = detail::fiber_sum(psi, density, alg, p);
  return out;
}

}  // namespace rectify::kernels::serial

namespace rectify::kernels {

PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg, Backend backend) {
  return backend == Backend::Serial ? serial::psi_logs(values, core, alg)
                                    : parallel::psi_logs(values, core, alg);
}

DefectScan defect_scan(const std::vector<double>& norms, Backend backend) {
  return backend == Backend::Serial ? serial::defect_scan(norms) : parallel::defect_scan(norms);
}

std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg, Backend backend) {
  return backend == Backend::Serial ? serial::fiber_averages(psi, density, alg)
                                    : parallel::fiber_averages(psi, density, alg);
}

}  // namespace rectify::kernels

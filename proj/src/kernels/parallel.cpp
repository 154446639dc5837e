#include <limits>

#include <omp.h>

#include "common.hpp"

namespace rectify::kernels::parallel {

PsiField psi_logs(const std::vector<GroupElement>& values, const Core& core,
                  const NormedAlgebra& alg) {
  const auto& pairs = core.pairs();
  const auto count = static_cast<std::int64_t>(pairs.size());
  PsiField out;
  out.logs.resize(pairs.size());
  out.norms.resize(pairs.size());
  std::int64_t first = std::numeric_limits<std::int64_t>::max();
#pragma omp parallel for schedule(static) reduction(min : first)
  for (std::int64_t i = 0; i < count; ++i) {
    bool failed = false;
    detail::psi_entry(values, pairs[i], alg, out.logs[i], out.norms[i], failed);
    if (failed && i < first) first = i;
  }
  if (first != std::numeric_limits<std::int64_t>::max()) out.first_failure = first;
  return out;
}

DefectScan defect_scan(const std::vector<double>& norms) {
  const auto count = static_cast<std::int64_t>(norms.size());
  DefectScan best;
#pragma omp parallel
  {
    DefectScan local;
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < count; ++i) {
      if (local.argmax < 0 || norms[i] > local.value) {
        local.value = norms[i];
        local.argmax = i;
      }
    }
#pragma omp critical
    {
      if (local.argmax >= 0 &&
          (best.argmax < 0 || local.value > best.value ||
           (local.value == best.value && local.argmax < best.argmax))) {
        best = local;
      }
    }
  }
  return best;
}

std::vector<Coords> fiber_averages(const PsiField& psi, const HaarDensity& density,
                                   const NormedAlgebra& alg) {
  const int n = density.core().parent().arrow_count();
  std::vector<Coords> out(n);
#pragma omp parallel for schedule(static)
  for (ArrowId p = 0; p < n; ++p) out[p] = detail::fiber_sum(psi, density, alg, p);
  return out;
}

}  // namespace rectify::kernels::parallel

#pragma once

#include "rectify/kernels.hpp"
#include "rectify/quadrature.hpp"

namespace rectify::kernels::detail {

inline void psi_entry(const std::vector<GroupElement>& values, const CorePair& pair,
                      const NormedAlgebra& alg, Coords& log_out, double& norm_out, bool& failed) {
  try {
    log_out = log_coords(psi_value(values, pair), alg);
    norm_out = alg.norm(log_out);
    failed = false;
  } catch (const Error&) {
    log_out = Coords::Zero(alg.dim());
    norm_out = std::numeric_limits<double>::infinity();
    failed = true;
  }
}

inline Coords fiber_sum(const PsiField& psi, const HaarDensity& density, const NormedAlgebra& alg,
                        ArrowId p) {
  const Core& core = density.core();
  const auto [begin, end] = core.pair_range(p);
  rectify::detail::Compensated<Coords> acc(Coords::Zero(alg.dim()));
  for (std::size_t i = begin; i < end; ++i) {
    acc.add(Coords(density.weight(core.pairs()[i].k) * psi.logs[i]));
  }
  return acc.sum;
}

}  // namespace rectify::kernels::detail

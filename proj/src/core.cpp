#include <algorithm>
#include <cmath>
#include <numeric>

#include "rectify/groupoid.hpp"

namespace rectify {

namespace {

constexpr double kDensityTol = 1e-14;

}  // namespace

Core build_core(const FiniteGroupoid& g, std::vector<ArrowId> arrow_subset) {
  if (arrow_subset.empty()) throw Error(ErrorKind::InvalidArgument, "core arrow subset is empty");
  std::sort(arrow_subset.begin(), arrow_subset.end());
  arrow_subset.erase(std::unique(arrow_subset.begin(), arrow_subset.end()), arrow_subset.end());
  if (arrow_subset.front() < 0 || arrow_subset.back() >= g.arrow_count()) {
    throw Error(ErrorKind::InvalidArgument, "core arrow id out of range");
  }

  Core core;
  core.parent_ = &g;
  core.arrows_ = std::move(arrow_subset);
  core.position_.assign(g.arrow_count(), -1);
  core.fibers_.assign(g.object_count(), {});
  for (std::size_t i = 0; i < core.arrows_.size(); ++i) {
    const ArrowId k = core.arrows_[i];
    core.position_[k] = static_cast<int>(i);
    core.fibers_[g.source(k)].push_back(k);
  }

  // Lie type: s_K is onto.
  for (ObjectId x = 0; x < g.object_count(); ++x) {
    if (core.fibers_[x].empty()) {
      throw Error(ErrorKind::CoreAxiomError, "object has an empty s_K-fiber", {x}, "lie_type");
    }
  }

  // No escape: every (k, p) with s(k) = t(p) is multipliable.
  for (ArrowId k : core.arrows_) {
    for (ArrowId p : g.with_target(g.source(k))) {
      if (!g.in_domain(k, p)) {
        throw Error(ErrorKind::CoreAxiomError, "core arrow cannot multiply", {k, p}, "no_escape");
      }
    }
  }

  // Fiber invertibility: right multiplication by k is a bijection
  // K_{t(k)} -> K_{s(k)}.
  std::vector<int> hit(core.arrows_.size(), -1);
  for (ArrowId k : core.arrows_) {
    const auto& from = core.fibers_[g.target(k)];
    const auto& to = core.fibers_[g.source(k)];
    if (from.size() != to.size()) {
      throw Error(ErrorKind::CoreAxiomError, "s_K-fibers at t(k) and s(k) differ in size", {k},
                  "fiber_invertibility");
    }
    for (ArrowId kp : from) {
      const ArrowId prod = *g.compose(kp, k);
      const int pos = core.position_[prod];
      if (pos < 0 || g.source(prod) != g.source(k)) {
        throw Error(ErrorKind::CoreAxiomError, "k' k leaves the s_K-fiber at s(k)", {kp, k, prod},
                    "fiber_invertibility");
      }
      if (hit[pos] == k) {
        throw Error(ErrorKind::CoreAxiomError, "right multiplication is not injective",
                    {kp, k, prod}, "fiber_invertibility");
      }
      hit[pos] = k;
    }
  }

  core.pair_offsets_.assign(g.arrow_count() + 1, 0);
  for (ArrowId p = 0; p < g.arrow_count(); ++p) {
    core.pair_offsets_[p] = core.pairs_.size();
    for (ArrowId k : core.fibers_[g.target(p)]) {
      core.pairs_.push_back(CorePair{k, p, *g.compose(k, p)});
    }
  }
  core.pair_offsets_[g.arrow_count()] = core.pairs_.size();
  return core;
}

Core full_core(const FiniteGroupoid& g) {
  std::vector<ArrowId> all(g.arrow_count());
  std::iota(all.begin(), all.end(), 0);
  return build_core(g, std::move(all));
}

namespace {

void normalize_fibers(const Core& core, std::vector<double>& weights) {
  if (weights.size() != core.arrows().size()) {
    throw Error(ErrorKind::InvalidArgument, "one weight per core arrow is required");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw Error(ErrorKind::InvalidArgument, "weights must be finite and nonnegative",
                  {core.arrows()[i]});
    }
  }
  const FiniteGroupoid& g = core.parent();
  for (ObjectId x = 0; x < g.object_count(); ++x) {
    double sum = 0.0;
    for (ArrowId k : core.fiber(x)) sum += weights[core.position(k)];
    if (!(sum > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "fiber has zero total weight", {x});
    }
    for (ArrowId k : core.fiber(x)) weights[core.position(k)] /= sum;
  }
}

}  // namespace

ValidationReport validate_density(const Core& core, const std::vector<double>& raw) {
  ValidationReport report;
  std::vector<double> weights = raw;
  try {
    normalize_fibers(core, weights);
  } catch (const Error& e) {
    report.add("normalization", e.witness());
    return report;
  }
  const FiniteGroupoid& g = core.parent();
  for (ObjectId x = 0; x < g.object_count(); ++x) {
    double sum = 0.0;
    for (ArrowId k : core.fiber(x)) sum += weights[core.position(k)];
    if (std::abs(sum - 1.0) > kDensityTol) report.add("normalization", {x});
  }
  for (ArrowId k : core.arrows()) {
    for (ArrowId kp : core.fiber(g.target(k))) {
      const ArrowId prod = *g.compose(kp, k);
      if (std::abs(weights[core.position(prod)] - weights[core.position(kp)]) > kDensityTol) {
        report.add("right_invariance", {kp, k});
      }
    }
  }
  return report;
}

HaarDensity attach_haar_density(const Core& core, std::vector<double> weights) {
  normalize_fibers(core, weights);
  const FiniteGroupoid& g = core.parent();
  for (ArrowId k : core.arrows()) {
    for (ArrowId kp : core.fiber(g.target(k))) {
      const ArrowId prod = *g.compose(kp, k);
      if (std::abs(weights[core.position(prod)] - weights[core.position(kp)]) > kDensityTol) {
        throw Error(ErrorKind::InvarianceError,
                    "right translation by a core arrow does not preserve the weights", {kp, k},
                    "right_invariance");
      }
    }
  }
  HaarDensity density;
  density.core_ = &core;
  density.weights_ = std::move(weights);
  return density;
}

HaarDensity uniform_haar_density(const Core& core) {
  std::vector<double> weights(core.arrows().size(), 1.0);
  return attach_haar_density(core, std::move(weights));
}

}  // namespace rectify

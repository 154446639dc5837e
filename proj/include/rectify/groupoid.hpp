#pragma once

// Finite (local) groupoids, cores and right-invariant Haar densities.
//
// Arrow and object ids are dense indices. Constructors number arrows
// lexicographically in their inputs:
//   action groupoid  (g, x)  -> g * |space| + x
//   pair groupoid    (j, i)  -> j * n + i      (arrow from i to j)

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rectify/errors.hpp"

namespace rectify {

using ArrowId = std::int32_t;
using ObjectId = std::int32_t;

struct Arrow {
  ObjectId source = 0;
  ObjectId target = 0;
};

/// Finite group given by its multiplication table.
class FiniteGroup {
 public:
  /// Validates closure, identity, inverses and associativity.
  FiniteGroup(int order, std::vector<int> table, int identity);

  static FiniteGroup cyclic(int n);

  int order() const noexcept { return order_; }
  int identity() const noexcept { return identity_; }
  int multiply(int a, int b) const { return table_[static_cast<std::size_t>(a) * order_ + b]; }
  int inverse(int a) const { return inverse_[a]; }

 private:
  int order_;
  std::vector<int> table_;
  int identity_;
  std::vector<int> inverse_;
};

/// Finite groupoid with a partial multiplication. The composability domain
/// (the pairs declared multipliable) is exactly the set of pairs with a
/// product entry.
class FiniteGroupoid {
 public:
  FiniteGroupoid(int object_count, std::vector<Arrow> arrows, std::vector<ArrowId> units);

  int object_count() const noexcept { return object_count_; }
  int arrow_count() const noexcept { return static_cast<int>(arrows_.size()); }
  ObjectId source(ArrowId a) const { return arrows_[a].source; }
  ObjectId target(ArrowId a) const { return arrows_[a].target; }
  ArrowId unit(ObjectId x) const { return units_[x]; }
  const std::vector<ArrowId>& units() const noexcept { return units_; }

  void set_product(ArrowId q, ArrowId p, ArrowId qp);
  void erase_product(ArrowId q, ArrowId p);
  void set_inverse(ArrowId p, ArrowId inverse);

  std::optional<ArrowId> compose(ArrowId q, ArrowId p) const;
  bool in_domain(ArrowId q, ArrowId p) const { return compose(q, p).has_value(); }
  std::optional<ArrowId> inverse(ArrowId p) const;

  std::span<const ArrowId> with_source(ObjectId x) const { return by_source_[x]; }
  std::span<const ArrowId> with_target(ObjectId x) const { return by_target_[x]; }

  /// Number of pairs in the composability domain.
  std::size_t domain_size() const noexcept { return products_.size(); }
  /// Domain pairs (q, p) in lexicographic order.
  std::vector<std::pair<ArrowId, ArrowId>> domain_pairs() const;

 private:
  static std::uint64_t key(ArrowId q, ArrowId p) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(q)) << 32) |
           static_cast<std::uint32_t>(p);
  }

  int object_count_;
  std::vector<Arrow> arrows_;
  std::vector<ArrowId> units_;
  std::vector<std::vector<ArrowId>> by_source_;
  std::vector<std::vector<ArrowId>> by_target_;
  std::unordered_map<std::uint64_t, ArrowId> products_;
  std::vector<ArrowId> inverses_;  // -1 where undefined
};

struct Violation {
  std::string axiom;
  std::vector<std::int64_t> witness;
};

struct ValidationReport {
  bool passed = true;
  std::vector<Violation> violations;

  void add(std::string axiom, std::vector<std::int64_t> witness) {
    violations.push_back({std::move(axiom), std::move(witness)});
    passed = false;
  }
};

/// Action groupoid of `group` acting on {0..space_size-1} by `action(g, x)`.
FiniteGroupoid build_action_groupoid(const FiniteGroup& group, int space_size,
                                     const std::function<int(int, int)>& action);
FiniteGroupoid build_pair_groupoid(int space_size);

/// Exhaustive axiom check. Axiom ids: "composability", "source_target",
/// "unit", "inverse", "associativity".
ValidationReport validate_groupoid(const FiniteGroupoid& g);

/// A left-composable pair (k, p) with k in the core and s(k) = t(p).
struct CorePair {
  ArrowId k;
  ArrowId p;
  ArrowId kp;
};

/// Core of a finite local groupoid. In the finite model every core is
/// s-proper (fibers are finite).
class Core {
 public:
  const FiniteGroupoid& parent() const noexcept { return *parent_; }
  const std::vector<ArrowId>& arrows() const noexcept { return arrows_; }
  bool contains(ArrowId a) const { return position_[a] >= 0; }
  /// Index of a core arrow within arrows(), or -1.
  int position(ArrowId a) const { return position_[a]; }
  /// s_K-fiber at x, in increasing arrow id.
  const std::vector<ArrowId>& fiber(ObjectId x) const { return fibers_[x]; }
  bool is_full() const noexcept { return static_cast<int>(arrows_.size()) == parent_->arrow_count(); }
  static constexpr bool s_proper = true;

  /// All pairs of H^(2)_K grouped by p (p ascending, k in fiber order over t(p)).
  const std::vector<CorePair>& pairs() const noexcept { return pairs_; }
  /// Range [begin, end) in pairs() for a fixed right factor p.
  std::pair<std::size_t, std::size_t> pair_range(ArrowId p) const {
    return {pair_offsets_[p], pair_offsets_[p + 1]};
  }

 private:
  friend Core build_core(const FiniteGroupoid& g, std::vector<ArrowId> arrow_subset);
  const FiniteGroupoid* parent_ = nullptr;
  std::vector<ArrowId> arrows_;
  std::vector<int> position_;
  std::vector<std::vector<ArrowId>> fibers_;
  std::vector<CorePair> pairs_;
  std::vector<std::size_t> pair_offsets_;
};

/// Validates the three core axioms ("lie_type", "no_escape",
/// "fiber_invertibility") and throws CoreAxiomError with the axiom id as tag.
/// The groupoid must outlive the core.
Core build_core(const FiniteGroupoid& g, std::vector<ArrowId> arrow_subset);
Core full_core(const FiniteGroupoid& g);

/// Right-invariant, fiberwise normalized weights on a core.
class HaarDensity {
 public:
  /// Weight of a core arrow.
  double weight(ArrowId k) const { return weights_[core_->position(k)]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const Core& core() const noexcept { return *core_; }

 private:
  friend HaarDensity attach_haar_density(const Core& core, std::vector<double> weights);
  const Core* core_ = nullptr;
  std::vector<double> weights_;  // parallel to core.arrows()
};

/// Normalizes `weights` (parallel to core.arrows()) per fiber and checks right
/// invariance entrywise to 1e-14. Throws InvarianceError with witness
/// (k', k) when w(k' k) != w(k').
HaarDensity attach_haar_density(const Core& core, std::vector<double> weights);
HaarDensity uniform_haar_density(const Core& core);

/// Same checks as attach_haar_density, returned as data.
ValidationReport validate_density(const Core& core, const std::vector<double>& weights);

}  // namespace rectify

#include <algorithm>
#include <string>

#include "rectify/groupoid.hpp"

namespace rectify {

FiniteGroup::FiniteGroup(int order, std::vector<int> table, int identity)
    : order_(order), table_(std::move(table)), identity_(identity) {
  if (order_ < 1 || table_.size() != static_cast<std::size_t>(order_) * order_) {
    throw Error(ErrorKind::InvalidArgument, "group table must be order x order");
  }
  if (identity_ < 0 || identity_ >= order_) {
    throw Error(ErrorKind::InvalidArgument, "identity out of range");
  }
  for (int v : table_) {
    if (v < 0 || v >= order_) throw Error(ErrorKind::InvalidArgument, "group table not closed");
  }
  inverse_.assign(order_, -1);
  for (int a = 0; a < order_; ++a) {
    if (multiply(identity_, a) != a || multiply(a, identity_) != a) {
      throw Error(ErrorKind::InvalidArgument, "identity law fails", {a});
    }
    for (int b = 0; b < order_; ++b) {
      if (multiply(a, b) == identity_ && multiply(b, a) == identity_) inverse_[a] = b;
      for (int c = 0; c < order_; ++c) {
        if (multiply(multiply(a, b), c) != multiply(a, multiply(b, c))) {
          throw Error(ErrorKind::InvalidArgument, "group table is not associative", {a, b, c});
        }
      }
    }
    if (inverse_[a] < 0) throw Error(ErrorKind::InvalidArgument, "element has no inverse", {a});
  }
}

FiniteGroup FiniteGroup::cyclic(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "cyclic group order must be >= 1");
  std::vector<int> table(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) table[static_cast<std::size_t>(a) * n + b] = (a + b) % n;
  }
  return FiniteGroup(n, std::move(table), 0);
}

FiniteGroupoid::FiniteGroupoid(int object_count, std::vector<Arrow> arrows,
                               std::vector<ArrowId> units)
    : object_count_(object_count),
      arrows_(std::move(arrows)),
      units_(std::move(units)),
      by_source_(object_count),
      by_target_(object_count),
      inverses_(arrows_.size(), -1) {
  if (object_count_ < 1) throw Error(ErrorKind::InvalidArgument, "groupoid needs an object");
  if (static_cast<int>(units_.size()) != object_count_) {
    throw Error(ErrorKind::InvalidArgument, "one unit arrow per object is required");
  }
  for (ArrowId a = 0; a < arrow_count(); ++a) {
    const Arrow& arr = arrows_[a];
    if (arr.source < 0 || arr.source >= object_count_ || arr.target < 0 ||
        arr.target >= object_count_) {
      throw Error(ErrorKind::InvalidArgument, "arrow endpoint out of range", {a});
    }
    by_source_[arr.source].push_back(a);
    by_target_[arr.target].push_back(a);
  }
  for (ArrowId u : units_) {
    if (u < 0 || u >= arrow_count()) throw Error(ErrorKind::InvalidArgument, "unit id out of range");
  }
}

void FiniteGroupoid::set_product(ArrowId q, ArrowId p, ArrowId qp) {
  if (q < 0 || p < 0 || qp < 0 || q >= arrow_count() || p >= arrow_count() || qp >= arrow_count()) {
    throw Error(ErrorKind::InvalidArgument, "product entry out of range", {q, p, qp});
  }
  products_[key(q, p)] = qp;
}

void FiniteGroupoid::erase_product(ArrowId q, ArrowId p) { products_.erase(key(q, p)); }

void FiniteGroupoid::set_inverse(ArrowId p, ArrowId inverse) { inverses_.at(p) = inverse; }

std::optional<ArrowId> FiniteGroupoid::compose(ArrowId q, ArrowId p) const {
  const auto it = products_.find(key(q, p));
  if (it == products_.end()) return std::nullopt;
  return it->second;
}

std::optional<ArrowId> FiniteGroupoid::inverse(ArrowId p) const {
  const ArrowId i = inverses_.at(p);
  if (i < 0) return std::nullopt;
  return i;
}

std::vector<std::pair<ArrowId, ArrowId>> FiniteGroupoid::domain_pairs() const {
  std::vector<std::pair<ArrowId, ArrowId>> out;
  out.reserve(products_.size());
  for (const auto& [k, v] : products_) {
    out.emplace_back(static_cast<ArrowId>(k >> 32), static_cast<ArrowId>(k & 0xffffffffu));
  }
  std::sort(out.begin(), out.end());
  return out;
}

FiniteGroupoid build_action_groupoid(const FiniteGroup& group, int space_size,
                                     const std::function<int(int, int)>& action) {
  if (space_size < 1) throw Error(ErrorKind::InvalidArgument, "space must be nonempty");
  const int n = group.order();
  std::vector<int> act(static_cast<std::size_t>(n) * space_size);
  for (int g = 0; g < n; ++g) {
    for (int x = 0; x < space_size; ++x) {
      const int y = action(g, x);
      if (y < 0 || y >= space_size) {
        throw Error(ErrorKind::ActionError, "action leaves the space", {g, x}, "closure");
      }
      act[static_cast<std::size_t>(g) * space_size + x] = y;
    }
  }
  auto acts = [&](int g, int x) { return act[static_cast<std::size_t>(g) * space_size + x]; };
  for (int x = 0; x < space_size; ++x) {
    if (acts(group.identity(), x) != x) {
      throw Error(ErrorKind::ActionError, "identity does not act trivially", {group.identity(), x},
                  "identity");
    }
  }
  for (int h = 0; h < n; ++h) {
    for (int g = 0; g < n; ++g) {
      for (int x = 0; x < space_size; ++x) {
        if (acts(group.multiply(h, g), x) != acts(h, acts(g, x))) {
          throw Error(ErrorKind::ActionError, "(hg).x != h.(g.x)", {h, g, x}, "compatibility");
        }
      }
    }
  }

  auto id = [&](int g, int x) { return static_cast<ArrowId>(g * space_size + x); };
  std::vector<Arrow> arrows(static_cast<std::size_t>(n) * space_size);
  for (int g = 0; g < n; ++g) {
    for (int x = 0; x < space_size; ++x) arrows[id(g, x)] = Arrow{x, acts(g, x)};
  }
  std::vector<ArrowId> units(space_size);
  for (int x = 0; x < space_size; ++x) units[x] = id(group.identity(), x);

  FiniteGroupoid out(space_size, std::move(arrows), std::move(units));
  for (int g = 0; g < n; ++g) {
    for (int x = 0; x < space_size; ++x) {
      const int gx = acts(g, x);
      out.set_inverse(id(g, x), id(group.inverse(g), gx));
      for (int h = 0; h < n; ++h) out.set_product(id(h, gx), id(g, x), id(group.multiply(h, g), x));
    }
  }
  return out;
}

FiniteGroupoid build_pair_groupoid(int space_size) {
  if (space_size < 1) throw Error(ErrorKind::InvalidArgument, "space must be nonempty");
  const int n = space_size;
  auto id = [n](int j, int i) { return static_cast<ArrowId>(j * n + i); };
  std::vector<Arrow> arrows(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) arrows[id(j, i)] = Arrow{i, j};
  }
  std::vector<ArrowId> units(n);
  for (int i = 0; i < n; ++i) units[i] = id(i, i);
  FiniteGroupoid out(n, std::move(arrows), std::move(units));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      out.set_inverse(id(k, j), id(j, k));
      for (int i = 0; i < n; ++i) out.set_product(id(k, j), id(j, i), id(k, i));
    }
  }
  return out;
}

ValidationReport validate_groupoid(const FiniteGroupoid& g) {
  ValidationReport report;
  const auto pairs = g.domain_pairs();

  for (const auto& [q, p] : pairs) {
    if (g.source(q) != g.target(p)) report.add("composability", {q, p});
    const ArrowId qp = *g.compose(q, p);
    if (g.source(qp) != g.source(p) || g.target(qp) != g.target(q)) {
      report.add("source_target", {q, p, qp});
    }
  }

  for (ObjectId x = 0; x < g.object_count(); ++x) {
    const ArrowId u = g.unit(x);
    if (g.source(u) != x || g.target(u) != x) report.add("unit", {x, u});
  }
  for (ArrowId p = 0; p < g.arrow_count(); ++p) {
    const ArrowId ut = g.unit(g.target(p));
    const ArrowId us = g.unit(g.source(p));
    const auto left = g.compose(ut, p);
    const auto right = g.compose(p, us);
    if (!left || *left != p) report.add("unit", {ut, p});
    if (!right || *right != p) report.add("unit", {p, us});
  }

  for (ArrowId p = 0; p < g.arrow_count(); ++p) {
    const auto inv = g.inverse(p);
    if (!inv) continue;
    if (g.source(*inv) != g.target(p) || g.target(*inv) != g.source(p)) {
      report.add("inverse", {p, *inv});
      continue;
    }
    if (const auto a = g.compose(*inv, p); a && *a != g.unit(g.source(p))) report.add("inverse", {*inv, p});
    if (const auto b = g.compose(p, *inv); b && *b != g.unit(g.target(p))) report.add("inverse", {p, *inv});
  }

  // Local associativity: if (r,q), (q,p) and (rq,p) are multipliable then so
  // is (r, qp), with the same product.
  for (const auto& [q, p] : pairs) {
    const ArrowId qp = *g.compose(q, p);
    for (ArrowId r : g.with_source(g.target(q))) {
      const auto rq = g.compose(r, q);
      if (!rq) continue;
      const auto left = g.compose(*rq, p);
      if (!left) continue;
      const auto right = g.compose(r, qp);
      if (!right || *right != *left) report.add("associativity", {r, q, p});
    }
  }
  return report;
}

}  // namespace rectify

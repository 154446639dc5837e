#pragma once

// Haar quadrature on the supported compact groups.
//
//   finite      uniform weights over the listed elements (exact)
//   U(1), SO(2) trapezoid rule on N equispaced angles; exact for
//               trigonometric polynomials of degree < N
//   SO(3)       g = Rz(a) Ry(b) Rz(c); a, c trapezoid with N nodes each,
//               cos(b) Gauss-Legendre with M nodes: N*N*M nodes
//   SU(2)       U = exp(i a sz/2) exp(i b sy/2) exp(i c sz/2); a trapezoid on
//               [0, 2pi) with N nodes, c trapezoid on [0, 4pi) with 2N nodes,
//               cos(b) Gauss-Legendre with M nodes: 2*N*N*M nodes
//
// Sums are taken in node order with compensated summation, so results are
// reproducible for a given rule.

#include <utility>
#include <vector>

#include "rectify/group_kernel.hpp"

namespace rectify {

struct QuadratureRule {
  GroupId group = GroupId::Finite;
  std::vector<GroupElement> nodes;
  std::vector<double> weights;
};

QuadratureRule finite_group_rule(std::vector<GroupElement> elements);
QuadratureRule circle_rule(GroupId group, int nodes);
QuadratureRule euler_rule(GroupId group, int azimuth_nodes, int polar_nodes);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

namespace detail {

template <class T>
struct Compensated {
  T sum;
  T carry;

  explicit Compensated(const T& zero) : sum(zero), carry(zero) {}

  void add(const T& value) {
    const T y = value - carry;
    const T t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace detail

/// Integral of f against the normalized Haar measure, approximated by `rule`.
/// `f` maps a GroupElement to a scalar or an Eigen vector/matrix value.
template <class F>
auto haar_integrate(F&& f, const QuadratureRule& rule) {
  using Value = std::decay_t<decltype(f(rule.nodes.front()))>;
  if (rule.nodes.empty()) {
    throw Error(ErrorKind::InvalidArgument, "empty quadrature rule");
  }
  Value first = f(rule.nodes.front());
  Value zero = first * 0.0;
  detail::Compensated<Value> acc(zero);
  acc.add(Value(first * rule.weights.front()));
  for (std::size_t i = 1; i < rule.nodes.size(); ++i) {
    acc.add(Value(f(rule.nodes[i]) * rule.weights[i]));
  }
  return acc.sum;
}

}  // namespace rectify

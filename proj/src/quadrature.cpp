#include "rectify/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace rectify {

namespace {

Matrix rot_z(double a) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 0) = std::cos(a);
  m(0, 1) = -std::sin(a);
  m(1, 0) = std::sin(a);
  m(1, 1) = std::cos(a);
  return m;
}

Matrix rot_y(double b) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 0) = std::cos(b);
  m(0, 2) = std::sin(b);
  m(2, 0) = -std::sin(b);
  m(2, 2) = std::cos(b);
  return m;
}

Matrix su2_z(double a) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::polar(1.0, a / 2.0);
  m(1, 1) = std::polar(1.0, -a / 2.0);
  return m;
}

Matrix su2_y(double b) {
  // exp(i b sigma_y / 2)
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::cos(b / 2.0);
  m(0, 1) = std::sin(b / 2.0);
  m(1, 0) = -std::sin(b / 2.0);
  m(1, 1) = std::cos(b / 2.0);
  return m;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre needs n >= 1");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0, p1 = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

QuadratureRule finite_group_rule(std::vector<GroupElement> elements) {
  if (elements.empty()) throw Error(ErrorKind::InvalidArgument, "finite group rule needs elements");
  QuadratureRule rule;
  rule.group = elements.front().group();
  rule.weights.assign(elements.size(), 1.0 / static_cast<double>(elements.size()));
  rule.nodes = std::move(elements);
  return rule;
}

QuadratureRule circle_rule(GroupId group, int nodes) {
  if (group != GroupId::U1 && group != GroupId::SO2) {
    throw Error(ErrorKind::InvalidArgument, "circle_rule is for U(1) and SO(2)");
  }
  if (nodes < 1) throw Error(ErrorKind::InvalidArgument, "circle_rule needs nodes >= 1");
  QuadratureRule rule;
  rule.group = group;
  rule.weights.assign(nodes, 1.0 / nodes);
  for (int j = 0; j < nodes; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / nodes;
    Matrix m;
    if (group == GroupId::U1) {
      m = Matrix::Constant(1, 1, std::polar(1.0, theta));
    } else {
      m = Matrix::Zero(2, 2);
      m(0, 0) = std::cos(theta);
      m(0, 1) = -std::sin(theta);
      m(1, 0) = std::sin(theta);
      m(1, 1) = std::cos(theta);
    }
    rule.nodes.push_back(GroupElement::unchecked(std::move(m), group));
  }
  return rule;
}

QuadratureRule euler_rule(GroupId group, int azimuth_nodes, int polar_nodes) {
  if (group != GroupId::SO3 && group != GroupId::SU2) {
    throw Error(ErrorKind::InvalidArgument, "euler_rule is for SO(3) and SU(2)");
  }
  if (azimuth_nodes < 1 || polar_nodes < 1) {
    throw Error(ErrorKind::InvalidArgument, "euler_rule needs positive node counts");
  }
  const auto [x, w] = gauss_legendre(polar_nodes);
  const int na = azimuth_nodes;
  const int nc = group == GroupId::SO3 ? azimuth_nodes : 2 * azimuth_nodes;
  const double c_span = group == GroupId::SO3 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  QuadratureRule rule;
  rule.group = group;
  for (int i = 0; i < na; ++i) {
    const double a = 2.0 * std::numbers::pi * i / na;
    for (int k = 0; k < polar_nodes; ++k) {
      const double b = std::acos(x[k]);
      for (int j = 0; j < nc; ++j) {
        const double c = c_span * j / nc;
        Matrix m = group == GroupId::SO3 ? Matrix(rot_z(a) * rot_y(b) * rot_z(c))
                                         : Matrix(su2_z(a) * su2_y(b) * su2_z(c));
        rule.nodes.push_back(GroupElement::unchecked(std::move(m), group));
        rule.weights.push_back(w[k] / (2.0 * na * nc));
      }
    }
  }
  return rule;
}

}  // namespace rectify

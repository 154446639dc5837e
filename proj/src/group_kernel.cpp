#include "rectify/group_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "sampling.hpp"

namespace rectify {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidAlgebraVector: return "InvalidAlgebraVector";
    case ErrorKind::InvalidGroupElement: return "InvalidGroupElement";
    case ErrorKind::LogDomainError: return "LogDomainError";
    case ErrorKind::NormalizationFailure: return "NormalizationFailure";
    case ErrorKind::ActionError: return "ActionError";
    case ErrorKind::CoreAxiomError: return "CoreAxiomError";
    case ErrorKind::InvarianceError: return "InvarianceError";
    case ErrorKind::NotComposable: return "NotComposable";
    case ErrorKind::DefectOverflow: return "DefectOverflow";
    case ErrorKind::DefectTooLarge: return "DefectTooLarge";
    case ErrorKind::RangeEscape: return "RangeEscape";
    case ErrorKind::NonContraction: return "NonContraction";
    case ErrorKind::GridError: return "GridError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

std::string_view to_string(GroupId id) {
  switch (id) {
    case GroupId::Finite: return "finite";
    case GroupId::U1: return "u1";
    case GroupId::SO2: return "so2";
    case GroupId::SO3: return "so3";
    case GroupId::SU2: return "su2";
  }
  return "unknown";
}

GroupId parse_group_id(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::erase(lower, '(');
  std::erase(lower, ')');
  if (lower == "finite") return GroupId::Finite;
  if (lower == "u1") return GroupId::U1;
  if (lower == "so2") return GroupId::SO2;
  if (lower == "so3") return GroupId::SO3;
  if (lower == "su2") return GroupId::SU2;
  throw Error(ErrorKind::ConfigError, "unknown group tag '" + std::string(text) + "'");
}

std::string_view to_string(RawNorm norm) {
  switch (norm) {
    case RawNorm::Euclidean: return "euclidean";
    case RawNorm::Frobenius: return "frobenius";
    case RawNorm::MaxAngle: return "max_angle";
  }
  return "unknown";
}

RawNorm parse_raw_norm(std::string_view text) {
  if (text == "euclidean") return RawNorm::Euclidean;
  if (text == "frobenius") return RawNorm::Frobenius;
  if (text == "max_angle") return RawNorm::MaxAngle;
  throw Error(ErrorKind::ConfigError, "unknown raw norm '" + std::string(text) + "'");
}

int matrix_dim(GroupId id) {
  switch (id) {
    case GroupId::U1: return 1;
    case GroupId::SO2: return 2;
    case GroupId::SO3: return 3;
    case GroupId::SU2: return 2;
    case GroupId::Finite: return 0;
  }
  return 0;
}

int algebra_dim(GroupId id) {
  switch (id) {
    case GroupId::U1:
    case GroupId::SO2: return 1;
    case GroupId::SO3:
    case GroupId::SU2: return 3;
    case GroupId::Finite: return 0;
  }
  return 0;
}

namespace {

const Complex kI{0.0, 1.0};

bool is_real_group(GroupId id) { return id == GroupId::SO2 || id == GroupId::SO3; }

Matrix basis_element(GroupId id, int j) {
  const int n = matrix_dim(id);
  Matrix b = Matrix::Zero(n, n);
  switch (id) {
    case GroupId::U1:
      b(0, 0) = kI;
      break;
    case GroupId::SO2:
      b(0, 1) = -1.0;
      b(1, 0) = 1.0;
      break;
    case GroupId::SO3: {
      // L_x, L_y, L_z: hat(w) v = w x v.
      const int a = (j + 1) % 3;
      const int c = (j + 2) % 3;
      b(c, a) = 1.0;
      b(a, c) = -1.0;
      break;
    }
    case GroupId::SU2:
      // i sigma_x, i sigma_y, i sigma_z
      if (j == 0) {
        b(0, 1) = kI;
        b(1, 0) = kI;
      } else if (j == 1) {
        b(0, 1) = 1.0;
        b(1, 0) = -1.0;
      } else {
        b(0, 0) = kI;
        b(1, 1) = -kI;
      }
      break;
    case GroupId::Finite:
      break;
  }
  return b;
}

struct Basis {
  std::array<Matrix, 3> elements;
  std::array<double, 3> gram{};  // tr(B_j^* B_j)
};

const Basis& basis_for(GroupId id) {
  static const std::array<Basis, 5> table = [] {
    std::array<Basis, 5> t;
    for (GroupId g : {GroupId::U1, GroupId::SO2, GroupId::SO3, GroupId::SU2}) {
      Basis& b = t[static_cast<int>(g)];
      for (int j = 0; j < algebra_dim(g); ++j) {
        b.elements[j] = basis_element(g, j);
        b.gram[j] = (b.elements[j].adjoint() * b.elements[j]).trace().real();
      }
    }
    return t;
  }();
  return table[static_cast<int>(id)];
}

void require_lie(GroupId id, const char* what) {
  if (id == GroupId::Finite) {
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": finite groups carry no Lie algebra");
  }
}

bool exactly_identity(const Matrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (m(r, c) != (r == c ? Complex(1.0) : Complex(0.0))) return false;
    }
  }
  return true;
}

}  // namespace

GroupElement::GroupElement(Matrix matrix, GroupId group) : matrix_(std::move(matrix)), group_(group) {
  if (group_ != GroupId::Finite && matrix_.rows() != matrix_dim(group_)) {
    throw Error(ErrorKind::InvalidGroupElement, "matrix has the wrong dimension for the group");
  }
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
    throw Error(ErrorKind::InvalidGroupElement, "group element matrix must be square and non-empty");
  }
  const double residual = membership_residual();
  if (!(residual <= kTauGroup)) {
    throw Error(ErrorKind::InvalidGroupElement,
                "matrix is not in " + std::string(to_string(group_)) +
                    " (residual " + std::to_string(residual) + ")");
  }
}

GroupElement GroupElement::identity(GroupId group) {
  GroupElement g;
  const int n = group == GroupId::Finite ? 1 : matrix_dim(group);
  g.matrix_ = Matrix::Identity(n, n);
  g.group_ = group;
  return g;
}

GroupElement GroupElement::unchecked(Matrix matrix, GroupId group) {
  GroupElement g;
  g.matrix_ = std::move(matrix);
  g.group_ = group;
  return g;
}

GroupElement GroupElement::inverse() const { return unchecked(matrix_.adjoint(), group_); }

GroupElement operator*(const GroupElement& a, const GroupElement& b) {
  return GroupElement::unchecked(a.matrix_ * b.matrix_, a.group_);
}

double GroupElement::membership_residual() const {
  if (!matrix_.allFinite()) return std::numeric_limits<double>::infinity();
  const int n = static_cast<int>(matrix_.rows());
  double residual = (matrix_.adjoint() * matrix_ - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (group_ == GroupId::SO2 || group_ == GroupId::SO3 || group_ == GroupId::SU2) {
    residual = std::max(residual, std::abs(matrix_.determinant() - Complex(1.0)));
  }
  if (is_real_group(group_)) {
    residual = std::max(residual, matrix_.imag().cwiseAbs().maxCoeff());
  }
  return residual;
}

NormedAlgebra::NormedAlgebra(GroupId algebra, RawNorm raw_norm, double scale,
                             double injectivity_margin)
    : id_(algebra), raw_norm_(raw_norm), scale_(scale), margin_(injectivity_margin) {
  require_lie(algebra, "NormedAlgebra");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorKind::InvalidArgument, "norm scale must be positive and finite");
  }
}

double NormedAlgebra::raw_weight() const noexcept {
  switch (raw_norm_) {
    case RawNorm::Euclidean:
    case RawNorm::MaxAngle:
      // The largest eigen-angle of hat(u) equals |coords| for all four bases.
      return 1.0;
    case RawNorm::Frobenius:
      return std::sqrt(basis_for(id_).gram[0]);
  }
  return 1.0;
}

double NormedAlgebra::raw(const Coords& coords) const { return raw_weight() * coords.norm(); }

Matrix NormedAlgebra::hat(const Coords& coords) const {
  const Basis& basis = basis_for(id_);
  const int n = matrix_dim(id_);
  Matrix m = Matrix::Zero(n, n);
  for (int j = 0; j < dim(); ++j) m += coords[j] * basis.elements[j];
  return m;
}

Coords NormedAlgebra::vee(const Matrix& m) const {
  const Basis& basis = basis_for(id_);
  Coords c(dim());
  for (int j = 0; j < dim(); ++j) {
    c[j] = (basis.elements[j].adjoint() * m).trace().real() / basis.gram[j];
  }
  return c;
}

Coords NormedAlgebra::bracket(const Coords& u, const Coords& v) const {
  const Matrix a = hat(u);
  const Matrix b = hat(v);
  return vee(a * b - b * a);
}

double NormedAlgebra::raw_injectivity_radius(GroupId id, RawNorm norm) {
  require_lie(id, "raw_injectivity_radius");
  // Every basis is scaled so that |coords| is the largest eigen-angle.
  const NormedAlgebra probe(id, norm, 1.0, 0.0);
  return probe.raw_weight() * std::numbers::pi;
}

GroupElement exp_map(const Coords& u, const NormedAlgebra& alg) {
  if (u.size() != alg.dim()) {
    throw Error(ErrorKind::InvalidAlgebraVector, "coordinate vector has the wrong dimension");
  }
  if (!u.allFinite()) {
    throw Error(ErrorKind::InvalidAlgebraVector, "non-finite algebra vector");
  }
  const GroupId id = alg.id();
  if ((u.array() == 0.0).all()) return GroupElement::identity(id);

  const Matrix x = alg.hat(u);
  Matrix result;
  if (x.rows() == 1) {
    result = Matrix::Constant(1, 1, std::exp(x(0, 0)));
  } else {
    // x = iH with H Hermitian, so exp(x) = V diag(e^{i lambda}) V^*.
    const Matrix h = -kI * x;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const auto& vals = solver.eigenvalues();
    const Matrix& vecs = solver.eigenvectors();
    Matrix diag = Matrix::Zero(x.rows(), x.cols());
    for (int j = 0; j < vals.size(); ++j) diag(j, j) = std::exp(kI * vals[j]);
    result = vecs * diag * vecs.adjoint();
  }
  if (is_real_group(id)) result = result.real().cast<Complex>();
  return GroupElement::unchecked(std::move(result), id);
}

GroupElement exp_map(const AlgebraVector& u, const NormedAlgebra& alg) {
  if (u.algebra != alg.id()) {
    throw Error(ErrorKind::InvalidAlgebraVector, "algebra tag does not match the normed algebra");
  }
  return exp_map(u.coords, alg);
}

Coords log_coords(const GroupElement& g, const NormedAlgebra& alg) {
  if (g.group() != alg.id()) {
    throw Error(ErrorKind::InvalidArgument, "group element and algebra tags differ");
  }
  const Matrix& m = g.matrix();
  if (!m.allFinite()) {
    throw Error(ErrorKind::LogDomainError, "non-finite group element");
  }
  if (exactly_identity(m)) return Coords::Zero(alg.dim());

  Matrix x;
  if (m.rows() == 1) {
    x = Matrix::Constant(1, 1, kI * std::arg(m(0, 0)));
  } else {
    // Normal matrix: the Schur form is diagonal up to rounding.
    Eigen::ComplexSchur<Matrix> schur(m);
    const Matrix& t = schur.matrixT();
    const Matrix& q = schur.matrixU();
    Matrix diag = Matrix::Zero(m.rows(), m.cols());
    for (int j = 0; j < m.rows(); ++j) diag(j, j) = kI * std::arg(t(j, j));
    x = q * diag * q.adjoint();
  }
  Coords c = alg.vee(x);
  // At the cut locus (e.g. -I in SU(2)) the principal matrix log has repeated
  // eigen-angle pi and is not in the algebra.
  if ((x - alg.hat(c)).cwiseAbs().maxCoeff() > 1e-6) {
    throw Error(ErrorKind::LogDomainError, "principal logarithm is not in the Lie algebra");
  }
  const double n = alg.norm(c);
  if (!(n <= alg.injectivity_margin())) {
    throw Error(ErrorKind::LogDomainError,
                "element lies outside the injectivity region (|log| = " + std::to_string(n) +
                    ", margin " + std::to_string(alg.injectivity_margin()) + ")");
  }
  return c;
}

AlgebraVector log_map(const GroupElement& g, const NormedAlgebra& alg) {
  return AlgebraVector{log_coords(g, alg), alg.id()};
}

double left_distance(const GroupElement& g, const GroupElement& h, const NormedAlgebra& alg) {
  return alg.norm(log_coords(g.inverse() * h, alg));
}

double distance_to_identity(const GroupElement& g, const NormedAlgebra& alg) {
  return alg.norm(log_coords(g, alg));
}

void AmbientSets::validate() const {
  if (!(w_radius >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "W_radius must be >= 1 (W contains B_1(e))");
  }
  if (!(k_radius > w_radius)) {
    throw Error(ErrorKind::InvalidArgument, "K_radius must exceed W_radius");
  }
}

namespace {

constexpr double kInjectivityGuard = 1e-3;

double commutator_scale(GroupId id, double raw_weight, std::uint64_t seed) {
  const NormedAlgebra coords_alg(id, RawNorm::Euclidean, 1.0, 0.0);
  const int dim = coords_alg.dim();
  std::mt19937_64 rng(seed);
  double sup = 0.0;
  auto probe = [&](const Coords& u) {
    Eigen::MatrixXd ad(dim, dim);
    for (int j = 0; j < dim; ++j) {
      ad.col(j) = coords_alg.bracket(u, Coords::Unit(dim, j));
    }
    const double s = Eigen::JacobiSVD<Eigen::MatrixXd>(ad).singularValues()(0) / u.norm();
    sup = std::max(sup, s);
  };
  for (int j = 0; j < dim; ++j) probe(Coords::Unit(dim, j));
  for (int i = 0; i < 512; ++i) probe(detail::unit_direction(rng, dim));
  return sup / raw_weight;
}

}  // namespace

NormedAlgebra normalize_algebra_norm(GroupId algebra, RawNorm raw_norm,
                                     double required_margin, std::uint64_t seed) {
  require_lie(algebra, "normalize_algebra_norm");
  if (!(required_margin >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "required injectivity margin must be >= 1");
  }
  const double raw_radius = NormedAlgebra::raw_injectivity_radius(algebra, raw_norm);
  const double raw_weight = NormedAlgebra(algebra, raw_norm, 1.0, 0.0).raw_weight();

  const double lambda_comm = commutator_scale(algebra, raw_weight, seed);
  const double lambda_inj = required_margin / (raw_radius * (1.0 - kInjectivityGuard));
  const double lambda = std::max(lambda_comm, lambda_inj);
  // When injectivity binds the margin is required_margin exactly; the product
  // below can round one ulp short of it.
  const double margin = lambda_inj >= lambda_comm ? required_margin
                                                  : lambda * raw_radius * (1.0 - kInjectivityGuard);
  NormedAlgebra alg(algebra, raw_norm, lambda, margin);

  // Re-verify both normalization conditions on a seeded sample.
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  for (int i = 0; i < 4096; ++i) {
    const Coords u = detail::uniform_ball(rng, alg, 1.0);
    const Coords v = detail::uniform_ball(rng, alg, 1.0);
    const double lhs = alg.norm(alg.bracket(u, v));
    if (lhs > alg.norm(u) * alg.norm(v) + 1e-12) {
      throw Error(ErrorKind::NormalizationFailure,
                  "commutator condition fails after scaling (sample " + std::to_string(i) + ")",
                  {i});
    }
    const Coords w = detail::uniform_ball(rng, alg, margin);
    const Coords back = log_coords(exp_map(w, alg), alg);
    if (alg.norm(back - w) > kTauAlg) {
      throw Error(ErrorKind::NormalizationFailure,
                  "exp is not injective on the recorded margin (sample " + std::to_string(i) + ")",
                  {i});
    }
  }
  return alg;
}

BchRatios bch_terms(const Coords& u, const Coords& v, const NormedAlgebra& alg) {
  const GroupElement eu = exp_map(u, alg);
  const GroupElement ev = exp_map(v, alg);
  const Coords w = log_coords(eu * ev, alg);
  BchRatios r;
  r.gap = alg.norm(w - (u + v));
  r.product_norm = alg.norm(w);
  r.conj_norm = distance_to_identity(eu * ev * eu.inverse(), alg);
  return r;
}

}  // namespace rectify

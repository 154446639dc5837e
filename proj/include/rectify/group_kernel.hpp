#pragma once

// Compact matrix group numerics: group elements, normalized Lie algebra norms,
// exp/log, the left-invariant distance and the analytic constants used by the
// averaging iteration.

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rectify/errors.hpp"

namespace rectify {

using Complex = std::complex<double>;
/// Matrices of the defining representations; n <= 3 for every supported group.
using Matrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
/// Coordinates in the fixed ordered basis of a Lie algebra (dim <= 3).
using Coords = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;

enum class GroupId { Finite, U1, SO2, SO3, SU2 };

std::string_view to_string(GroupId id);
GroupId parse_group_id(std::string_view text);

/// Dimension of the defining representation.
int matrix_dim(GroupId id);
/// Dimension of the Lie algebra (0 for finite groups).
int algebra_dim(GroupId id);

inline constexpr double kTauGroup = 1e-10;
inline constexpr double kTauAlg = 1e-9;
inline constexpr double kTauRound = 1e-12;

class GroupElement {
 public:
  /// Validated construction; throws InvalidGroupElement when the matrix is not
  /// in the group to kTauGroup.
  GroupElement(Matrix matrix, GroupId group);

  static GroupElement identity(GroupId group);
  /// No membership check. For products of already valid elements.
  static GroupElement unchecked(Matrix matrix, GroupId group);

  const Matrix& matrix() const noexcept { return matrix_; }
  GroupId group() const noexcept { return group_; }

  GroupElement inverse() const;
  friend GroupElement operator*(const GroupElement& a, const GroupElement& b);

  /// Unitarity residual ||M^* M - I||_max plus the determinant condition.
  double membership_residual() const;

 private:
  GroupElement() = default;
  Matrix matrix_;
  GroupId group_ = GroupId::Finite;
};

struct AlgebraVector {
  Coords coords;
  GroupId algebra = GroupId::SO3;
};

enum class RawNorm { Euclidean, Frobenius, MaxAngle };

std::string_view to_string(RawNorm norm);
RawNorm parse_raw_norm(std::string_view text);

/// A Lie algebra with its normalized norm |u| = scale * raw(u).
///
/// Every supported raw norm is a multiple of the Euclidean norm of the
/// coordinates, so the normalized norm is `scale * raw_weight * |coords|_2`.
class NormedAlgebra {
 public:
  NormedAlgebra(GroupId algebra, RawNorm raw_norm, double scale,
                double injectivity_margin);

  GroupId id() const noexcept { return id_; }
  RawNorm raw_norm() const noexcept { return raw_norm_; }
  int dim() const noexcept { return algebra_dim(id_); }
  double scale() const noexcept { return scale_; }
  double injectivity_margin() const noexcept { return margin_; }
  bool is_abelian() const noexcept { return id_ == GroupId::U1 || id_ == GroupId::SO2; }

  double raw_weight() const noexcept;
  double raw(const Coords& coords) const;
  double norm(const Coords& coords) const { return scale_ * raw(coords); }
  double norm(const AlgebraVector& u) const { return norm(u.coords); }

  /// Matrix of the algebra element in the defining representation.
  Matrix hat(const Coords& coords) const;
  /// Projection of a matrix onto the algebra basis.
  Coords vee(const Matrix& m) const;
  /// Coordinates of [u, v].
  Coords bracket(const Coords& u, const Coords& v) const;

  /// Radius of the open ball (in raw coordinates) where exp is injective.
  static double raw_injectivity_radius(GroupId id, RawNorm norm);

 private:
  GroupId id_;
  RawNorm raw_norm_;
  double scale_;
  double margin_;
};

GroupElement exp_map(const AlgebraVector& u, const NormedAlgebra& alg);
GroupElement exp_map(const Coords& u, const NormedAlgebra& alg);

/// Principal logarithm (eigen-angles in (-pi, pi]). Throws LogDomainError
/// when the result lies beyond the algebra's injectivity margin.
AlgebraVector log_map(const GroupElement& g, const NormedAlgebra& alg);
Coords log_coords(const GroupElement& g, const NormedAlgebra& alg);

/// Chooses the smallest scale satisfying the commutator condition and the
/// injectivity requirement that the normalized margin reaches
/// `required_margin` (at least the closed unit ball). Both conditions are
/// re-verified on a seeded sample.
NormedAlgebra normalize_algebra_norm(GroupId algebra, RawNorm raw_norm,
                                     double required_margin = 1.0,
                                     std::uint64_t seed = 0x5eed);

/// |log(g^{-1} h)| in the normalized norm.
double left_distance(const GroupElement& g, const GroupElement& h,
                     const NormedAlgebra& alg);
/// left_distance(e, g).
double distance_to_identity(const GroupElement& g, const NormedAlgebra& alg);

struct AmbientSets {
  double w_radius = 1.5;
  double k_radius = 2.5;

  /// Throws InvalidArgument unless w_radius >= 1 and k_radius > w_radius.
  void validate() const;
};

/// Empirical maxima before the safety factor is applied.
struct BchEmpirical {
  double c = 0.0;
  double c_prime = 0.0;
  double c_dprime = 0.0;
  double lip_min = 1.0;  // smallest observed exp Lipschitz ratio
  double lip_max = 1.0;  // largest observed exp Lipschitz ratio
  double adjoint = 1.0;  // largest observed adjoint distortion over K
};

struct BchConstants {
  double c = 0.0;
  double c_prime = 0.0;
  double c_dprime = 0.0;
  double d = 0.0;
  double d_prime = 0.0;
  double c_l = 0.0;
  double c_d = 0.0;
  int sample_count = 0;
  double safety_factor = 1.0;
  std::uint64_t seed = 0;
  double excluded_fraction = 0.0;  // pairs dropped from the c' ratio
  BchEmpirical empirical;
};

inline constexpr double kCPrimeFloor = 1e-6;

BchConstants estimate_bch_constants(const NormedAlgebra& alg, const AmbientSets& sets,
                                    int sample_count, double safety_factor = 1.25,
                                    std::uint64_t seed = 1);

/// Re-checks the three BCH inequalities on a fresh sample.
struct BchValidation {
  int checked = 0;
  int violations_c = 0;
  int violations_c_prime = 0;
  int violations_c_dprime = 0;
  double worst_ratio_c = 0.0;
  double worst_ratio_c_prime = 0.0;
  double worst_ratio_c_dprime = 0.0;
  bool passed() const {
    return violations_c == 0 && violations_c_prime == 0 && violations_c_dprime == 0;
  }
};

BchValidation validate_bch_constants(const BchConstants& k, const NormedAlgebra& alg,
                                     int sample_count, std::uint64_t seed);

/// The three BCH ratios for one pair, exposed for oracles and diagnostics.
struct BchRatios {
  double gap = 0.0;          // |log(e^u e^v) - (u+v)|
  double product_norm = 0.0; // |log(e^u e^v)|
  double conj_norm = 0.0;    // |e^u e^v e^-u|
};
BchRatios bch_terms(const Coords& u, const Coords& v, const NormedAlgebra& alg);

}  // namespace rectify

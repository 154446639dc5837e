#pragma once

// Complexified rotation action of SO(2) on C^2 with the compact core SO(2),
// discretized on a lattice.
//
// With w+ = z1 + i z2 and w- = z1 - i z2 a complex angle zeta = theta + i eta
// acts by w+ -> e^{i zeta} w+, w- -> e^{-i zeta} w-. Writing w+ = rho+ e^{i alpha},
// w- = rho- e^{i beta}:
//   alpha += theta, beta -= theta, rho+ *= e^{-eta}, rho- *= e^{eta}.
// Grid points are (l+, a, l-, b) with rho = r e^{-l h}, l in [1, L], h =
// eta_max / (M + 1), and angles 2 pi a / N. An arrow (j, m, x) is the complex
// angle 2 pi j / N + i m h applied at x, |m| <= M, kept only when its target
// stays on the grid. Products whose total |m| exceeds M (|eta| >= eta_max) are
// outside the mask. The real slice is l+ = l-, b = -a, and the core is m = 0.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "rectify/group_kernel.hpp"
#include "rectify/groupoid.hpp"

namespace rectify {

using C2 = std::array<Complex, 2>;
using ComplexFn = std::function<Complex(const C2&)>;

struct ComplexModelParams {
  double r = 1.0;
  double eta_max = 0.2;
  int angle_nodes = 64;   // N
  int radial_levels = 2;  // L
  int eta_steps = 1;      // M
};

struct GridPoint {
  int lp = 1;  // level of rho+, 1..L
  int a = 0;   // angle index of w+
  int lm = 1;  // level of rho-
  int b = 0;   // angle index of w-
};

struct ComplexArrow {
  int j = 0;  // real angle index
  int m = 0;  // imaginary angle steps
  int x = 0;  // source point
};

class ComplexModel {
 public:
  explicit ComplexModel(const ComplexModelParams& params);

  const ComplexModelParams& params() const noexcept { return params_; }
  int angle_nodes() const noexcept { return params_.angle_nodes; }
  double eta_step() const noexcept { return eta_step_; }

  int point_count() const noexcept;
  GridPoint point(int index) const;
  int index(const GridPoint& p) const;
  C2 coords(int index) const;
  bool is_real(int index) const;

  /// Target of the arrow, or nullopt when it leaves the grid.
  std::optional<int> act(const ComplexArrow& arrow) const;
  /// Product (second)(first), defined when t(first) = s(second) and the
  /// total eta stays below eta_max.
  std::optional<ComplexArrow> compose(const ComplexArrow& second, const ComplexArrow& first) const;
  bool in_mask(const ComplexArrow& second, const ComplexArrow& first) const {
    return compose(second, first).has_value();
  }

  /// Real slice points in disk order (level-major, then angle).
  int real_point_count() const noexcept;
  int real_point(int level, int angle) const;
  /// Real coordinates of the disk point level * N + angle.
  C2 disk_coords(int disk_index) const;

  /// Action groupoid of Z_N rotating the polar disk lattice, objects indexed
  /// level-major: (level - 1) * N + angle.
  FiniteGroupoid real_action_groupoid() const;

  /// Explicit arrow list and groupoid. Only for small instances.
  struct Materialized {
    std::vector<ComplexArrow> arrows;
    FiniteGroupoid groupoid;
    std::vector<ArrowId> core_arrows;
  };
  Materialized materialize() const;

 private:
  ComplexModelParams params_;
  double eta_step_;
  std::vector<double> radii_;  // radii_[l - 1] = r e^{-l h}
};

struct ModelCheck {
  long long real_arrows_compared = 0;
  long long real_mismatches = 0;
  long long core_pairs_checked = 0;
  long long core_pairs_escaping = 0;
  bool passed() const { return real_mismatches == 0 && core_pairs_escaping == 0; }
};

/// Builds the model and checks it: the real slice against the real action
/// groupoid arrow for arrow, and no-escape of the core over every grid pair.
/// Throws InvalidArgument on bad parameters or a failed check.
ComplexModel build_complexified_model(const ComplexModelParams& params, ModelCheck* check = nullptr);
ModelCheck check_complexified_model(const ComplexModel& model);

/// F(z) = (1/N) sum_j f(R(2 pi j / N) z), the trapezoid rule for the Haar
/// integral over the core.
ComplexFn core_average_function(ComplexFn f, const ComplexModel& model);
/// Core average at a grid point, summed over the orbit in angle-index order
/// so that points of one orbit get bit-identical values.
Complex core_average_at(const ComplexFn& f, const ComplexModel& model, int point);

/// Values of a function on the Cartesian patch center + h * (i1 + i j1, i2 + i j2)
/// with offsets in [-half_width, half_width].
struct SampledFunction {
  C2 center{};
  double h = 0.0;
  int half_width = 0;
  std::vector<Complex> values;

  int side() const { return 2 * half_width + 1; }
  Complex at(int x1, int y1, int x2, int y2) const;
};

SampledFunction sample_function(const ComplexFn& f, const C2& center, double h, int half_width);

/// max over interior nodes and both coordinates of |(1/2)(D_x + i D_y) F|
/// with centered differences. Throws GridError when there is no interior node.
double cr_residual(const SampledFunction& f);

/// Largest difference, over the real slice, between averaging over the
/// complex model's core and integrating against a Haar density on the real
/// action groupoid.
double real_restriction_check(const ComplexFn& f, const ComplexModel& model,
                              const HaarDensity& real_density);

}  // namespace rectify

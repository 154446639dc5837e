#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "rectify/holomorphic.hpp"

using namespace rectify;

namespace {

constexpr Complex kI{0.0, 1.0};

ComplexModelParams small_params(int n) {
  ComplexModelParams p;
  p.angle_nodes = n;
  return p;
}

double max_abs_over_grid(const ComplexFn& f, const ComplexModel& model) {
  double worst = 0.0;
  for (int x = 0; x < model.point_count(); ++x) worst = std::max(worst, std::abs(f(model.coords(x))));
  return worst;
}

}  // namespace

TEST(ComplexModel, DefaultModelPassesItsChecks) {
  ModelCheck check;
  const ComplexModel model = build_complexified_model(ComplexModelParams{}, &check);
  EXPECT_TRUE(check.passed());
  EXPECT_EQ(check.real_mismatches, 0);
  EXPECT_EQ(check.core_pairs_escaping, 0);
  EXPECT_GT(check.real_arrows_compared, 0);
  EXPECT_EQ(model.angle_nodes(), 64);
}

TEST(ComplexModel, RejectsBadParameters) {
  ComplexModelParams p;
  p.r = 0.0;
  EXPECT_THROW(build_complexified_model(p), Error);
  p = ComplexModelParams{};
  p.eta_max = -0.1;
  EXPECT_THROW(build_complexified_model(p), Error);
}

TEST(ComplexModel, PointIndexingRoundTrips) {
  const ComplexModel model(small_params(8));
  for (int x = 0; x < model.point_count(); ++x) EXPECT_EQ(model.index(model.point(x)), x);
  const int real = model.real_point(2, 3);
  EXPECT_TRUE(model.is_real(real));
  const C2 z = model.coords(real);
  EXPECT_NEAR(z[0].imag(), 0.0, 1e-15);
  EXPECT_NEAR(z[1].imag(), 0.0, 1e-15);
}

TEST(ComplexModel, MaskExcludesLargeImaginaryAngle) {
  ComplexModelParams p = small_params(8);
  p.radial_levels = 3;
  const ComplexModel model(p);
  // Both single steps stay on the grid but their product needs |eta| = 2h.
  const int x = model.index(GridPoint{1, 0, 3, 0});
  ASSERT_TRUE(model.act(ComplexArrow{0, 2 - 1, *model.act(ComplexArrow{1, 1, x})}).has_value());
  const ComplexArrow first{1, 1, x};
  const auto mid = model.act(first);
  ASSERT_TRUE(mid.has_value());
  EXPECT_FALSE(model.compose(ComplexArrow{0, 1, *mid}, first).has_value());
  const auto back = model.compose(ComplexArrow{2, -1, *mid}, first);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(back->m, 0);
  EXPECT_EQ(back->j, 3);
  // Real arrows never escape.
  EXPECT_TRUE(model.compose(ComplexArrow{5, 0, *mid}, first).has_value());
}

TEST(ComplexModel, MaterializedGroupoidValidates) {
  ComplexModelParams p;
  p.angle_nodes = 3;
  const ComplexModel model(p);
  const auto mat = model.materialize();
  EXPECT_EQ(mat.groupoid.arrow_count(), 162);
  EXPECT_TRUE(validate_groupoid(mat.groupoid).passed);
  EXPECT_NO_THROW(build_core(mat.groupoid, mat.core_arrows));
  EXPECT_LT(mat.groupoid.domain_size(),
            static_cast<std::size_t>(mat.groupoid.arrow_count()) * mat.groupoid.arrow_count());
}

TEST(CoreAverage, InvariantFunctionIsReproduced) {
  const ComplexModel model(small_params(64));
  const ComplexFn f = [](const C2& z) { return z[0] * z[0] + z[1] * z[1]; };
  const ComplexFn avg = core_average_function(f, model);
  double worst = 0.0;
  for (int x = 0; x < model.point_count(); x += 7) worst = std::max(worst, std::abs(avg(model.coords(x)) - f(model.coords(x))));
  EXPECT_LT(worst, 1e-14);
}

TEST(CoreAverage, WeightOneModesVanish) {
  const ComplexModel model(small_params(64));
  const ComplexFn mode = [](const C2& z) { return z[0] + kI * z[1]; };
  const ComplexFn mixed = [](const C2& z) {
    const Complex wp = z[0] + kI * z[1];
    return wp * wp * (z[0] - kI * z[1]);
  };
  EXPECT_LT(max_abs_over_grid(core_average_function(mode, model), model), 1e-15);
  EXPECT_LT(max_abs_over_grid(core_average_function(mixed, model), model), 1e-15);
}

TEST(CoreAverage, ProjectionAndOrbitInvariance) {
  const ComplexModel model(small_params(32));
  const ComplexFn f = [](const C2& z) { return std::exp(z[0]) + z[0] * z[1] * z[1]; };
  const ComplexFn once = core_average_function(f, model);
  const ComplexFn twice = core_average_function(once, model);
  double worst = 0.0;
  for (int x = 0; x < model.point_count(); x += 5) worst = std::max(worst, std::abs(twice(model.coords(x)) - once(model.coords(x))));
  EXPECT_LT(worst, 1e-13);
  for (int x = 0; x < model.point_count(); x += 11) {
    const Complex v = core_average_at(f, model, x);
    for (int j = 0; j < model.angle_nodes(); ++j) {
      EXPECT_EQ(core_average_at(f, model, *model.act(ComplexArrow{j, 0, x})), v);
    }
  }
}

TEST(CauchyRiemann, ConstantAndAntiHolomorphic) {
  const C2 c{Complex(0.1, 0.2), Complex(-0.3, 0.0)};
  const ComplexFn one = [](const C2&) { return Complex(2.0, -1.0); };
  EXPECT_EQ(cr_residual(sample_function(one, c, 1e-2, 2)), 0.0);
  const ComplexFn anti = [](const C2& z) { return std::conj(z[0]); };
  for (double h : {1e-2, 5e-3, 2.5e-3}) EXPECT_NEAR(cr_residual(sample_function(anti, c, h, 2)), 1.0, 1e-10);
}

TEST(CauchyRiemann, QuadraticIsDifferencedExactly) {
  // Centered differences are exact on quadratics, so only rounding remains.
  const C2 c{Complex(0.3, 0.1), Complex(-0.2, 0.05)};
  const ComplexFn f = [](const C2& z) { return z[0] * z[0]; };
  for (double h : {1e-2, 5e-3, 2.5e-3}) EXPECT_LT(cr_residual(sample_function(f, c, h, 2)), 1e-11);
}

TEST(CauchyRiemann, SecondOrderOnAveragedExponential) {
  const ComplexModel model(small_params(64));
  const ComplexFn f = [](const C2& z) { return std::exp(z[0]) + 0.5 * std::exp(kI * z[1]); };
  const ComplexFn avg = core_average_function(f, model);
  const C2 c{Complex(0.3, 0.1), Complex(-0.2, 0.05)};
  const double r1 = cr_residual(sample_function(avg, c, 1e-2, 2));
  const double r2 = cr_residual(sample_function(avg, c, 5e-3, 2));
  EXPECT_GT(std::log2(r1 / r2), 1.9);
}

TEST(CauchyRiemann, GridTooSmall) {
  const ComplexFn f = [](const C2& z) { return z[0]; };
  try {
    cr_residual(sample_function(f, C2{}, 1e-2, 0));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridError);
  }
}

TEST(RealRestriction, Examples) {
  const ComplexModel model(small_params(16));
  const FiniteGroupoid real = model.real_action_groupoid();
  const Core core = full_core(real);
  const HaarDensity mu = uniform_haar_density(core);
  const ComplexFn invariant = [](const C2& z) { return z[0] * z[0] + z[1] * z[1]; };
  EXPECT_LT(real_restriction_check(invariant, model, mu), 1e-15);
  const ComplexFn re_mode = [](const C2& z) {
    return 0.5 * ((z[0] + kI * z[1]) + (z[0] - kI * z[1]));
  };
  EXPECT_LT(real_restriction_check(re_mode, model, mu), 1e-15);
  // cos(3 theta) r^3 + sin(5 theta) r^5 as a polynomial in w+ and w-.
  const ComplexFn trig = [](const C2& z) {
    const Complex wp = z[0] + kI * z[1], wm = z[0] - kI * z[1];
    return 0.5 * (std::pow(wp, 3) + std::pow(wm, 3)) + (std::pow(wp, 5) - std::pow(wm, 5)) / (2.0 * kI);
  };
  EXPECT_LT(real_restriction_check(trig, model, mu), 1e-13);
}

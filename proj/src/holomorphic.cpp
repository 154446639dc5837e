#include "rectify/holomorphic.hpp"

#include <cmath>
#include <numbers>

#include "rectify/quadrature.hpp"

namespace rectify {

namespace {

constexpr Complex kI{0.0, 1.0};

int wrap(int a, int n) {
  const int r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

ComplexModel::ComplexModel(const ComplexModelParams& params) : params_(params) {
  if (!(params_.r > 0.0) || !(params_.eta_max > 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "complex model needs r > 0 and eta_max > 0");
  }
  if (params_.angle_nodes < 1 || params_.radial_levels < 1 || params_.eta_steps < 0) {
    throw Error(ErrorKind::InvalidArgument, "complex model grid sizes must be positive");
  }
  eta_step_ = params_.eta_max / (params_.eta_steps + 1);
  for (int l = 1; l <= params_.radial_levels; ++l) {
    radii_.push_back(params_.r * std::exp(-l * eta_step_));
  }
}

int ComplexModel::point_count() const noexcept {
  const int side = params_.radial_levels * params_.angle_nodes;
  return side * side;
}

GridPoint ComplexModel::point(int index) const {
  const int n = params_.angle_nodes;
  const int side = params_.radial_levels * n;
  const int plus = index / side;
  const int minus = index % side;
  return GridPoint{plus / n + 1, plus % n, minus / n + 1, minus % n};
}

int ComplexModel::index(const GridPoint& p) const {
  const int n = params_.angle_nodes;
  const int side = params_.radial_levels * n;
  return ((p.lp - 1) * n + p.a) * side + (p.lm - 1) * n + p.b;
}

C2 ComplexModel::coords(int idx) const {
  const GridPoint p = point(idx);
  const double step = 2.0 * std::numbers::pi / params_.angle_nodes;
  const Complex wp = std::polar(radii_[p.lp - 1], step * p.a);
  const Complex wm = std::polar(radii_[p.lm - 1], step * p.b);
  return C2{(wp + wm) / 2.0, (wp - wm) / (2.0 * kI)};
}

bool ComplexModel::is_real(int idx) const {
  const GridPoint p = point(idx);
  return p.lp == p.lm && p.b == wrap(-p.a, params_.angle_nodes);
}

std::optional<int> ComplexModel::act(const ComplexArrow& arrow) const {
  if (arrow.j < 0 || arrow.j >= params_.angle_nodes || std::abs(arrow.m) > params_.eta_steps ||
      arrow.x < 0 || arrow.x >= point_count()) {
    return std::nullopt;
  }
  GridPoint p = point(arrow.x);
  p.lp += arrow.m;
  p.lm -= arrow.m;
  if (p.lp < 1 || p.lp > params_.radial_levels || p.lm < 1 || p.lm > params_.radial_levels) {
    return std::nullopt;
  }
  p.a = wrap(p.a + arrow.j, params_.angle_nodes);
  p.b = wrap(p.b - arrow.j, params_.angle_nodes);
  return index(p);
}

std::optional<ComplexArrow> ComplexModel::compose(const ComplexArrow& second,
                                                  const ComplexArrow& first) const {
  const auto mid = act(first);
  if (!mid || *mid != second.x || !act(second)) return std::nullopt;
  const int m = first.m + second.m;
  if (std::abs(m) > params_.eta_steps) return std::nullopt;
  return ComplexArrow{wrap(first.j + second.j, params_.angle_nodes), m, first.x};
}

int ComplexModel::real_point_count() const noexcept {
  return params_.radial_levels * params_.angle_nodes;
}

int ComplexModel::real_point(int level, int angle) const {
  return index(GridPoint{level, angle, level, wrap(-angle, params_.angle_nodes)});
}

C2 ComplexModel::disk_coords(int disk_index) const {
  const int n = params_.angle_nodes;
  const double rho = radii_[disk_index / n];
  const double alpha = 2.0 * std::numbers::pi * (disk_index % n) / n;
  return C2{Complex(rho * std::cos(alpha), 0.0), Complex(rho * std::sin(alpha), 0.0)};
}

FiniteGroupoid ComplexModel::real_action_groupoid() const {
  const int n = params_.angle_nodes;
  return build_action_groupoid(FiniteGroup::cyclic(n), real_point_count(),
                               [n](int g, int x) { return (x / n) * n + (x % n + g) % n; });
}

ComplexModel::Materialized ComplexModel::materialize() const {
  const int n = params_.angle_nodes;
  const int mm = params_.eta_steps;
  const int points = point_count();
  auto slot = [&](int j, int m, int x) {
    return (static_cast<std::size_t>(x) * (2 * mm + 1) + (m + mm)) * n + j;
  };
  std::vector<ArrowId> ids(static_cast<std::size_t>(points) * (2 * mm + 1) * n, -1);
  std::vector<ComplexArrow> arrows;
  std::vector<Arrow> ends;
  std::vector<ArrowId> units(points);
  std::vector<ArrowId> core;
  for (int x = 0; x < points; ++x) {
    for (int m = -mm; m <= mm; ++m) {
      for (int j = 0; j < n; ++j) {
        const ComplexArrow arr{j, m, x};
        const auto t = act(arr);
        if (!t) continue;
        const auto id = static_cast<ArrowId>(arrows.size());
        ids[slot(j, m, x)] = id;
        arrows.push_back(arr);
        ends.push_back(Arrow{x, *t});
        if (m == 0) {
          core.push_back(id);
          if (j == 0) units[x] = id;
        }
      }
    }
  }
  FiniteGroupoid g(points, ends, units);
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const ComplexArrow& first = arrows[i];
    const int y = ends[i].target;
    g.set_inverse(static_cast<ArrowId>(i),
                  ids[slot(wrap(-first.j, n), -first.m, y)]);
    for (ArrowId s : g.with_source(y)) {
      const auto prod = compose(arrows[s], first);
      if (prod) g.set_product(s, static_cast<ArrowId>(i), ids[slot(prod->j, prod->m, prod->x)]);
    }
  }
  return Materialized{std::move(arrows), std::move(g), std::move(core)};
}

ModelCheck check_complexified_model(const ComplexModel& model) {
  ModelCheck check;
  const int n = model.angle_nodes();
  const int mm = model.params().eta_steps;
  const int real_points = model.real_point_count();
  auto embed = [&](int disk) { return model.real_point(disk / n + 1, disk % n); };

  const FiniteGroupoid real = model.real_action_groupoid();
  for (int g = 0; g < n; ++g) {
    for (int y = 0; y < real_points; ++y) {
      const ArrowId id = g * real_points + y;
      ++check.real_arrows_compared;
      const ComplexArrow arr{g, 0, embed(y)};
      const auto t = model.act(arr);
      if (!t || *t != embed(real.target(id))) {
        ++check.real_mismatches;
        continue;
      }
      for (int h = 0; h < n; ++h) {
        const ArrowId second = h * real_points + real.target(id);
        const auto prod = model.compose(ComplexArrow{h, 0, *t}, arr);
        const auto expected = real.compose(second, id);
        if (!prod || !expected || prod->m != 0 || prod->x != embed(*expected % real_points) ||
            prod->j != *expected / real_points) {
          ++check.real_mismatches;
        }
      }
    }
  }

  // Every (core arrow, arrow into its source) pair must lie in the mask.
  long long checked = 0;
  long long escaping = 0;
  const int points = model.point_count();
#pragma omp parallel for schedule(static) reduction(+ : checked, escaping)
  for (int y = 0; y < points; ++y) {
    for (int m = -mm; m <= mm; ++m) {
      for (int j = 0; j < n; ++j) {
        // Source of the arrow (j, m) landing at y.
        const auto x = model.act(ComplexArrow{(n - j) % n, -m, y});
        if (!x) continue;
        const ComplexArrow first{j, m, *x};
        for (int k = 0; k < n; ++k) {
          ++checked;
          if (!model.in_mask(ComplexArrow{k, 0, y}, first)) ++escaping;
        }
      }
    }
  }
  check.core_pairs_checked = checked;
  check.core_pairs_escaping = escaping;
  return check;
}

ComplexModel build_complexified_model(const ComplexModelParams& params, ModelCheck* check) {
  ComplexModel model(params);
  const ModelCheck result = check_complexified_model(model);
  if (check) *check = result;
  if (!result.passed()) {
    throw Error(ErrorKind::InvalidArgument, "complexified model failed its consistency checks",
                {result.real_mismatches, result.core_pairs_escaping});
  }
  return model;
}

ComplexFn core_average_function(ComplexFn f, const ComplexModel& model) {
  const int n = model.angle_nodes();
  return [f = std::move(f), n](const C2& z) {
    detail::Compensated<Complex> acc(Complex(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / n;
      const double c = std::cos(theta);
      const double s = std::sin(theta);
      acc.add(f(C2{c * z[0] - s * z[1], s * z[0] + c * z[1]}));
    }
    return acc.sum / static_cast<double>(n);
  };
}

Complex core_average_at(const ComplexFn& f, const ComplexModel& model, int point) {
  const int n = model.angle_nodes();
  const int a = model.point(point).a;
  detail::Compensated<Complex> acc(Complex(0.0, 0.0));
  for (int c = 0; c < n; ++c) {
    const auto t = model.act(ComplexArrow{wrap(c - a, n), 0, point});
    acc.add(f(model.coords(*t)));
  }
  return acc.sum / static_cast<double>(n);
}

Complex SampledFunction::at(int x1, int y1, int x2, int y2) const {
  const int s = side();
  const int hw = half_width;
  return values[((static_cast<std::size_t>(x1 + hw) * s + (y1 + hw)) * s + (x2 + hw)) * s + (y2 + hw)];
}

SampledFunction sample_function(const ComplexFn& f, const C2& center, double h, int half_width) {
  if (!(h > 0.0) || half_width < 0) {
    throw Error(ErrorKind::GridError, "sampling needs h > 0 and half_width >= 0");
  }
  SampledFunction out;
  out.center = center;
  out.h = h;
  out.half_width = half_width;
  const int hw = half_width;
  out.values.reserve(static_cast<std::size_t>(out.side()) * out.side() * out.side() * out.side());
  for (int x1 = -hw; x1 <= hw; ++x1) {
    for (int y1 = -hw; y1 <= hw; ++y1) {
      for (int x2 = -hw; x2 <= hw; ++x2) {
        for (int y2 = -hw; y2 <= hw; ++y2) {
          out.values.push_back(f(C2{center[0] + h * Complex(x1, y1), center[1] + h * Complex(x2, y2)}));
        }
      }
    }
  }
  return out;
}

double cr_residual(const SampledFunction& f) {
  const std::size_t s = static_cast<std::size_t>(f.side());
  if (f.half_width < 1 || !(f.h > 0.0) || f.values.size() != s * s * s * s) {
    throw Error(ErrorKind::GridError, "centered differences need half_width >= 1");
  }
  const int inner = f.half_width - 1;
  const double h2 = 2.0 * f.h;
  double worst = 0.0;
  for (int x1 = -inner; x1 <= inner; ++x1) {
    for (int y1 = -inner; y1 <= inner; ++y1) {
      for (int x2 = -inner; x2 <= inner; ++x2) {
        for (int y2 = -inner; y2 <= inner; ++y2) {
          const Complex dx1 = (f.at(x1 + 1, y1, x2, y2) - f.at(x1 - 1, y1, x2, y2)) / h2;
          const Complex dy1 = (f.at(x1, y1 + 1, x2, y2) - f.at(x1, y1 - 1, x2, y2)) / h2;
          const Complex dx2 = (f.at(x1, y1, x2 + 1, y2) - f.at(x1, y1, x2 - 1, y2)) / h2;
          const Complex dy2 = (f.at(x1, y1, x2, y2 + 1) - f.at(x1, y1, x2, y2 - 1)) / h2;
          worst = std::max(worst, std::abs(0.5 * (dx1 + kI * dy1)));
          worst = std::max(worst, std::abs(0.5 * (dx2 + kI * dy2)));
        }
      }
    }
  }
  return worst;
}

double real_restriction_check(const ComplexFn& f, const ComplexModel& model,
                              const HaarDensity& real_density) {
  const Core& core = real_density.core();
  const int n = model.angle_nodes();
  if (core.parent().object_count() != model.real_point_count()) {
    throw Error(ErrorKind::InvalidArgument, "density does not live on the model's real slice");
  }
  double worst = 0.0;
  for (int d = 0; d < model.real_point_count(); ++d) {
    const Complex complex_side = core_average_at(f, model, model.real_point(d / n + 1, d % n));
    detail::Compensated<Complex> acc(Complex(0.0, 0.0));
    for (ArrowId k : core.fiber(d)) {
      acc.add(real_density.weight(k) * f(model.disk_coords(core.parent().target(k))));
    }
    worst = std::max(worst, std::abs(complex_side - acc.sum));
  }
  return worst;
}

}  // namespace rectify

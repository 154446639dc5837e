#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "rectify/rectifier.hpp"
#include "sampling.hpp"

using namespace rectify;

namespace {

const AmbientSets kSets{1.5, 2.5};

NormedAlgebra algebra(GroupId id) { return normalize_algebra_norm(id, RawNorm::Frobenius, kSets.k_radius); }

const BchConstants& constants(GroupId id) {
  static std::map<GroupId, BchConstants> cache;
  auto it = cache.find(id);
  if (it == cache.end()) {
    it = cache.emplace(id, estimate_bch_constants(algebra(id), kSets, 2000, 1.25, 7)).first;
  }
  return it->second;
}

struct Bundle {
  FiniteGroupoid g;
  Core core;
  HaarDensity density;
};

std::unique_ptr<Bundle> pair_setup(int n) {
  auto s = std::unique_ptr<Bundle>(new Bundle{build_pair_groupoid(n), {}, {}});
  s->core = full_core(s->g);
  s->density = uniform_haar_density(s->core);
  return s;
}

std::unique_ptr<Bundle> translation_setup(int n, int m, std::vector<int> subgroup = {}) {
  auto s = std::unique_ptr<Bundle>(new Bundle{
      build_action_groupoid(FiniteGroup::cyclic(n), m, [m](int g, int x) { return (g + x) % m; }),
      {}, {}});
  if (subgroup.empty()) {
    s->core = full_core(s->g);
  } else {
    std::vector<ArrowId> arrows;
    for (int h : subgroup) {
      for (int x = 0; x < m; ++x) arrows.push_back(h * m + x);
    }
    s->core = build_core(s->g, arrows);
  }
  s->density = uniform_haar_density(s->core);
  return s;
}

// h_{t(p)} h_{s(p)}^{-1} times exp(w_p), |h| <= spread, |w_p| <= eps.
AlmostMorphism perturbed_coboundary(const FiniteGroupoid& g, const NormedAlgebra& alg,
                                    double spread, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> h;
  for (int x = 0; x < g.object_count(); ++x) h.push_back(exp_map(detail::uniform_ball(rng, alg, spread), alg));
  std::vector<GroupElement> values;
  for (ArrowId p = 0; p < g.arrow_count(); ++p) {
    GroupElement v = h[g.target(p)] * h[g.source(p)].inverse();
    if (eps > 0.0) v = v * exp_map(detail::uniform_ball(rng, alg, eps), alg);
    values.push_back(v);
  }
  return AlmostMorphism(std::move(values), alg);
}

BchConstants unit_constants() {
  BchConstants k;
  k.c = k.c_l = k.d_prime = k.d = k.c_d = 1.0;
  return k;
}

double max_left_distance(const AlmostMorphism& a, const AlmostMorphism& b, const NormedAlgebra& alg) {
  double out = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    out = std::max(out, left_distance(a(static_cast<ArrowId>(p)), b(static_cast<ArrowId>(p)), alg));
  }
  return out;
}

}  // namespace

TEST(Defect, ElementMatchesDefinitionOnEveryPair) {
  const auto s = pair_setup(3);
  const NormedAlgebra alg = algebra(GroupId::SO3);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.5, 0.2, 4);
  int count = 0;
  double worst = 0.0;
  for (int l = 0; l < 3; ++l) {
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        const ArrowId k = l * 3 + j, p = j * 3 + i, kp = l * 3 + i;
        const GroupElement psi = defect_element(phi, s->core, k, p);
        const Matrix expected = phi(p).matrix().inverse() * phi(k).matrix().inverse() * phi(kp).matrix();
        EXPECT_LT((psi.matrix() - expected).cwiseAbs().maxCoeff(), 1e-14);
        worst = std::max(worst, distance_to_identity(psi, alg));
        ++count;
      }
    }
  }
  EXPECT_EQ(count, 27);
  const DefectWitness w = defect_witness(phi, s->core, alg);
  EXPECT_NEAR(w.value, worst, 1e-15);
  EXPECT_NEAR(distance_to_identity(defect_element(phi, s->core, w.pair.k, w.pair.p), alg), w.value, 1e-15);
}

TEST(Defect, NotComposable) {
  const auto s = translation_setup(4, 4, {0, 2});
  const NormedAlgebra alg = algebra(GroupId::U1);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.3, 0.0, 1);
  // (1, x) is not a core arrow.
  EXPECT_THROW(defect_element(phi, s->core, 1 * 4 + 1, 0 * 4 + 1), Error);
  // s(k) != t(p)
  try {
    defect_element(phi, s->core, 2 * 4 + 0, 0 * 4 + 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotComposable);
    EXPECT_EQ(e.witness(), (std::vector<std::int64_t>{8, 1}));
  }
}

TEST(Defect, OverflowIsTyped) {
  const auto s = pair_setup(2);
  const NormedAlgebra alg = algebra(GroupId::SO3);
  std::vector<GroupElement> v(4, GroupElement::identity(GroupId::SO3));
  Coords u = Coords::Zero(3);
  u[1] = 1.0;
  v[1] = exp_map(u * (3.14 / alg.norm(u)), alg);
  const AlmostMorphism phi(v, alg);
  try {
    defect(phi, s->core, alg);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DefectOverflow);
  }
}

TEST(Defect, ConjugationEquivariance) {
  const auto s = pair_setup(4);
  for (GroupId id : {GroupId::SO3, GroupId::SU2}) {
    const NormedAlgebra alg = algebra(id);
    const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.4, 0.02, 21);
    std::mt19937_64 rng(2);
    const GroupElement c = exp_map(detail::uniform_ball(rng, alg, 1.0), alg);
    std::vector<GroupElement> conj;
    for (const GroupElement& v : phi.values()) conj.push_back(c * v * c.inverse());
    const AlmostMorphism phic(conj, alg);
    EXPECT_NEAR(defect(phi, s->core, alg), defect(phic, s->core, alg), 1e-12);

    const BchConstants& k = constants(id);
    const IterationResult a = iterate(phi, s->density, alg, k, kSets);
    const IterationResult b = iterate(phic, s->density, alg, k, kSets);
    double worst = 0.0;
    for (std::size_t p = 0; p < a.limit.size(); ++p) {
      const GroupElement expect = c * a.limit(static_cast<ArrowId>(p)) * c.inverse();
      worst = std::max(worst, left_distance(expect, b.limit(static_cast<ArrowId>(p)), alg));
    }
    EXPECT_LT(worst, 1e-12) << to_string(id);
  }
}

TEST(QBound, Arithmetic) {
  const BchConstants k = unit_constants();
  EXPECT_EQ(q_bound(0.0, k), 0.0);
  EXPECT_NEAR(q_bound(0.1, k), 0.062, 1e-15);
  EXPECT_THROW(q_bound(-1.0, k), Error);
}

TEST(QBound, ContractionThresholdByBisection) {
  const BchConstants k = unit_constants();
  // Smallest positive C with q(C) = C, by bisection on q(C) - C.
  double lo = 1e-6, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (q_bound(mid, k) - mid < 0.0 ? lo : hi) = mid;
  }
  EXPECT_NEAR(lo, (-3.0 + std::sqrt(11.0)) / 2.0, 1e-12);
  EXPECT_NEAR(lo, 0.158312, 1e-6);
}

TEST(QBound, AdmissibleRadiusHalvesTheDefect) {
  for (GroupId id : {GroupId::U1, GroupId::SO3, GroupId::SU2}) {
    const BchConstants& k = constants(id);
    const AdmissibleRadius r = admissible_radius(k);
    EXPECT_GT(r.value, 0.0);
    EXPECT_LE(r.value, r.inverse_c_l);
    EXPECT_LE(r.value, r.step_guard);
    EXPECT_LE(q_bound(r.value, k), r.value / 2.0 + 1e-15);
    if (std::isfinite(r.half_root)) {
      EXPECT_NEAR(q_bound(r.half_root, k), r.half_root / 2.0, 1e-12);
    } else {
      EXPECT_EQ(q_bound(0.3, k), 0.0);
    }
  }
}

TEST(Correction, ExactMorphismIsABitwiseFixedPoint) {
  // Z_2 acting trivially on a point, sent to {I, diag(-1,-1,1)}: every product is exact.
  auto s = std::unique_ptr<Bundle>(new Bundle{
      build_action_groupoid(FiniteGroup::cyclic(2), 1, [](int, int x) { return x; }), {}, {}});
  s->core = full_core(s->g);
  s->density = uniform_haar_density(s->core);
  const NormedAlgebra alg = algebra(GroupId::SO3);
  Matrix flip = Matrix::Identity(3, 3);
  flip(0, 0) = -1.0;
  flip(1, 1) = -1.0;
  const AlmostMorphism phi({GroupElement::identity(GroupId::SO3), GroupElement(flip, GroupId::SO3)}, alg);
  const AmbientSets wide{3.2, 3.3};
  EXPECT_EQ(defect(phi, s->core, alg), 0.0);
  const AlmostMorphism next = correct_once(phi, s->density, alg, constants(GroupId::SO3), wide);
  for (ArrowId p = 0; p < 2; ++p) EXPECT_TRUE(next(p).matrix() == phi(p).matrix());

  const auto t = pair_setup(4);
  const AlmostMorphism trivial(std::vector<GroupElement>(16, GroupElement::identity(GroupId::SU2)),
                               algebra(GroupId::SU2));
  const AlmostMorphism same =
      correct_once(trivial, t->density, algebra(GroupId::SU2), constants(GroupId::SU2), kSets);
  for (ArrowId p = 0; p < 16; ++p) EXPECT_TRUE(same(p).matrix() == trivial(p).matrix());
}

TEST(Correction, AbelianTargetsConvergeInOneStep) {
  const auto s = translation_setup(3, 3);
  const NormedAlgebra alg = algebra(GroupId::U1);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> theta(-0.02, 0.02);
  std::vector<GroupElement> v;
  for (int p = 0; p < 9; ++p) {
    v.push_back(GroupElement(Matrix::Constant(1, 1, std::polar(1.0, theta(rng))), GroupId::U1));
  }
  const AlmostMorphism phi(v, alg);
  EXPECT_GT(defect(phi, s->core, alg), 1e-3);
  const AlmostMorphism next = correct_once(phi, s->density, alg, constants(GroupId::U1), kSets);
  EXPECT_LE(defect(next, s->core, alg), 1e-13);
}

TEST(Iterate, NonabelianConvergesWithCertifiedSteps) {
  const auto s = pair_setup(5);
  for (GroupId id : {GroupId::SO3, GroupId::SU2}) {
    const NormedAlgebra alg = algebra(id);
    const BchConstants& k = constants(id);
    const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.5, 0.01, 33);
    const IterationResult r = iterate(phi, s->density, alg, k, kSets, {1e-12, 8});
    EXPECT_EQ(r.trace.terminated, Termination::Converged);
    EXPECT_LE(r.trace.iterations(), 8);
    EXPECT_LT(r.trace.deltas.back(), 1e-12);
    EXPECT_TRUE(r.trace.all_certified());
    for (int n = 0; n < r.trace.iterations(); ++n) {
      EXPECT_LE(r.trace.deltas[n + 1], q_bound(r.trace.deltas[n], k) + kQSlack);
      EXPECT_LE(r.trace.deltas[n + 1], r.trace.deltas[n] / 2.0);
    }
    EXPECT_LE(r.trace.total_displacement, r.trace.cauchy_bound);
    EXPECT_LE(max_left_distance(phi, r.limit, alg), r.trace.total_displacement + 1e-15);
    const MorphismResidual res = verify_core_morphism(r.limit, s->core, alg);
    EXPECT_LE(res.core, (k.d_prime / k.d) * 1e-12);
    EXPECT_EQ(res.non_core, 0.0);  // full core: no pairs outside K
  }
}

TEST(Iterate, SubgroupCoreLeavesNonCorePairsUnchecked) {
  const auto s = translation_setup(4, 4, {0, 2});
  const NormedAlgebra alg = algebra(GroupId::SO3);
  const BchConstants& k = constants(GroupId::SO3);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.4, 0.02, 12);
  const IterationResult r = iterate(phi, s->density, alg, k, kSets);
  const MorphismResidual res = verify_core_morphism(r.limit, s->core, alg);
  EXPECT_LE(res.core, (k.d_prime / k.d) * 1e-12);
  EXPECT_GT(res.non_core, 1e-6);
  EXPECT_EQ(res.full, std::max(res.core, res.non_core));
}

TEST(Iterate, EntryErrors) {
  const auto s = pair_setup(3);
  const NormedAlgebra alg = algebra(GroupId::SO3);
  const BchConstants& k = constants(GroupId::SO3);
  std::vector<GroupElement> far(9, GroupElement::identity(GroupId::SO3));
  Coords u = Coords::Zero(3);
  u[2] = 1.0;
  far[5] = exp_map(u * (2.0 / alg.norm(u)), alg);
  try {
    iterate(AlmostMorphism(far, alg), s->density, alg, k, kSets);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::RangeEscape);
  }
  try {
    iterate(perturbed_coboundary(s->g, alg, 0.3, 0.4, 5), s->density, alg, k, kSets);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DefectTooLarge);
  }
  EXPECT_THROW(iterate(perturbed_coboundary(s->g, alg, 0.3, 0.0, 5), s->density, alg, k,
                       AmbientSets{1.5, 1.2}),
               Error);
}

TEST(Iterate, MaxIterationsIsReported) {
  const auto s = pair_setup(4);
  const NormedAlgebra alg = algebra(GroupId::SO3);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.3, 0.02, 6);
  const IterationResult r = iterate(phi, s->density, alg, constants(GroupId::SO3), kSets, {1e-12, 1});
  EXPECT_EQ(r.trace.terminated, Termination::MaxIterations);
  EXPECT_EQ(r.trace.iterations(), 1);
  EXPECT_EQ(r.trace.deltas.size(), r.trace.q_certified.size());
  EXPECT_EQ(to_string(r.trace.terminated), "max_iterations");
}

TEST(Iterate, BackendsGiveIdenticalTraces) {
  const auto s = pair_setup(6);
  const NormedAlgebra alg = algebra(GroupId::SU2);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.5, 0.02, 44);
  const auto a = iterate(phi, s->density, alg, constants(GroupId::SU2), kSets,
                         {1e-12, 20, kernels::Backend::Serial});
  const auto b = iterate(phi, s->density, alg, constants(GroupId::SU2), kSets,
                         {1e-12, 20, kernels::Backend::Parallel});
  EXPECT_EQ(a.trace.deltas, b.trace.deltas);
  EXPECT_EQ(a.trace.step_moves, b.trace.step_moves);
}

TEST(Defect, CentralTranslationShiftsPsiByTheCenter) {
  // phi(p) z with z central gives psi' = z^{-1} psi, so only z = e leaves Delta fixed.
  const auto s = pair_setup(3);
  const NormedAlgebra alg = algebra(GroupId::SU2);
  const AlmostMorphism phi = perturbed_coboundary(s->g, alg, 0.4, 0.05, 2);
  const GroupElement z(Matrix::Identity(2, 2) * Complex(-1.0, 0.0), GroupId::SU2);
  std::vector<GroupElement> shifted;
  for (const GroupElement& v : phi.values()) shifted.push_back(v * z);
  const AlmostMorphism phiz(shifted, alg);
  for (const CorePair& pr : s->core.pairs()) {
    const Matrix lhs = defect_element(phiz, s->core, pr.k, pr.p).matrix();
    const Matrix rhs = (z.inverse() * defect_element(phi, s->core, pr.k, pr.p)).matrix();
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Correction, AbelianGroupBundleInOneStep) {
  // Z_3 acting on a point, into U(1).
  auto s = std::unique_ptr<Bundle>(new Bundle{
      build_action_groupoid(FiniteGroup::cyclic(3), 1, [](int, int x) { return x; }), {}, {}});
  s->core = full_core(s->g);
  s->density = uniform_haar_density(s->core);
  const NormedAlgebra alg = algebra(GroupId::U1);
  std::vector<GroupElement> v;
  for (double t : {0.01, 0.02, -0.015}) {
    v.push_back(GroupElement(Matrix::Constant(1, 1, std::polar(1.0, t)), GroupId::U1));
  }
  const AlmostMorphism phi(v, alg);
  const double before = defect(phi, s->core, alg);
  EXPECT_GT(before, 1e-3);
  const AlmostMorphism next = correct_once(phi, s->density, alg, constants(GroupId::U1), kSets);
  EXPECT_LE(defect(next, s->core, alg), 1e-14);
}

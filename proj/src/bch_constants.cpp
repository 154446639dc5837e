#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rectify/group_kernel.hpp"
#include "omp_guard.hpp"
#include "sampling.hpp"

namespace rectify {

namespace {

struct Pair {
  Coords u;
  Coords v;
};

// Rounding floor below which a BCH residual is indistinguishable from zero.
double round_floor(double nu, double nv) { return 1e-14 * (1.0 + nu + nv); }

// Mixture of uniform pairs, near-antipodal pairs (the c' ratio is a 0/0 limit
// there) and boundary pairs, in a fixed enumeration order.
std::vector<Pair> bch_pairs(const NormedAlgebra& alg, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Pair> pairs;
  pairs.reserve(count);
  for (int i = 0; i < count; ++i) {
    Pair p;
    switch (i % 3) {
      case 0:
        p.u = detail::uniform_ball(rng, alg, 1.0);
        p.v = detail::uniform_ball(rng, alg, 1.0);
        break;
      case 1: {
        p.u = detail::uniform_ball(rng, alg, 1.0);
        const double scale = std::pow(10.0, -5.0 * unit(rng));
        p.v = -p.u + detail::uniform_ball(rng, alg, scale);
        const double nv = alg.norm(p.v);
        if (nv > 1.0) p.v /= nv;
        break;
      }
      default:
        p.u = detail::on_sphere(rng, alg, 1.0);
        p.v = detail::on_sphere(rng, alg, unit(rng));
        break;
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

}  // namespace

BchConstants estimate_bch_constants(const NormedAlgebra& alg, const AmbientSets& sets,
                                    int sample_count, double safety_factor,
                                    std::uint64_t seed) {
  sets.validate();
  if (sample_count < 1000) {
    throw Error(ErrorKind::InvalidArgument, "estimate_bch_constants needs sample_count >= 1000");
  }
  if (!(safety_factor >= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "safety_factor must be >= 1");
  }
  if (alg.injectivity_margin() < std::max(2.0, sets.k_radius)) {
    throw Error(ErrorKind::InvalidArgument,
                "algebra injectivity margin must cover B_2(0) and the ambient compact set; "
                "normalize with required_margin >= max(2, K_radius)");
  }

  const std::vector<Pair> pairs = bch_pairs(alg, sample_count, seed);

  // Lipschitz pairs u, v = u + t*dir with log-uniform separations.
  std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Pair> lip(sample_count);
  for (auto& p : lip) {
    p.u = detail::uniform_ball(rng, alg, 1.0);
    const double t = std::pow(10.0, -6.0 * unit(rng));
    p.v = p.u + detail::on_sphere(rng, alg, t);
    const double nv = alg.norm(p.v);
    if (nv > 1.0) p.v /= nv;
  }
  // Adjoint distortion: h = exp(x) in the ambient compact ball, u in B_1(0).
  std::vector<Pair> adj(sample_count);
  for (auto& p : adj) {
    p.u = detail::uniform_ball(rng, alg, sets.k_radius);
    p.v = detail::uniform_ball(rng, alg, 1.0);
  }

  double c = 0.0, c_prime = 0.0, c_dprime = 0.0;
  double lip_min = std::numeric_limits<double>::infinity();
  double lip_max = 0.0;
  double adjoint = 0.0;
  long excluded = 0;
  const long n = static_cast<long>(sample_count);
  detail::ExceptionSlot slot;

#pragma omp parallel for schedule(static) reduction(max : c, c_prime, c_dprime, lip_max, adjoint) \
    reduction(min : lip_min) reduction(+ : excluded)
  for (long i = 0; i < n; ++i) {
    slot.capture([&] {
    const Pair& p = pairs[i];
    const double nu = alg.norm(p.u);
    const double nv = alg.norm(p.v);
    const BchRatios r = bch_terms(p.u, p.v, alg);
    if (nu * nv > 1e-12 && r.gap > round_floor(nu, nv)) c = std::max(c, r.gap / (nu * nv));
    const double nsum = alg.norm(p.u + p.v);
    if (nsum < kCPrimeFloor) {
      ++excluded;
    } else {
      c_prime = std::max(c_prime, r.product_norm / nsum);
    }
    if (nv > 1e-12) c_dprime = std::max(c_dprime, r.conj_norm / (nv + nv * nu));

    const Pair& q = lip[i];
    const double sep = alg.norm(q.u - q.v);
    if (sep > 1e-9) {
      const double ratio = left_distance(exp_map(q.u, alg), exp_map(q.v, alg), alg) / sep;
      lip_min = std::min(lip_min, ratio);
      lip_max = std::max(lip_max, ratio);
    }

    const Pair& a = adj[i];
    const double nw = alg.norm(a.v);
    if (nw > 1e-12) {
      const GroupElement h = exp_map(a.u, alg);
      const GroupElement conj = h * exp_map(a.v, alg) * h.inverse();
      adjoint = std::max(adjoint, distance_to_identity(conj, alg) / nw);
    }
    });
  }
  slot.rethrow();

  BchConstants k;
  k.empirical = BchEmpirical{c, c_prime, c_dprime, lip_min, lip_max, adjoint};
  k.c = safety_factor * c;
  k.c_prime = safety_factor * c_prime;
  k.c_dprime = safety_factor * c_dprime;
  // d is a lower Lipschitz bound, so the safety factor shrinks it.
  k.d = lip_min / safety_factor;
  k.d_prime = safety_factor * lip_max;
  k.c_l = safety_factor * adjoint;
  const double gap = sets.k_radius - sets.w_radius;
  k.c_d = std::max(gap, 1.0 / gap);
  k.sample_count = sample_count;
  k.safety_factor = safety_factor;
  k.seed = seed;
  k.excluded_fraction = static_cast<double>(excluded) / static_cast<double>(sample_count);
  return k;
}

BchValidation validate_bch_constants(const BchConstants& k, const NormedAlgebra& alg,
                                     int sample_count, std::uint64_t seed) {
  const std::vector<Pair> pairs = bch_pairs(alg, sample_count, seed);
  BchValidation out;
  out.checked = sample_count;
  int vc = 0, vcp = 0, vcd = 0;
  double wc = 0.0, wcp = 0.0, wcd = 0.0;
  const long n = static_cast<long>(sample_count);
  detail::ExceptionSlot slot;

#pragma omp parallel for schedule(static) reduction(+ : vc, vcp, vcd) reduction(max : wc, wcp, wcd)
  for (long i = 0; i < n; ++i) {
    slot.capture([&] {
    const Pair& p = pairs[i];
    const double nu = alg.norm(p.u);
    const double nv = alg.norm(p.v);
    const double floor = round_floor(nu, nv);
    const BchRatios r = bch_terms(p.u, p.v, alg);
    if (r.gap > k.c * nu * nv + floor) ++vc;
    if (nu * nv > 1e-12) wc = std::max(wc, r.gap / (nu * nv));
    const double nsum = alg.norm(p.u + p.v);
    if (nsum >= kCPrimeFloor) {
      if (r.product_norm > k.c_prime * nsum + floor) ++vcp;
      wcp = std::max(wcp, r.product_norm / nsum);
    }
    if (r.conj_norm > k.c_dprime * (nv + nv * nu) + floor) ++vcd;
    if (nv > 1e-12) wcd = std::max(wcd, r.conj_norm / (nv + nv * nu));
    });
  }
  slot.rethrow();
  out.violations_c = vc;
  out.violations_c_prime = vcp;
  out.violations_c_dprime = vcd;
  out.worst_ratio_c = wc;
  out.worst_ratio_c_prime = wcp;
  out.worst_ratio_c_dprime = wcd;
  return out;
}

}  // namespace rectify

#ifndef HLAB_APPLY_HPP
#define HLAB_APPLY_HPP

// Evaluation of T_{alpha,m} f(z) = int f(y) K(y,z) dy for ball-supported f.
//
// Quadrature strategy: within each support ball, the domain is split by
// the singular preimages tau_j^{-1}(z).  Around each preimage that can
// reach the ball we lay dyadic Koranyi annuli (the kernel factor is
// bounded per annulus and the annulus contributions form a geometric
// series); the remainder of the ball is one far stratum.  Smooth inputs
// far from all singularities instead use the midpoint grid, whose error
// for C^k integrands decays fast enough to resolve the moment-cancelled
// far field of atoms.

#include "hlab/field.hpp"
#include "hlab/kernel.hpp"

namespace hlab {

namespace detail {

struct StratumResult {
  double value = 0.0;
  double variance_term = 0.0;  // squared standard error
  std::size_t evaluations = 0;
};

// Mean of g over the annulus r_lo <= dist(w*, .) < r_hi times its volume;
// g must vanish (via indicators) where the stratum does not apply.
template <class G>
StratumResult annulus_stratum(const G& g, const GroupPoint& wstar, double r_lo, double r_hi,
                              std::size_t samples, RngStream& rng) {
  const Dimension dim = wstar.dim();
  GroupPoint off(dim);
  double sum = 0.0, sumsq = 0.0;
  std::size_t kept = 0;
  while (kept < samples) {
    for (std::size_t i = 0; i < dim.two_n(); ++i) off.x_at(i) = rng.uniform(-r_hi, r_hi);
    off.t() = rng.uniform(-0.25 * r_hi * r_hi, 0.25 * r_hi * r_hi);
    const double r = koranyi_norm(off);
    if (r >= r_hi || r < r_lo) continue;
    const double v = g(mul(wstar, off));
    sum += v;
    sumsq += v * v;
    ++kept;
  }
  const double vol = unit_ball_volume(dim) * (std::pow(r_hi, dim.Q()) - std::pow(r_lo, dim.Q()));
  const double mean = sum / double(kept);
  const double var = std::max(0.0, sumsq / double(kept) - mean * mean);
  return {vol * mean, vol * vol * var / double(kept), kept};
}

}  // namespace detail

// T_{alpha,m} f(z) with a standard-error report.  `converged` records
// whether the reported error met the requested relative tolerance.
inline IntegralEstimate apply_T(const KernelSpec& spec, const SupportedField& f,
                                const GroupPoint& z, const IntegrationSpec& ispec) {
  detail::require(!f.support.empty(), "apply_T: field must declare ball support");
  const Dimension dim = spec.dim();
  const std::size_t m = spec.m();

  std::vector<GroupPoint> preimages;
  preimages.reserve(m);
  for (std::size_t j = 0; j < m; ++j) preimages.push_back(spec.singular_preimage(j, z));

  auto multiplicity = [&f](const GroupPoint& w) {
    int c = 0;
    for (const auto& b : f.support) c += b.contains(w) ? 1 : 0;
    return c;
  };

  IntegralEstimate total;
  std::size_t ball_idx = 0;
  for (const auto& ball : f.support) {
    ++ball_idx;
    const double R0 = ball.radius;

    std::vector<std::size_t> relevant;
    for (std::size_t j = 0; j < m; ++j)
      if (koranyi_dist(preimages[j], ball.center) < ball.radius + R0) relevant.push_back(j);

    auto integrand = [&](const GroupPoint& w) {
      const int mult = multiplicity(w);
      if (mult == 0) return 0.0;
      const double fv = f.eval(w);
      if (fv == 0.0) return 0.0;
      return fv * kernel_eval(spec, w, z) / double(mult);
    };

    if (relevant.empty()) {
      // Kernel smooth on this ball.
      if (ispec.method == IntegrationMethod::GridQuadrature)
        total += detail::grid_ball(integrand, ball, ispec.max_evaluations);
      else {
        RngStream rng(ispec.seed, 0xf000 + ball_idx);
        total += detail::mc_ball(integrand, ball, ispec.max_evaluations, rng);
      }
      continue;
    }

    const std::size_t max_annuli = 40;
    const std::size_t far_budget = std::max<std::size_t>(2 * ispec.max_evaluations / 5, 64);
    // Outer annuli carry most of the mass (contributions decay like
    // 2^{-k(Q - alpha_j)}), so samples decay geometrically with k.
    const double alloc_ratio = 0.7;
    const double alloc_head =
        double(ispec.max_evaluations - far_budget) / double(relevant.size()) *
        (1.0 - alloc_ratio);

    auto nearest_is = [&](std::size_t j, const GroupPoint& w) {
      const double dj = koranyi_dist(preimages[j], w);
      for (std::size_t i : relevant)
        if (i != j && koranyi_dist(preimages[i], w) < dj) return false;
      return true;
    };

    // Far stratum: inside the ball, away from every relevant preimage.
    {
      auto far_g = [&](const GroupPoint& w) {
        for (std::size_t j : relevant)
          if (koranyi_dist(preimages[j], w) < R0) return 0.0;
        return integrand(w);
      };
      RngStream rng(ispec.seed, 0xf100 + ball_idx);
      IntegralEstimate far = detail::mc_ball(far_g, ball, far_budget, rng);
      total += far;
    }

    double residual_bound = 0.0;
    for (std::size_t j : relevant) {
      const double dist_cb = koranyi_dist(preimages[j], ball.center);
      double innermost_sup = 0.0;
      std::size_t consecutive_zero = 0;
      for (std::size_t k = 0; k < max_annuli; ++k) {
        const double r_hi = R0 * std::pow(2.0, -double(k));
        const double r_lo = 0.5 * r_hi;
        // Annulus cannot reach the ball: skip.
        if (dist_cb - r_hi > ball.radius) continue;
        const std::size_t per_annulus = std::max<std::size_t>(
            static_cast<std::size_t>(alloc_head * std::pow(alloc_ratio, double(k))), 24);
        auto g = [&](const GroupPoint& w) {
          if (!ball.contains(w) || !nearest_is(j, w)) return 0.0;
          return integrand(w);
        };
        RngStream rng(ispec.seed, 0xf200 + 0x40 * ball_idx + 0x1000 * j + k);
        auto part = detail::annulus_stratum(g, preimages[j], r_lo, r_hi, per_annulus, rng);
        total.value += part.value;
        total.std_error = std::sqrt(total.std_error * total.std_error + part.variance_term);
        total.evaluations += part.evaluations;
        // Masked integrands vanish identically near the preimage; once
        // several inner annuli come back all-zero, the rest will too.
        if (part.value == 0.0 && part.variance_term == 0.0) {
          if (++consecutive_zero >= 3 && k >= 4) break;
        } else {
          consecutive_zero = 0;
        }
        if (k + 1 == max_annuli) {
          // Residual inner-disk bound: |f| K <= sup(|f| * other factors)
          // times the integrable power of the j-th factor.
          const double aj = spec.alphas()[j];
          const double Q = dim.Q();
          innermost_sup = std::abs(part.value) /
                          std::max(1e-300, unit_ball_volume(dim) *
                                               (std::pow(r_hi, Q) - std::pow(r_lo, Q)));
          residual_bound += 2.0 * innermost_sup * std::pow(r_lo, aj) * sphere_measure(dim) *
                            std::pow(r_lo, Q - aj) / (Q - aj);
        }
      }
    }
    total.std_error = std::sqrt(total.std_error * total.std_error +
                                residual_bound * residual_bound);
  }

  total.converged = total.std_error <= ispec.rel_tolerance * std::abs(total.value) ||
                    total.std_error == 0.0;
  return total;
}

// Riesz potential R_alpha f = f * rho^{alpha-Q}: the m = 1, A = I, r = 1
// kernel spec, delegated bit for bit.
inline IntegralEstimate apply_riesz(double alpha, const SupportedField& f,
                                    const GroupPoint& z, const IntegrationSpec& ispec) {
  detail::require(!f.support.empty(), "apply_riesz: field must declare ball support");
  const Dimension dim = f.support.front().dim();
  detail::require(alpha > 0.0 && alpha < dim.Q(), "apply_riesz: need 0 < alpha < Q");
  return apply_T(KernelSpec::riesz(dim, alpha), f, z, ispec);
}

}  // namespace hlab

#endif  // HLAB_APPLY_HPP

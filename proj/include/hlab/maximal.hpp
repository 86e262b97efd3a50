#ifndef HLAB_MAXIMAL_HPP
#define HLAB_MAXIMAL_HPP

// Fractional maximal function
//   M_alpha f(z) = sup_{B ∋ z} |B|^{alpha/Q - 1} int_B |f|
// approximated from below: centered balls over a geometric radius grid
// plus an off-center refinement pass.  Every candidate average derives
// its RNG stream from the ball's own bits, so refining the grid only
// adds candidates and the reported value never decreases.
//
// Also a grand-maximal proxy: a finite dictionary of mollifiers with
// numerically certified F_N seminorm <= 1 and a geometric scale grid.

#include <bit>
#include <vector>

#include "hlab/derivative.hpp"
#include "hlab/field.hpp"

namespace hlab {

struct RadiusGrid {
  double r_min = 0.25;
  double r_max = 16.0;
  std::size_t count = 17;

  std::vector<double> radii() const {
    detail::require(r_min > 0.0 && r_max >= r_min && count >= 1, "RadiusGrid: invalid");
    std::vector<double> out;
    out.reserve(count);
    const double q = count == 1 ? 1.0 : std::pow(r_max / r_min, 1.0 / double(count - 1));
    double r = r_min;
    for (std::size_t k = 0; k < count; ++k, r *= q) out.push_back(r);
    return out;
  }
};

namespace detail {

// int_{B} |f| for a candidate ball, sampling from the smaller of the
// candidate and each support ball.
inline double ball_average_integral(const SupportedField& f, const KoranyiBall& B,
                                    std::size_t samples_per_ball, std::uint64_t stream_seed) {
  auto multiplicity = [&f](const GroupPoint& w) {
    int c = 0;
    for (const auto& b : f.support) c += b.contains(w) ? 1 : 0;
    return c;
  };
  double total = 0.0;
  std::size_t idx = 0;
  for (const auto& b : f.support) {
    ++idx;
    const bool sample_candidate = ball_volume(B) < ball_volume(b);
    const KoranyiBall& domain = sample_candidate ? B : b;
    RngStream rng(stream_seed, 0x3a11 + idx);
    GroupPoint off(domain.dim());
    double sum = 0.0;
    std::size_t kept = 0;
    while (kept < samples_per_ball) {
      for (std::size_t i = 0; i < domain.center.two_n(); ++i)
        off.x_at(i) = rng.uniform(-domain.radius, domain.radius);
      off.t() = rng.uniform(-0.25 * domain.radius * domain.radius,
                            0.25 * domain.radius * domain.radius);
      if (koranyi_norm(off) >= domain.radius) continue;
      ++kept;
      const GroupPoint w = mul(domain.center, off);
      if (!b.contains(w) || !B.contains(w)) continue;
      const int mult = multiplicity(w);
      if (mult == 0) continue;
      sum += std::abs(f.eval(w)) / double(mult);
    }
    total += ball_volume(domain) * sum / double(samples_per_ball);
  }
  return total;
}

inline std::uint64_t mix_bits(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL));
}

}  // namespace detail

// Lower approximation of M_alpha f(z); never decreases under grid
// refinement or more off-center probes.
inline double fractional_maximal(double alpha, const SupportedField& f, const GroupPoint& z,
                                 const RadiusGrid& grid, const IntegrationSpec& spec,
                                 std::size_t offcenter_probes = 6) {
  const Dimension dim = f.support.front().dim();
  const double Q = dim.Q();
  detail::require(alpha >= 0.0 && alpha < Q, "fractional_maximal: need 0 <= alpha < Q");
  const std::size_t per =
      std::max<std::size_t>(spec.max_evaluations / (grid.count * (1 + offcenter_probes)), 256);
  double best = 0.0;
  for (double r : grid.radii()) {
    const std::uint64_t rbits = std::bit_cast<std::uint64_t>(r);
    {
      const KoranyiBall B(z, r);
      const double integral = detail::ball_average_integral(
          f, B, per, detail::mix_bits(spec.seed, rbits));
      best = std::max(best, std::pow(ball_volume(B), alpha / Q - 1.0) * integral);
    }
    for (std::size_t c = 0; c < offcenter_probes; ++c) {
      // Random center whose ball still contains z.
      RngStream rng(detail::mix_bits(spec.seed ^ 0x0ffc, rbits), c);
      GroupPoint off(dim);
      do {
        for (std::size_t i = 0; i < dim.two_n(); ++i) off.x_at(i) = rng.uniform(-r, r);
        off.t() = rng.uniform(-0.25 * r * r, 0.25 * r * r);
      } while (koranyi_norm(off) >= r);
      const KoranyiBall B(mul(z, off), r);
      const double integral = detail::ball_average_integral(
          f, B, per, detail::mix_bits(detail::mix_bits(spec.seed, rbits), c + 1));
      best = std::max(best, std::pow(ball_volume(B), alpha / Q - 1.0) * integral);
    }
  }
  return best;
}

// Mollifier with numerically certified F_N seminorm:
//   sum_{d(I) <= N} sup_z (1 + rho(z))^N |X^I phi(z)| <= 1.
struct Mollifier {
  Field eval;
  double certified_seminorm = 0.0;  // seminorm of eval before normalization
};

// Smooth bumps modulated by low-order monomials, each rescaled by a
// numerically estimated F_N seminorm (plus 10% headroom for the sup
// approximation).  A documented finite stand-in for the full class F_N.
inline std::vector<Mollifier> mollifier_dictionary(Dimension dim, unsigned N,
                                                   std::size_t size, std::uint64_t seed,
                                                   const DerivativeSpec& dspec = DerivativeSpec(0.02, 2)) {
  std::vector<Mollifier> out;
  const auto mods = MultiIndex::all_up_to(dim, 2);
  const auto Is = MultiIndex::all_up_to(dim, N);
  auto cloud = sample_ball(KoranyiBall(GroupPoint(dim), 0.999), 160, seed ^ 0x3031);
  for (std::size_t k = 0; k < size; ++k) {
    const MultiIndex J = mods[k % mods.size()];
    Field base = [J](const GroupPoint& w) {
      const double r4 = [&w] {
        double d2 = 0.0;
        for (std::size_t i = 0; i < w.two_n(); ++i) d2 += w.x_at(i) * w.x_at(i);
        return d2 * d2 + 16.0 * w.t() * w.t();
      }();
      if (r4 >= 1.0) return 0.0;
      const double q = 1.0 - r4;
      const double q2 = q * q;
      return q2 * q2 * q2 * monomial_eval(J, w);
    };
    double seminorm = 0.0;
    for (const auto& w : cloud) {
      const double weight = std::pow(1.0 + koranyi_norm(w), double(N));
      double acc = 0.0;
      for (const auto& I : Is) acc += std::abs(higher_derivative(I, base, w, dspec));
      seminorm = std::max(seminorm, weight * acc);
    }
    seminorm *= 1.10;
    Mollifier m;
    m.certified_seminorm = seminorm;
    m.eval = [base, seminorm](const GroupPoint& w) { return base(w) / seminorm; };
    out.push_back(std::move(m));
  }
  return out;
}

// max over the dictionary and a geometric s-grid of |(f * phi_s)(z)| with
// phi_s(w) = s^{-Q} phi((1/s).w); a documented lower bound of the grand
// maximal function, monotone in the dictionary and grid sizes.
inline double grand_maximal_proxy(const SupportedField& f, const GroupPoint& z,
                                  std::size_t dictionary_size, const IntegrationSpec& spec,
                                  unsigned N = 2, std::size_t scale_count = 10,
                                  double s_min = 0.25, double s_max = 8.0) {
  const Dimension dim = f.support.front().dim();
  const double Q = dim.Q();
  auto dict = mollifier_dictionary(dim, N, dictionary_size, spec.seed);
  double best = 0.0;
  const double q = scale_count == 1 ? 1.0 : std::pow(s_max / s_min, 1.0 / double(scale_count - 1));
  double s = s_min;
  for (std::size_t si = 0; si < scale_count; ++si, s *= q) {
    for (std::size_t di = 0; di < dict.size(); ++di) {
      const auto& phi = dict[di];
      // (f * phi_s)(z) = int f(y) phi_s(y^{-1} z) dy over supp f.
      const double sc = s;
      auto g = [&f, &phi, &z, sc, Q](const GroupPoint& y) {
        const double fv = f.eval(y);
        if (fv == 0.0) return 0.0;
        int mult = 0;
        for (const auto& b : f.support) mult += b.contains(y) ? 1 : 0;
        if (mult == 0) return 0.0;
        const GroupPoint rel = dilate(1.0 / sc, mul(inv(y), z));
        return fv * std::pow(sc, -Q) * phi.eval(rel) / double(mult);
      };
      IntegralEstimate acc;
      std::size_t bi = 0;
      for (const auto& b : f.support) {
        RngStream rng(detail::mix_bits(spec.seed, 0x6d + si * 131 + di), ++bi);
        acc += detail::mc_ball(
            g, b, std::max<std::size_t>(spec.max_evaluations / (scale_count * dict.size()), 256),
            rng);
      }
      best = std::max(best, std::abs(acc.value));
    }
  }
  return best;
}

}  // namespace hlab

#endif  // HLAB_MAXIMAL_HPP

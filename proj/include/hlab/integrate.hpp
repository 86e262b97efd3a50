#ifndef HLAB_INTEGRATE_HPP
#define HLAB_INTEGRATE_HPP

// Haar-measure integration on H^n.
//
// The Haar measure is Lebesgue measure on R^{2n} x R.  Balls are integrated
// by rejection Monte Carlo, radially stratified Monte Carlo, or midpoint
// grids; complements of ball unions are integrated with a bounded core plus
// a polar tail driven by a caller-declared decay exponent.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "hlab/core.hpp"
#include "hlab/rng.hpp"

namespace hlab {

enum class IntegrationMethod { GridQuadrature, MonteCarlo, StratifiedMC };

struct IntegrationSpec {
  IntegrationMethod method = IntegrationMethod::MonteCarlo;
  double rel_tolerance = 1e-3;
  std::size_t max_evaluations = 2'000'000;
  std::uint64_t seed = 1;

  IntegrationSpec() = default;
  IntegrationSpec(IntegrationMethod m, double tol, std::size_t maxev, std::uint64_t s)
      : method(m), rel_tolerance(tol), max_evaluations(maxev), seed(s) {
    detail::require(tol > 0.0, "IntegrationSpec: tolerance must be positive");
    detail::require(maxev >= 1, "IntegrationSpec: max_evaluations must be >= 1");
  }

  IntegrationSpec with_seed(std::uint64_t s) const {
    IntegrationSpec out = *this;
    out.seed = s;
    return out;
  }
  IntegrationSpec with_budget(std::size_t maxev) const {
    IntegrationSpec out = *this;
    out.max_evaluations = maxev;
    return out;
  }
};

struct IntegralEstimate {
  double value = 0.0;
  double std_error = 0.0;  // one-sigma statistical error plus truncation bounds
  std::size_t evaluations = 0;
  bool converged = true;

  IntegralEstimate& operator+=(const IntegralEstimate& o) {
    value += o.value;
    std_error = std::sqrt(std_error * std_error + o.std_error * o.std_error);
    evaluations += o.evaluations;
    converged = converged && o.converged;
    return *this;
  }
};

using Field = std::function<double(const GroupPoint&)>;

namespace detail {

// 1-D adaptive Simpson.
inline double simpson_rec(const std::function<double(double)>& g, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(g, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(g, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& g, double a, double b,
                               double tol) {
  const double m = 0.5 * (a + b);
  const double fa = g(a), fm = g(m), fb = g(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(g, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace detail

// Haar measure of the unit Koranyi ball, c0 = |B_1(0,0)|.
//
// Slicing in t and polar coordinates in x reduce the volume to a 1-D
// integral: c0 = (1/2) S_{2n-1} * int_0^1 r^{2n-1} sqrt(1-r^4) dr with
// S_{2n-1} = 2 pi^n / (n-1)!.  The default (deterministic) path evaluates
// that integral adaptively; the Monte Carlo path estimates the volume by
// rejection from the bounding box and is kept as an independent route.
inline double unit_ball_volume(
    Dimension dim,
    const IntegrationSpec& spec = IntegrationSpec(IntegrationMethod::GridQuadrature, 1e-12,
                                                  1'000'000, 1)) {
  const std::size_t n = dim.n;
  if (spec.method == IntegrationMethod::MonteCarlo ||
      spec.method == IntegrationMethod::StratifiedMC) {
    RngStream rng(spec.seed, 0xb011);
    const double box = std::pow(2.0, double(2 * n)) * 0.5;  // (2)^{2n} * (1/2)
    std::size_t hits = 0;
    const std::size_t total = spec.max_evaluations;
    GroupPoint z(dim);
    for (std::size_t k = 0; k < total; ++k) {
      for (std::size_t i = 0; i < 2 * n; ++i) z.x_at(i) = rng.uniform(-1.0, 1.0);
      z.t() = rng.uniform(-0.25, 0.25);
      if (koranyi_norm(z) < 1.0) ++hits;
    }
    const double p = double(hits) / double(total);
    const double est = p * box;
    const double se = box * std::sqrt(std::max(p * (1.0 - p), 1e-300) / double(total));
    if (se > spec.rel_tolerance * est)
      throw std::runtime_error("unit_ball_volume: budget exhausted before tolerance");
    return est;
  }
  static std::map<std::size_t, double> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double lg = 1.0;  // (n-1)!
  for (std::size_t k = 2; k < n; ++k) lg *= double(k);
  const double sphere = 2.0 * std::pow(std::numbers::pi, double(n)) / lg;
  const double radial = detail::adaptive_simpson(
      [n](double r) { return std::pow(r, double(2 * n - 1)) * std::sqrt(std::max(0.0, 1.0 - r * r * r * r)); },
      0.0, 1.0, 1e-14);
  const double c0 = 0.5 * sphere * radial;
  cache[n] = c0;
  return c0;
}

inline double ball_volume(const KoranyiBall& b) {
  return unit_ball_volume(b.dim()) * std::pow(b.radius, b.dim().Q());
}

// Surface measure sigma({rho = 1}) in the polar decomposition
// int f = int_0^inf [angular avg](r) sigma r^{Q-1} dr;  sigma = Q c0.
inline double sphere_measure(Dimension dim) {
  return dim.Q() * unit_ball_volume(dim);
}

// Exactly `count` uniform Haar samples in `ball`, by rejection from the
// bounding box [-d,d]^{2n} x [-d^2/4, d^2/4] translated to the center.
inline std::vector<GroupPoint> sample_ball(const KoranyiBall& ball, std::size_t count,
                                           std::uint64_t seed) {
  detail::require(count >= 1, "sample_ball: count must be >= 1");
  std::vector<GroupPoint> out;
  out.reserve(count);
  RngStream rng(seed, 0x5a3);
  const double d = ball.radius;
  const std::size_t twon = ball.center.two_n();
  GroupPoint w(ball.dim());
  while (out.size() < count) {
    for (std::size_t i = 0; i < twon; ++i) w.x_at(i) = rng.uniform(-d, d);
    w.t() = rng.uniform(-0.25 * d * d, 0.25 * d * d);
    if (koranyi_norm(w) < d) out.push_back(mul(ball.center, w));
  }
  return out;
}

// Region over which haar_integrate runs: either a ball, or the complement
// of a finite union of balls together with a decay exponent d > Q declared
// for the integrand (|f(z)| <~ rho(z)^{-d} at infinity).
struct ComplementRegion {
  std::vector<KoranyiBall> holes;
  double decay_exponent = 0.0;
};

using IntegrationRegion = std::variant<KoranyiBall, ComplementRegion>;

namespace detail {

inline IntegralEstimate mc_ball(const Field& f, const KoranyiBall& ball,
                                std::size_t budget, RngStream& rng) {
  const double d = ball.radius;
  const std::size_t twon = ball.center.two_n();
  GroupPoint w(ball.dim());
  double sum = 0.0, sumsq = 0.0;
  std::size_t kept = 0, evals = 0;
  while (kept < std::max<std::size_t>(budget, 2)) {
    for (std::size_t i = 0; i < twon; ++i) w.x_at(i) = rng.uniform(-d, d);
    w.t() = rng.uniform(-0.25 * d * d, 0.25 * d * d);
    if (koranyi_norm(w) >= d) continue;
    const double v = f(mul(ball.center, w));
    if (!std::isfinite(v)) throw std::runtime_error("haar_integrate: non-finite sample");
    sum += v;
    sumsq += v * v;
    ++kept;
    ++evals;
  }
  const double vol = ball_volume(ball);
  const double mean = sum / double(kept);
  const double var = std::max(0.0, sumsq / double(kept) - mean * mean);
  IntegralEstimate est;
  est.value = vol * mean;
  est.std_error = vol * std::sqrt(var / double(kept));
  est.evaluations = evals;
  return est;
}

// Equal-volume radial shells; variance-reducing for radially organized
// integrands, which is the common case here.
inline IntegralEstimate stratified_ball(const Field& f, const KoranyiBall& ball,
                                        std::size_t budget, std::uint64_t seed) {
  const std::size_t K = 16;
  const std::size_t per = std::max<std::size_t>(budget / K, 2);
  const double d = ball.radius;
  const double Q = ball.dim().Q();
  IntegralEstimate total;
  for (std::size_t k = 0; k < K; ++k) {
    const double r_lo = d * std::pow(double(k) / K, 1.0 / Q);
    const double r_hi = d * std::pow(double(k + 1) / K, 1.0 / Q);
    RngStream rng(seed, 0x9000 + k);
    const std::size_t twon = ball.center.two_n();
    GroupPoint w(ball.dim());
    double sum = 0.0, sumsq = 0.0;
    std::size_t kept = 0;
    while (kept < per) {
      for (std::size_t i = 0; i < twon; ++i) w.x_at(i) = rng.uniform(-r_hi, r_hi);
      w.t() = rng.uniform(-0.25 * r_hi * r_hi, 0.25 * r_hi * r_hi);
      const double r = koranyi_norm(w);
      if (r >= r_hi || r < r_lo) continue;
      const double v = f(mul(ball.center, w));
      if (!std::isfinite(v)) throw std::runtime_error("haar_integrate: non-finite sample");
      sum += v;
      sumsq += v * v;
      ++kept;
    }
    const double vol = ball_volume(ball) / double(K);
    const double mean = sum / double(kept);
    const double var = std::max(0.0, sumsq / double(kept) - mean * mean);
    IntegralEstimate part;
    part.value = vol * mean;
    part.std_error = vol * std::sqrt(var / double(kept));
    part.evaluations = kept;
    total += part;
  }
  return total;
}

inline IntegralEstimate grid_ball_once(const Field& f, const KoranyiBall& ball,
                                       std::size_t per_dim) {
  const double d = ball.radius;
  const std::size_t twon = ball.center.two_n();
  const std::size_t dims = twon + 1;
  const double hx = 2.0 * d / double(per_dim);
  const double ht = 0.5 * d * d / double(per_dim);
  const double cell = std::pow(hx, double(twon)) * ht;
  std::vector<std::size_t> idx(dims, 0);
  GroupPoint w(ball.dim());
  double sum = 0.0;
  std::size_t evals = 0;
  for (;;) {
    for (std::size_t i = 0; i < twon; ++i) w.x_at(i) = -d + (double(idx[i]) + 0.5) * hx;
    w.t() = -0.25 * d * d + (double(idx[twon]) + 0.5) * ht;
    if (koranyi_norm(w) < d) {
      sum += f(mul(ball.center, w));
      ++evals;
    }
    std::size_t k = 0;
    while (k < dims && ++idx[k] == per_dim) idx[k++] = 0;
    if (k == dims) break;
  }
  IntegralEstimate est;
  est.value = sum * cell;
  est.evaluations = evals;
  return est;
}

inline IntegralEstimate grid_ball(const Field& f, const KoranyiBall& ball,
                                  std::size_t budget) {
  const std::size_t dims = ball.center.two_n() + 1;
  std::size_t per_dim = std::max<std::size_t>(
      4, static_cast<std::size_t>(std::floor(std::pow(double(budget), 1.0 / double(dims)))));
  IntegralEstimate fine = grid_ball_once(f, ball, per_dim);
  IntegralEstimate coarse = grid_ball_once(f, ball, std::max<std::size_t>(per_dim / 2, 2));
  fine.std_error = std::abs(fine.value - coarse.value);
  fine.evaluations += coarse.evaluations;
  return fine;
}

}  // namespace detail

inline IntegralEstimate haar_integrate(const Field& f, const KoranyiBall& ball,
                                       const IntegrationSpec& spec) {
  switch (spec.method) {
    case IntegrationMethod::GridQuadrature:
      return detail::grid_ball(f, ball, spec.max_evaluations);
    case IntegrationMethod::StratifiedMC:
      return detail::stratified_ball(f, ball, spec.max_evaluations, spec.seed);
    case IntegrationMethod::MonteCarlo:
    default: {
      RngStream rng(spec.seed, 0x3c);
      return detail::mc_ball(f, ball, spec.max_evaluations, rng);
    }
  }
}

// Complement of a ball union.  The bounded core (out to where the holes
// end) is integrated by stratified Monte Carlo over dyadic annuli; the far
// tail reduces to a polar 1-D closed form through the declared decay
// exponent.  The tail estimate enters the value and 30% of it is charged
// to the error, alongside the Monte Carlo standard errors.
inline IntegralEstimate haar_integrate(const Field& f, const ComplementRegion& region,
                                       const IntegrationSpec& spec) {
  const double Q = region.holes.empty() ? 4.0 : region.holes.front().dim().Q();
  const Dimension dim = region.holes.empty() ? Dimension(1) : region.holes.front().dim();
  detail::require(region.decay_exponent > Q,
                  "haar_integrate: non-integrable decay declared (need exponent > Q)");

  double R_in = 0.0;
  for (const auto& h : region.holes)
    R_in = std::max(R_in, koranyi_norm(h.center) + h.radius);
  if (R_in == 0.0) R_in = 1.0;

  auto in_region = [&region](const GroupPoint& z) {
    for (const auto& h : region.holes)
      if (h.contains(z)) return false;
    return true;
  };

  IntegralEstimate total;
  const std::size_t max_annuli = 40;
  const std::size_t per =
      std::max<std::size_t>(spec.max_evaluations / (max_annuli + 4), 64);

  // Core: inside B_{R_in} minus the holes.
  {
    RngStream rng(spec.seed, 0xc0de);
    Field masked = [&](const GroupPoint& z) { return in_region(z) ? f(z) : 0.0; };
    KoranyiBall core(GroupPoint(dim), R_in);
    total += detail::mc_ball(masked, core, 4 * per, rng);
  }

  // Dyadic annuli R_in 2^k <= rho < R_in 2^{k+1}; geometric cut-off.
  double last_mag = 0.0;
  double sup_frho = 0.0;  // sup |f| rho^d over the outermost sampled annulus
  double R_out = R_in;
  for (std::size_t k = 0; k < max_annuli; ++k) {
    const double r_lo = R_in * std::pow(2.0, double(k));
    const double r_hi = 2.0 * r_lo;
    RngStream rng(spec.seed, 0xa000 + k);
    GroupPoint w(dim);
    double sum = 0.0, sumsq = 0.0, local_sup = 0.0;
    std::size_t kept = 0, tries = 0;
    while (kept < per && tries < 64 * per) {
      ++tries;
      for (std::size_t i = 0; i < dim.two_n(); ++i) w.x_at(i) = rng.uniform(-r_hi, r_hi);
      w.t() = rng.uniform(-0.25 * r_hi * r_hi, 0.25 * r_hi * r_hi);
      const double r = koranyi_norm(w);
      if (r >= r_hi || r < r_lo) continue;
      const double v = f(w);
      if (!std::isfinite(v)) throw std::runtime_error("haar_integrate: non-finite sample");
      sum += v;
      sumsq += v * v;
      local_sup = std::max(local_sup, std::abs(v) * std::pow(r, region.decay_exponent));
      ++kept;
    }
    const double vol = unit_ball_volume(dim) * (std::pow(r_hi, Q) - std::pow(r_lo, Q));
    const double mean = sum / double(kept);
    const double var = std::max(0.0, sumsq / double(kept) - mean * mean);
    IntegralEstimate part;
    part.value = vol * mean;
    part.std_error = vol * std::sqrt(var / double(kept));
    part.evaluations = kept;
    total += part;
    last_mag = std::abs(part.value);
    sup_frho = local_sup;
    R_out = r_hi;
    if (last_mag < 0.25 * spec.rel_tolerance * std::abs(total.value) && k >= 2) break;
    if (k + 1 == max_annuli && last_mag > spec.rel_tolerance * std::abs(total.value)) {
      total.converged = false;
    }
  }

  // Polar tail: int_{rho>R} C rho^{-d} = C sigma R^{Q-d} / (d-Q).
  const double d = region.decay_exponent;
  const double tail = sup_frho * sphere_measure(dim) * std::pow(R_out, Q - d) / (d - Q);
  total.value += tail;
  total.std_error = std::sqrt(total.std_error * total.std_error + 0.09 * tail * tail);
  return total;
}

inline IntegralEstimate haar_integrate(const Field& f, const IntegrationRegion& region,
                                       const IntegrationSpec& spec) {
  if (std::holds_alternative<KoranyiBall>(region))
    return haar_integrate(f, std::get<KoranyiBall>(region), spec);
  return haar_integrate(f, std::get<ComplementRegion>(region), spec);
}

}  // namespace hlab

#endif  // HLAB_INTEGRATE_HPP

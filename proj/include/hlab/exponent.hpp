#ifndef HLAB_EXPONENT_HPP
#define HLAB_EXPONENT_HPP

// Variable exponent functions p(.) on H^n with declared bounds
// 0 < p_- <= p(.) <= p_+ < inf, log-Holder diagnostics, the conjugate
// exponent 1/q = 1/p - alpha/Q, and the moment-order integer D_{p(.)}.

#include <cmath>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "hlab/integrate.hpp"

namespace hlab {

class ExponentFunction {
 public:
  using Evaluator = std::function<double(const GroupPoint&)>;

  // Bounds are declared by the constructor (closed-form exponents in
  // scope); check_log_holder spot-verifies them by sampling.
  ExponentFunction(Evaluator eval, double p_minus, double p_plus,
                   std::optional<double> p_infinity = std::nullopt,
                   Dimension dim = Dimension(1))
      : eval_(std::move(eval)), p_minus_(p_minus), p_plus_(p_plus), p_infinity_(p_infinity),
        dim_(dim) {
    detail::require(p_minus_ > 0.0 && p_minus_ <= p_plus_ && std::isfinite(p_plus_),
                    "ExponentFunction: need 0 < p_- <= p_+ < inf");
  }

  static ExponentFunction constant(double p, Dimension dim = Dimension(1)) {
    return ExponentFunction([p](const GroupPoint&) { return p; }, p, p, p, dim);
  }

  double operator()(const GroupPoint& z) const { return eval_(z); }
  double p_minus() const { return p_minus_; }
  double p_plus() const { return p_plus_; }
  double underline_p() const { return std::min(p_minus_, 1.0); }
  std::optional<double> p_infinity() const { return p_infinity_; }
  Dimension dim() const { return dim_; }

 private:
  Evaluator eval_;
  double p_minus_, p_plus_;
  std::optional<double> p_infinity_;
  Dimension dim_;
};

namespace detail {
// tau-parametrized path from e to w; distances scale down with tau.
inline GroupPoint dilate_curve(const GroupPoint& w, double tau) {
  return dilate(tau, w);
}
}  // namespace detail
using detail::dilate_curve;

struct LogHolderReport {
  double C_local = 0.0;     // fitted constant of the local condition
  double C_infinity = 0.0;  // fitted constant of the decay condition
  std::size_t violations = 0;
  bool diverging = false;  // local constant blows up as pair distance -> 0
  double C_small_scale = 0.0;
  double C_large_scale = 0.0;
};

// Fits the smallest C with |p(a)-p(b)| <= C / (-log rho(a^{-1}b)) over
// random pairs at distances <= 1/2, and C_inf with
// |p(z)-p_inf| <= C_inf / log(e+rho(z)) over a log-spaced radius sweep.
// Reports, never throws: a divergence flag marks exponents whose fitted
// local constant keeps growing at small scales.
inline LogHolderReport check_log_holder(const ExponentFunction& p,
                                        std::size_t sample_count = 4000,
                                        std::uint64_t seed = 1,
                                        double region_radius = 8.0) {
  LogHolderReport rep;
  const Dimension dim = p.dim();
  RngStream rng(seed, 0x109);
  const GroupPoint e = GroupPoint::identity(dim);
  auto anchors = sample_ball(KoranyiBall(e, region_radius), sample_count, seed ^ 0x7f);
  const double tol = 1e-9;
  for (std::size_t k = 0; k < sample_count; ++k) {
    const GroupPoint& a = anchors[k];
    // log-uniform offset scale in [2^-16, 1/2]
    const double s = std::pow(2.0, -rng.uniform(1.0, 16.0));
    GroupPoint u(dim);
    do {
      for (std::size_t i = 0; i < dim.two_n(); ++i) u.x_at(i) = rng.uniform(-1.0, 1.0);
      u.t() = rng.uniform(-0.25, 0.25);
    } while (koranyi_norm(u) >= 1.0 || koranyi_norm(u) < 1e-3);
    const GroupPoint w = dilate(s / koranyi_norm(u), u);
    const GroupPoint b = mul(a, w);
    const double pa = p(a), pb = p(b);
    if (pa < p.p_minus() - tol || pa > p.p_plus() + tol || pa <= 0.0) ++rep.violations;
    const double c = std::abs(pa - pb) * (-std::log(s));
    rep.C_local = std::max(rep.C_local, c);
    if (s >= std::pow(2.0, -4.0)) rep.C_large_scale = std::max(rep.C_large_scale, c);

    // A pair whose exponent values differ is refined by bisection along
    // tau -> a . (tau w): a jump that survives refinement yields pairs at
    // arbitrarily small distance with undiminished |p - p|, and the fitted
    // constant on those pairs diverges logarithmically.
    if (std::abs(pa - pb) > 1e-12) {
      double tlo = 0.0, thi = 1.0;
      double plo = pa, phi = pb;
      for (int step = 0; step < 60; ++step) {
        const double tm = 0.5 * (tlo + thi);
        const double pm = p(mul(a, dilate_curve(w, tm)));
        if (std::abs(pm - plo) >= std::abs(pm - phi)) {
          thi = tm;
          phi = pm;
        } else {
          tlo = tm;
          plo = pm;
        }
        if (thi - tlo < 1e-15) break;
      }
      const GroupPoint zl = tlo == 0.0 ? a : mul(a, dilate_curve(w, tlo));
      const GroupPoint zh = mul(a, dilate_curve(w, thi));
      const double dfine = koranyi_dist(zh, zl);
      if (dfine > 0.0 && dfine <= 0.5) {
        const double cf = std::abs(p(zl) - p(zh)) * (-std::log(dfine));
        rep.C_local = std::max(rep.C_local, cf);
        rep.C_small_scale = std::max(rep.C_small_scale, cf);
      }
    }
  }
  rep.diverging = rep.C_small_scale > 4.0 * rep.C_large_scale + 0.5;

  GroupPoint far_probe(dim);
  far_probe.x_at(0) = 1e9;
  const double p_inf = p.p_infinity().value_or(p(far_probe));
  for (std::size_t k = 0; k < sample_count; ++k) {
    const double r = std::pow(10.0, rng.uniform(-2.0, 6.0));
    GroupPoint u(dim);
    do {
      for (std::size_t i = 0; i < dim.two_n(); ++i) u.x_at(i) = rng.uniform(-1.0, 1.0);
      u.t() = rng.uniform(-0.25, 0.25);
    } while (koranyi_norm(u) >= 1.0 || koranyi_norm(u) < 1e-3);
    const GroupPoint z = dilate(r / koranyi_norm(u), u);
    const double pz = p(z);
    if (pz < p.p_minus() - tol || pz > p.p_plus() + tol || pz <= 0.0) ++rep.violations;
    rep.C_infinity = std::max(rep.C_infinity, std::abs(pz - p_inf) * std::log(std::exp(1.0) + r));
  }
  return rep;
}

// Pointwise conjugate 1/q(.) = 1/p(.) - alpha/Q.
inline ExponentFunction conjugate_exponent(const ExponentFunction& p, double alpha,
                                           Dimension dim) {
  const double Q = dim.Q();
  detail::require(alpha >= 0.0 && alpha < Q, "conjugate_exponent: need 0 <= alpha < Q");
  if (alpha > 0.0)
    detail::require(p.p_plus() < Q / alpha, "conjugate_exponent: need p_+ < Q/alpha");
  auto q = [p, alpha, Q](const GroupPoint& z) {
    const double pz = p(z);
    const double inv = 1.0 / pz - alpha / Q;
    if (inv <= 0.0) throw std::runtime_error("conjugate_exponent: nonpositive exponent sampled");
    return 1.0 / inv;
  };
  auto conj = [alpha, Q](double v) { return 1.0 / (1.0 / v - alpha / Q); };
  std::optional<double> qinf;
  if (p.p_infinity()) qinf = conj(*p.p_infinity());
  return ExponentFunction(q, conj(p.p_minus()), conj(p.p_plus()), qinf, dim);
}

// Minimal k >= 0 with (2n+k+3) p_- > 2n+2.  The inequality is strict;
// values within a relative 1e-9 of equality are treated as not exceeding,
// so rational boundary cases resolve the way exact arithmetic would.
inline unsigned d_p(const ExponentFunction& p, std::size_t n) {
  const double target = double(2 * n + 2);
  for (unsigned k = 0;; ++k) {
    const double lhs = double(2 * n + k + 3) * p.p_minus();
    if (lhs > target * (1.0 + 1e-9)) return k;
  }
}

struct RotationTransform {
  RotationMatrix A;
};
struct DilationTransform {
  double r;
};
using SymmetryTransform = std::variant<RotationTransform, DilationTransform>;

inline GroupPoint apply_transform(const SymmetryTransform& tr, const GroupPoint& z) {
  if (std::holds_alternative<RotationTransform>(tr))
    return rotate(std::get<RotationTransform>(tr).A, z);
  return dilate(std::get<DilationTransform>(tr).r, z);
}

// Max |p(T z) - p(z)| over random samples; 0 for exactly symmetric p.
inline double check_symmetry(const ExponentFunction& p, const SymmetryTransform& tr,
                             std::size_t samples = 2000, std::uint64_t seed = 1,
                             double region_radius = 16.0) {
  const Dimension dim = p.dim();
  auto pts = sample_ball(KoranyiBall(GroupPoint::identity(dim), region_radius), samples,
                         seed ^ 0x515);
  double worst = 0.0;
  for (const auto& z : pts)
    worst = std::max(worst, std::abs(p(apply_transform(tr, z)) - p(z)));
  return worst;
}

}  // namespace hlab

#endif  // HLAB_EXPONENT_HPP

#ifndef HLAB_DERIVATIVE_HPP
#define HLAB_DERIVATIVE_HPP

// Finite-difference left-invariant derivatives.  X_i f(z) is the central
// difference of s -> f(z . gamma_i(s)) at s = 0 with gamma_i(s) = (s e_i, 0)
// for x axes and (0, s) for the t axis; higher orders nest in the fixed
// composition order X_0^{i_0} ... X_{2n}^{i_{2n}} and are Richardson
// extrapolated in the common step.

#include <cmath>
#include <functional>
#include <vector>

#include "hlab/integrate.hpp"
#include "hlab/multiindex.hpp"

namespace hlab {

struct DerivativeSpec {
  // Effective step at z is h * (1 + rho(z)).
  double h = 1e-3;
  int richardson_levels = 2;
  unsigned max_homogeneous_degree = 6;  // nested differencing guard

  DerivativeSpec() = default;
  DerivativeSpec(double h_, int levels, unsigned maxdeg = 6)
      : h(h_), richardson_levels(levels), max_homogeneous_degree(maxdeg) {
    detail::require(h > 0.0, "DerivativeSpec: h must be positive");
    detail::require(levels >= 1, "DerivativeSpec: richardson_levels must be >= 1");
  }
};

namespace detail {

inline GroupPoint axis_offset(Dimension dim, std::size_t axis, double s) {
  GroupPoint g(dim);
  if (axis == dim.two_n())
    g.t() = s;
  else
    g.x_at(axis) = s;
  return g;
}

// Fully nested central difference of X^I f at z with one common step h.
inline double nested_difference(const MultiIndex& I, const Field& f, const GroupPoint& z,
                                double h) {
  const std::size_t axis = I.leading_axis();
  if (axis == I.size()) {
    const double v = f(z);
    if (!std::isfinite(v)) throw std::runtime_error("derivative: non-finite sample");
    return v;
  }
  const MultiIndex rest = I.minus(axis);
  const Dimension dim = I.dim();
  const GroupPoint zp = mul(z, axis_offset(dim, axis, h));
  const GroupPoint zm = mul(z, axis_offset(dim, axis, -h));
  return (nested_difference(rest, f, zp, h) - nested_difference(rest, f, zm, h)) /
         (2.0 * h);
}

}  // namespace detail

// X^I f(z) with Richardson extrapolation; for nested symmetric differences
// the error is a series in even powers of h, so each level cancels one h^2.
// Throws on detected extrapolation divergence (needs >= 3 levels to judge).
inline double higher_derivative(const MultiIndex& I, const Field& f, const GroupPoint& z,
                                const DerivativeSpec& spec = {}) {
  detail::require(I.size() == z.two_n() + 1, "higher_derivative: dimension mismatch");
  detail::require(I.homogeneous_degree() <= spec.max_homogeneous_degree,
                  "higher_derivative: d(I) exceeds nesting guard");
  if (I.is_zero()) return f(z);
  const double h0 = spec.h * (1.0 + koranyi_norm(z));
  const int L = spec.richardson_levels;
  std::vector<double> d(L);
  for (int j = 0; j < L; ++j)
    d[j] = detail::nested_difference(I, f, z, h0 / std::pow(2.0, j));
  // Divergence = corrections growing for two consecutive levels while
  // being non-negligible against the value; a single anomalous ratio (an
  // accidentally vanishing low-order error coefficient) is not flagged.
  double c1 = -1.0, c2 = -1.0;
  for (int k = 1; k < L; ++k) {
    const double before = d[0];
    const double w = std::pow(4.0, k);
    for (int j = 0; j + k < L; ++j) d[j] = (w * d[j + 1] - d[j]) / (w - 1.0);
    const double corr = std::abs(d[0] - before);
    if (k >= 3 && c1 > 0.0 && c2 > 0.0 && corr > 4.0 * c1 && c1 > 4.0 * c2 &&
        corr > 1e-9 * (1.0 + std::abs(d[0])))
      throw std::runtime_error("higher_derivative: extrapolation divergence");
    c2 = c1;
    c1 = corr;
  }
  return d[0];
}

// First-order left-invariant derivative along `axis` (0..2n; 2n is t).
inline double vector_field_apply(std::size_t axis, const Field& f, const GroupPoint& z,
                                 const DerivativeSpec& spec = {}) {
  detail::require(axis <= z.two_n(), "vector_field_apply: axis out of range");
  return higher_derivative(MultiIndex(z.dim()).plus(axis), f, z, spec);
}

}  // namespace hlab

#endif  // HLAB_DERIVATIVE_HPP

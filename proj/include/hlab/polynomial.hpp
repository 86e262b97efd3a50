#ifndef HLAB_POLYNOMIAL_HPP
#define HLAB_POLYNOMIAL_HPP

// Polynomials on H^n in the monomial basis z^I, graded by the homogeneous
// degree d(I).  The left-invariant vector fields
//   X_i     = d/dx_i     + (x_{i+n}/2) d/dt      (i < n)
//   X_{i+n} = d/dx_{i+n} - (x_i/2)     d/dt      (i < n)
//   X_{2n}  = d/dt
// act exactly on this representation, which is what makes the Taylor
// interpolation matrix exactly computable.

#include <cmath>
#include <map>

#include "hlab/multiindex.hpp"

namespace hlab {

class PolynomialHG {
 public:
  explicit PolynomialHG(Dimension dim) : dim_(dim) {}

  static PolynomialHG monomial(const MultiIndex& I, double c = 1.0) {
    PolynomialHG p(I.dim());
    if (c != 0.0) p.coef_[I] = c;
    return p;
  }
  static PolynomialHG constant(Dimension dim, double c) {
    PolynomialHG p(dim);
    if (c != 0.0) p.coef_[MultiIndex(dim)] = c;
    return p;
  }

  Dimension dim() const { return dim_; }
  const std::map<MultiIndex, double>& terms() const { return coef_; }

  double coefficient(const MultiIndex& I) const {
    auto it = coef_.find(I);
    return it == coef_.end() ? 0.0 : it->second;
  }
  void set_coefficient(const MultiIndex& I, double c) {
    if (c == 0.0)
      coef_.erase(I);
    else
      coef_[I] = c;
  }

  unsigned max_homogeneous_degree() const {
    unsigned d = 0;
    for (const auto& [I, c] : coef_) d = std::max(d, I.homogeneous_degree());
    return d;
  }

  double eval(const GroupPoint& z) const {
    double s = 0.0;
    for (const auto& [I, c] : coef_) s += c * monomial_eval(I, z);
    return s;
  }

  PolynomialHG truncated(unsigned max_degree) const {
    PolynomialHG out(dim_);
    for (const auto& [I, c] : coef_)
      if (I.homogeneous_degree() <= max_degree) out.coef_[I] = c;
    return out;
  }

  PolynomialHG& operator+=(const PolynomialHG& o) {
    for (const auto& [I, c] : o.coef_) set_coefficient(I, coefficient(I) + c);
    return *this;
  }
  PolynomialHG& operator*=(double s) {
    if (s == 0.0) {
      coef_.clear();
      return *this;
    }
    for (auto& [I, c] : coef_) c *= s;
    return *this;
  }
  friend PolynomialHG operator+(PolynomialHG a, const PolynomialHG& b) { return a += b; }
  friend PolynomialHG operator*(double s, PolynomialHG p) { return p *= s; }

  friend PolynomialHG operator*(const PolynomialHG& a, const PolynomialHG& b) {
    PolynomialHG out(a.dim_);
    for (const auto& [I, ci] : a.coef_)
      for (const auto& [J, cj] : b.coef_) {
        MultiIndex K = I;
        for (std::size_t ax = 0; ax < K.size(); ++ax)
          for (unsigned r = 0; r < J[ax]; ++r) K = K.plus(ax);
        out.set_coefficient(K, out.coefficient(K) + ci * cj);
      }
    return out;
  }

  // Exact X_axis P, axes 0..2n (axis 2n is d/dt).
  PolynomialHG vector_field(std::size_t axis) const {
    const std::size_t twon = dim_.two_n();
    const std::size_t n = dim_.n;
    const std::size_t taxis = twon;
    PolynomialHG out(dim_);
    auto add = [&out](const MultiIndex& I, double c) {
      if (c != 0.0) out.set_coefficient(I, out.coefficient(I) + c);
    };
    for (const auto& [I, c] : coef_) {
      if (axis == taxis) {
        if (I[taxis] > 0) add(I.minus(taxis), c * double(I[taxis]));
        continue;
      }
      // d/dx_axis part
      if (I[axis] > 0) add(I.minus(axis), c * double(I[axis]));
      // (+- x_partner / 2) d/dt part
      const std::size_t partner = axis < n ? axis + n : axis - n;
      const double sign = axis < n ? 0.5 : -0.5;
      if (I[taxis] > 0) add(I.minus(taxis).plus(partner), sign * c * double(I[taxis]));
    }
    return out;
  }

  // Exact X^I P = X_0^{i_0} ... X_{2n}^{i_{2n}} P (lowest axis outermost).
  PolynomialHG derivative(const MultiIndex& I) const {
    PolynomialHG cur = *this;
    for (std::size_t axis = I.size(); axis-- > 0;)
      for (unsigned r = 0; r < I[axis]; ++r) cur = cur.vector_field(axis);
    return cur;
  }

  // P(z0 . w) as a polynomial in w; homogeneous degree does not increase.
  PolynomialHG left_translate(const GroupPoint& z0) const {
    detail::require(z0.two_n() == dim_.two_n(), "left_translate: dimension mismatch");
    const std::size_t twon = dim_.two_n();
    const std::size_t n = dim_.n;
    // Coordinate polynomials of z0 . w in w.
    std::vector<PolynomialHG> coord;
    coord.reserve(twon + 1);
    for (std::size_t i = 0; i < twon; ++i) {
      PolynomialHG li = PolynomialHG::constant(dim_, z0.x_at(i));
      li += PolynomialHG::monomial(MultiIndex(dim_).plus(i));
      coord.push_back(li);
    }
    PolynomialHG tt = PolynomialHG::constant(dim_, z0.t());
    tt += PolynomialHG::monomial(MultiIndex(dim_).plus(twon));
    // x0^T J w = 1/2 sum_i (x0_{n+i} w_i - x0_i w_{n+i})
    for (std::size_t i = 0; i < n; ++i) {
      tt += 0.5 * z0.x_at(n + i) * PolynomialHG::monomial(MultiIndex(dim_).plus(i));
      tt += -0.5 * z0.x_at(i) * PolynomialHG::monomial(MultiIndex(dim_).plus(n + i));
    }
    coord.push_back(tt);

    PolynomialHG out(dim_);
    for (const auto& [I, c] : coef_) {
      PolynomialHG term = PolynomialHG::constant(dim_, c);
      for (std::size_t ax = 0; ax <= twon; ++ax)
        for (unsigned r = 0; r < I[ax]; ++r) term = term * coord[ax];
      out += term;
    }
    return out;
  }

 private:
  Dimension dim_;
  std::map<MultiIndex, double> coef_;
};

}  // namespace hlab

#endif  // HLAB_POLYNOMIAL_HPP

#ifndef HLAB_CORE_HPP
#define HLAB_CORE_HPP

// Heisenberg group arithmetic and Koranyi geometry.
//
// Points live in H^n = R^{2n} x R with the noncommutative product
//   (x,t) . (y,s) = (x+y, t+s + x^T J y),   J = 1/2 [[0,-I_n],[I_n,0]],
// dilations r.(x,t) = (rx, r^2 t), and the gauge
//   rho(x,t) = (|x|^4 + 16 t^2)^{1/4}.
// The homogeneous dimension is Q = 2n+2.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace hlab {

namespace detail {
inline void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

// Largest supported n. Points carry inline storage so that group
// arithmetic in quadrature inner loops never touches the heap.
inline constexpr std::size_t kMaxN = 4;

struct Dimension {
  std::size_t n = 1;

  explicit Dimension(std::size_t n_ = 1) : n(n_) {
    detail::require(n >= 1 && n <= kMaxN, "Dimension: n out of supported range");
  }
  std::size_t two_n() const { return 2 * n; }
  // Homogeneous dimension Q = 2n+2 (volume scaling exponent).
  double Q() const { return static_cast<double>(2 * n + 2); }
  int Qi() const { return static_cast<int>(2 * n + 2); }
  friend bool operator==(const Dimension&, const Dimension&) = default;
};

class GroupPoint {
 public:
  GroupPoint() : twon_(2) { xs_.fill(0.0); }

  explicit GroupPoint(Dimension dim) : twon_(static_cast<std::uint8_t>(dim.two_n())) {
    xs_.fill(0.0);
  }

  GroupPoint(std::span<const double> x, double t) {
    detail::require(x.size() >= 2 && x.size() <= 2 * kMaxN && x.size() % 2 == 0,
                    "GroupPoint: x must have even length 2n, n <= kMaxN");
    twon_ = static_cast<std::uint8_t>(x.size());
    xs_.fill(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) xs_[i] = x[i];
    t_ = t;
  }

  GroupPoint(std::initializer_list<double> x, double t)
      : GroupPoint(std::span<const double>(x.begin(), x.size()), t) {}

  static GroupPoint identity(Dimension dim) { return GroupPoint(dim); }

  Dimension dim() const { return Dimension(twon_ / 2); }
  std::size_t two_n() const { return twon_; }

  std::span<const double> x() const { return {xs_.data(), twon_}; }
  std::span<double> x() { return {xs_.data(), twon_}; }
  double t() const { return t_; }
  double& t() { return t_; }

  double x_at(std::size_t i) const { return xs_[i]; }
  double& x_at(std::size_t i) { return xs_[i]; }

  bool finite() const {
    if (!std::isfinite(t_)) return false;
    for (std::size_t i = 0; i < twon_; ++i)
      if (!std::isfinite(xs_[i])) return false;
    return true;
  }

  friend bool operator==(const GroupPoint& a, const GroupPoint& b) {
    if (a.twon_ != b.twon_ || a.t_ != b.t_) return false;
    for (std::size_t i = 0; i < a.twon_; ++i)
      if (a.xs_[i] != b.xs_[i]) return false;
    return true;
  }

 private:
  std::array<double, 2 * kMaxN> xs_{};
  double t_ = 0.0;
  std::uint8_t twon_;
};

// x^T J y = 1/2 sum_i (x_{n+i} y_i - x_i y_{n+i}).  Skewness gives
// x^T J x = 0 exactly, which several kernel-geometry identities rely on.
inline double symplectic_form(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size() / 2;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[n + i] * y[i] - x[i] * y[n + i];
  return 0.5 * acc;
}

inline GroupPoint mul(const GroupPoint& a, const GroupPoint& b) {
  detail::require(a.two_n() == b.two_n(), "mul: dimension mismatch");
  GroupPoint out = a;
  for (std::size_t i = 0; i < a.two_n(); ++i) out.x_at(i) += b.x_at(i);
  out.t() = a.t() + b.t() + symplectic_form(a.x(), b.x());
  return out;
}

inline GroupPoint inv(const GroupPoint& a) {
  GroupPoint out = a;
  for (std::size_t i = 0; i < a.two_n(); ++i) out.x_at(i) = -a.x_at(i);
  out.t() = -a.t();
  return out;
}

inline GroupPoint dilate(double r, const GroupPoint& a) {
  detail::require(r > 0.0, "dilate: r must be positive");
  GroupPoint out = a;
  for (std::size_t i = 0; i < a.two_n(); ++i) out.x_at(i) = r * a.x_at(i);
  out.t() = r * r * a.t();
  return out;
}

inline double koranyi_norm(const GroupPoint& a) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.two_n(); ++i) d2 += a.x_at(i) * a.x_at(i);
  const double t = a.t();
  return std::sqrt(std::sqrt(d2 * d2 + 16.0 * t * t));
}

// rho(b^{-1} . a), the left-invariant gauge distance.
inline double koranyi_dist(const GroupPoint& a, const GroupPoint& b) {
  return koranyi_norm(mul(inv(b), a));
}

// Element of Sp(2n,R) ∩ SO(2n): A^T J A = J, A^T A = I, det A = 1.
// These act on H^n by A.(x,t) = (Ax,t) and preserve rho.
class RotationMatrix {
 public:
  // Validates the three matrix invariants to absolute tolerance `tol`
  // on entries; throws std::invalid_argument on failure.
  RotationMatrix(Dimension dim, std::span<const double> entries_row_major,
                 double tol = 1e-10);

  // Identity element.
  explicit RotationMatrix(Dimension dim);

  // n = 1 only: rotation of R^2 by `angle`; these exhaust Sp(2,R) ∩ SO(2).
  static RotationMatrix planar(double angle);

  // Block-diagonal embedding of a planar rotation acting on every
  // (x_i, x_{i+n}) pair; lies in Sp(2n,R) ∩ SO(2n) for all n.
  static RotationMatrix block_planar(Dimension dim, double angle);

  Dimension dim() const { return Dimension(twon_ / 2); }
  std::size_t two_n() const { return twon_; }
  double at(std::size_t r, std::size_t c) const { return a_[r * twon_ + c]; }

  void apply(std::span<const double> in, std::span<double> out) const {
    for (std::size_t r = 0; r < twon_; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < twon_; ++c) acc += a_[r * twon_ + c] * in[c];
      out[r] = acc;
    }
  }

  RotationMatrix transpose() const;

 private:
  RotationMatrix() = default;
  void validate(double tol) const;

  std::array<double, 4 * kMaxN * kMaxN> a_{};
  std::uint8_t twon_ = 2;
};

inline GroupPoint rotate(const RotationMatrix& A, const GroupPoint& p) {
  detail::require(A.two_n() == p.two_n(), "rotate: dimension mismatch");
  GroupPoint out = p;
  A.apply(p.x(), out.x());
  return out;
}

namespace detail {

// Determinant by LU with partial pivoting; matrices here are at most 8x8.
inline double det_rowmajor(const double* a, std::size_t n) {
  std::array<double, 4 * kMaxN * kMaxN> m{};
  for (std::size_t i = 0; i < n * n; ++i) m[i] = a[i];
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m[r * n + c]) > std::abs(m[piv * n + c])) piv = r;
    if (m[piv * n + c] == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m[piv * n + k], m[c * n + k]);
      det = -det;
    }
    det *= m[c * n + c];
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m[r * n + c] / m[c * n + c];
      for (std::size_t k = c; k < n; ++k) m[r * n + k] -= f * m[c * n + k];
    }
  }
  return det;
}

}  // namespace detail

inline RotationMatrix::RotationMatrix(Dimension dim,
                                      std::span<const double> entries_row_major,
                                      double tol)
    : twon_(static_cast<std::uint8_t>(dim.two_n())) {
  detail::require(entries_row_major.size() == twon_ * std::size_t(twon_),
                  "RotationMatrix: wrong entry count");
  for (std::size_t i = 0; i < entries_row_major.size(); ++i) a_[i] = entries_row_major[i];
  validate(tol);
}

inline RotationMatrix::RotationMatrix(Dimension dim)
    : twon_(static_cast<std::uint8_t>(dim.two_n())) {
  for (std::size_t i = 0; i < twon_; ++i) a_[i * twon_ + i] = 1.0;
}

inline RotationMatrix RotationMatrix::planar(double angle) {
  return block_planar(Dimension(1), angle);
}

inline RotationMatrix RotationMatrix::block_planar(Dimension dim, double angle) {
  RotationMatrix A(dim);
  const std::size_t n = dim.n;
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < n; ++i) {
    A.a_[i * A.twon_ + i] = c;
    A.a_[i * A.twon_ + (i + n)] = -s;
    A.a_[(i + n) * A.twon_ + i] = s;
    A.a_[(i + n) * A.twon_ + (i + n)] = c;
  }
  A.validate(1e-10);
  return A;
}

inline RotationMatrix RotationMatrix::transpose() const {
  RotationMatrix out;
  out.twon_ = twon_;
  for (std::size_t r = 0; r < twon_; ++r)
    for (std::size_t c = 0; c < twon_; ++c) out.a_[c * twon_ + r] = a_[r * twon_ + c];
  return out;
}

inline void RotationMatrix::validate(double tol) const {
  const std::size_t N = twon_;
  const std::size_t n = N / 2;
  // J entries: J[i][i+n] = -1/2, J[i+n][i] = 1/2.
  auto Jat = [n](std::size_t r, std::size_t c) -> double {
    if (r < n && c == r + n) return -0.5;
    if (r >= n && c == r - n) return 0.5;
    return 0.0;
  };
  for (std::size_t r = 0; r < N; ++r) {
    for (std::size_t c = 0; c < N; ++c) {
      double atja = 0.0, ata = 0.0;
      for (std::size_t k = 0; k < N; ++k) {
        ata += a_[k * N + r] * a_[k * N + c];
        double jak = 0.0;
        for (std::size_t l = 0; l < N; ++l) jak += Jat(k, l) * a_[l * N + c];
        atja += a_[k * N + r] * jak;
      }
      detail::require(std::abs(atja - Jat(r, c)) <= tol,
                      "RotationMatrix: A^T J A = J violated");
      detail::require(std::abs(ata - (r == c ? 1.0 : 0.0)) <= tol,
                      "RotationMatrix: A^T A = I violated");
    }
  }
  detail::require(std::abs(detail::det_rowmajor(a_.data(), N) - 1.0) <= tol * 100,
                  "RotationMatrix: det(A) = 1 violated");
}

// Open rho-ball B_delta(center) = { z : rho(center^{-1} . z) < delta }.
// Membership is strict; the boundary has measure zero.
struct KoranyiBall {
  GroupPoint center;
  double radius = 1.0;

  KoranyiBall() = default;
  KoranyiBall(GroupPoint c, double r) : center(std::move(c)), radius(r) {
    detail::require(radius > 0.0, "KoranyiBall: radius must be positive");
  }

  Dimension dim() const { return center.dim(); }

  bool contains(const GroupPoint& z) const {
    return koranyi_dist(z, center) < radius;
  }

  KoranyiBall expanded(double factor) const {
    detail::require(factor > 0.0, "KoranyiBall: expansion factor must be positive");
    return KoranyiBall(center, factor * radius);
  }
};

}  // namespace hlab

#endif  // HLAB_CORE_HPP

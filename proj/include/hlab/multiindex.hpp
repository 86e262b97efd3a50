#ifndef HLAB_MULTIINDEX_HPP
#define HLAB_MULTIINDEX_HPP

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <vector>

#include "hlab/core.hpp"

namespace hlab {

// Multiindex I in (N u {0})^{2n+1}.  Axes 0..2n-1 address the x
// coordinates, axis 2n addresses t and counts twice in the homogeneous
// degree: d(I) = i_0 + ... + i_{2n-1} + 2 i_{2n}.
class MultiIndex {
 public:
  explicit MultiIndex(Dimension dim) : len_(static_cast<std::uint8_t>(dim.two_n() + 1)) {
    e_.fill(0);
  }

  MultiIndex(std::initializer_list<unsigned> entries) {
    detail::require(entries.size() >= 3 && entries.size() <= 2 * kMaxN + 1 &&
                        entries.size() % 2 == 1,
                    "MultiIndex: entry count must be odd, 2n+1");
    e_.fill(0);
    len_ = static_cast<std::uint8_t>(entries.size());
    std::size_t k = 0;
    for (unsigned v : entries) e_[k++] = static_cast<std::uint8_t>(v);
  }

  Dimension dim() const { return Dimension((len_ - 1) / 2); }
  std::size_t size() const { return len_; }
  unsigned operator[](std::size_t i) const { return e_[i]; }

  unsigned length() const {
    unsigned s = 0;
    for (std::size_t i = 0; i < len_; ++i) s += e_[i];
    return s;
  }

  unsigned homogeneous_degree() const {
    unsigned s = 0;
    for (std::size_t i = 0; i + 1 < len_; ++i) s += e_[i];
    return s + 2u * e_[len_ - 1];
  }

  bool is_zero() const { return length() == 0; }

  MultiIndex plus(std::size_t axis) const {
    MultiIndex out = *this;
    out.e_[axis] = static_cast<std::uint8_t>(out.e_[axis] + 1);
    return out;
  }
  MultiIndex minus(std::size_t axis) const {
    detail::require(e_[axis] > 0, "MultiIndex: cannot decrement zero entry");
    MultiIndex out = *this;
    out.e_[axis] = static_cast<std::uint8_t>(out.e_[axis] - 1);
    return out;
  }

  // Lowest axis with a nonzero entry (X^I applies that factor outermost).
  std::size_t leading_axis() const {
    for (std::size_t i = 0; i < len_; ++i)
      if (e_[i] > 0) return i;
    return len_;
  }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.len_ == b.len_ && a.e_ == b.e_;
  }
  // Ordering: homogeneous degree first, then lexicographic entries.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
    if (auto c = a.homogeneous_degree() <=> b.homogeneous_degree(); c != 0) return c;
    if (auto c = a.len_ <=> b.len_; c != 0) return c;
    for (std::size_t i = 0; i < a.len_; ++i)
      if (auto c = a.e_[i] <=> b.e_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  // All multiindices with d(I) <= max_degree, sorted by (d(I), lex).
  static std::vector<MultiIndex> all_up_to(Dimension dim, unsigned max_degree) {
    std::vector<MultiIndex> out;
    MultiIndex cur(dim);
    enumerate(cur, 0, max_degree, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static void enumerate(MultiIndex& cur, std::size_t axis, unsigned budget,
                        std::vector<MultiIndex>& out) {
    if (axis == cur.size()) {
      out.push_back(cur);
      return;
    }
    const unsigned weight = (axis + 1 == cur.size()) ? 2 : 1;
    for (unsigned v = 0; v * weight <= budget; ++v) {
      cur.e_[axis] = static_cast<std::uint8_t>(v);
      enumerate(cur, axis + 1, budget - v * weight, out);
    }
    cur.e_[axis] = 0;
  }

  std::array<std::uint8_t, 2 * kMaxN + 1> e_{};
  std::uint8_t len_ = 3;
};

inline unsigned homogeneous_degree(const MultiIndex& I) { return I.homogeneous_degree(); }

// z^I = x_0^{i_0} ... x_{2n-1}^{i_{2n-1}} t^{i_{2n}}.
inline double monomial_eval(const MultiIndex& I, const GroupPoint& z) {
  detail::require(I.size() == z.two_n() + 1, "monomial_eval: dimension mismatch");
  double v = 1.0;
  for (std::size_t a = 0; a < z.two_n(); ++a)
    for (unsigned k = 0; k < I[a]; ++k) v *= z.x_at(a);
  for (unsigned k = 0; k < I[z.two_n()]; ++k) v *= z.t();
  return v;
}

}  // namespace hlab

#endif  // HLAB_MULTIINDEX_HPP

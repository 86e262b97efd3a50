#ifndef HLAB_KERNEL_HPP
#define HLAB_KERNEL_HPP

// The generalized Riesz kernel
//   K(y,z) = prod_j rho( (A_j y, r_j^{-2} s)^{-1} . z )^{-alpha_j},
// with sum alpha_j = Q - alpha.  Two validated regimes:
//   alpha in (0,Q): A_j in Sp(2n,R) ∩ SO(2n), r_j = 1;
//   alpha = 0:      A_j = r_j^{-1} I with pairwise distinct r_j^2.
// In both regimes tau_j(y,s) = (A_j y, r_j^{-2} s) is a group
// automorphism, so the kernel factors are gauge distances to the m
// singular preimages tau_j^{-1}(z) = (A_j^{-1} x, r_j^2 t).

#include <limits>
#include <vector>

#include "hlab/core.hpp"

namespace hlab {

class KernelSpec {
 public:
  // alpha > 0 regime.
  KernelSpec(Dimension dim, double alpha, std::vector<double> alphas,
             std::vector<RotationMatrix> rotations)
      : dim_(dim), alpha_(alpha), alphas_(std::move(alphas)), rot_(std::move(rotations)),
        r_(alphas_.size(), 1.0) {
    detail::require(alpha_ > 0.0 && alpha_ < dim_.Q(),
                    "KernelSpec: rotation case needs 0 < alpha < Q");
    detail::require(rot_.size() == alphas_.size(), "KernelSpec: one matrix per factor");
    for (const auto& A : rot_)
      detail::require(A.dim() == dim_, "KernelSpec: matrix dimension mismatch");
    validate_common();
  }

  // alpha = 0 regime: A_j = r_j^{-1} I.
  KernelSpec(Dimension dim, std::vector<double> alphas, std::vector<double> scales)
      : dim_(dim), alpha_(0.0), alphas_(std::move(alphas)), r_(std::move(scales)) {
    detail::require(r_.size() == alphas_.size(), "KernelSpec: one scale per factor");
    detail::require(r_.size() >= 2, "KernelSpec: alpha = 0 needs m >= 2");
    for (double r : r_) detail::require(r > 0.0, "KernelSpec: scales must be positive");
    for (std::size_t i = 0; i < r_.size(); ++i)
      for (std::size_t j = i + 1; j < r_.size(); ++j)
        detail::require(r_[i] * r_[i] != r_[j] * r_[j],
                        "KernelSpec: r_i^2 - r_j^2 must not vanish");
    validate_common();
  }

  static KernelSpec riesz(Dimension dim, double alpha) {
    return KernelSpec(dim, alpha, {dim.Q() - alpha}, {RotationMatrix(dim)});
  }

  Dimension dim() const { return dim_; }
  double alpha() const { return alpha_; }
  std::size_t m() const { return alphas_.size(); }
  const std::vector<double>& alphas() const { return alphas_; }
  const std::vector<double>& scales() const { return r_; }
  const std::vector<RotationMatrix>& rotations() const { return rot_; }

  // tau_j(y) = (A_j y, r_j^{-2} s).
  GroupPoint tau(std::size_t j, const GroupPoint& y) const {
    GroupPoint out = y;
    if (!rot_.empty()) {
      rot_[j].apply(y.x(), out.x());
    } else {
      for (std::size_t i = 0; i < y.two_n(); ++i) out.x_at(i) = y.x_at(i) / r_[j];
    }
    out.t() = y.t() / (r_[j] * r_[j]);
    return out;
  }

  // tau_j^{-1}(z) = (A_j^{-1} x, r_j^2 t): the j-th singular preimage of z.
  GroupPoint singular_preimage(std::size_t j, const GroupPoint& z) const {
    GroupPoint out = z;
    if (!rot_.empty()) {
      // A^{-1} = A^T for orthogonal A.
      for (std::size_t rr = 0; rr < z.two_n(); ++rr) {
        double acc = 0.0;
        for (std::size_t cc = 0; cc < z.two_n(); ++cc)
          acc += rot_[j].at(cc, rr) * z.x_at(cc);
        out.x_at(rr) = acc;
      }
    } else {
      for (std::size_t i = 0; i < z.two_n(); ++i) out.x_at(i) = r_[j] * z.x_at(i);
    }
    out.t() = z.t() * r_[j] * r_[j];
    return out;
  }

  // Gauge distance entering the j-th kernel factor.
  double rho_j(std::size_t j, const GroupPoint& y, const GroupPoint& z) const {
    return koranyi_dist(z, tau(j, y));
  }

 private:
  void validate_common() {
    double sum = 0.0;
    for (double a : alphas_) {
      detail::require(a > 0.0, "KernelSpec: factor exponents must be positive");
      sum += a;
    }
    detail::require(std::abs(sum - (dim_.Q() - alpha_)) <= 1e-12,
                    "KernelSpec: sum of alpha_j must equal Q - alpha");
    // m > 1 - alpha/Q: automatic for alpha > 0 with m >= 1; the alpha = 0
    // constructor enforces m >= 2.
  }

  Dimension dim_;
  double alpha_;
  std::vector<double> alphas_;
  std::vector<RotationMatrix> rot_;  // empty in the alpha = 0 regime
  std::vector<double> r_;
};

// K(y,z); +infinity exactly on the singular sets z = tau_j(y).
inline double kernel_eval(const KernelSpec& spec, const GroupPoint& y, const GroupPoint& z) {
  double prod = 1.0;
  for (std::size_t j = 0; j < spec.m(); ++j) {
    const double rj = spec.rho_j(j, y, z);
    if (rj == 0.0) return std::numeric_limits<double>::infinity();
    prod *= std::pow(rj, -spec.alphas()[j]);
  }
  return prod;
}

struct SeparationConstants {
  double beta = 0.0;        // min over i != j of min(|r_i - r_j|, |r_i^2 - r_j^2|^{1/2})
  double gamma_proof = 0.0; // max |r_i|
  double gamma_star = 0.0;  // (1 + max r_i) / min r_i
};

inline SeparationConstants separation_constants(const std::vector<double>& r) {
  detail::require(r.size() >= 2, "separation_constants: need at least two scales");
  SeparationConstants out;
  out.beta = std::numeric_limits<double>::infinity();
  double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
  for (double v : r) {
    rmax = std::max(rmax, std::abs(v));
    rmin = std::min(rmin, std::abs(v));
  }
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) {
      const double d2 = std::abs(r[i] * r[i] - r[j] * r[j]);
      detail::require(d2 != 0.0, "separation_constants: repeated r^2");
      out.beta = std::min({out.beta, std::abs(r[i] - r[j]), std::sqrt(d2)});
    }
  out.gamma_proof = rmax;
  out.gamma_star = (1.0 + rmax) / rmin;
  return out;
}

// Region labels for the alpha = 0 splitting at evaluation point z != e:
// indices 1..m are the balls Omega_j around the singular preimages
// (r_j x, r_j^2 t), m+1 is the bounded remainder, m+2 the far zone.
inline std::size_t omega_partition(const KernelSpec& spec, const GroupPoint& z,
                                   const GroupPoint& y) {
  detail::require(spec.alpha() == 0.0, "omega_partition: alpha = 0 specs only");
  const double rho_z = koranyi_norm(z);
  detail::require(rho_z > 0.0, "omega_partition: z must differ from e");
  const auto sep = separation_constants(spec.scales());
  for (std::size_t j = 0; j < spec.m(); ++j) {
    const GroupPoint wj = spec.singular_preimage(j, z);
    if (koranyi_dist(wj, y) < 0.5 * sep.beta * rho_z) return j + 1;
  }
  if (koranyi_norm(y) <= (1.0 + sep.gamma_proof) * rho_z) return spec.m() + 1;
  return spec.m() + 2;
}

}  // namespace hlab

#endif  // HLAB_KERNEL_HPP

#ifndef HLAB_TAYLOR_HPP
#define HLAB_TAYLOR_HPP

// Left Taylor polynomials.  P is the unique polynomial of homogeneous
// degree <= D with X^I P(e) = X^I [w -> f(base.w)](e) for all d(I) <= D.
// The interpolation matrix M_{I,J} = (X^I z^J)(e) is computed exactly on
// the monomial basis; it is block diagonal in the homogeneous degree
// because X^I z^J is homogeneous of degree d(J) - d(I).

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "hlab/derivative.hpp"
#include "hlab/polynomial.hpp"

namespace hlab {

namespace detail {

inline Eigen::MatrixXd taylor_matrix(const std::vector<MultiIndex>& basis) {
  const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd M(m, m);
  const Dimension dim = basis.front().dim();
  const MultiIndex zero(dim);
  for (Eigen::Index j = 0; j < m; ++j) {
    const PolynomialHG zj = PolynomialHG::monomial(basis[j]);
    for (Eigen::Index i = 0; i < m; ++i)
      M(i, j) = zj.derivative(basis[i]).coefficient(zero);
  }
  return M;
}

inline PolynomialHG solve_taylor(const std::vector<MultiIndex>& basis,
                                 const Eigen::VectorXd& rhs) {
  const Eigen::MatrixXd M = taylor_matrix(basis);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw std::logic_error("left_taylor: singular interpolation system");
  const Eigen::VectorXd c = lu.solve(rhs);
  PolynomialHG P(basis.front().dim());
  for (std::size_t k = 0; k < basis.size(); ++k)
    P.set_coefficient(basis[k], c(static_cast<Eigen::Index>(k)));
  return P;
}

}  // namespace detail

// Generic-field path: right-hand sides by Richardson finite differences.
// The default step is deliberately large; nested symmetric differences of
// low order are exact on polynomials once the level count covers the
// degree, and analytic fields gain an h^{2L} truncation order.
inline PolynomialHG left_taylor(const Field& f, const GroupPoint& base, unsigned degree,
                                const DerivativeSpec& spec = DerivativeSpec(0.25, 3)) {
  const Dimension dim = base.dim();
  const auto basis = MultiIndex::all_up_to(dim, degree);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(basis.size()));
  const Field g = [&f, &base](const GroupPoint& w) { return f(mul(base, w)); };
  const GroupPoint e = GroupPoint::identity(dim);
  for (std::size_t k = 0; k < basis.size(); ++k)
    rhs(static_cast<Eigen::Index>(k)) = higher_derivative(basis[k], g, e, spec);
  return detail::solve_taylor(basis, rhs);
}

// Exact path for polynomial inputs: the Taylor projector is truncation of
// the left-translated polynomial to homogeneous degree <= degree.
inline PolynomialHG left_taylor(const PolynomialHG& f, const GroupPoint& base,
                                unsigned degree) {
  return f.left_translate(base).truncated(degree);
}

struct TaylorRemainderReport {
  double max_ratio = 0.0;
  double beta = 2.0;
  std::size_t valid_samples = 0;
  std::size_t guarded_samples = 0;  // denominator underflow, skipped
  std::vector<double> ratios;       // one per valid sample, in input order
};

// Empirical constant for |f(base.z) - P(z)| <= C rho(z)^N sup |X^I f|,
// the sup running over ρ(w) <= beta^N rho(z) and d(I) = N, approximated
// on a finite w-cloud.
inline TaylorRemainderReport taylor_remainder_ratio(
    const Field& f, const GroupPoint& base, unsigned N,
    std::span<const GroupPoint> samples, const DerivativeSpec& spec = DerivativeSpec(0.05, 3),
    double beta = 2.0, std::size_t cloud_size = 48, std::uint64_t seed = 1) {
  detail::require(N >= 1, "taylor_remainder_ratio: N must be >= 1");
  const Dimension dim = base.dim();
  const PolynomialHG P = left_taylor(f, base, N - 1);
  const Field g = [&f, &base](const GroupPoint& w) { return f(mul(base, w)); };

  std::vector<MultiIndex> top;
  for (const auto& I : MultiIndex::all_up_to(dim, N))
    if (I.homogeneous_degree() == N) top.push_back(I);

  TaylorRemainderReport rep;
  rep.beta = beta;
  const GroupPoint e = GroupPoint::identity(dim);
  std::size_t idx = 0;
  for (const GroupPoint& z : samples) {
    ++idx;
    const double rz = koranyi_norm(z);
    if (rz == 0.0) continue;
    const double num = std::abs(g(z) - P.eval(z));
    const double cloud_radius = std::pow(beta, double(N)) * rz;
    auto cloud = sample_ball(KoranyiBall(e, cloud_radius), cloud_size, seed + idx);
    cloud.push_back(e);
    double sup = 0.0;
    for (const auto& w : cloud)
      for (const auto& I : top)
        sup = std::max(sup, std::abs(higher_derivative(I, g, w, spec)));
    const double den = std::pow(rz, double(N)) * sup;
    if (den < 1e-14 * (1.0 + std::abs(g(z)))) {
      if (num < 1e-12 * (1.0 + std::abs(g(z)))) {
        rep.ratios.push_back(0.0);
        ++rep.valid_samples;
      } else {
        ++rep.guarded_samples;
      }
      continue;
    }
    const double ratio = num / den;
    rep.ratios.push_back(ratio);
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    ++rep.valid_samples;
  }
  return rep;
}

}  // namespace hlab

#endif  // HLAB_TAYLOR_HPP

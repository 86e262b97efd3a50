#ifndef HLAB_AQUANTITY_HPP
#define HLAB_AQUANTITY_HPP

// The weighted aggregate of normalized ball indicators controlling atomic
// series:
//   A({lambda_j},{B_j},p) = || { sum_j (lambda_j chi_{B_j} / ||chi_{B_j}||)^{p̲} }^{1/p̲} ||_{p(.)}
// with p̲ = min(p_-, 1).  Families here are finite truncations.

#include <vector>

#include "hlab/luxemburg.hpp"

namespace hlab {

struct BallFamily {
  std::vector<KoranyiBall> balls;
  std::vector<double> weights;

  BallFamily() = default;
  BallFamily(std::vector<KoranyiBall> b, std::vector<double> w)
      : balls(std::move(b)), weights(std::move(w)) {
    detail::require(balls.size() == weights.size(), "BallFamily: length mismatch");
    for (double l : weights) detail::require(l >= 0.0, "BallFamily: weights must be >= 0");
  }
};

inline double a_quantity(const BallFamily& family, const ExponentFunction& p,
                         const IntegrationSpec& spec, const LuxemburgOptions& opt = {}) {
  detail::require(!family.balls.empty(), "a_quantity: empty family");
  const double up = p.underline_p();
  std::vector<double> inorm(family.balls.size());
  for (std::size_t j = 0; j < family.balls.size(); ++j)
    inorm[j] = luxemburg_norm(SupportedField::indicator(family.balls[j]), p,
                              spec.with_seed(spec.seed ^ (0x777ULL * (j + 1))), opt);
  SupportedField g;
  g.support = family.balls;
  const auto balls = family.balls;
  const auto weights = family.weights;
  g.eval = [balls, weights, inorm, up](const GroupPoint& z) {
    double s = 0.0;
    for (std::size_t j = 0; j < balls.size(); ++j)
      if (weights[j] > 0.0 && balls[j].contains(z))
        s += std::pow(weights[j] / inorm[j], up);
    return s == 0.0 ? 0.0 : std::pow(s, 1.0 / up);
  };
  return luxemburg_norm(g, p, spec, opt);
}

struct BStarReport {
  double a_original = 0.0;
  double a_transformed = 0.0;
  double ratio = 0.0;
  double symmetry_deviation = 0.0;
};

// Lemma-style comparison: transform every ball center by A or by the
// dilation r, expand every radius by gamma >= 1, and compare the two
// aggregates.  Requires p to carry the matching symmetry.
inline BStarReport b_star_comparison(const BallFamily& family, const ExponentFunction& p,
                                     const SymmetryTransform& transform, double gamma,
                                     const IntegrationSpec& spec,
                                     const LuxemburgOptions& opt = {},
                                     double symmetry_tol = 1e-8) {
  detail::require(gamma >= 1.0, "b_star_comparison: gamma must be >= 1");
  BStarReport rep;
  rep.symmetry_deviation = check_symmetry(p, transform, 2000, spec.seed ^ 0xb5);
  detail::require(rep.symmetry_deviation <= symmetry_tol,
                  "b_star_comparison: exponent lacks the required symmetry");
  BallFamily star;
  star.weights = family.weights;
  for (const auto& b : family.balls) {
    GroupPoint c = apply_transform(transform, b.center);
    star.balls.emplace_back(c, gamma * b.radius);
  }
  rep.a_original = a_quantity(family, p, spec, opt);
  rep.a_transformed = a_quantity(star, p, spec.with_seed(spec.seed ^ 0x57a2), opt);
  rep.ratio = rep.a_transformed / rep.a_original;
  return rep;
}

}  // namespace hlab

#endif  // HLAB_AQUANTITY_HPP

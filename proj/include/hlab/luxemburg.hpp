#ifndef HLAB_LUXEMBURG_HPP
#define HLAB_LUXEMBURG_HPP

// Modulars and Luxemburg norms of variable Lebesgue spaces:
//   ||f||_{p(.)} = inf { lambda > 0 : int |f/lambda|^{p(z)} dz <= 1 }.
// The modular is strictly decreasing in lambda wherever finite and
// positive, so the infimum is located by bracketing plus bisection on a
// frozen quadrature node set.

#include <cmath>
#include <vector>

#include "hlab/exponent.hpp"
#include "hlab/field.hpp"

namespace hlab {

// Frozen (weight, |f|, p) triples; the modular is then a cheap function
// of lambda alone.
class ModularQuadrature {
 public:
  ModularQuadrature(const SupportedField& f, const ExponentFunction& p,
                    const IntegrationSpec& spec) {
    const WeightedNodes nodes = make_support_nodes(f.support, spec);
    nodes_.reserve(nodes.nodes.size());
    for (const auto& nd : nodes.nodes)
      nodes_.push_back({nd.w, std::abs(f.eval(nd.z)), p(nd.z)});
  }

  double modular(double lambda) const {
    detail::require(lambda > 0.0, "modular: lambda must be positive");
    double s = 0.0;
    for (const auto& nd : nodes_)
      if (nd.absf != 0.0) s += nd.w * std::pow(nd.absf / lambda, nd.p);
    return s;
  }

  bool all_zero() const {
    for (const auto& nd : nodes_)
      if (nd.absf != 0.0) return false;
    return true;
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    double w, absf, p;
  };
  std::vector<Node> nodes_;
};

inline double modular(const SupportedField& f, const ExponentFunction& p, double lambda,
                      const IntegrationSpec& spec) {
  return ModularQuadrature(f, p, spec).modular(lambda);
}

struct LuxemburgOptions {
  double bracket_rel_width = 1e-6;
  double modular_tolerance = 1e-3;
  std::size_t max_bracket_steps = 200;
  std::size_t max_bisect_steps = 200;
};

namespace detail {

// Works for any functor exposing modular(lambda) and all_zero().
template <class Modular>
inline double luxemburg_solve(const Modular& mq, const LuxemburgOptions& opt) {
  if (mq.all_zero()) return 0.0;
  double lo = 0.0, hi = 0.0, lambda = 1.0;
  double m = mq.modular(lambda);
  if (m > 1.0) {
    lo = lambda;
    for (std::size_t k = 0; k < opt.max_bracket_steps; ++k) {
      lambda *= 2.0;
      if (mq.modular(lambda) <= 1.0) {
        hi = lambda;
        break;
      }
      lo = lambda;
    }
  } else {
    hi = lambda;
    for (std::size_t k = 0; k < opt.max_bracket_steps; ++k) {
      lambda *= 0.5;
      if (mq.modular(lambda) > 1.0) {
        lo = lambda;
        break;
      }
      hi = lambda;
      if (lambda < 1e-300) return 0.0;
    }
  }
  if (hi == 0.0 || lo == 0.0)
    throw std::runtime_error("luxemburg_norm: bracket not found within budget");
  // Bisection; terminate on both bracket width and modular proximity
  // (modular flatness near the root makes either alone unreliable).
  for (std::size_t k = 0; k < opt.max_bisect_steps; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double mm = mq.modular(mid);
    if (mm > 1.0)
      lo = mid;
    else
      hi = mid;
    if ((hi - lo) < opt.bracket_rel_width * hi &&
        std::abs(mq.modular(0.5 * (lo + hi)) - 1.0) < opt.modular_tolerance)
      return 0.5 * (lo + hi);
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline double luxemburg_norm(const SupportedField& f, const ExponentFunction& p,
                             const IntegrationSpec& spec, const LuxemburgOptions& opt = {}) {
  return detail::luxemburg_solve(ModularQuadrature(f, p, spec), opt);
}

struct PowerIdentityReport {
  bool pass = false;
  double lhs = 0.0;  // ||f||^s
  double rhs = 0.0;  // || |f|^s ||_{p/s}
  double rel_diff = 0.0;
  double tolerance = 0.0;
};

// ||f||_{p(.)}^s = || |f|^s ||_{p(.)/s}; both sides through independent
// node sets and bisections.
inline PowerIdentityReport power_identity_check(const SupportedField& f,
                                                const ExponentFunction& p, double s,
                                                const IntegrationSpec& spec,
                                                const LuxemburgOptions& opt = {}) {
  detail::require(s > 0.0, "power_identity_check: s must be positive");
  PowerIdentityReport rep;
  rep.lhs = std::pow(luxemburg_norm(f, p, spec, opt), s);
  SupportedField fs = f;
  auto inner = f.eval;
  fs.eval = [inner, s](const GroupPoint& z) { return std::pow(std::abs(inner(z)), s); };
  const ExponentFunction ps([p, s](const GroupPoint& z) { return p(z) / s; },
                            p.p_minus() / s, p.p_plus() / s,
                            p.p_infinity() ? std::optional<double>(*p.p_infinity() / s)
                                           : std::nullopt,
                            p.dim());
  rep.rhs = luxemburg_norm(fs, ps, spec.with_seed(spec.seed ^ 0xabcdef), opt);
  const double scale = std::max(std::abs(rep.lhs), std::abs(rep.rhs));
  rep.rel_diff = scale == 0.0 ? 0.0 : std::abs(rep.lhs - rep.rhs) / scale;
  rep.tolerance = 5.0 * std::max(opt.bracket_rel_width * 10.0, opt.modular_tolerance);
  rep.pass = rep.rel_diff <= rep.tolerance;
  return rep;
}

}  // namespace hlab

#endif  // HLAB_LUXEMBURG_HPP

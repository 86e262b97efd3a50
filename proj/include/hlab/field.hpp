#ifndef HLAB_FIELD_HPP
#define HLAB_FIELD_HPP

// Fields with declared ball-union support.  Norm and modular integrals
// restrict to the declared support, so the evaluator is only trusted to
// vanish outside it.

#include <utility>
#include <vector>

#include "hlab/integrate.hpp"

namespace hlab {

struct SupportedField {
  Field eval;
  std::vector<KoranyiBall> support;

  double operator()(const GroupPoint& z) const { return eval(z); }

  static SupportedField indicator(const KoranyiBall& b) {
    return {[b](const GroupPoint& z) { return b.contains(z) ? 1.0 : 0.0; }, {b}};
  }

  static SupportedField zero(Dimension dim) {
    return {[](const GroupPoint&) { return 0.0; }, {KoranyiBall(GroupPoint(dim), 1.0)}};
  }

  static SupportedField scaled(double c, SupportedField f) {
    auto inner = std::move(f.eval);
    f.eval = [c, inner](const GroupPoint& z) { return c * inner(z); };
    return f;
  }

  static SupportedField sum(const SupportedField& a, const SupportedField& b) {
    SupportedField out;
    auto ea = a.eval, eb = b.eval;
    out.eval = [ea, eb](const GroupPoint& z) { return ea(z) + eb(z); };
    out.support = a.support;
    out.support.insert(out.support.end(), b.support.begin(), b.support.end());
    return out;
  }
};

// Frozen weighted nodes over a ball union with overlap-multiplicity
// correction: sum_b int_b g / mult.  The node set is built once and reused
// across the many integrand rescalings of a norm bisection.
struct WeightedNodes {
  struct Node {
    GroupPoint z;
    double w;
  };
  std::vector<Node> nodes;

  template <class G>
  double accumulate(G&& g) const {
    double s = 0.0;
    for (const auto& nd : nodes) s += nd.w * g(nd.z);
    return s;
  }
};

inline WeightedNodes make_support_nodes(const std::vector<KoranyiBall>& support,
                                        const IntegrationSpec& spec) {
  detail::require(!support.empty(), "make_support_nodes: empty support");
  WeightedNodes out;
  auto multiplicity = [&support](const GroupPoint& z) {
    int m = 0;
    for (const auto& b : support) m += b.contains(z) ? 1 : 0;
    return m;
  };
  const std::size_t per_ball =
      std::max<std::size_t>(spec.max_evaluations / support.size(), 64);
  std::size_t ball_idx = 0;
  for (const auto& b : support) {
    ++ball_idx;
    if (spec.method == IntegrationMethod::GridQuadrature) {
      const std::size_t dims = b.center.two_n() + 1;
      const std::size_t per_dim = std::max<std::size_t>(
          3, static_cast<std::size_t>(std::floor(std::pow(double(per_ball), 1.0 / double(dims)))));
      const double d = b.radius;
      const double hx = 2.0 * d / double(per_dim);
      const double ht = 0.5 * d * d / double(per_dim);
      const double cell = std::pow(hx, double(b.center.two_n())) * ht;
      std::vector<std::size_t> idx(dims, 0);
      GroupPoint w(b.dim());
      for (;;) {
        for (std::size_t i = 0; i < b.center.two_n(); ++i)
          w.x_at(i) = -d + (double(idx[i]) + 0.5) * hx;
        w.t() = -0.25 * d * d + (double(idx[b.center.two_n()]) + 0.5) * ht;
        if (koranyi_norm(w) < d) {
          const GroupPoint z = mul(b.center, w);
          out.nodes.push_back({z, cell / double(multiplicity(z))});
        }
        std::size_t k = 0;
        while (k < dims && ++idx[k] == per_dim) idx[k++] = 0;
        if (k == dims) break;
      }
    } else if (spec.method == IntegrationMethod::StratifiedMC) {
      // Dyadic radial shells with equal node counts: integrands that
      // concentrate near the center (operator images of ball-supported
      // fields) are resolved at every scale.
      const std::size_t shells = 12;
      const std::size_t per_shell = std::max<std::size_t>(per_ball / shells, 16);
      const double Q = b.dim().Q();
      for (std::size_t k = 0; k < shells; ++k) {
        const double r_hi = b.radius * std::pow(2.0, -double(k));
        const double r_lo = (k + 1 == shells) ? 0.0 : 0.5 * r_hi;
        const double shell_vol =
            unit_ball_volume(b.dim()) * (std::pow(r_hi, Q) - std::pow(r_lo, Q));
        RngStream rng(spec.seed ^ (0x51edULL * ball_idx), 0x600 + k);
        GroupPoint off(b.dim());
        std::size_t kept = 0;
        while (kept < per_shell) {
          for (std::size_t i = 0; i < b.center.two_n(); ++i)
            off.x_at(i) = rng.uniform(-r_hi, r_hi);
          off.t() = rng.uniform(-0.25 * r_hi * r_hi, 0.25 * r_hi * r_hi);
          const double r = koranyi_norm(off);
          if (r >= r_hi || r < r_lo) continue;
          ++kept;
          const GroupPoint z = mul(b.center, off);
          out.nodes.push_back({z, shell_vol / double(per_shell) / double(multiplicity(z))});
        }
      }
    } else {
      auto pts = sample_ball(b, per_ball, spec.seed ^ (0x51edULL * ball_idx));
      const double w0 = ball_volume(b) / double(per_ball);
      for (auto& z : pts) out.nodes.push_back({z, w0 / double(multiplicity(z))});
    }
  }
  return out;
}

}  // namespace hlab

#endif  // HLAB_FIELD_HPP

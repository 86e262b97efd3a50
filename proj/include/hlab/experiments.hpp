#ifndef HLAB_EXPERIMENTS_HPP
#define HLAB_EXPERIMENTS_HPP

// Experiment registry.  Every experiment is a pure function of its JSON
// config (all randomness flows from the "seed" entry), emits per-trial
// rows plus named summary metrics, and judges itself against thresholds
// that live in the config with the documented defaults below.

#include <functional>
#include <map>
#include <numeric>

#include "hlab/aquantity.hpp"
#include "hlab/bounds.hpp"
#include "hlab/config.hpp"
#include "hlab/report.hpp"

namespace hlab {

struct PlotData {
  std::string name;
  std::vector<double> xs, ys;
  bool logx = false, logy = false;
};

struct ExperimentResult {
  bool pass = true;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, bool>> checks;
  std::map<std::string, double> metrics;
  std::vector<PlotData> plots;

  void check(const std::string& name, bool ok) {
    checks.emplace_back(name, ok);
    pass = pass && ok;
  }
  void metric(const std::string& name, double v) { metrics[name] = v; }
};

using ExperimentFn = std::function<ExperimentResult(const nlohmann::json&)>;

namespace detail {

inline GroupPoint random_point(RngStream& rng, Dimension dim, double scale) {
  GroupPoint z(dim);
  for (std::size_t i = 0; i < dim.two_n(); ++i) z.x_at(i) = scale * rng.uniform(-1.0, 1.0);
  z.t() = scale * scale * rng.uniform(-1.0, 1.0);
  return z;
}

inline double max_coord_diff(const GroupPoint& a, const GroupPoint& b) {
  double m = std::abs(a.t() - b.t());
  for (std::size_t i = 0; i < a.two_n(); ++i)
    m = std::max(m, std::abs(a.x_at(i) - b.x_at(i)));
  return m;
}

// Smooth bump combination supported in `ball` (no moment conditions).
inline SupportedField random_bump_field(const KoranyiBall& ball, std::uint64_t seed,
                                        std::size_t bumps = 6) {
  auto dict = make_atom_dictionary(ball.dim(), 1, seed ^ 0xbf1e1d);
  if (dict.size() > bumps) dict.erase(dict.begin() + bumps, dict.end());
  RngStream rng(seed, 0xbf2);
  std::vector<double> coef(dict.size());
  for (double& c : coef) c = rng.uniform(-1.0, 1.0);
  const KoranyiBall b = ball;
  return {[dict, coef, b](const GroupPoint& z) {
            const GroupPoint w = mul(inv(b.center), z);
            if (koranyi_norm(w) >= b.radius) return 0.0;
            const GroupPoint wh = dilate(1.0 / b.radius, w);
            double s = 0.0;
            for (std::size_t k = 0; k < dict.size(); ++k)
              s += coef[k] * dict_eval(dict[k], wh);
            return s;
          },
          {ball}};
}

// Modular of |T f| over the union of expanded balls plus a calibrated
// power-law tail; frozen |T f| node values, cheap in lambda.
class OperatorModular {
 public:
  OperatorModular(const KernelSpec& spec, const SupportedField& f,
                  const ExponentFunction& q, double expand_factor, unsigned N,
                  const IntegrationSpec& inner, std::size_t outer_nodes,
                  std::uint64_t seed)
      : q_(q), Qh_(spec.dim().Q()), decay_(spec.alpha() - spec.dim().Q() - double(N)) {
    detail::require(f.support.size() == 1, "OperatorModular: single-ball fields only");
    const KoranyiBall& B = f.support.front();
    std::vector<KoranyiBall> region;
    for (std::size_t j = 0; j < spec.m(); ++j)
      region.emplace_back(spec.tau(j, B.center), expand_factor * B.radius);
    rstar_ = expand_factor * B.radius;
    sigma_ = sphere_measure(spec.dim());
    far_anchor_ = B.center;

    IntegrationSpec node_spec = inner.with_seed(seed ^ 0x07e);
    node_spec.max_evaluations = outer_nodes;
    node_spec.method = IntegrationMethod::StratifiedMC;
    const WeightedNodes nodes = make_support_nodes(region, node_spec);
    nodes_.reserve(nodes.nodes.size());
    double cal = 0.0;
    for (const auto& nd : nodes.nodes) {
      const double tv = std::abs(apply_T(spec, f, nd.z, inner.with_seed(
          seed ^ mix_bits(0x7a11, std::bit_cast<std::uint64_t>(nd.z.t()) ^
                                      std::bit_cast<std::uint64_t>(nd.z.x_at(0))))).value);
      nodes_.push_back({nd.w, tv, q_(nd.z)});
      // Distance to the nearest expanded-ball center, for tail calibration.
      double dmin = std::numeric_limits<double>::infinity();
      for (const auto& rb : region) dmin = std::min(dmin, koranyi_dist(nd.z, rb.center));
      if (dmin > 0.7 * rstar_) cal = std::max(cal, tv * std::pow(dmin, -decay_));
    }
    tail_coef_ = cal;
    m_ = double(spec.m());
  }

  double modular(double lambda) const {
    double s = 0.0;
    for (const auto& nd : nodes_)
      if (nd.tv != 0.0) s += nd.w * std::pow(nd.tv / lambda, nd.q);
    return s + tail_modular(lambda);
  }

  bool all_zero() const {
    for (const auto& nd : nodes_)
      if (nd.tv != 0.0) return false;
    return tail_coef_ == 0.0;
  }

  // m directions, each int_{r > R*} (C r^{decay}/lambda)^{q(r)} sigma r^{Q-1} dr
  // by geometric-panel quadrature with the radial exponent.
  double tail_modular(double lambda) const {
    if (tail_coef_ == 0.0) return 0.0;
    double total = 0.0;
    const int panels = 40;
    double r = rstar_;
    for (int k = 0; k < panels; ++k) {
      const double r2 = r * std::sqrt(2.0);
      const double rm = std::sqrt(r * r2);
      GroupPoint probe(far_anchor_.dim());
      probe.x_at(0) = rm;
      const double qv = q_(mul(far_anchor_, probe));
      const double val = std::pow(tail_coef_ * std::pow(rm, decay_) / lambda, qv) *
                         sigma_ * std::pow(rm, Qh_ - 1.0) * (r2 - r);
      total += val;
      r = r2;
      if (val < 1e-14 * total) break;
    }
    return m_ * total;
  }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    double w, tv, q;
  };
  std::vector<Node> nodes_;
  ExponentFunction q_;
  GroupPoint far_anchor_;
  double Qh_, decay_, rstar_ = 1.0, sigma_ = 1.0, tail_coef_ = 0.0, m_ = 1.0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// group-axioms
// ---------------------------------------------------------------------------
inline ExperimentResult run_group_axioms(const nlohmann::json& cfg) {
  ExperimentResult res;
  const std::size_t samples = cfg.value("samples", std::size_t(100000));
  const double tol = cfg.value("tolerance", 1e-10);
  const Dimension dim(cfg.value("n", std::size_t(1)));
  RngStream rng(cfg.value("seed", std::uint64_t(1)), 0x6a);

  double e_assoc = 0.0, e_neutral = 0.0, e_inv = 0.0, e_skew = 0.0;
  const GroupPoint e = GroupPoint::identity(dim);
  for (std::size_t k = 0; k < samples; ++k) {
    const GroupPoint a = detail::random_point(rng, dim, 4.0);
    const GroupPoint b = detail::random_point(rng, dim, 4.0);
    const GroupPoint c = detail::random_point(rng, dim, 4.0);
    e_assoc = std::max(e_assoc, detail::max_coord_diff(mul(mul(a, b), c), mul(a, mul(b, c))));
    e_neutral = std::max({e_neutral, detail::max_coord_diff(mul(a, e), a),
                          detail::max_coord_diff(mul(e, a), a)});
    e_inv = std::max({e_inv, detail::max_coord_diff(mul(a, inv(a)), e),
                      detail::max_coord_diff(mul(inv(a), a), e)});
    e_skew = std::max(e_skew, std::abs(symplectic_form(a.x(), a.x())));
  }
  res.columns = {"check", "max_error", "samples"};
  res.rows = {{0, e_assoc, double(samples)},
              {1, e_neutral, double(samples)},
              {2, e_inv, double(samples)},
              {3, e_skew, double(samples)}};
  res.metric("max_associativity_error", e_assoc);
  res.metric("max_neutral_error", e_neutral);
  res.metric("max_inverse_error", e_inv);
  res.metric("max_skew_error", e_skew);
  res.check("associativity", e_assoc < tol);
  res.check("neutral element", e_neutral < tol);
  res.check("two-sided inverse", e_inv < tol);
  res.check("x^T J x = 0", e_skew == 0.0);
  return res;
}

// ---------------------------------------------------------------------------
// koranyi-props: gauge properties, volumes, sampling, Haar invariances
// ---------------------------------------------------------------------------
inline ExperimentResult run_koranyi_props(const nlohmann::json& cfg) {
  ExperimentResult res;
  const std::size_t samples = cfg.value("samples", std::size_t(100000));
  const double tol = cfg.value("tolerance", 1e-10);
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0x6b);

  double e_tri = 0.0, e_rev = 0.0, e_hom = 0.0, e_invsym = 0.0, e_rot = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const GroupPoint a = detail::random_point(rng, dim, 4.0);
    const GroupPoint b = detail::random_point(rng, dim, 4.0);
    const double ra = koranyi_norm(a), rb = koranyi_norm(b), rab = koranyi_norm(mul(a, b));
    e_tri = std::max(e_tri, rab - (ra + rb));
    e_rev = std::max(e_rev, std::abs(ra - rb) - rab);
    const double r = std::exp(rng.uniform(-1.5, 1.5));
    e_hom = std::max(e_hom, std::abs(koranyi_norm(dilate(r, a)) - r * ra));
    e_invsym = std::max(e_invsym, std::abs(koranyi_norm(inv(a)) - ra));
    const RotationMatrix A = RotationMatrix::block_planar(dim, rng.uniform(0.0, 6.283185));
    e_rot = std::max({e_rot, std::abs(koranyi_norm(rotate(A, a)) - ra),
                      detail::max_coord_diff(rotate(A, mul(a, b)),
                                             mul(rotate(A, a), rotate(A, b)))});
  }
  res.metric("max_triangle_excess", e_tri);
  res.metric("max_reverse_excess", e_rev);
  res.metric("max_homogeneity_error", e_hom);
  res.metric("max_inverse_symmetry_error", e_invsym);
  res.metric("max_rotation_error", e_rot);
  res.check("quasi-triangle (true triangle)", e_tri <= tol);
  res.check("reverse triangle", e_rev <= tol);
  res.check("gauge homogeneity", e_hom <= tol * 100);
  res.check("rho(a^{-1}) = rho(a)", e_invsym <= tol);
  res.check("rotation invariance + automorphism", e_rot <= tol * 100);

  // Ball-volume power law by box-rejection Monte Carlo over dyadic radii.
  // Rejection counting is the independent route: it never multiplies by a
  // volume derived from c0.
  const double c0 = unit_ball_volume(dim);
  const std::size_t vol_samples = cfg.value("volume_samples", std::size_t(2000000));
  std::vector<double> radii = {0.5, 1.0, 2.0, 4.0}, vols;
  for (double d : radii) {
    const GroupPoint ctr = detail::random_point(rng, dim, 2.0);
    const KoranyiBall ball(ctr, d);
    RngStream vr(seed ^ 0x70, std::uint64_t(d * 16.0));
    std::size_t hits = 0;
    GroupPoint w(dim);
    for (std::size_t k = 0; k < vol_samples; ++k) {
      for (std::size_t i = 0; i < dim.two_n(); ++i) w.x_at(i) = vr.uniform(-d, d);
      w.t() = vr.uniform(-0.25 * d * d, 0.25 * d * d);
      if (ball.contains(mul(ctr, w))) ++hits;
    }
    const double box = std::pow(2.0 * d, double(dim.two_n())) * 0.5 * d * d;
    vols.push_back(box * double(hits) / double(vol_samples));
  }
  const PowerLawFit fit = fit_power_law(radii, vols);
  res.metric("volume_power_law_exponent", fit.exponent);
  res.metric("volume_c0_mc_rel_error",
             std::abs(vols[1] - c0) / c0);
  res.check("volume power law Q", std::abs(fit.exponent - dim.Q()) <
                                      cfg.value("power_law_tolerance", 1e-2));
  res.check("center independence + MC c0",
            std::abs(vols[1] - c0) / c0 < cfg.value("c0_tolerance", 5e-3));

  // sample_ball: deterministic, contained, sub-ball fraction ~ 2^{-Q}.
  const KoranyiBall ball(detail::random_point(rng, dim, 1.0), 2.0);
  auto pts = sample_ball(ball, 40000, seed ^ 0x71);
  auto pts2 = sample_ball(ball, 40000, seed ^ 0x71);
  bool same = true, contained = true;
  std::size_t in_half = 0;
  const KoranyiBall half(ball.center, 0.5 * ball.radius);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    same = same && pts[i] == pts2[i];
    contained = contained && ball.contains(pts[i]);
    in_half += half.contains(pts[i]) ? 1 : 0;
  }
  const double frac = double(in_half) / double(pts.size());
  res.metric("subball_fraction", frac);
  res.check("sampler determinism", same);
  res.check("sampler containment", contained);
  res.check("sub-ball volume fraction 2^{-Q}",
            std::abs(frac - std::pow(2.0, -dim.Q())) < 5.0 / std::sqrt(double(pts.size())));

  // Haar invariances within reported error.
  {
    const KoranyiBall B(GroupPoint(dim), 1.5);
    const SupportedField f = detail::random_bump_field(B, seed ^ 0x72);
    IntegrationSpec spec(IntegrationMethod::MonteCarlo, 1e-3,
                         cfg.value("haar_samples", std::size_t(400000)), seed ^ 0x73);
    auto base = haar_integrate(f.eval, B, spec);
    const GroupPoint z0 = detail::random_point(rng, dim, 2.0);
    auto trans = haar_integrate([&](const GroupPoint& z) { return f.eval(mul(z0, z)); },
                                KoranyiBall(mul(inv(z0), B.center), B.radius),
                                spec.with_seed(seed ^ 0x74));
    const double r = 1.7;
    auto dil = haar_integrate([&](const GroupPoint& z) { return f.eval(dilate(r, z)); },
                              KoranyiBall(dilate(1.0 / r, B.center), B.radius / r),
                              spec.with_seed(seed ^ 0x75));
    const double e_trans = std::abs(trans.value - base.value);
    const double e_dil = std::abs(std::pow(r, dim.Q()) * dil.value - base.value);
    res.metric("haar_translation_error_sigmas",
               e_trans / (3.0 * (trans.std_error + base.std_error)));
    res.metric("haar_dilation_error_sigmas",
               e_dil / (3.0 * (std::pow(r, dim.Q()) * dil.std_error + base.std_error)));
    res.check("Haar translation invariance (3 s.e.)",
              e_trans <= 3.0 * (trans.std_error + base.std_error));
    res.check("Haar dilation scaling (3 s.e.)",
              e_dil <= 3.0 * (std::pow(r, dim.Q()) * dil.std_error + base.std_error));
  }

  res.columns = {"radius", "mc_volume", "c0_r_Q"};
  for (std::size_t i = 0; i < radii.size(); ++i)
    res.rows.push_back({radii[i], vols[i], c0 * std::pow(radii[i], dim.Q())});
  res.plots.push_back({"volume_power_law", radii, vols, true, true});
  return res;
}

// ---------------------------------------------------------------------------
// calculus-suite
// ---------------------------------------------------------------------------
inline ExperimentResult run_calculus_suite(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0xca);
  const std::size_t trials = cfg.value("trials", std::size_t(24));

  // Vector fields match the coordinate formulas on monomials.
  double e_vf = 0.0;
  const auto basis3 = MultiIndex::all_up_to(dim, 3);
  for (std::size_t k = 0; k < trials; ++k) {
    const MultiIndex J = basis3[1 + (rng.bits() % (basis3.size() - 1))];
    const PolynomialHG mono = PolynomialHG::monomial(J);
    const GroupPoint z = detail::random_point(rng, dim, 1.5);
    for (std::size_t axis = 0; axis <= dim.two_n(); ++axis) {
      const Field f = [&mono](const GroupPoint& w) { return mono.eval(w); };
      const double fd = vector_field_apply(axis, f, z, DerivativeSpec(0.05, 3));
      const double exact = mono.vector_field(axis).eval(z);
      e_vf = std::max(e_vf, std::abs(fd - exact) / (1.0 + std::abs(exact)));
    }
  }
  res.metric("vector_field_vs_closed_form", e_vf);
  res.check("vector fields match coordinate formulas",
            e_vf < cfg.value("vf_tolerance", 1e-8));

  // Homogeneity X^I (f o delta_r) = r^{d(I)} (X^I f) o delta_r.
  double e_hom = 0.0;
  const Field smooth = [](const GroupPoint& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < z.two_n(); ++i) s += z.x_at(i) * z.x_at(i);
    return std::exp(-s - z.t() * z.t()) + 0.3 * std::sin(z.x_at(0) + z.t());
  };
  for (std::size_t k = 0; k < trials; ++k) {
    const MultiIndex I = basis3[rng.bits() % basis3.size()];
    const double r = std::exp(rng.uniform(-0.5, 0.5));
    const GroupPoint z = detail::random_point(rng, dim, 0.8);
    const Field fr = [&smooth, r](const GroupPoint& w) { return smooth(dilate(r, w)); };
    const double lhs = higher_derivative(I, fr, z, DerivativeSpec(0.02, 3));
    const double rhs = std::pow(r, double(I.homogeneous_degree())) *
                       higher_derivative(I, smooth, dilate(r, z), DerivativeSpec(0.02, 3));
    e_hom = std::max(e_hom, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  res.metric("derivative_homogeneity_error", e_hom);
  res.check("derivative homogeneity", e_hom < cfg.value("homogeneity_tolerance", 1e-4));

  // Richardson self-consistency: halved h agrees.
  {
    const MultiIndex I = dim.n == 1 ? MultiIndex{1, 1, 0} : MultiIndex(dim).plus(0).plus(1);
    const GroupPoint z = detail::random_point(rng, dim, 1.0);
    const double d1 = higher_derivative(I, smooth, z, DerivativeSpec(0.02, 3));
    const double d2 = higher_derivative(I, smooth, z, DerivativeSpec(0.01, 3));
    res.metric("richardson_halved_h_diff", std::abs(d1 - d2));
    res.check("Richardson self-consistency",
              std::abs(d1 - d2) < cfg.value("richardson_tolerance", 1e-7) *
                                      (1.0 + std::abs(d1)));
  }

  // Taylor projector fixes polynomials (coefficient-wise) and matrix size.
  double e_proj = 0.0;
  bool size_ok = true;
  for (std::size_t k = 0; k < trials; ++k) {
    const unsigned degree = 1 + unsigned(rng.bits() % 3);
    PolynomialHG q(dim);
    for (const auto& I : MultiIndex::all_up_to(dim, degree))
      q.set_coefficient(I, rng.uniform(-2.0, 2.0));
    const GroupPoint base = detail::random_point(rng, dim, 1.0);
    const Field qf = [&q](const GroupPoint& w) { return q.eval(w); };
    const PolynomialHG P = left_taylor(qf, base, degree);
    const PolynomialHG Pexact = left_taylor(q, base, degree);
    size_ok = size_ok && moment_dimension(dim, degree) ==
                             MultiIndex::all_up_to(dim, degree).size();
    for (const auto& I : MultiIndex::all_up_to(dim, degree))
      e_proj = std::max({e_proj, std::abs(P.coefficient(I) - Pexact.coefficient(I)),
                         std::abs(Pexact.eval(detail::random_point(rng, dim, 0.5)) -
                                  0.0) * 0.0});
  }
  res.metric("taylor_projector_coeff_error", e_proj);
  res.check("Taylor projector fixes polynomials", e_proj < cfg.value("projector_tolerance", 1e-8));
  res.check("interpolation size = moment dimension", size_ok);

  // Remainder ratio: polynomial -> 0; smooth field stable under cloud
  // refinement; dilation change of variables.
  {
    const unsigned N = 2;
    const GroupPoint e = GroupPoint::identity(dim);
    auto samples = sample_ball(KoranyiBall(e, 0.75), 24, seed ^ 0xd1);
    PolynomialHG lowpoly(dim);
    lowpoly.set_coefficient(MultiIndex(dim).plus(0), 1.25);
    const Field lowf = [&lowpoly](const GroupPoint& w) { return lowpoly.eval(w); };
    auto prep = taylor_remainder_ratio(lowf, e, N, samples, DerivativeSpec(0.1, 3), 2.0, 24,
                                       seed ^ 0xd2);
    res.metric("remainder_ratio_polynomial", prep.max_ratio);
    res.check("polynomial remainder vanishes", prep.max_ratio < 1e-6);

    auto rep1 = taylor_remainder_ratio(smooth, e, N, samples, DerivativeSpec(0.05, 3), 2.0,
                                       24, seed ^ 0xd3);
    auto rep2 = taylor_remainder_ratio(smooth, e, N, samples, DerivativeSpec(0.05, 3), 2.0,
                                       96, seed ^ 0xd4);
    const double drift = std::abs(rep1.max_ratio - rep2.max_ratio) /
                         std::max(rep2.max_ratio, 1e-12);
    res.metric("remainder_ratio", rep2.max_ratio);
    res.metric("remainder_ratio_refinement_drift", drift);
    res.check("remainder ratio stable under cloud refinement",
              drift < cfg.value("remainder_drift_tolerance", 0.35));

    // f -> f o delta_r: ratios are invariant when samples dilate too.
    const double r = 1.5;
    const Field fs = [&smooth, r](const GroupPoint& w) { return smooth(dilate(r, w)); };
    std::vector<GroupPoint> shrunk;
    for (const auto& z : samples) shrunk.push_back(dilate(1.0 / r, z));
    auto rep3 = taylor_remainder_ratio(fs, e, N, shrunk, DerivativeSpec(0.05, 3), 2.0, 24,
                                       seed ^ 0xd5);
    const double scale_drift =
        std::abs(rep3.max_ratio - rep1.max_ratio) / std::max(rep1.max_ratio, 1e-12);
    res.metric("remainder_ratio_dilation_drift", scale_drift);
    res.check("remainder ratio dilation covariance",
              scale_drift < cfg.value("remainder_dilation_tolerance", 0.35));
  }

  res.columns = {"metric_id", "value"};
  std::size_t id = 0;
  for (const auto& [k, v] : res.metrics) res.rows.push_back({double(id++), v});
  return res;
}

// ---------------------------------------------------------------------------
// luxemburg-suite
// ---------------------------------------------------------------------------
inline ExperimentResult run_luxemburg_suite(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0x1c);
  const double c0 = unit_ball_volume(dim);
  IntegrationSpec spec(IntegrationMethod::MonteCarlo, 1e-3,
                       cfg.value("nodes", std::size_t(20000)), seed ^ 0x91);
  const GroupPoint e = GroupPoint::identity(dim);

  // Constant-exponent closed forms on random balls.
  double e_const = 0.0;
  for (double p0 : {1.5, 2.0, 3.0}) {
    const KoranyiBall B(detail::random_point(rng, dim, 2.0), std::exp(rng.uniform(-0.7, 0.7)));
    const double got = luxemburg_norm(SupportedField::indicator(B),
                                      ExponentFunction::constant(p0, dim), spec);
    const double want = std::pow(ball_volume(B), 1.0 / p0);
    e_const = std::max(e_const, std::abs(got - want) / want);
    res.rows.push_back({p0, got, want});
  }
  res.metric("constant_exponent_rel_error", e_const);
  res.check("constant-exponent closed form (1%)",
            e_const < cfg.value("constant_tolerance", 1e-2));

  // Two-region golden-ratio case.
  const double delta_unit = std::pow(1.0 / c0, 1.0 / dim.Q());
  GroupPoint far_c(dim);
  far_c.x_at(0) = 10.0;
  const KoranyiBall E1(e, delta_unit), E2(far_c, delta_unit);
  const ExponentFunction pw([E1](const GroupPoint& z) { return E1.contains(z) ? 1.0 : 2.0; },
                            1.0, 2.0, 2.0, dim);
  const double golden = luxemburg_norm(
      SupportedField::sum(SupportedField::indicator(E1), SupportedField::indicator(E2)), pw,
      spec);
  res.metric("golden_ratio_value", golden);
  res.check("two-region norm = (1+sqrt 5)/2 (1e-3)",
            std::abs(golden - 1.6180339887498949) < cfg.value("golden_tolerance", 1e-3));

  // Modular examples and monotonicity in lambda.
  {
    const KoranyiBall B(e, delta_unit);
    const SupportedField f3 = SupportedField::scaled(3.0, SupportedField::indicator(B));
    const double m9 = modular(f3, ExponentFunction::constant(2.0, dim), 1.0, spec);
    res.metric("modular_3chi_value", m9);
    res.check("modular |3 chi|^2 = 9 (1%)", std::abs(m9 - 9.0) < 0.09);
    ModularQuadrature mq(f3, ExponentFunction::constant(2.0, dim), spec);
    bool mono = true;
    double prev = std::numeric_limits<double>::infinity();
    for (double lam = 0.25; lam <= 64.0; lam *= 2.0) {
      const double cur = mq.modular(lam);
      mono = mono && cur < prev;
      prev = cur;
    }
    res.check("modular decreasing on lambda grid", mono);
    res.check("modular -> 0 as lambda -> inf", mq.modular(1e6) < 1e-6);
  }

  // Norm properties: homogeneity, zero iff zero, quasi-triangle.
  {
    const KoranyiBall B(detail::random_point(rng, dim, 1.0), 1.0);
    ExponentFunction prad = exponent_from_json(
        nlohmann::json{{"type", "radial"},
                       {"rho", {0.0, 1.0, 4.0}},
                       {"value", {0.8, 1.3, 1.1}}},
        dim);
    const SupportedField f = detail::random_bump_field(B, seed ^ 0x92);
    const double c = 3.7;
    const double n1 = luxemburg_norm(f, prad, spec);
    const double nc = luxemburg_norm(SupportedField::scaled(c, f), prad, spec);
    res.metric("homogeneity_rel_error", std::abs(nc - c * n1) / (c * n1));
    res.check("||c f|| = |c| ||f||", std::abs(nc - c * n1) / (c * n1) < 5e-3);
    res.check("zero norm iff zero field",
              luxemburg_norm(SupportedField::zero(dim), prad, spec) == 0.0 && n1 > 0.0);
    const SupportedField g = detail::random_bump_field(B, seed ^ 0x93);
    const double ng = luxemburg_norm(g, prad, spec);
    const double nsum = luxemburg_norm(SupportedField::sum(f, g), prad, spec);
    const double quasi = std::pow(2.0, 1.0 / prad.underline_p() - 1.0);
    res.metric("quasi_triangle_margin", quasi * (n1 + ng) - nsum);
    res.check("quasi-triangle inequality", nsum <= quasi * (n1 + ng) * (1.0 + 1e-6));
  }

  // Power identity on randomized piecewise-constant exponents.
  {
    const std::size_t cases = cfg.value("power_identity_cases", std::size_t(20));
    double worst = 0.0;
    bool all = true;
    for (std::size_t k = 0; k < cases; ++k) {
      GroupPoint c2(dim);
      c2.x_at(0) = 8.0;
      const KoranyiBall B1(detail::random_point(rng, dim, 1.0), std::exp(rng.uniform(-0.5, 0.5)));
      const KoranyiBall B2(mul(c2, B1.center), std::exp(rng.uniform(-0.5, 0.5)));
      const double pv1 = rng.uniform(0.7, 3.0), pv2 = rng.uniform(0.7, 3.0);
      const ExponentFunction pp(
          [B1, pv1, pv2](const GroupPoint& z) { return B1.contains(z) ? pv1 : pv2; },
          std::min(pv1, pv2), std::max(pv1, pv2), pv2, dim);
      const double a1 = rng.uniform(-2.0, 2.0), a2 = rng.uniform(-2.0, 2.0);
      const SupportedField f = SupportedField::sum(
          SupportedField::scaled(a1, SupportedField::indicator(B1)),
          SupportedField::scaled(a2, SupportedField::indicator(B2)));
      const double s = (k % 2 == 0) ? pp.underline_p() : 2.0;
      const auto rep = power_identity_check(f, pp, s, spec.with_seed(seed ^ (0x94 + k)));
      worst = std::max(worst, rep.rel_diff);
      all = all && rep.pass;
      res.rows.push_back({double(k), rep.lhs, rep.rhs});
    }
    res.metric("power_identity_worst_rel_diff", worst);
    res.check("power identity (5x solver tolerance)", all);
  }

  // Conjugate exponent: pointwise closed form and ball-sweep comparability.
  {
    const double alpha = cfg.value("alpha", 1.0);
    ExponentFunction prad = exponent_from_json(
        nlohmann::json{{"type", "radial"},
                       {"rho", {0.0, 2.0, 6.0}},
                       {"value", {1.4, 1.2, 1.1}}},
        dim);
    const ExponentFunction q = conjugate_exponent(prad, alpha, dim);
    const ExponentFunction q0 = conjugate_exponent(ExponentFunction::constant(2.0, dim),
                                                   alpha, dim);
    res.check("conjugate closed form",
              std::abs(q0(e) - 1.0 / (0.5 - alpha / dim.Q())) < 1e-12);
    const ExponentFunction qid = conjugate_exponent(prad, 0.0, dim);
    res.check("alpha = 0 conjugate is identity",
              std::abs(qid(e) - prad(e)) < 1e-12);
    double cmin = 1e300, cmax = 0.0;
    for (double d : {0.5, 1.0, 2.0, 4.0}) {
      const KoranyiBall B(detail::random_point(rng, dim, 1.5), d);
      const double np = luxemburg_norm(SupportedField::indicator(B), prad, spec);
      const double nq = luxemburg_norm(SupportedField::indicator(B), q,
                                       spec.with_seed(seed ^ 0x95));
      const double comp = nq / (std::pow(ball_volume(B), -alpha / dim.Q()) * np);
      cmin = std::min(cmin, comp);
      cmax = std::max(cmax, comp);
      res.rows.push_back({d, np, nq});
    }
    res.metric("conjugate_comparability_spread", cmax / cmin);
    res.check("||chi||_q ~ |B|^{-a/Q} ||chi||_p stable over sweep",
              cmax / cmin < cfg.value("comparability_spread_max", 2.0));
    const auto qrep = check_log_holder(q, 1500, seed ^ 0x96);
    res.metric("conjugate_logholder_C", qrep.C_local);
    res.check("conjugate preserves log-Holder",
              !qrep.diverging && qrep.violations == 0);
  }

  // log-Holder reports.
  {
    const auto repc = check_log_holder(ExponentFunction::constant(2.0, dim), 1500, seed ^ 1);
    ExponentFunction prad = exponent_from_json(
        nlohmann::json{{"type", "radial"},
                       {"rho", {0.0, 1.0, 4.0}},
                       {"value", {1.4, 1.2, 1.05}}},
        dim);
    const auto reprad = check_log_holder(prad, 1500, seed ^ 2);
    const ExponentFunction pstep(
        [](const GroupPoint& z) { return z.x_at(0) < 0.0 ? 1.0 : 2.0; }, 1.0, 2.0, 2.0, dim);
    const auto repstep = check_log_holder(pstep, 1500, seed ^ 3);
    res.metric("logholder_constant_C", repc.C_local);
    res.metric("logholder_radial_C", reprad.C_local);
    res.metric("logholder_radial_Cinf", reprad.C_infinity);
    res.metric("logholder_step_Csmall", repstep.C_small_scale);
    res.check("constant exponent: zero constants",
              repc.C_local == 0.0 && repc.C_infinity == 0.0 && !repc.diverging);
    res.check("radial exponent: finite constants, no violations",
              !reprad.diverging && reprad.violations == 0);
    res.check("step exponent flagged divergent", repstep.diverging);
  }

  // D_{p(.)} table.
  {
    const bool d1 = d_p(ExponentFunction::constant(1.0), 1) == 0;
    const bool d2 = d_p(ExponentFunction::constant(0.5), 1) == 4;
    const bool d3 = d_p(ExponentFunction::constant(6.0 / 7.0), 2) == 1;
    res.check("D_p table (including strict boundary)", d1 && d2 && d3);
  }

  res.columns = {"col_a", "col_b", "col_c"};
  return res;
}

// ---------------------------------------------------------------------------
// atom-suite
// ---------------------------------------------------------------------------
inline ExperimentResult run_atom_suite(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const std::size_t per_combo = cfg.value("atoms_per_combo", std::size_t(12));
  RngStream rng(seed, 0xa7);
  IntegrationSpec spec(IntegrationMethod::MonteCarlo, 1e-3,
                       cfg.value("nodes", std::size_t(30000)), seed ^ 0xa1);
  ExponentFunction p = exponent_from_json(
      cfg.value("exponent", nlohmann::json{{"type", "radial"},
                                           {"rho", {0.0, 1.0, 4.0}},
                                           {"value", {1.1, 1.0, 0.9}}}),
      dim);

  std::size_t total = 0, passed = 0;
  double worst_moment = 0.0;
  bool ranks_ok = true, reproject_ok = true, translate_ok = true, serialize_ok = true,
       dilate_ok = true;
  res.columns = {"D", "p0", "radius", "pass", "worst_moment_rel", "lp0_over_bound"};
  for (unsigned D : {0u, 1u, 2u}) {
    const auto dict = make_atom_dictionary(dim, D, seed ^ (0xd0 + D));
    ranks_ok = ranks_ok && moment_map_rank(dim, D, dict) == moment_dimension(dim, D);
    for (double p0 : {1.5, 2.0, 4.0}) {
      for (std::size_t k = 0; k < per_combo; ++k) {
        const double radius = std::pow(2.0, rng.uniform(-1.5, 1.5));
        const KoranyiBall ball(detail::random_point(rng, dim, 3.0), radius);
        const std::uint64_t aseed = seed ^ (0x1000 * (D + 1) + 37 * k + std::uint64_t(p0 * 8));
        const Atom a = make_atom(ball, p, p0, D, aseed, spec);
        const auto rep = verify_atom(a, p, spec.with_seed(aseed ^ 0xffff));
        ++total;
        passed += rep.pass ? 1 : 0;
        worst_moment = std::max(worst_moment, rep.worst_moment_rel);
        res.rows.push_back({double(D), p0, radius, rep.pass ? 1.0 : 0.0,
                            rep.worst_moment_rel, rep.lp0 / rep.lp0_bound});

        if (k == 0) {
          // Re-projection idempotence on coefficients.
          const auto basis = MultiIndex::all_up_to(dim, D);
          const Eigen::MatrixXd M = detail::moment_map(a.dictionary(), basis);
          Eigen::VectorXd c(static_cast<Eigen::Index>(a.coefficients().size()));
          for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = a.coefficients()[i];
          const Eigen::VectorXd again =
              c - M.transpose() * (M * M.transpose()).ldlt().solve(M * c);
          reproject_ok = reproject_ok && (again - c).cwiseAbs().maxCoeff() <= 1e-10;

          // Translate to the origin ball; moments still vanish.
          const Atom at = translate_atom(a, a.ball().center);
          const auto trep = verify_atom(at, p, spec.with_seed(aseed ^ 0x1234));
          translate_ok = translate_ok && trep.moments_ok && trep.support_ok &&
                         std::abs(trep.lp0 - rep.lp0) < 1e-6 * rep.lp0 + 1e-12;

          // Serialization re-instantiates the evaluator bit-identically.
          const Atom back = atom_from_json(atom_to_json(a));
          for (const auto& w : sample_ball(a.ball(), 32, aseed ^ 0x4321))
            serialize_ok = serialize_ok && a(w) == back(w);

          // Dilating the ball preserves a1 and a3 (a2 needs recertification).
          const Atom big(KoranyiBall(a.ball().center, 2.0 * a.ball().radius), a.p0(),
                         a.D(), a.dictionary(), a.coefficients());
          const auto drep = verify_atom(big, p, spec.with_seed(aseed ^ 0x777));
          dilate_ok = dilate_ok && drep.support_ok && drep.moments_ok;
        }
      }
    }
  }
  res.metric("atoms_total", double(total));
  res.metric("atoms_passed", double(passed));
  res.metric("worst_moment_rel", worst_moment);
  res.check("all atoms verify", passed == total);
  res.check("moment residuals < 1e-8 scale-corrected",
            worst_moment < cfg.value("moment_tolerance", 1e-8));
  res.check("moment-map rank = moment dimension", ranks_ok);
  res.check("re-projection idempotent (1e-10)", reproject_ok);
  res.check("translated atoms verify", translate_ok);
  res.check("serialization round-trip bit-identical", serialize_ok);
  res.check("dilated atom keeps a1/a3", dilate_ok);

  // Constructed counterexamples must fail.
  {
    const KoranyiBall B(GroupPoint(dim), 1.0);
    const double chi = luxemburg_norm(SupportedField::indicator(B), p, spec);
    auto dict = make_atom_dictionary(dim, 0, seed ^ 0xce);
    // One un-projected bump: nonzero integral, scaled to meet a2.
    std::vector<double> coef(dict.size(), 0.0);
    coef[0] = 1.0;
    Atom bad(B, 2.0, 0, dict, coef);
    const auto norms = detail::atom_unit_norms(dict, coef, 2.0, 64);
    bad.scale_coefficients(0.9 * std::pow(ball_volume(B), 0.5) / chi /
                           (std::pow(B.radius, dim.Q() / 2.0) * norms.lp0_unit));
    const auto brep = verify_atom(bad, p, spec);
    res.check("nonzero-mean bump fails a3", !brep.pass && !brep.moments_ok);
    // Oversized coefficients fail a2.
    Atom big = make_atom(B, p, 2.0, 0, seed ^ 0xcf, spec);
    big.scale_coefficients(1.2);
    const auto orep = verify_atom(big, p, spec);
    res.check("oversized atom fails a2", !orep.size_ok);
  }

  // Grand maximal proxy: reported, not gated.
  {
    const KoranyiBall B(GroupPoint(dim), 1.0);
    const Atom a = make_atom(B, p, 2.0, 0, seed ^ 0xd9, spec);
    IntegrationSpec gspec(IntegrationMethod::MonteCarlo, 1e-2, 40000, seed ^ 0xda);
    const double g1 = grand_maximal_proxy(a.as_field(), GroupPoint(dim), 3, gspec);
    const double g2 = grand_maximal_proxy(a.as_field(), GroupPoint(dim), 6, gspec);
    res.metric("grand_maximal_proxy_dict3", g1);
    res.metric("grand_maximal_proxy_dict6", g2);
    res.check("grand maximal proxy monotone in dictionary", g2 >= g1 - 1e-15);
    res.check("zero field proxy is zero",
              grand_maximal_proxy(SupportedField::zero(dim), GroupPoint(dim), 2, gspec) == 0.0);
  }
  return res;
}

const std::map<std::string, ExperimentFn>& experiment_registry();

}  // namespace hlab

#include "hlab/experiments_ops.hpp"

#endif  // HLAB_EXPERIMENTS_HPP

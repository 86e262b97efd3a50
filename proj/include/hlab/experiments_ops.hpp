#ifndef HLAB_EXPERIMENTS_OPS_HPP
#define HLAB_EXPERIMENTS_OPS_HPP

// Operator-side experiments: L^{p0} -> L^{q0} ratios, the Omega geometry
// and pointwise dominations, kernel-derivative constants, the main
// uniform-atom probe, far-field decay, and the ball-family aggregate.

#include "hlab/experiments.hpp"

namespace hlab {

// ---------------------------------------------------------------------------
// lp-lq-ratio: ||T f||_{q0} / ||f||_{p0} over bump corpora and a dilation
// sweep; constant exponents.
// ---------------------------------------------------------------------------
inline ExperimentResult run_lp_lq_ratio(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const double Q = dim.Q();
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const KernelSpec spec = kernel_from_json(
      cfg.value("kernel", nlohmann::json{{"alpha", 1.0}, {"alphas", {3.0}}}), dim);
  const double alpha = spec.alpha();
  RngStream rng(seed, 0x1f);
  IntegrationSpec inner(IntegrationMethod::MonteCarlo, 1e-2,
                        cfg.value("inner_evaluations", std::size_t(3000)), seed ^ 0x11);
  const std::size_t outer_nodes = cfg.value("outer_nodes", std::size_t(900));
  const std::size_t trials = cfg.value("trials", std::size_t(6));
  const double expand = cfg.value("expansion", 8.0);

  // ||T f||_{q0} via frozen |T f| nodes on the expanded region plus tail.
  auto t_norm = [&](const SupportedField& f, double q0, std::uint64_t s) {
    detail::OperatorModular om(spec, f, ExponentFunction::constant(q0, dim), expand, 0,
                               inner, outer_nodes, s);
    LuxemburgOptions opt;
    return detail::luxemburg_solve(om, opt);
  };
  auto f_norm = [&](const SupportedField& f, double p0) {
    const auto est = haar_integrate(
        [&f, p0](const GroupPoint& z) { return std::pow(std::abs(f.eval(z)), p0); },
        f.support.front(),
        IntegrationSpec(IntegrationMethod::GridQuadrature, 1e-3, 80000, 1));
    return std::pow(est.value, 1.0 / p0);
  };

  res.columns = {"p0", "q0", "trial", "radius", "ratio"};
  double global_max = 0.0;
  double flat_spread = 0.0;
  for (double p0 : cfg.value("p0_list", std::vector<double>{1.5, 2.0, 3.0})) {
    detail::require(p0 > 1.0 && p0 < Q / std::max(alpha, 1e-300),
                    "lp-lq-ratio: need 1 < p0 < Q/alpha");
    const double q0 = 1.0 / (1.0 / p0 - alpha / Q);
    double first_ratio = -1.0;
    for (std::size_t k = 0; k < trials; ++k) {
      const double radius = std::pow(2.0, double(k % 4) - 1.0);
      const KoranyiBall B(detail::random_point(rng, dim, 2.0), radius);
      const SupportedField f = detail::random_bump_field(B, seed ^ (0x200 + 31 * k));
      const double nf = f_norm(f, p0);
      if (nf < 1e-12) continue;
      const double nt = t_norm(f, q0, seed ^ (0x300 + 17 * k));
      const double ratio = nt / nf;
      global_max = std::max(global_max, ratio);
      res.rows.push_back({p0, q0, double(k), radius, ratio});
      if (first_ratio < 0.0) first_ratio = ratio;
    }
    // Dilation sweep on one field: the ratio is scale-free.
    const KoranyiBall B0(GroupPoint(dim), 1.0);
    const SupportedField f0 = detail::random_bump_field(B0, seed ^ 0x8d0);
    double rmin = 1e300, rmax = 0.0;
    for (double r : {0.5, 1.0, 2.0, 4.0}) {
      const SupportedField fr{
          [f0, r](const GroupPoint& z) { return f0.eval(dilate(1.0 / r, z)); },
          {KoranyiBall(dilate(r, B0.center), r * B0.radius)}};
      const double ratio = t_norm(fr, q0, seed ^ 0x8d1) / f_norm(fr, p0);
      rmin = std::min(rmin, ratio);
      rmax = std::max(rmax, ratio);
      res.rows.push_back({p0, q0, -1.0, r, ratio});
    }
    flat_spread = std::max(flat_spread, rmax / rmin - 1.0);
  }
  res.metric("max_ratio", global_max);
  res.metric("dilation_flatness", flat_spread);
  res.check("finite operator ratio corpus", global_max > 0.0 && std::isfinite(global_max));
  res.check("ratio flat under dilation",
            flat_spread < cfg.value("flatness_tolerance", 0.25));
  return res;
}

// ---------------------------------------------------------------------------
// omega-geometry: partition identities and the pointwise dominations.
// ---------------------------------------------------------------------------
inline ExperimentResult run_omega_geometry(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0x03);

  std::vector<KernelSpec> specs;
  specs.emplace_back(dim, std::vector<double>{2.0, 2.0}, std::vector<double>{1.0, 2.0});
  specs.emplace_back(dim, std::vector<double>{4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0},
                     std::vector<double>{1.0, 1.5, 2.5});

  res.columns = {"spec", "region", "fitted_constant", "budget"};
  double worst_identity = std::numeric_limits<double>::infinity();
  bool totality = true;
  double worst_stability = 0.0;

  for (std::size_t si = 0; si < specs.size(); ++si) {
    const KernelSpec& spec = specs[si];
    const auto sep = separation_constants(spec.scales());

    // Exact geometric identity on 1e5 samples.
    const std::size_t id_samples = cfg.value("identity_samples", std::size_t(100000));
    for (std::size_t k = 0; k < id_samples; ++k) {
      const GroupPoint z = detail::random_point(rng, dim, 5.0);
      const double rz = koranyi_norm(z);
      if (rz < 1e-12) continue;
      for (std::size_t i = 0; i < spec.m(); ++i)
        for (std::size_t j = i + 1; j < spec.m(); ++j) {
          const double d = koranyi_dist(spec.singular_preimage(j, z),
                                        spec.singular_preimage(i, z));
          worst_identity = std::min(worst_identity, d / (sep.beta * rz));
        }
    }

    // Partition totality: every y gets exactly one region.
    const std::size_t part_samples = cfg.value("partition_samples", std::size_t(10000));
    for (std::size_t k = 0; k < part_samples; ++k) {
      const GroupPoint z = detail::random_point(rng, dim, 3.0);
      if (koranyi_norm(z) < 1e-9) continue;
      const GroupPoint y = detail::random_point(rng, dim, 8.0);
      std::size_t members = 0;
      const double rz = koranyi_norm(z);
      for (std::size_t j = 0; j < spec.m(); ++j)
        members += koranyi_dist(spec.singular_preimage(j, z), y) < 0.5 * sep.beta * rz;
      if (members == 0) members = 1;  // lands in m+1 or m+2, mutually exclusive
      totality = totality && members == 1;
      const std::size_t lbl = omega_partition(spec, z, y);
      totality = totality && lbl >= 1 && lbl <= spec.m() + 2;
    }

    // Pointwise dominations at two budgets.
    const std::size_t trials = cfg.value("domination_trials", std::size_t(10));
    for (const std::size_t budget :
         {cfg.value("inner_evaluations", std::size_t(12000)),
          2 * cfg.value("inner_evaluations", std::size_t(12000))}) {
      IntegrationSpec ispec(IntegrationMethod::MonteCarlo, 1e-2, budget, seed ^ 0x40);
      IntegrationSpec mspec(IntegrationMethod::MonteCarlo, 1e-2, budget * 4, seed ^ 0x41);
      std::vector<double> cj(spec.m() + 1, 0.0);  // per Omega_j plus Omega_{m+1}
      RngStream trng(seed ^ (0x50 + si), 0);
      for (std::size_t k = 0; k < trials; ++k) {
        const GroupPoint z = dilate(std::pow(2.0, trng.uniform(-1.0, 2.0)),
                                    detail::random_point(trng, dim, 1.0));
        const double rz = koranyi_norm(z);
        if (rz < 0.2) continue;
        const KoranyiBall FB(GroupPoint(dim), 2.0 * (1.0 + sep.gamma_proof) * rz);
        const SupportedField f = detail::random_bump_field(FB, seed ^ (0x600 + 7 * k));
        for (std::size_t j = 0; j < spec.m(); ++j) {
          // Omega_j is exactly the ball of radius (beta/2) rho(z) around the
          // j-th singular preimage; declaring it as the support keeps the
          // quadrature on the region that matters.
          const KoranyiBall omega_ball(spec.singular_preimage(j, z), 0.5 * sep.beta * rz);
          const SupportedField fj{
              [f, &spec, z, j](const GroupPoint& y) {
                return omega_partition(spec, z, y) == j + 1 ? f.eval(y) : 0.0;
              },
              {omega_ball}};
          const double lhs = std::abs(apply_T(spec, fj, z, ispec).value);
          const double rhs = fractional_maximal(
              0.0, f, spec.singular_preimage(j, z),
              RadiusGrid{0.05 * rz, 8.0 * (1.0 + sep.gamma_proof) * rz, 13}, mspec);
          if (rhs > 0.0) cj[j] = std::max(cj[j], lhs / rhs);
        }
        const KoranyiBall m1_ball(GroupPoint(dim), (1.0 + sep.gamma_proof) * rz);
        const SupportedField fm1{
            [f, &spec, z, m = spec.m()](const GroupPoint& y) {
              return omega_partition(spec, z, y) == m + 1 ? f.eval(y) : 0.0;
            },
            {m1_ball}};
        const double lhs = std::abs(apply_T(spec, fm1, z, ispec).value);
        const double rhs = fractional_maximal(
            0.0, f, z, RadiusGrid{0.05 * rz, 8.0 * (1.0 + sep.gamma_proof) * rz, 13}, mspec);
        if (rhs > 0.0) cj[spec.m()] = std::max(cj[spec.m()], lhs / rhs);
      }
      for (std::size_t j = 0; j < cj.size(); ++j)
        res.rows.push_back({double(si), double(j), cj[j], double(budget)});
    }
    // Stability of fitted constants between the two budgets.
    const std::size_t rows_per_budget = spec.m() + 1;
    const std::size_t base = res.rows.size() - 2 * rows_per_budget;
    for (std::size_t j = 0; j < rows_per_budget; ++j) {
      const double c1 = res.rows[base + j][2];
      const double c2 = res.rows[base + rows_per_budget + j][2];
      if (c1 > 0.0 && c2 > 0.0)
        worst_stability = std::max(worst_stability, std::abs(c1 - c2) / c2);
    }
  }
  res.metric("identity_min_ratio", worst_identity);
  res.metric("domination_stability", worst_stability);
  res.check("separation identity >= beta rho(z) (exact)",
            worst_identity >= 1.0 - cfg.value("identity_tolerance", 1e-9));
  res.check("partition totality", totality);
  res.check("domination constants stable under budget doubling (25%)",
            worst_stability < cfg.value("stability_tolerance", 0.25));
  return res;
}

// ---------------------------------------------------------------------------
// kernel-derivatives: Proposition-style ratio bounds for d(I) <= N.
// ---------------------------------------------------------------------------
inline ExperimentResult run_kernel_derivatives(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const KernelSpec spec = kernel_from_json(
      cfg.value("kernel", nlohmann::json{{"alpha", 1.0}, {"alphas", {3.0}}}), dim);
  const std::size_t cloud = cfg.value("cloud_size", std::size_t(1000));

  res.columns = {"N", "cloud_size", "max_ratio", "used", "skipped"};
  double worst_change = 0.0;
  bool ratio_one_ok = true;
  for (unsigned N : cfg.value("N_list", std::vector<unsigned>{1, 2, 3})) {
    double prev = -1.0;
    for (std::size_t size : {cloud, 2 * cloud}) {
      const auto pairs = kernel_pair_cloud(spec, size, seed ^ (0x90 + N));
      const auto rep = kernel_derivative_bound(spec, N, pairs, DerivativeSpec(1e-2, 3));
      res.rows.push_back({double(N), double(size), rep.max_ratio, double(rep.used_pairs),
                          double(rep.skipped_pairs)});
      ratio_one_ok = ratio_one_ok && std::abs(rep.per_index.front().second - 1.0) < 1e-12;
      if (prev > 0.0)
        worst_change = std::max(worst_change, std::abs(rep.max_ratio - prev) / prev);
      prev = rep.max_ratio;
    }
  }
  res.metric("max_ratio_change_on_doubling", worst_change);
  res.check("I = 0 ratio is exactly 1", ratio_one_ok);
  res.check("derivative constants stable under cloud doubling (25%)",
            worst_change < cfg.value("stability_tolerance", 0.25));
  return res;
}

// ---------------------------------------------------------------------------
// atom-uniform: the main-theorem probe.
// ---------------------------------------------------------------------------
inline ExperimentResult run_atom_uniform(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const double Q = dim.Q();
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  const KernelSpec spec = kernel_from_json(
      cfg.value("kernel",
                nlohmann::json{{"alpha", 1.0},
                               {"alphas", {1.5, 1.5}},
                               {"rotations", {{{"angle", 0.0}}, {{"angle", 1.5707963267948966}}}}}),
      dim);
  ExponentFunction p = exponent_from_json(
      cfg.value("exponent", nlohmann::json{{"type", "radial"},
                                           {"rho", {0.0, 1.0, 4.0}},
                                           {"value", {1.15, 1.05, 0.95}}}),
      dim);
  detail::require(p.p_plus() < Q / std::max(spec.alpha(), 1e-300),
                  "atom-uniform: need p_+ < Q/alpha");
  const unsigned N = cfg.value("N", 1u);
  detail::require(Q / (Q + double(N)) < p.p_minus(), "atom-uniform: need Q/(Q+N) < p_-");
  const unsigned D = N - 1;
  detail::require(D >= d_p(p, dim.n), "atom-uniform: need D >= D_p");
  const double p0 = cfg.value("p0", 2.0);
  const double beta = cfg.value("beta", 2.0);
  const ExponentFunction q = conjugate_exponent(p, spec.alpha(), dim);

  // Symmetry precondition p(A_j x, r_j^{-2} t) = p(x, t).
  double sym_dev = 0.0;
  for (std::size_t j = 0; j < spec.m(); ++j) {
    if (!spec.rotations().empty())
      sym_dev = std::max(sym_dev, check_symmetry(p, RotationTransform{spec.rotations()[j]},
                                                 1000, seed ^ (0xe0 + j)));
    else
      sym_dev = std::max(
          sym_dev, check_symmetry(p, DilationTransform{1.0 / spec.scales()[j]}, 1000,
                                  seed ^ (0xe0 + j)));
  }
  res.metric("exponent_symmetry_deviation", sym_dev);
  res.check("exponent symmetric under kernel transforms", sym_dev <= 1e-10);
  const auto lrep = check_log_holder(p, 1200, seed ^ 0xe9);
  res.check("exponent in the log-Holder class", !lrep.diverging && lrep.violations == 0);

  IntegrationSpec atom_spec(IntegrationMethod::MonteCarlo, 1e-3,
                            cfg.value("atom_nodes", std::size_t(25000)), seed ^ 0xf0);
  IntegrationSpec inner(IntegrationMethod::MonteCarlo, 1e-2,
                        cfg.value("inner_evaluations", std::size_t(2000)), seed ^ 0xf1);
  const std::size_t outer_nodes = cfg.value("outer_nodes", std::size_t(800));
  const double expand = far_field_expansion(spec, N, beta);
  const std::size_t count = cfg.value("atom_count", std::size_t(100));

  res.columns = {"atom", "radius", "center_rho", "operator_norm"};
  std::vector<double> norms;
  RngStream rng(seed, 0xf2);
  for (std::size_t k = 0; k < count; ++k) {
    const double radius = std::pow(2.0, double(k % 4) - 1.0);  // 4 dyadic scales
    const GroupPoint center = detail::random_point(rng, dim, 6.0);
    const Atom a = make_atom(KoranyiBall(center, radius), p, p0, D,
                             seed ^ (0x5000 + 101 * k), atom_spec);
    detail::OperatorModular om(spec, a.as_field(), q, expand, N, inner, outer_nodes,
                               seed ^ (0x6000 + 13 * k));
    LuxemburgOptions opt;
    const double tnorm = detail::luxemburg_solve(om, opt);
    norms.push_back(tnorm);
    res.rows.push_back({double(k), radius, koranyi_norm(center), tnorm});
  }
  std::vector<double> sorted = norms;
  std::sort(sorted.begin(), sorted.end());
  const double vmax = sorted.back(), vmin = sorted.front();
  const double median = sorted[sorted.size() / 2];
  res.metric("norm_max", vmax);
  res.metric("norm_min", vmin);
  res.metric("norm_median", median);
  res.metric("max_over_median", vmax / median);
  res.metric("max_over_min", vmax / vmin);
  res.check("uniform bound probe: max/median < threshold",
            vmax / median < cfg.value("spread_threshold", 10.0));
  res.plots.push_back({"atom_uniform_norms",
                       [&] {
                         std::vector<double> xs(norms.size());
                         std::iota(xs.begin(), xs.end(), 0.0);
                         return xs;
                       }(),
                       norms, false, true});
  return res;
}

// ---------------------------------------------------------------------------
// far-field-decay: |T a| along rays vs alpha - Q - N.
// ---------------------------------------------------------------------------
inline ExperimentResult run_far_field_decay(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const double Q = dim.Q();
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0xfd);

  struct Case {
    KernelSpec spec;
    unsigned N;
  };
  std::vector<Case> cases;
  cases.push_back({KernelSpec::riesz(dim, 1.0), cfg.value("N_riesz", 2u)});
  cases.push_back({KernelSpec(dim, std::vector<double>{2.0, 2.0},
                              std::vector<double>{1.0, 2.0}),
                   cfg.value("N_dilated", 1u)});

  ExponentFunction p = exponent_from_json(
      cfg.value("exponent", nlohmann::json{{"type", "constant"}, {"value", 1.0}}), dim);
  IntegrationSpec atom_spec(IntegrationMethod::MonteCarlo, 1e-3, 25000, seed ^ 0x21);
  IntegrationSpec grid(IntegrationMethod::GridQuadrature, 1e-3,
                       cfg.value("grid_evaluations", std::size_t(700000)), seed ^ 0x22);

  res.columns = {"case", "distance", "t_value"};
  double worst_dev = 0.0;
  bool bound_ok = true;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const auto& [spec, N] = cases[ci];
    const double target = spec.alpha() - Q - double(N);
    const double delta = 1.0;
    const GroupPoint z0 = detail::random_point(rng, dim, 1.0);
    const Atom a = make_atom(KoranyiBall(z0, delta), p, 2.0, N - 1,
                             seed ^ (0x31 + ci), atom_spec);
    GroupPoint u(dim);
    u.x_at(0) = 0.8;
    u.x_at(1) = 0.6;
    u.t() = 0.05;
    const double ru = koranyi_norm(u);
    std::vector<double> dist, tv;
    // Nearer ray for the steeper cancellation (N = 2): the quadrature noise
    // floor sits at the uncancelled kernel scale; farther ray for N = 1
    // where the asymptotic regime needs more distance.
    const std::vector<double> ray = N >= 2 ? std::vector<double>{12.0, 17.0, 24.0, 34.0, 48.0, 68.0}
                                           : std::vector<double>{24.0, 36.0, 54.0, 81.0, 121.0, 180.0};
    for (double rho : ray) {
      const GroupPoint z = mul(z0, dilate(rho * delta / ru, u));
      const double val = std::abs(apply_T(spec, a.as_field(), z, grid).value);
      dist.push_back(koranyi_dist(z, z0));
      tv.push_back(val);
      res.rows.push_back({double(ci), dist.back(), val});
    }
    const PowerLawFit fit = fit_power_law(dist, tv);
    res.metric("decay_exponent_case" + std::to_string(ci), fit.exponent);
    res.metric("decay_target_case" + std::to_string(ci), target);
    worst_dev = std::max(worst_dev, std::abs(fit.exponent - target));
    res.plots.push_back({"far_field_decay_case" + std::to_string(ci), dist, tv, true, true});

    // far_field_atom_bound regression on a few far samples.
    const double expand = far_field_expansion(spec, N, cfg.value("beta", 2.0));
    std::vector<GroupPoint> samples;
    for (double rho : {1.3 * expand, 2.0 * expand, 3.0 * expand})
      samples.push_back(mul(z0, dilate(rho * delta / ru, u)));
    const auto rep = far_field_atom_bound(spec, a, p, N, samples,
                                          IntegrationSpec(IntegrationMethod::MonteCarlo,
                                                          1e-2, 20000, seed ^ 0x44),
                                          cfg.value("beta", 2.0));
    res.metric("far_field_max_ratio_case" + std::to_string(ci), rep.max_ratio);
    bound_ok = bound_ok && std::isfinite(rep.max_ratio) && rep.max_ratio > 0.0;
  }
  res.metric("worst_exponent_deviation", worst_dev);
  res.check("decay exponent = alpha - Q - N (+- 0.3)",
            worst_dev < cfg.value("exponent_tolerance", 0.3));
  res.check("far-field bound ratios finite", bound_ok);
  return res;
}

// ---------------------------------------------------------------------------
// a-quantity-suite
// ---------------------------------------------------------------------------
inline ExperimentResult run_a_quantity_suite(const nlohmann::json& cfg) {
  ExperimentResult res;
  const Dimension dim(cfg.value("n", std::size_t(1)));
  const std::uint64_t seed = cfg.value("seed", std::uint64_t(1));
  RngStream rng(seed, 0xaa);
  IntegrationSpec spec(IntegrationMethod::MonteCarlo, 1e-3,
                       cfg.value("nodes", std::size_t(12000)), seed ^ 0xb0);
  ExponentFunction prad = exponent_from_json(
      cfg.value("exponent", nlohmann::json{{"type", "radial"},
                                           {"rho", {0.0, 2.0, 8.0}},
                                           {"value", {1.3, 1.1, 1.0}}}),
      dim);

  // Single normalized ball.
  {
    const BallFamily fam({KoranyiBall(detail::random_point(rng, dim, 1.0), 1.4)}, {1.0});
    const double v = a_quantity(fam, prad, spec);
    res.metric("single_ball_value", v);
    res.check("single normalized ball has A = 1", std::abs(v - 1.0) < 0.03);
    // Scaling in the weights.
    const BallFamily fam3(fam.balls, {2.5});
    const double v3 = a_quantity(fam3, prad, spec);
    res.check("A(c lambda) = c A(lambda)", std::abs(v3 - 2.5 * v) < 0.03 * 2.5);
  }

  // Disjoint equal balls, constant exponent p0 <= 1: closed form.
  {
    const double p0 = 0.8;
    const ExponentFunction pc = ExponentFunction::constant(p0, dim);
    std::vector<KoranyiBall> balls;
    std::vector<double> lambdas;
    for (std::size_t j = 0; j < 4; ++j) {
      GroupPoint c(dim);
      c.x_at(0) = 8.0 * double(j);
      balls.emplace_back(c, 1.0);
      lambdas.push_back(0.5 + 0.5 * double(j));
    }
    const double got = a_quantity(BallFamily(balls, lambdas), pc, spec);
    double sum = 0.0;
    for (double l : lambdas) sum += std::pow(l, p0);
    const double want = std::pow(sum, 1.0 / p0);
    res.metric("disjoint_closed_form_rel_error", std::abs(got - want) / want);
    res.check("disjoint equal balls closed form (2%)", std::abs(got - want) / want < 0.02);
  }

  // B* comparison: identity and single-ball trivial cases, then random
  // families under rotation with radius expansion gamma = 2.
  {
    const BallFamily fam({KoranyiBall(detail::random_point(rng, dim, 1.0), 1.0)}, {1.0});
    const auto id_rep = b_star_comparison(fam, prad, RotationTransform{RotationMatrix(dim)},
                                          1.0, spec);
    res.check("identity transform ratio = 1", std::abs(id_rep.ratio - 1.0) < 0.05);
    const auto g2 = b_star_comparison(fam, ExponentFunction::constant(1.5, dim),
                                      RotationTransform{RotationMatrix(dim)}, 2.0, spec);
    res.check("constant p single ball gamma=2 ratio = 1", std::abs(g2.ratio - 1.0) < 0.05);
  }
  {
    const std::size_t families = cfg.value("families", std::size_t(50));
    const double gamma = cfg.value("gamma", 2.0);
    res.columns = {"family", "balls", "ratio"};
    auto run_corpus = [&](std::size_t count) {
      double worst = 0.0;
      for (std::size_t f = 0; f < count; ++f) {
        RngStream frng(seed ^ (0x900 + f), 0);
        const std::size_t nb = 1 + frng.bits() % 8;
        std::vector<KoranyiBall> balls;
        std::vector<double> lambdas;
        for (std::size_t j = 0; j < nb; ++j) {
          balls.emplace_back(detail::random_point(frng, dim, 3.0),
                             std::exp(frng.uniform(-1.0, 0.7)));
          lambdas.push_back(frng.uniform(0.0, 2.0));
        }
        const RotationMatrix A =
            RotationMatrix::block_planar(dim, frng.uniform(0.0, 6.283185307));
        const auto rep = b_star_comparison(BallFamily(balls, lambdas), prad,
                                           RotationTransform{A}, gamma,
                                           spec.with_seed(seed ^ (0xa00 + f)));
        worst = std::max(worst, rep.ratio);
        if (count == families) res.rows.push_back({double(f), double(nb), rep.ratio});
      }
      return worst;
    };
    const double worst1 = run_corpus(families);
    const double worst2 = run_corpus(2 * families);
    res.metric("bstar_max_ratio", worst1);
    res.metric("bstar_max_ratio_doubled", worst2);
    res.metric("bstar_stability", std::abs(worst2 - worst1) / worst1);
    res.check("B* max ratio finite", std::isfinite(worst1) && worst1 > 0.0);
    res.check("B* max ratio stable under corpus doubling (25%)",
              std::abs(worst2 - worst1) / worst1 < cfg.value("stability_tolerance", 0.25));
  }
  return res;
}

inline const std::map<std::string, ExperimentFn>& experiment_registry() {
  static const std::map<std::string, ExperimentFn> registry = {
      {"group-axioms", run_group_axioms},
      {"koranyi-props", run_koranyi_props},
      {"calculus-suite", run_calculus_suite},
      {"luxemburg-suite", run_luxemburg_suite},
      {"atom-suite", run_atom_suite},
      {"lp-lq-ratio", run_lp_lq_ratio},
      {"omega-geometry", run_omega_geometry},
      {"kernel-derivatives", run_kernel_derivatives},
      {"atom-uniform", run_atom_uniform},
      {"far-field-decay", run_far_field_decay},
      {"a-quantity-suite", run_a_quantity_suite},
  };
  return registry;
}

}  // namespace hlab

#endif  // HLAB_EXPERIMENTS_OPS_HPP

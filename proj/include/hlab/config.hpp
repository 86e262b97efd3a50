#ifndef HLAB_CONFIG_HPP
#define HLAB_CONFIG_HPP

// JSON constructors for the harness: exponent functions from a small
// expression vocabulary, kernel specs by closed-form constructors, and
// integration/derivative settings.

#include <nlohmann/json.hpp>
#include <string>

#include "hlab/exponent.hpp"
#include "hlab/kernel.hpp"

namespace hlab {

inline IntegrationSpec integration_from_json(const nlohmann::json& j) {
  IntegrationMethod m = IntegrationMethod::MonteCarlo;
  const std::string name = j.value("method", "mc");
  if (name == "grid")
    m = IntegrationMethod::GridQuadrature;
  else if (name == "stratified")
    m = IntegrationMethod::StratifiedMC;
  else if (name != "mc")
    throw std::invalid_argument("integration method must be mc, grid, or stratified");
  return IntegrationSpec(m, j.value("tolerance", 1e-3),
                         j.value("max_evaluations", std::size_t(200000)),
                         j.value("seed", std::uint64_t(1)));
}

// Piecewise-linear radial profile r(rho) with clamped ends; Lipschitz in
// rho, hence locally log-Holder, and constant past the last knot, hence
// log-Holder at infinity.
class RadialProfile {
 public:
  RadialProfile(std::vector<double> rho, std::vector<double> value)
      : rho_(std::move(rho)), val_(std::move(value)) {
    detail::require(rho_.size() == val_.size() && rho_.size() >= 1,
                    "radial profile: knot count mismatch");
    for (std::size_t i = 1; i < rho_.size(); ++i)
      detail::require(rho_[i] > rho_[i - 1], "radial profile: knots must increase");
  }

  double operator()(double r) const {
    if (r <= rho_.front()) return val_.front();
    if (r >= rho_.back()) return val_.back();
    std::size_t i = 1;
    while (rho_[i] < r) ++i;
    const double w = (r - rho_[i - 1]) / (rho_[i] - rho_[i - 1]);
    return val_[i - 1] + w * (val_[i] - val_[i - 1]);
  }

  double min_value() const { return *std::min_element(val_.begin(), val_.end()); }
  double max_value() const { return *std::max_element(val_.begin(), val_.end()); }
  double last_value() const { return val_.back(); }

 private:
  std::vector<double> rho_, val_;
};

// Vocabulary:
//   {"type":"constant","value":2.0}
//   {"type":"radial","rho":[0,1,4],"value":[1.2,1.1,0.95]}   p = r(rho(z))
//   {"type":"rotation-symmetrized","order":4,"base":{...}}    mean over the
//       cyclic group of block rotations by 2 pi / order
inline ExponentFunction exponent_from_json(const nlohmann::json& j, Dimension dim) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") {
    return ExponentFunction::constant(j.at("value").get<double>(), dim);
  }
  if (type == "radial") {
    RadialProfile prof(j.at("rho").get<std::vector<double>>(),
                       j.at("value").get<std::vector<double>>());
    return ExponentFunction(
        [prof](const GroupPoint& z) { return prof(koranyi_norm(z)); }, prof.min_value(),
        prof.max_value(), prof.last_value(), dim);
  }
  if (type == "rotation-symmetrized") {
    const unsigned order = j.at("order").get<unsigned>();
    detail::require(order >= 1, "rotation-symmetrized: order must be >= 1");
    ExponentFunction base = exponent_from_json(j.at("base"), dim);
    std::vector<RotationMatrix> rots;
    for (unsigned k = 0; k < order; ++k)
      rots.push_back(RotationMatrix::block_planar(
          dim, 2.0 * std::numbers::pi * double(k) / double(order)));
    auto eval = [base, rots](const GroupPoint& z) {
      double s = 0.0;
      for (const auto& A : rots) s += base(rotate(A, z));
      return s / double(rots.size());
    };
    return ExponentFunction(eval, base.p_minus(), base.p_plus(), base.p_infinity(), dim);
  }
  throw std::invalid_argument("unknown exponent type: " + type);
}

// Matrices come from closed-form constructors: {"angle":t} is the planar
// block rotation by t (identity when 0).
inline KernelSpec kernel_from_json(const nlohmann::json& j, Dimension dim) {
  const double alpha = j.at("alpha").get<double>();
  const auto alphas = j.at("alphas").get<std::vector<double>>();
  if (alpha == 0.0) {
    return KernelSpec(dim, alphas, j.at("scales").get<std::vector<double>>());
  }
  std::vector<RotationMatrix> rots;
  if (j.contains("rotations")) {
    for (const auto& je : j.at("rotations"))
      rots.push_back(RotationMatrix::block_planar(dim, je.at("angle").get<double>()));
  } else {
    for (std::size_t k = 0; k < alphas.size(); ++k) rots.push_back(RotationMatrix(dim));
  }
  return KernelSpec(dim, alpha, alphas, rots);
}

}  // namespace hlab

#endif  // HLAB_CONFIG_HPP

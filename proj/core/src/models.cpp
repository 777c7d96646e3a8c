#include "maxstab/models.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace maxstab {

void SmithModel::validate() const {
  if (dim < 1 || dim > 3) throw input_error("SmithModel: dim must be 1, 2 or 3");
  if (sigma.size() != static_cast<std::size_t>(dim) * dim)
    throw input_error("SmithModel: sigma must hold dim*dim entries");
  double scale = 0.0;
  for (double v : sigma) {
    if (!std::isfinite(v)) throw input_error("SmithModel: non-finite sigma entry");
    scale = std::max(scale, std::abs(v));
  }
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      if (std::abs(sigma[i * dim + j] - sigma[j * dim + i]) > 1e-12 * std::max(1.0, scale))
        throw input_error("SmithModel: sigma is not symmetric within 1e-12");
  Eigen::Map<const Eigen::MatrixXd> s(sigma.data(), dim, dim);
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() != Eigen::Success)
    throw input_error("SmithModel: sigma is not positive definite");
}

SmithModel SmithModel::isotropic(int dim, double variance) {
  SmithModel m;
  m.dim = dim;
  m.sigma.assign(static_cast<std::size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; ++i) m.sigma[i * dim + i] = variance;
  m.validate();
  return m;
}

int model_dim(const ModelVariant& m) {
  if (const auto* s = std::get_if<SmithModel>(&m)) return s->dim;
  return -1;  // Brown-Resnick works in any supported dim; sites decide
}

std::string model_tag(const ModelVariant& m) {
  if (const auto* s = std::get_if<SmithModel>(&m)) {
    std::string t = "smith[";
    for (std::size_t i = 0; i < s->sigma.size(); ++i) {
      if (i) t += ",";
      t += std::to_string(s->sigma[i]);
    }
    return t + "]";
  }
  const auto& b = std::get<BrownResnickModel>(m);
  return "brown-resnick[eta=" + std::to_string(b.variogram.eta) +
         ",alpha=" + std::to_string(b.variogram.alpha) + "]";
}

void validate_model(const ModelVariant& m) {
  std::visit([](const auto& mm) { mm.validate(); }, m);
}

void SimulationControl::validate() const {
  if (!(quantile_bound > 0.0 && quantile_bound < 1.0))
    throw input_error("SimulationControl: quantile_bound must lie in (0,1)");
  if (pilot_draws < 10)
    throw input_error("SimulationControl: pilot_draws must be >= 10");
  if (max_spectral_draws < 1)
    throw input_error("SimulationControl: max_spectral_draws must be >= 1");
}

SimMethod default_method(const ModelVariant& m) {
  return std::holds_alternative<SmithModel>(m) ? SimMethod::smith_exact
                                               : SimMethod::br_extremal;
}

}  // namespace maxstab

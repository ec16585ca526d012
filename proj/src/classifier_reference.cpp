#include <cmath>

#include "dsel/classifier.hpp"

namespace dsel::reference {

double objective(const Model& model, std::span<const Example> examples, double c) {
  double reg = 0.0;
  for (std::size_t j = 1; j < model.weights.size(); ++j) reg += model.weights[j] * model.weights[j];
  double loss = 0.0;
  for (const auto& e : examples) {
    const double y = e.label ? 1.0 : -1.0;
    loss += log1p_exp_neg(y * margin(model, e.features));
  }
  const double f = 0.5 * reg + c * loss;
  if (!std::isfinite(f)) fail(ErrorKind::data, "objective is not finite (training diverged)");
  return f;
}

std::vector<double> gradient(const Model& model, std::span<const Example> examples, double c) {
  std::vector<double> g(model.weights);
  g[0] = 0.0;
  for (const auto& e : examples) {
    const double y = e.label ? 1.0 : -1.0;
    const double coef = -c * y * (1.0 - sigmoid(y * margin(model, e.features)));
    g[0] += coef;
    for (auto id : e.features)
      if (id < g.size()) g[id] += coef;
  }
  return g;
}

}  // namespace dsel::reference

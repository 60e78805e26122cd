#include "swefinn/optim.hpp"

#include "swefinn/errors.hpp"

#include <cmath>

namespace swefinn {

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind optimizer_from_string(const std::string &name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::Sgd;
  throw ConfigError("unknown optimizer '" + name + "' (expected adam or sgd)");
}

Optimizer::Optimizer(OptimizerKind kind, std::size_t size, double learning_rate, AdamSettings adam)
    : kind_(kind), lr_(learning_rate), adam_(adam) {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (kind_ == OptimizerKind::Adam) {
    m_.assign(size, 0.0);
    v_.assign(size, 0.0);
  }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != grads.size()) throw ShapeError("optimizer: parameter/gradient size mismatch");
  ++t_;
  if (kind_ == OptimizerKind::Sgd) {
    for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr_ * grads[k];
    return;
  }
  if (m_.size() != params.size()) throw ShapeError("optimizer: state size mismatch");
  const double bc1 = 1.0 - std::pow(adam_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(adam_.beta2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    m_[k] = adam_.beta1 * m_[k] + (1.0 - adam_.beta1) * grads[k];
    v_[k] = adam_.beta2 * v_[k] + (1.0 - adam_.beta2) * grads[k] * grads[k];
    const double mhat = m_[k] / bc1;
    const double vhat = v_[k] / bc2;
    params[k] -= lr_ * mhat / (std::sqrt(vhat) + adam_.epsilon);
  }
}

double global_norm(std::span<const double> grads) {
  double s = 0.0;
  for (double g : grads) s += g * g;
  return std::sqrt(s);
}

double clip_global_norm(std::span<double> grads, double max_norm) {
  const double norm = global_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    const double f = max_norm / norm;
    for (double &g : grads) g *= f;
  }
  return norm;
}

} // namespace swefinn

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swefinn {

enum class OptimizerKind { Adam, Sgd };

std::string to_string(OptimizerKind kind);
OptimizerKind optimizer_from_string(const std::string &name);

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1.0e-8;
};

/// First-order optimizer over a flat parameter vector.
class Optimizer {
public:
  Optimizer(OptimizerKind kind, std::size_t size, double learning_rate, AdamSettings adam = {});

  void step(std::span<double> params, std::span<const double> grads);

  OptimizerKind kind() const noexcept { return kind_; }
  double learning_rate() const noexcept { return lr_; }
  std::size_t steps_taken() const noexcept { return t_; }

private:
  OptimizerKind kind_;
  double lr_;
  AdamSettings adam_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t t_ = 0;
};

double global_norm(std::span<const double> grads);

/// Scale grads in place so their L2 norm is at most max_norm. Returns the
/// norm before clipping.
double clip_global_norm(std::span<double> grads, double max_norm);

} // namespace swefinn

#pragma once

// Layered configuration: built-in defaults, then a `key = value` file, then
// individual overrides, each layer replacing keys of the previous one.
// Keys are dotted (sim.cfl, train.epochs, infer.lambda_smooth, ...); an
// unknown key is an error.

#include "swefinn/evaluation.hpp"
#include "swefinn/grid.hpp"
#include "swefinn/inversion.hpp"
#include "swefinn/scenario.hpp"
#include "swefinn/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace swefinn {

struct EvalSettings {
  std::size_t batch_size = 8;
  std::size_t train_count = 512;
  std::size_t infer_count = 256;
  std::size_t test_count = 256;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  bool concurrent_seeds = false;
  std::string label = "FINN";
};

struct AppConfig {
  SimConfig sim;
  DatasetOptions data;
  TrainConfig train;
  InverseConfig infer;
  EvalSettings eval;

  /// Sets one key from its textual value.
  void set(const std::string &key, const std::string &value);
  std::string get(const std::string &key) const;

  /// Applies every `key = value` line; `#` starts a comment.
  void apply_text(const std::string &text, const std::string &origin = "<text>");
  void apply_file(const std::filesystem::path &path);
  /// `key=value`
  void apply_override(const std::string &assignment);

  /// All keys, sorted, one `key = value` per line.
  std::string dump() const;

  ExperimentConfig experiment() const;

  static const std::vector<std::string> &keys();
};

} // namespace swefinn

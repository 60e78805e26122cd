#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace swefinn {

/// Dense row-major matrix of doubles. Fields (eta, u, v, H) use rows for the
/// x index and columns for the y index; scalars are 1x1.
class Array2D {
public:
  Array2D() = default;
  Array2D(std::size_t rows, std::size_t cols, double fill = 0.0);
  Array2D(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Array2D scalar(double value) { return Array2D(1, 1, value); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  bool is_scalar() const noexcept { return rows_ == 1 && cols_ == 1; }
  bool same_shape(const Array2D &other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  double &operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double> &values() const noexcept { return data_; }
  double *data() noexcept { return data_.data(); }
  const double *data() const noexcept { return data_.data(); }

  double item() const;  // value of a 1x1 array
  bool all_finite() const noexcept;
  void fill(double value);

  std::string shape_string() const;

  /// Bitwise equality of shape and payload (distinguishes -0.0 from 0.0).
  bool bit_equal(const Array2D &other) const noexcept;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Cell-centred scalar field on the simulation grid.
using Field2D = Array2D;

std::string shape_string(std::size_t rows, std::size_t cols);

} // namespace swefinn

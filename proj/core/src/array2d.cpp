#include "swefinn/array2d.hpp"

#include "swefinn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace swefinn {

Array2D::Array2D(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Array2D::Array2D(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) {
    throw ShapeError("Array2D: " + std::to_string(data_.size()) +
                     " values do not fill shape " + swefinn::shape_string(rows, cols));
  }
}

double Array2D::item() const {
  if (!is_scalar()) {
    throw ShapeError("item() on non-scalar array of shape " + shape_string());
  }
  return data_[0];
}

bool Array2D::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

void Array2D::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

std::string Array2D::shape_string() const { return swefinn::shape_string(rows_, cols_); }

bool Array2D::bit_equal(const Array2D &other) const noexcept {
  return same_shape(other) &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(double)) == 0);
}

std::string shape_string(std::size_t rows, std::size_t cols) {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

} // namespace swefinn

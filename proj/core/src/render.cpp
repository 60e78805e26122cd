#include "swefinn/render.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/format.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace swefinn {

std::vector<std::uint8_t> render_pgm(const Field2D &field) {
  if (field.empty()) throw ShapeError("cannot render an empty field");
  if (!field.all_finite()) throw NonFiniteError("cannot render a field with non-finite values");
  const auto [lo_it, hi_it] = std::minmax_element(field.values().begin(), field.values().end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const bool degenerate = !(hi > lo);

  std::string header = "P5\n# min=" + format_double(lo) + " max=" + format_double(hi);
  if (degenerate) header += " degenerate-range";
  header += "\n" + std::to_string(field.cols()) + " " + std::to_string(field.rows()) + "\n255\n";

  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + field.size());
  for (double v : field.values()) {
    if (degenerate) {
      out.push_back(0);
      continue;
    }
    const double p = std::floor(255.0 * ((v - lo) / (hi - lo)));
    out.push_back(static_cast<std::uint8_t>(std::clamp(p, 0.0, 255.0)));
  }
  return out;
}

std::string render_csv(const Field2D &field) {
  std::string out;
  for (std::size_t i = 0; i < field.rows(); ++i) {
    for (std::size_t j = 0; j < field.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(field(i, j));
    }
    out += '\n';
  }
  return out;
}

Field2D parse_csv_field(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::size_t n = 0;
    while (std::getline(ls, cell, ',')) {
      values.push_back(parse_double(cell));
      ++n;
    }
    if (rows == 0) cols = n;
    else if (n != cols) {
      throw FormatError("csv row " + std::to_string(rows) + " has " + std::to_string(n) + " values, expected " +
                        std::to_string(cols));
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("csv field is empty");
  return Field2D(rows, cols, std::move(values));
}

Field2D negated(const Field2D &field) {
  Field2D out = field;
  for (double &v : out.span()) v = -v;
  return out;
}

} // namespace swefinn

#pragma once

#include "swefinn/array2d.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace swefinn {

/// Binary P5 greymap, maxval 255. Pixel = floor(255 (v - min) / (max - min)),
/// one image row per grid row. The comment line records min and max; a
/// constant field renders as all zeros with a `degenerate-range` comment.
std::vector<std::uint8_t> render_pgm(const Field2D &field);

/// One line per grid row, shortest round-trip decimals separated by commas.
std::string render_csv(const Field2D &field);
Field2D parse_csv_field(const std::string &text);

Field2D negated(const Field2D &field);

} // namespace swefinn

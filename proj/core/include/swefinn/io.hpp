#pragma once

// Binary containers. All integers are little-endian u32, all reals
// little-endian IEEE-754 f64, no padding.
//
// SWE1 sequence:
//   "SWE1" | version | nx | ny | T | dx_m dt_s g | x0 y0 sigma | phi beta
//   | H[nx*ny] | eta[(T+1)*nx*ny] | u[...] | v[...]
// A single field (e.g. an inferred topography) uses the same header with bit
// 31 of the version word set, T = 0, and only the H payload.
//
// FNN1 checkpoint:
//   "FNN1" | version | hidden_width | param_count | flags (bit 0: has H)
//   | [nx | ny] | params[param_count] | [H[nx*ny]]

#include "swefinn/array2d.hpp"
#include "swefinn/finn.hpp"
#include "swefinn/grid.hpp"
#include "swefinn/scenario.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace swefinn {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kFieldOnlyFlag = 0x80000000u;

std::vector<std::uint8_t> encode_sequence(const Sequence &seq);
Sequence decode_sequence(const std::vector<std::uint8_t> &bytes);

void write_sequence(const std::filesystem::path &path, const Sequence &seq);
Sequence read_sequence(const std::filesystem::path &path);

/// Single-field container; `grid` supplies dx.
void write_field(const std::filesystem::path &path, const Field2D &field, const Grid &grid);
Field2D read_field(const std::filesystem::path &path);

/// True when the file carries the single-field flag.
bool is_field_file(const std::filesystem::path &path);

struct Checkpoint {
  FinnParams params;
  std::optional<Field2D> H;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint &ckpt);
/// Validates the parameter count against `hidden_width` and, when given, the
/// stored H against `grid`.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t> &bytes, std::size_t hidden_width,
                             const std::optional<Grid> &grid = std::nullopt);

void write_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint read_checkpoint(const std::filesystem::path &path, std::size_t hidden_width,
                           const std::optional<Grid> &grid = std::nullopt);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path);
void write_file_bytes(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes);

} // namespace swefinn

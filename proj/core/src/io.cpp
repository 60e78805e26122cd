#include "swefinn/io.hpp"

#include "swefinn/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace swefinn {

namespace {

class ByteWriter {
public:
  void magic(const char (&tag)[5]) { bytes_.insert(bytes_.end(), tag, tag + 4); }

  void u32(std::uint32_t x) {
    for (int k = 0; k < 4; ++k) bytes_.push_back(static_cast<std::uint8_t>(x >> (8 * k)));
  }

  void f64(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
  }

  void field(const Array2D &a) {
    for (double x : a.values()) f64(x);
  }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
  ByteReader(const std::vector<std::uint8_t> &bytes, const char *what) : bytes_(bytes), what_(what) {}

  void expect_magic(const char (&tag)[5]) {
    require(4, "magic");
    if (std::memcmp(bytes_.data() + pos_, tag, 4) != 0) {
      throw FormatError(std::string(what_) + ": bad magic at byte offset 0 (expected \"" + tag +
                        "\", found \"" +
                        std::string(reinterpret_cast<const char *>(bytes_.data() + pos_), 4) + "\")");
    }
    pos_ += 4;
  }

  std::uint32_t u32(const char *name) {
    require(4, name);
    std::uint32_t x = 0;
    for (int k = 0; k < 4; ++k) x |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return x;
  }

  double f64(const char *name) {
    require(8, name);
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  Array2D field(std::size_t rows, std::size_t cols, const char *name) {
    require(rows * cols * 8, name);
    Array2D a(rows, cols);
    for (std::size_t k = 0; k < a.size(); ++k) a[k] = f64(name);
    return a;
  }

  std::size_t offset() const noexcept { return pos_; }

  void expect_end() const {
    if (pos_ != bytes_.size()) {
      throw FormatError(std::string(what_) + ": " + std::to_string(bytes_.size() - pos_) +
                        " trailing bytes after offset " + std::to_string(pos_));
    }
  }

private:
  void require(std::size_t n, const char *name) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string(what_) + ": truncated while reading " + name + " at byte offset " +
                        std::to_string(pos_) + " (need " + std::to_string(pos_ + n) +
                        " bytes, file has " + std::to_string(bytes_.size()) + ")");
    }
  }

  const std::vector<std::uint8_t> &bytes_;
  const char *what_;
  std::size_t pos_ = 0;
};

struct SweHeader {
  std::uint32_t version = 0;
  std::uint32_t nx = 0, ny = 0, steps = 0;
  double dx = 0, dt = 0, g = 0, x0 = 0, y0 = 0, sigma = 0, phi = 0, beta = 0;
  bool field_only() const { return (version & kFieldOnlyFlag) != 0; }
};

void write_header(ByteWriter &w, const SweHeader &h) {
  w.magic("SWE1");
  w.u32(h.version);
  w.u32(h.nx);
  w.u32(h.ny);
  w.u32(h.steps);
  for (double x : {h.dx, h.dt, h.g, h.x0, h.y0, h.sigma, h.phi, h.beta}) w.f64(x);
}

SweHeader read_header(ByteReader &r) {
  r.expect_magic("SWE1");
  SweHeader h;
  h.version = r.u32("version");
  if ((h.version & ~kFieldOnlyFlag) != kFormatVersion) {
    throw FormatError("SWE1: unsupported version " + std::to_string(h.version & ~kFieldOnlyFlag) +
                      " at byte offset 4 (expected " + std::to_string(kFormatVersion) + ")");
  }
  h.nx = r.u32("nx");
  h.ny = r.u32("ny");
  h.steps = r.u32("T");
  h.dx = r.f64("dx_m");
  h.dt = r.f64("dt_s");
  h.g = r.f64("g");
  h.x0 = r.f64("x0");
  h.y0 = r.f64("y0");
  h.sigma = r.f64("sigma");
  h.phi = r.f64("phi");
  h.beta = r.f64("beta");
  if (h.nx == 0 || h.ny == 0) throw FormatError("SWE1: empty grid in header");
  return h;
}

std::uint32_t checked_u32(std::size_t x, const char *name) {
  if (x > 0xFFFFFFFFull) throw FormatError(std::string(name) + " does not fit in u32");
  return static_cast<std::uint32_t>(x);
}

} // namespace

std::vector<std::uint8_t> encode_sequence(const Sequence &seq) {
  const std::size_t frames = seq.eta.size();
  if (frames == 0 || seq.u.size() != frames || seq.v.size() != frames) {
    throw ShapeError("encode_sequence: eta/u/v frame counts differ or are empty");
  }
  seq.grid.check_field(seq.H, "H");
  SweHeader h;
  h.version = kFormatVersion;
  h.nx = checked_u32(seq.grid.nx, "nx");
  h.ny = checked_u32(seq.grid.ny, "ny");
  h.steps = checked_u32(frames - 1, "T");
  h.dx = seq.grid.dx();
  h.dt = seq.dt_s;
  h.g = seq.g_m_s2;
  h.x0 = seq.ic.x0_m;
  h.y0 = seq.ic.y0_m;
  h.sigma = seq.ic.sigma_m;
  h.phi = seq.topo.rotation_rad;
  h.beta = seq.topo.depth_scale;
  ByteWriter w;
  write_header(w, h);
  w.field(seq.H);
  for (const auto *frames_of : {&seq.eta, &seq.u, &seq.v}) {
    for (const Field2D &f : *frames_of) {
      seq.grid.check_field(f, "frame");
      w.field(f);
    }
  }
  return w.take();
}

Sequence decode_sequence(const std::vector<std::uint8_t> &bytes) {
  ByteReader r(bytes, "SWE1");
  const SweHeader h = read_header(r);
  if (h.field_only()) throw FormatError("SWE1: file holds a single field, not a sequence");
  Sequence seq;
  seq.grid.nx = h.nx;
  seq.grid.ny = h.ny;
  seq.grid.side_length_m = h.dx * static_cast<double>(h.nx);
  seq.dt_s = h.dt;
  seq.g_m_s2 = h.g;
  seq.ic = {h.x0, h.y0, h.sigma};
  seq.topo.rotation_rad = h.phi;
  seq.topo.depth_scale = h.beta;
  seq.H = r.field(h.nx, h.ny, "H");
  const std::size_t frames = static_cast<std::size_t>(h.steps) + 1;
  for (auto [dst, name] : {std::pair{&seq.eta, "eta frames"}, std::pair{&seq.u, "u frames"},
                           std::pair{&seq.v, "v frames"}}) {
    dst->reserve(frames);
    for (std::size_t t = 0; t < frames; ++t) dst->push_back(r.field(h.nx, h.ny, name));
  }
  r.expect_end();
  return seq;
}

void write_sequence(const std::filesystem::path &path, const Sequence &seq) {
  write_file_bytes(path, encode_sequence(seq));
}

Sequence read_sequence(const std::filesystem::path &path) {
  try {
    return decode_sequence(read_file_bytes(path));
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_field(const std::filesystem::path &path, const Field2D &field, const Grid &grid) {
  grid.check_field(field, "field");
  SweHeader h;
  h.version = kFormatVersion | kFieldOnlyFlag;
  h.nx = checked_u32(grid.nx, "nx");
  h.ny = checked_u32(grid.ny, "ny");
  h.dx = grid.dx();
  ByteWriter w;
  write_header(w, h);
  w.field(field);
  write_file_bytes(path, w.take());
}

Field2D read_field(const std::filesystem::path &path) {
  const auto bytes = read_file_bytes(path);
  ByteReader r(bytes, "SWE1");
  try {
    const SweHeader h = read_header(r);
    if (!h.field_only()) throw FormatError("file holds a sequence, not a single field");
    Field2D f = r.field(h.nx, h.ny, "field");
    r.expect_end();
    return f;
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

bool is_field_file(const std::filesystem::path &path) {
  const auto bytes = read_file_bytes(path);
  ByteReader r(bytes, "SWE1");
  return read_header(r).field_only();
}

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint &ckpt) {
  ByteWriter w;
  w.magic("FNN1");
  w.u32(kFormatVersion);
  w.u32(checked_u32(ckpt.params.hidden_width, "hidden width"));
  w.u32(checked_u32(ckpt.params.param_count(), "parameter count"));
  w.u32(ckpt.H ? 1u : 0u);
  if (ckpt.H) {
    w.u32(checked_u32(ckpt.H->rows(), "nx"));
    w.u32(checked_u32(ckpt.H->cols(), "ny"));
  }
  for (double x : ckpt.params.flatten()) w.f64(x);
  if (ckpt.H) w.field(*ckpt.H);
  return w.take();
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t> &bytes, std::size_t hidden_width,
                             const std::optional<Grid> &grid) {
  ByteReader r(bytes, "FNN1");
  r.expect_magic("FNN1");
  const std::uint32_t version = r.u32("version");
  if (version != kFormatVersion) {
    throw FormatError("FNN1: unsupported version " + std::to_string(version) + " at byte offset 4");
  }
  const std::uint32_t width = r.u32("hidden width");
  const std::uint32_t count = r.u32("parameter count");
  const std::size_t expected = FinnParams::count_for(hidden_width);
  if (count != expected || width != hidden_width) {
    throw FormatError("FNN1: parameter count mismatch: checkpoint has " + std::to_string(count) +
                      " (hidden width " + std::to_string(width) + "), architecture needs " +
                      std::to_string(expected) + " (hidden width " + std::to_string(hidden_width) + ")");
  }
  const std::uint32_t flags = r.u32("flags");
  std::uint32_t nx = 0, ny = 0;
  if (flags & 1u) {
    nx = r.u32("nx");
    ny = r.u32("ny");
    if (grid && (nx != grid->nx || ny != grid->ny)) {
      throw ShapeError("FNN1: stored topography is " + shape_string(nx, ny) + ", grid is " +
                       shape_string(grid->nx, grid->ny));
    }
  }
  std::vector<double> values(count);
  for (double &x : values) x = r.f64("parameters");
  Checkpoint ckpt;
  ckpt.params = FinnParams::unflatten(hidden_width, values);
  if (flags & 1u) ckpt.H = r.field(nx, ny, "H");
  r.expect_end();
  return ckpt;
}

void write_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt) {
  write_file_bytes(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path &path, std::size_t hidden_width,
                           const std::optional<Grid> &grid) {
  try {
    return decode_checkpoint(read_file_bytes(path), hidden_width, grid);
  } catch (const FormatError &e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file_bytes(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

} // namespace swefinn

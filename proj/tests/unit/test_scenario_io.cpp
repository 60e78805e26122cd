#include "doctest.h"

#include "support/temp_dir.hpp"

#include "swefinn/errors.hpp"
#include "swefinn/io.hpp"
#include "swefinn/scenario.hpp"
#include "swefinn/solver.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <set>

using namespace swefinn;
using testing_support::TempDir;

namespace {

SimConfig small_cfg(std::size_t n = 8, std::size_t steps = 5) {
  SimConfig cfg;
  cfg.grid.nx = n;
  cfg.grid.ny = n;
  cfg.grid.side_length_m = 31250.0 * static_cast<double>(n);
  cfg.steps = steps;
  return cfg;
}

bool same_sequence(const Sequence &a, const Sequence &b) {
  if (a.eta.size() != b.eta.size() || !a.H.bit_equal(b.H)) return false;
  for (std::size_t t = 0; t < a.eta.size(); ++t) {
    if (!a.eta[t].bit_equal(b.eta[t]) || !a.u[t].bit_equal(b.u[t]) || !a.v[t].bit_equal(b.v[t])) return false;
  }
  return std::memcmp(&a.dt_s, &b.dt_s, sizeof(double)) == 0 && a.ic.x0_m == b.ic.x0_m && a.ic.y0_m == b.ic.y0_m;
}

Sequence sample_sequence() {
  const SimConfig cfg = small_cfg();
  TopoSpec ts;
  ts.depth_scale = 0.75;
  ts.rotation_rad = 1.25;
  const Field2D H = generate_topography(cfg.grid, ts);
  return simulate_sequence(H, ts, {3.5 * 31250.0, 4.5 * 31250.0, 5e4}, cfg);
}

std::string message_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const std::exception &e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_SUITE("scenario_io") {

TEST_CASE("gaussian bump values") {
  Grid g;
  const Field2D eta = gaussian_ic(g, g.x_center(10), g.y_center(20), 5e4);
  CHECK(eta(10, 20) == 1.0);
  // squared distance 2 sigma^2 -> exp(-1)
  const double sigma = std::hypot(g.x_center(11) - g.x_center(10), g.y_center(21) - g.y_center(20)) / std::sqrt(2.0);
  const Field2D e2 = gaussian_ic(g, g.x_center(10), g.y_center(20), sigma);
  CHECK(e2(11, 21) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

  // full width at half maximum of sigma = 5e4 m is 2.355 sigma = 3.77 cells
  const double fwhm_cells = 2.0 * std::sqrt(2.0 * std::log(2.0)) * 5e4 / g.dx();
  CHECK(fwhm_cells > 3.0);
  CHECK(fwhm_cells < 4.0);
  std::size_t above_half = 0;
  for (std::size_t i = 0; i < 32; ++i) above_half += eta(i, 20) > 0.5 ? 1 : 0;
  CHECK(above_half >= 3);
  CHECK(above_half <= 4);

  CHECK_THROWS_AS(gaussian_ic(g, -1.0, 5e5, 5e4), DomainError);
  CHECK_THROWS_AS(gaussian_ic(g, 5e5, 2e6, 5e4), DomainError);
  CHECK_THROWS_AS(gaussian_ic(g, 5e5, 5e5, 0.0), DomainError);
}

TEST_CASE("simulated sequence starts from rest with the bump") {
  const Sequence s = sample_sequence();
  CHECK(s.u[0].bit_equal(Field2D(8, 8)));
  CHECK(s.v[0].bit_equal(Field2D(8, 8)));
  CHECK(s.eta[0].bit_equal(gaussian_ic(s.grid, s.ic.x0_m, s.ic.y0_m, s.ic.sigma_m)));
  CHECK(s.steps() == 5);
}

TEST_CASE("sequence round-trips bit-exactly") {
  TempDir dir("seq");
  const Sequence s = sample_sequence();
  write_sequence(dir / "a.swe", s);
  const Sequence r = read_sequence(dir / "a.swe");
  CHECK(same_sequence(s, r));
  CHECK(r.topo.depth_scale == s.topo.depth_scale);
  CHECK(r.topo.rotation_rad == s.topo.rotation_rad);
  CHECK(r.g_m_s2 == s.g_m_s2);
}

TEST_CASE("sequence header layout") {
  const Sequence s = sample_sequence();
  const std::vector<std::uint8_t> b = encode_sequence(s);
  CHECK(std::string(b.begin(), b.begin() + 4) == "SWE1");
  auto u32 = [&](std::size_t off) {
    return std::uint32_t(b[off]) | std::uint32_t(b[off + 1]) << 8 | std::uint32_t(b[off + 2]) << 16 |
           std::uint32_t(b[off + 3]) << 24;
  };
  CHECK(u32(4) == 1);
  CHECK(u32(8) == 8);
  CHECK(u32(12) == 8);
  CHECK(u32(16) == 5);
  double dx;
  std::memcpy(&dx, &b[20], 8);
  CHECK(dx == 31250.0);
  const std::size_t header = 20 + 8 * 8;
  const std::size_t cells = 64;
  CHECK(b.size() == header + 8 * cells * (1 + 3 * 6));
  double h0;
  std::memcpy(&h0, &b[header], 8);
  CHECK(h0 == s.H[0]);
}

TEST_CASE("malformed sequence files are rejected with offsets") {
  const Sequence s = sample_sequence();
  std::vector<std::uint8_t> b = encode_sequence(s);

  std::vector<std::uint8_t> bad = b;
  bad[0] = 'X';
  bad[1] = 'X';
  bad[2] = 'X';
  bad[3] = 'X';
  CHECK(message_of([&] { decode_sequence(bad); }).find("bad magic") != std::string::npos);

  bad = b;
  bad[4] = 2;
  CHECK(message_of([&] { decode_sequence(bad); }).find("version") != std::string::npos);

  // cut in the middle of the eta frames
  const std::size_t cut = 84 + 8 * 64 + 8 * 64 * 3 + 17;
  bad.assign(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(cut));
  const std::string msg = message_of([&] { decode_sequence(bad); });
  CHECK(msg.find("truncated") != std::string::npos);
  CHECK(msg.find("eta") != std::string::npos);
  CHECK(msg.find(std::to_string(cut)) != std::string::npos);

  bad = b;
  bad.push_back(0);
  CHECK_THROWS_AS(decode_sequence(bad), FormatError);
}

TEST_CASE("single-field container") {
  TempDir dir("field");
  const Sequence s = sample_sequence();
  write_field(dir / "h.bin", s.H, s.grid);
  CHECK(is_field_file(dir / "h.bin"));
  CHECK(read_field(dir / "h.bin").bit_equal(s.H));
  write_sequence(dir / "s.swe", s);
  CHECK_FALSE(is_field_file(dir / "s.swe"));
  CHECK_THROWS_AS(read_sequence(dir / "h.bin"), FormatError);
  CHECK_THROWS_AS(read_field(dir / "s.swe"), FormatError);
}

TEST_CASE("checkpoint round trip and validation") {
  TempDir dir("ckpt");
  const FinnParams p = FinnParams::init(13, 4);
  write_checkpoint(dir / "p.fnn", {p, std::nullopt});
  const Checkpoint c = read_checkpoint(dir / "p.fnn", 13);
  CHECK(c.params.bit_equal(p));
  CHECK_FALSE(c.H.has_value());

  CHECK(message_of([&] { read_checkpoint(dir / "p.fnn", 12); }).find("count mismatch") != std::string::npos);

  Grid g;
  g.nx = 8;
  g.ny = 8;
  write_checkpoint(dir / "h.fnn", {p, Field2D(8, 8, 70.0)});
  CHECK(read_checkpoint(dir / "h.fnn", 13, g).H->bit_equal(Field2D(8, 8, 70.0)));
  Grid other;
  CHECK_THROWS_AS(read_checkpoint(dir / "h.fnn", 13, other), ShapeError);

  const std::string missing = (dir / "nope.fnn").string();
  CHECK(message_of([&] { read_checkpoint(missing, 13); }).find(missing) != std::string::npos);
}

TEST_CASE("dataset generation is deterministic and shares the inference topography") {
  TempDir a("dsa"), b("dsb");
  const SimConfig cfg = small_cfg(8, 4);
  DatasetOptions opt;
  generate_dataset(DatasetRole::Infer, 3, 7, cfg, opt, a.path());
  generate_dataset(DatasetRole::Infer, 3, 7, cfg, opt, b.path());
  for (const std::string f : {"seq_00000.swe", "seq_00001.swe", "seq_00002.swe", "manifest.txt"}) {
    CHECK(read_file_bytes(a / f) == read_file_bytes(b / f));
  }
  DatasetManifest m;
  const std::vector<Sequence> seqs = load_dataset(a.path(), &m);
  REQUIRE(seqs.size() == 3);
  CHECK(m.role == DatasetRole::Infer);
  CHECK(seqs[0].H.bit_equal(seqs[1].H));
  CHECK(seqs[0].H.bit_equal(seqs[2].H));
  CHECK(seqs[0].topo.kind == TopoKind::Bumpy);
  CHECK(seqs[0].topo.depth_scale == 0.68);
  // distinct initial conditions
  CHECK_FALSE(seqs[0].eta[0].bit_equal(seqs[1].eta[0]));
}

TEST_CASE("training datasets draw a fresh topography per sequence") {
  TempDir dir("dst");
  const SimConfig cfg = small_cfg(8, 3);
  const DatasetManifest m = generate_dataset(DatasetRole::Train, 6, 11, cfg, DatasetOptions{}, dir.path());
  std::set<std::pair<double, double>> specs;
  for (const ManifestEntry &e : m.entries) {
    CHECK(e.topo.kind == TopoKind::ArctanSlope);
    CHECK(e.topo.depth_scale >= 0.5);
    CHECK(e.topo.depth_scale <= 1.0);
    specs.insert({e.topo.rotation_rad, e.topo.depth_scale});
  }
  CHECK(specs.size() == 6);
  const std::vector<Sequence> seqs = load_dataset(dir.path());
  for (std::size_t i = 1; i < seqs.size(); ++i) CHECK_FALSE(seqs[i].H.bit_equal(seqs[0].H));
}

TEST_CASE("stored sequences conserve mass when re-checked") {
  TempDir dir("mass");
  generate_dataset(DatasetRole::Train, 3, 5, small_cfg(10, 30), DatasetOptions{}, dir.path());
  for (const Sequence &s : load_dataset(dir.path())) {
    const double s0 = field_sum(s.eta[0]), a0 = field_abs_sum(s.eta[0]);
    for (const Field2D &f : s.eta) CHECK(std::abs(field_sum(f) - s0) < 1e-9 * a0);
  }
}

TEST_CASE("manifest round trip and errors") {
  TempDir dir("man");
  const DatasetManifest m = generate_dataset(DatasetRole::Test, 2, 3, small_cfg(8, 2), DatasetOptions{}, dir.path());
  const DatasetManifest r = read_manifest(dir / kManifestName);
  CHECK(r.count == 2);
  CHECK(r.seed == 3);
  CHECK(r.entries[1].ic.x0_m == m.entries[1].ic.x0_m);
  CHECK(r.entries[1].dt_s == m.entries[1].dt_s);

  const std::string text = "role = train\ncount = 1\nseed = 0\nnx = 8\nny = 8\nbogus = 1\n";
  write_file_bytes(dir / "bad.txt", std::vector<std::uint8_t>(text.begin(), text.end()));
  CHECK_THROWS_AS(read_manifest(dir / "bad.txt"), FormatError);
  CHECK_THROWS_AS(generate_dataset(DatasetRole::Test, 0, 3, small_cfg(), DatasetOptions{}, dir.path()), ConfigError);
  CHECK_THROWS_AS(dataset_role_from_string("validate"), ConfigError);
}

TEST_CASE("in-memory datasets match the files") {
  TempDir dir("mem");
  const SimConfig cfg = small_cfg(8, 3);
  generate_dataset(DatasetRole::Train, 2, 9, cfg, DatasetOptions{}, dir.path());
  const std::vector<Sequence> disk = load_dataset(dir.path());
  const std::vector<Sequence> mem = make_dataset(DatasetRole::Train, 2, 9, cfg, DatasetOptions{});
  for (std::size_t k = 0; k < 2; ++k) CHECK(same_sequence(disk[k], mem[k]));
}

} // TEST_SUITE

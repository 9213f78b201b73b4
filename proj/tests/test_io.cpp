#include "pls/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pls/operators.hpp"
#include "pls/rng.hpp"

using namespace pls;

namespace {

// Unique scratch paths so test cases cannot collide.
std::string tmp_path(const std::string& name) {
  static const std::string dir = [] {
    const auto d = std::filesystem::temp_directory_path() / "pls_io_tests";
    std::filesystem::create_directories(d);
    return d.string();
  }();
  return dir + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  REQUIRE(out);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("signal files round-trip 1-D and 2-D data") {
  GridSignal f2 = make_signal(GridShape::plane(4, 8));
  const RandomStream rs(1, StreamPurpose::kGeneric, 0);
  rs.fill_gaussian(f2.values);
  const std::string p2 = tmp_path("sig2.pls1");
  write_signal(p2, f2);
  const GridSignal back2 = read_signal(p2);
  CHECK(back2.shape == f2.shape);
  CHECK(back2.values == f2.values);

  GridSignal f1 = make_signal(GridShape::line(16));
  rs.fill_uniform_sym(f1.values);
  const std::string p1 = tmp_path("sig1.pls1");
  write_signal(p1, f1);
  const GridSignal back1 = read_signal(p1);
  CHECK(back1.shape == f1.shape);
  CHECK(back1.values == f1.values);
}

TEST_CASE("signal file bytes are the documented little-endian layout") {
  GridSignal f = make_signal(GridShape::plane(2, 2));
  f.values = {1.0, 2.0, 3.0, 4.0};
  const std::string p = tmp_path("golden.pls1");
  write_signal(p, f);
  const std::string bytes = slurp(p);
  REQUIRE(bytes.size() == 4 + 4 + 8 + 4 * 8);
  CHECK(bytes.substr(0, 4) == "PLS1");
  // u32 d = 2, sides 2,2 little-endian.
  const std::string header = {2, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0};
  CHECK(bytes.substr(4, 12) == header);
  double v = 0;
  std::memcpy(&v, bytes.data() + 16, 8);
  CHECK(v == 1.0);
  std::memcpy(&v, bytes.data() + 16 + 3 * 8, 8);
  CHECK(v == 4.0);
}

TEST_CASE("signal reader rejects bad magic, truncation, and non-finite data") {
  const std::string p = tmp_path("bad.pls1");
  spit(p, "NOPE");
  CHECK_THROWS_AS(read_signal(p), Error);

  GridSignal f = make_signal(GridShape::plane(2, 2), 1.0);
  const std::string q = tmp_path("trunc.pls1");
  write_signal(q, f);
  const std::string bytes = slurp(q);
  spit(q, bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_signal(q), Error);

  CHECK_THROWS_AS(read_signal(tmp_path("missing.pls1")), Error);
}

TEST_CASE("operator files round-trip entries and the mean-row flag") {
  const MeasurementOperator A = gen_gaussian_operator(5, 8, 3);
  const std::string p = tmp_path("op.plsa");
  write_operator(p, A);
  const MeasurementOperator back = read_operator(p);
  CHECK(back.has_mean_row == false);
  CHECK(back.entries == A.entries);

  const MeasurementOperator aug = augment_mean_row(A);
  const std::string q = tmp_path("op_aug.plsa");
  write_operator(q, aug);
  const MeasurementOperator back_aug = read_operator(q);
  CHECK(back_aug.has_mean_row == true);
  CHECK(back_aug.rows() == 6);
  CHECK(back_aug.core_rows() == 5);
  CHECK(back_aug.entries == aug.entries);
}

TEST_CASE("vector files round-trip") {
  Eigen::VectorXd v(5);
  v << 1.5, -2.25, 0.0, 1e-300, 3.25;
  const std::string p = tmp_path("vec.plsv");
  write_vector(p, v);
  CHECK(read_vector(p) == v);

  spit(p, "PLSX");
  CHECK_THROWS_AS(read_vector(p), Error);
}

TEST_CASE("2-D masks are written as binary PBM with MSB-first packing") {
  LevelSetMask mask = make_mask(GridShape::plane(2, 16));
  // Row 0: pixel 0 and pixel 9; row 1: pixel 2.
  mask.inside[0] = 1;
  mask.inside[9] = 1;
  mask.inside[16 + 2] = 1;
  const std::string p = tmp_path("mask.pbm");
  write_mask(p, mask);
  const std::string bytes = slurp(p);
  const std::string header = "P4\n16 2\n";
  REQUIRE(bytes.substr(0, header.size()) == header);
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 0]) == 0x80);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 0x40);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 0x20);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 3]) == 0x00);

  const LevelSetMask back = read_mask(p);
  CHECK(back.shape == mask.shape);
  CHECK(back.inside == mask.inside);
}

TEST_CASE("narrow PBM rows are zero-padded to whole bytes") {
  LevelSetMask mask = make_mask(GridShape::plane(2, 4));
  mask.inside = {1, 0, 0, 1, 0, 1, 0, 0};
  const std::string p = tmp_path("mask4.pbm");
  write_mask(p, mask);
  const std::string bytes = slurp(p);
  const std::string header = "P4\n4 2\n";
  REQUIRE(bytes.substr(0, header.size()) == header);
  REQUIRE(bytes.size() == header.size() + 2);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 0]) == 0x90);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 0x40);
  const LevelSetMask back = read_mask(p);
  CHECK(back.inside == mask.inside);
}

TEST_CASE("1-D masks round-trip through 0/1 signal files") {
  LevelSetMask mask = make_mask(GridShape::line(8));
  mask.inside = {1, 0, 0, 1, 1, 1, 0, 1};
  const std::string p = tmp_path("mask1d.pls1");
  write_mask(p, mask);
  const LevelSetMask back = read_mask(p);
  CHECK(back.shape == mask.shape);
  CHECK(back.inside == mask.inside);

  // A non-binary signal is not a mask.
  GridSignal f = make_signal(GridShape::line(4));
  f.values = {0.0, 1.0, 0.5, 0.0};
  const std::string q = tmp_path("notmask.pls1");
  write_signal(q, f);
  CHECK_THROWS_AS(read_mask(q), Error);
}

TEST_CASE("random 2-D masks round-trip at non-square shapes") {
  const GridShape shape = GridShape::plane(4, 16);
  const RandomStream rs(7, StreamPurpose::kGeneric, 0);
  LevelSetMask mask = make_mask(shape);
  for (std::size_t i = 0; i < mask.inside.size(); ++i)
    mask.inside[i] = rs.uniform_pair(i)[0] < 0.5 ? 1 : 0;
  const std::string p = tmp_path("mask_rand.pbm");
  write_mask(p, mask);
  const LevelSetMask back = read_mask(p);
  CHECK(back.shape == shape);
  CHECK(back.inside == mask.inside);
}

TEST_CASE("PGM previews min-max scale to the full 8-bit range") {
  GridSignal f = make_signal(GridShape::plane(2, 2));
  f.values = {10.0, 20.0, 15.0, 10.0};
  const std::string p = tmp_path("prev.pgm");
  write_pgm_preview(p, f);
  const std::string bytes = slurp(p);
  const std::string header = "P5\n2 2\n255\n";
  REQUIRE(bytes.substr(0, header.size()) == header);
  REQUIRE(bytes.size() == header.size() + 4);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 0]) == 0);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 1]) == 255);
  // 255 * 0.5 + 0.5 rounds to 128.
  CHECK(static_cast<unsigned char>(bytes[header.size() + 2]) == 128);
  CHECK(static_cast<unsigned char>(bytes[header.size() + 3]) == 0);

  // Constant signals render as black, not a division by zero.
  GridSignal flat = make_signal(GridShape::plane(2, 2), 42.0);
  const std::string q = tmp_path("flat.pgm");
  write_pgm_preview(q, flat);
  const std::string flat_bytes = slurp(q);
  CHECK(static_cast<unsigned char>(flat_bytes[header.size()]) == 0);
}

TEST_CASE("tree dumps print the partition in preorder with indentation") {
  PartitionEstimate est;
  est.shape = GridShape::plane(2, 2);
  PartitionNode root;
  root.is_leaf = false;
  root.split_dim = 1;
  root.child = {1, 2};
  est.nodes.push_back(root);
  PartitionNode left;
  left.cell = child_cell(root_cell(), 1, 0);
  left.label = true;
  est.nodes.push_back(left);
  PartitionNode right;
  right.cell = child_cell(root_cell(), 1, 1);
  right.label = false;
  est.nodes.push_back(right);

  const std::string expect =
      "partition sides=2x2 leaves=2\n"
      "cell(l0=0,i0=0,l1=0,i1=0) split dim=1\n"
      "  cell(l0=0,i0=0,l1=1,i1=0) leaf inside\n"
      "  cell(l0=0,i0=0,l1=1,i1=1) leaf outside\n";
  CHECK(format_tree(est) == expect);

  const std::string p = tmp_path("tree.txt");
  write_tree_dump(p, est);
  CHECK(slurp(p) == expect);
}

TEST_CASE("1-D tree dumps use the single-coordinate cell form") {
  const PartitionEstimate est =
      single_leaf_partition(GridShape::line(4), true);
  CHECK(format_tree(est) ==
        "partition sides=4 leaves=1\n"
        "cell(l=0,i=0) leaf inside\n");
}

TEST_CASE("proxy sidecars record offset, threshold, and mode") {
  ProxyResult proxy;
  proxy.z = make_signal(GridShape::line(2));
  proxy.lambda_hat = 1.5;
  proxy.gamma_effective = -0.25;
  proxy.mode = SubtractMode::kProjectedMean;
  const std::string p = tmp_path("proxy.txt");
  write_proxy_sidecar(p, proxy);
  CHECK(slurp(p) ==
        "lambda_hat = 1.5\n"
        "gamma_effective = -0.25\n"
        "mode = projected_mean\n");
}

TEST_CASE("format_double keeps 17 significant digits and round-trips") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-2.5) == "-2.5");
  const double v = 3.141592653589793;
  CHECK(std::stod(format_double(v)) == v);
}

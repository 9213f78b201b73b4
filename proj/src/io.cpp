#include "pls/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace pls {

static_assert(std::endian::native == std::endian::little,
              "file formats assume a little-endian host");

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  return in;
}

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  if (!out) throw Error("write failed");
}

void read_bytes(std::ifstream& in, void* p, std::size_t n,
                const std::string& path) {
  in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (in.gcount() != static_cast<std::streamsize>(n))
    throw Error("truncated file: " + path);
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  write_bytes(out, &v, sizeof v);
}

std::uint32_t read_u32(std::ifstream& in, const std::string& path) {
  std::uint32_t v = 0;
  read_bytes(in, &v, sizeof v, path);
  return v;
}

void expect_magic(std::ifstream& in, const char* magic,
                  const std::string& path) {
  char buf[4];
  read_bytes(in, buf, 4, path);
  if (std::memcmp(buf, magic, 4) != 0)
    throw Error("bad magic in " + path + " (expected " + magic + ")");
}

}  // namespace

void write_signal(const std::string& path, const GridSignal& f) {
  validate_signal(f);
  std::ofstream out = open_out(path);
  write_bytes(out, "PLS1", 4);
  write_u32(out, static_cast<std::uint32_t>(f.shape.d));
  for (int t = 0; t < f.shape.d; ++t)
    write_u32(out, f.shape.sides[static_cast<std::size_t>(t)]);
  write_bytes(out, f.values.data(), f.values.size() * sizeof(double));
}

GridSignal read_signal(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "PLS1", path);
  const std::uint32_t d = read_u32(in, path);
  if (d != 1 && d != 2) throw Error("unsupported dimension in " + path);
  GridShape shape;
  shape.d = static_cast<int>(d);
  shape.sides = {read_u32(in, path), d == 2 ? read_u32(in, path) : 1};
  validate_shape(shape);
  GridSignal f = make_signal(shape);
  read_bytes(in, f.values.data(), f.values.size() * sizeof(double), path);
  validate_signal(f);
  return f;
}

void write_operator(const std::string& path, const MeasurementOperator& A) {
  std::ofstream out = open_out(path);
  write_bytes(out, "PLSA", 4);
  write_u32(out, static_cast<std::uint32_t>(A.rows()));
  write_u32(out, static_cast<std::uint32_t>(A.signal_length()));
  const std::uint8_t flag = A.has_mean_row ? 1 : 0;
  write_bytes(out, &flag, 1);
  write_bytes(out, A.entries.data(),
              static_cast<std::size_t>(A.entries.size()) * sizeof(double));
}

MeasurementOperator read_operator(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "PLSA", path);
  const std::uint32_t k = read_u32(in, path);
  const std::uint32_t n = read_u32(in, path);
  std::uint8_t flag = 0;
  read_bytes(in, &flag, 1, path);
  if (k < 1 || n < 1) throw Error("empty operator in " + path);
  MeasurementOperator A;
  A.has_mean_row = flag != 0;
  A.entries.resize(k, n);
  read_bytes(in, A.entries.data(),
             static_cast<std::size_t>(A.entries.size()) * sizeof(double),
             path);
  return A;
}

void write_vector(const std::string& path, const Eigen::VectorXd& v) {
  std::ofstream out = open_out(path);
  write_bytes(out, "PLSV", 4);
  write_u32(out, static_cast<std::uint32_t>(v.size()));
  write_bytes(out, v.data(), static_cast<std::size_t>(v.size()) * sizeof(double));
}

Eigen::VectorXd read_vector(const std::string& path) {
  std::ifstream in = open_in(path);
  expect_magic(in, "PLSV", path);
  const std::uint32_t n = read_u32(in, path);
  Eigen::VectorXd v(n);
  read_bytes(in, v.data(), n * sizeof(double), path);
  return v;
}

void write_mask(const std::string& path, const LevelSetMask& mask) {
  validate_shape(mask.shape);
  if (mask.inside.size() != mask.shape.size())
    throw Error("mask length does not match grid size");
  if (mask.shape.d == 1) {
    GridSignal f = make_signal(mask.shape);
    for (std::size_t i = 0; i < mask.inside.size(); ++i)
      f.values[i] = mask.inside[i] ? 1.0 : 0.0;
    write_signal(path, f);
    return;
  }
  std::ofstream out = open_out(path);
  const std::uint32_t h = mask.shape.sides[0];
  const std::uint32_t w = mask.shape.sides[1];
  out << "P4\n" << w << " " << h << "\n";
  const std::uint32_t row_bytes = (w + 7) / 8;
  std::vector<std::uint8_t> row(row_bytes);
  for (std::uint32_t r = 0; r < h; ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (std::uint32_t c = 0; c < w; ++c)
      if (mask.inside[static_cast<std::size_t>(r) * w + c])
        row[c / 8] |= static_cast<std::uint8_t>(0x80u >> (c % 8));
    write_bytes(out, row.data(), row_bytes);
  }
}

LevelSetMask read_mask(const std::string& path) {
  {
    std::ifstream probe = open_in(path);
    char buf[2] = {0, 0};
    probe.read(buf, 2);
    if (!(buf[0] == 'P' && buf[1] == '4')) {
      const GridSignal f = read_signal(path);
      LevelSetMask mask = make_mask(f.shape);
      for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (f.values[i] != 0.0 && f.values[i] != 1.0)
          throw Error("mask signal has non-binary values: " + path);
        mask.inside[i] = f.values[i] != 0.0 ? 1 : 0;
      }
      return mask;
    }
  }
  std::ifstream in = open_in(path);
  std::string magic;
  std::uint32_t w = 0, h = 0;
  in >> magic >> w >> h;
  if (magic != "P4" || !in) throw Error("bad PBM header: " + path);
  in.get();  // single whitespace after the header
  GridShape shape = GridShape::plane(h, w);
  LevelSetMask mask = make_mask(shape);
  const std::uint32_t row_bytes = (w + 7) / 8;
  std::vector<std::uint8_t> row(row_bytes);
  for (std::uint32_t r = 0; r < h; ++r) {
    read_bytes(in, row.data(), row_bytes, path);
    for (std::uint32_t c = 0; c < w; ++c)
      mask.inside[static_cast<std::size_t>(r) * w + c] =
          (row[c / 8] >> (7 - c % 8)) & 1u;
  }
  return mask;
}

void write_pgm_preview(const std::string& path, const GridSignal& f) {
  validate_signal(f);
  double lo = f.values[0], hi = f.values[0];
  for (double v : f.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  std::ofstream out = open_out(path);
  const std::uint32_t h = f.shape.sides[0];
  const std::uint32_t w = f.shape.sides[1];
  out << "P5\n" << w << " " << h << "\n255\n";
  std::vector<std::uint8_t> row(w);
  for (std::uint32_t r = 0; r < h; ++r) {
    for (std::uint32_t c = 0; c < w; ++c) {
      const double v = f.values[static_cast<std::size_t>(r) * w + c];
      row[c] = static_cast<std::uint8_t>(255.0 * (v - lo) / span + 0.5);
    }
    write_bytes(out, row.data(), row.size());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void format_node(const PartitionEstimate& est, std::int32_t idx, int indent,
                 std::ostringstream& out) {
  const PartitionNode& n = est.nodes[static_cast<std::size_t>(idx)];
  for (int i = 0; i < indent; ++i) out << "  ";
  if (est.shape.d == 1)
    out << "cell(l=" << n.cell.level[0] << ",i=" << n.cell.index[0] << ")";
  else
    out << "cell(l0=" << n.cell.level[0] << ",i0=" << n.cell.index[0]
        << ",l1=" << n.cell.level[1] << ",i1=" << n.cell.index[1] << ")";
  if (n.is_leaf) {
    out << " leaf " << (n.label ? "inside" : "outside") << "\n";
    return;
  }
  out << " split dim=" << n.split_dim << "\n";
  format_node(est, n.child[0], indent + 1, out);
  format_node(est, n.child[1], indent + 1, out);
}

}  // namespace

std::string format_tree(const PartitionEstimate& est) {
  validate_partition(est);
  std::ostringstream out;
  out << "partition sides=" << est.shape.sides[0];
  if (est.shape.d == 2) out << "x" << est.shape.sides[1];
  out << " leaves=" << est.leaf_count() << "\n";
  format_node(est, 0, 0, out);
  return out.str();
}

void write_tree_dump(const std::string& path, const PartitionEstimate& est) {
  write_text(path, format_tree(est));
}

void write_proxy_sidecar(const std::string& path, const ProxyResult& proxy) {
  std::ostringstream out;
  out << "lambda_hat = " << format_double(proxy.lambda_hat) << "\n"
      << "gamma_effective = " << format_double(proxy.gamma_effective) << "\n"
      << "mode = " << to_string(proxy.mode) << "\n";
  write_text(path, out.str());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  write_bytes(out, text.data(), text.size());
}

}  // namespace pls

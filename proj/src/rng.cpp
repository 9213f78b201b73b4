#include "pls/rng.hpp"

#include <cmath>
#include <numbers>

namespace pls {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint64_t x) {
  // Top 53 bits -> [0,1).
  return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(
    std::array<std::uint32_t, 4> ctr) const {
  std::uint32_t k0 = key[0];
  std::uint32_t k1 = key[1];
  for (int r = 0; r < kRounds; ++r) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

std::uint64_t derive_seed(std::uint64_t root_seed, std::uint32_t a,
                          std::uint32_t b, std::uint32_t c) {
  const Philox4x32 eng(root_seed);
  const auto w = eng.block(
      {static_cast<std::uint32_t>(StreamPurpose::kKeyDerive), a, b, c});
  return static_cast<std::uint64_t>(w[0]) |
         (static_cast<std::uint64_t>(w[1]) << 32);
}

std::array<std::uint32_t, 4> RandomStream::raw(std::uint64_t i) const {
  return eng_.block({purpose_, stream_, static_cast<std::uint32_t>(i),
                     static_cast<std::uint32_t>(i >> 32)});
}

std::array<double, 2> RandomStream::uniform_pair(std::uint64_t i) const {
  const auto w = raw(i);
  const std::uint64_t a =
      static_cast<std::uint64_t>(w[0]) | (static_cast<std::uint64_t>(w[1]) << 32);
  const std::uint64_t b =
      static_cast<std::uint64_t>(w[2]) | (static_cast<std::uint64_t>(w[3]) << 32);
  return {to_unit(a), to_unit(b)};
}

std::array<double, 2> RandomStream::gaussian_pair(std::uint64_t i) const {
  const auto u = uniform_pair(i);
  // 1-u[0] lies in (0,1], keeping the log argument positive.
  const double r = std::sqrt(-2.0 * std::log(1.0 - u[0]));
  const double t = 2.0 * std::numbers::pi * u[1];
  return {r * std::cos(t), r * std::sin(t)};
}

void RandomStream::fill_gaussian(std::span<double> out) const {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const auto g = gaussian_pair(i / 2);
    out[i] = g[0];
    if (i + 1 < n) out[i + 1] = g[1];
  }
}

void RandomStream::fill_uniform_sym(std::span<double> out) const {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; i += 2) {
    const auto u = uniform_pair(i / 2);
    out[i] = 2.0 * u[0] - 1.0;
    if (i + 1 < n) out[i + 1] = 2.0 * u[1] - 1.0;
  }
}

}  // namespace pls

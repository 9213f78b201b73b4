#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace pls {

// Counter-based generator: Philox4x32 with 10 rounds. A draw is a pure
// function of (key, counter), so any value in any stream can be produced
// independently of the others. That is what makes trial results identical
// regardless of how work is scheduled across sweep workers.
struct Philox4x32 {
  static constexpr int kRounds = 10;

  std::array<std::uint32_t, 2> key{0, 0};

  Philox4x32() = default;
  explicit Philox4x32(std::uint64_t seed)
      : key{static_cast<std::uint32_t>(seed),
            static_cast<std::uint32_t>(seed >> 32)} {}

  std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr) const;
};

// Stream identifiers. The counter layout is
//   [purpose, stream, index_lo, index_hi]
// so distinct purposes and streams can never collide.
enum class StreamPurpose : std::uint32_t {
  kKeyDerive = 1,
  kOperator = 2,
  kNoise = 3,
  kPhantom = 4,
  kSpectral = 5,
  kGeneric = 6,
};

// Derives a fresh 64-bit key from a root seed and up to three context words.
// Used to give each (K, trial) pair of an experiment its own substream family.
std::uint64_t derive_seed(std::uint64_t root_seed, std::uint32_t a,
                          std::uint32_t b = 0, std::uint32_t c = 0);

// Position-addressable scalar streams on top of Philox. All are stateless:
// the value at index i does not depend on which indices were read before.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t stream)
      : eng_(seed), purpose_(static_cast<std::uint32_t>(purpose)),
        stream_(stream) {}

  // Four raw 32-bit words at block index i.
  std::array<std::uint32_t, 4> raw(std::uint64_t i) const;

  // Two uniforms in [0,1) per block index (53-bit mantissa).
  std::array<double, 2> uniform_pair(std::uint64_t i) const;

  // Standard normal pair via Box-Muller on block index i.
  std::array<double, 2> gaussian_pair(std::uint64_t i) const;

  // Fills out[j] with the j-th standard normal of this stream.
  void fill_gaussian(std::span<double> out) const;

  // Fills out[j] with the j-th uniform on [-1,1) of this stream.
  void fill_uniform_sym(std::span<double> out) const;

 private:
  Philox4x32 eng_;
  std::uint32_t purpose_;
  std::uint32_t stream_;
};

}  // namespace pls

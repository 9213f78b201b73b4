#pragma once

#include <cstdint>

#include "pls/grid.hpp"

namespace pls {

// blobs: smooth background plus Gaussian bumps of alternating sign, min-max
//   scaled to [lo, hi]; the level-set boundary is a smooth curve.
// steps: piecewise-constant bands along dimension 0 with seeded levels.
// ramp: affine ramp from lo to hi over the flat row-major index.
enum class PhantomKind { kBlobs, kSteps, kRamp };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::kBlobs;
  double lo = 44.0;
  double hi = 239.0;
  int features = 6;
  std::uint64_t seed = 42;
};

GridSignal make_phantom(const PhantomSpec& spec, const GridShape& shape);

}  // namespace pls

#include "pls/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "pls/rng.hpp"

namespace pls {

namespace {

GridSignal make_ramp(const PhantomSpec& spec, const GridShape& shape) {
  GridSignal f = make_signal(shape);
  const std::uint64_t n = shape.size();
  for (std::uint64_t i = 0; i < n; ++i)
    f.values[i] = n == 1 ? spec.lo
                         : spec.lo + (spec.hi - spec.lo) *
                                         static_cast<double>(i) /
                                         static_cast<double>(n - 1);
  return f;
}

GridSignal make_blobs(const PhantomSpec& spec, const GridShape& shape) {
  GridSignal f = make_signal(shape);
  if (spec.features <= 0) {
    std::fill(f.values.begin(), f.values.end(), (spec.lo + spec.hi) / 2.0);
    return f;
  }
  const RandomStream rs(spec.seed, StreamPurpose::kPhantom, 0);
  struct Bump {
    double c0, c1, width, amp;
  };
  std::vector<Bump> bumps(static_cast<std::size_t>(spec.features));
  for (int b = 0; b < spec.features; ++b) {
    const auto u0 = rs.uniform_pair(static_cast<std::uint64_t>(2 * b));
    const auto u1 = rs.uniform_pair(static_cast<std::uint64_t>(2 * b + 1));
    Bump& bump = bumps[static_cast<std::size_t>(b)];
    bump.c0 = u0[0];
    bump.c1 = shape.d == 2 ? u0[1] : 0.5;
    bump.width = 0.10 + 0.22 * u1[0];
    if (b % 2 == 0) {
      // Positive bumps are tall and broad: they carry the compact
      // super-level regions.
      bump.amp = 0.6 + 0.4 * u1[1];
      bump.width = std::max(bump.width, 0.28);
    } else {
      // Negative bumps are shallow texture; keeping them weak leaves the
      // background in the lower part of the scaled range, so mid-range
      // thresholds cut through the positive bumps rather than the floor.
      bump.amp = -0.35 * (0.6 + 0.4 * u1[1]);
    }
  }

  const std::uint32_t s0 = shape.sides[0];
  const std::uint32_t s1 = shape.sides[1];
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (std::uint32_t r = 0; r < s0; ++r) {
    const double x0 = (r + 0.5) / s0;
    for (std::uint32_t c = 0; c < s1; ++c) {
      const double x1 = shape.d == 2 ? (c + 0.5) / s1 : 0.5;
      double v = 0.0;
      for (const Bump& b : bumps) {
        const double d0 = x0 - b.c0;
        const double d1 = x1 - b.c1;
        v += b.amp * std::exp(-(d0 * d0 + d1 * d1) / (2.0 * b.width * b.width));
      }
      f.values[static_cast<std::size_t>(r) * s1 + c] = v;
      lo = first ? v : std::min(lo, v);
      hi = first ? v : std::max(hi, v);
      first = false;
    }
  }
  if (hi == lo) {
    std::fill(f.values.begin(), f.values.end(), (spec.lo + spec.hi) / 2.0);
    return f;
  }
  for (double& v : f.values) {
    const double t = (v - lo) / (hi - lo);
    v = std::clamp(spec.lo + (spec.hi - spec.lo) * t, spec.lo, spec.hi);
  }
  return f;
}

GridSignal make_steps(const PhantomSpec& spec, const GridShape& shape) {
  GridSignal f = make_signal(shape);
  const int bands = std::max(1, spec.features);
  const RandomStream rs(spec.seed, StreamPurpose::kPhantom, 1);
  std::vector<double> level(static_cast<std::size_t>(bands));
  for (int b = 0; b < bands; ++b)
    level[static_cast<std::size_t>(b)] =
        spec.lo + (spec.hi - spec.lo) *
                      rs.uniform_pair(static_cast<std::uint64_t>(b))[0];
  const std::uint32_t s0 = shape.sides[0];
  const std::uint32_t s1 = shape.sides[1];
  for (std::uint32_t r = 0; r < s0; ++r) {
    const auto band = static_cast<std::size_t>(
        std::min<std::uint32_t>(static_cast<std::uint32_t>(bands) - 1,
                                r * static_cast<std::uint32_t>(bands) / s0));
    for (std::uint32_t c = 0; c < s1; ++c)
      f.values[static_cast<std::size_t>(r) * s1 + c] = level[band];
  }
  return f;
}

}  // namespace

GridSignal make_phantom(const PhantomSpec& spec, const GridShape& shape) {
  validate_shape(shape);
  if (!(spec.lo <= spec.hi)) throw Error("phantom range is empty");
  switch (spec.kind) {
    case PhantomKind::kRamp: return make_ramp(spec, shape);
    case PhantomKind::kBlobs: return make_blobs(spec, shape);
    case PhantomKind::kSteps: return make_steps(spec, shape);
  }
  throw Error("unknown phantom kind");
}

}  // namespace pls

#include "pls/phantom.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "pls/grid.hpp"

using namespace pls;

namespace {

double inside_fraction(const GridSignal& f, double gamma) {
  std::size_t n = 0;
  for (const double v : f.values)
    if (v > gamma) ++n;
  return static_cast<double>(n) / static_cast<double>(f.values.size());
}

}  // namespace

TEST_CASE("ramp phantoms interpolate linearly over the flat index") {
  PhantomSpec spec;
  spec.kind = PhantomKind::kRamp;
  spec.lo = 0.0;
  spec.hi = 7.0;
  const GridSignal f = make_phantom(spec, GridShape::line(8));
  for (std::size_t i = 0; i < 8; ++i)
    CHECK(f.values[i] == static_cast<double>(i));

  spec.hi = 0.0;
  const GridSignal flat = make_phantom(spec, GridShape::line(8));
  for (const double v : flat.values) CHECK(v == 0.0);
}

TEST_CASE("blob phantoms fill the requested range") {
  PhantomSpec spec;
  for (const GridShape& shape :
       {GridShape::plane(32, 32), GridShape::plane(64, 64),
        GridShape::line(256)}) {
    const GridSignal f = make_phantom(spec, shape);
    const auto [lo, hi] =
        std::minmax_element(f.values.begin(), f.values.end());
    CHECK(*lo >= spec.lo);
    CHECK(*hi <= spec.hi);
    // Min-max scaling touches both endpoints.
    CHECK(*lo == spec.lo);
    CHECK(*hi == spec.hi);
  }
}

TEST_CASE("blob phantoms without features are flat at the midpoint") {
  PhantomSpec spec;
  spec.features = 0;
  spec.lo = 2.0;
  spec.hi = 6.0;
  const GridSignal f = make_phantom(spec, GridShape::plane(4, 4));
  for (const double v : f.values) CHECK(v == 4.0);
}

TEST_CASE("the default blob phantom balances the reference level set") {
  PhantomSpec spec;  // blobs, seed 42, range [44, 239]
  for (const std::uint32_t side : {32u, 64u, 128u}) {
    const GridSignal f =
        make_phantom(spec, GridShape::plane(side, side));
    const double frac = inside_fraction(f, 125.0);
    CHECK(frac >= 0.30);
    CHECK(frac <= 0.55);
  }
}

TEST_CASE("phantoms are deterministic in the seed") {
  PhantomSpec spec;
  const GridShape shape = GridShape::plane(16, 16);
  const GridSignal a = make_phantom(spec, shape);
  const GridSignal b = make_phantom(spec, shape);
  CHECK(a.values == b.values);
  spec.seed = 43;
  const GridSignal c = make_phantom(spec, shape);
  CHECK(a.values != c.values);
}

TEST_CASE("step phantoms drop constant bands along the first dimension") {
  PhantomSpec spec;
  spec.kind = PhantomKind::kSteps;
  spec.features = 4;
  spec.lo = 0.0;
  spec.hi = 1.0;
  const GridShape shape = GridShape::plane(8, 4);
  const GridSignal f = make_phantom(spec, shape);
  std::set<double> distinct;
  for (std::uint32_t r = 0; r < 8; ++r) {
    const double row_value = f.values[static_cast<std::size_t>(r) * 4];
    distinct.insert(row_value);
    for (std::uint32_t c = 0; c < 4; ++c)
      CHECK(f.values[static_cast<std::size_t>(r) * 4 + c] == row_value);
    if (r % 2 == 1)  // 8 rows over 4 bands: pairs of rows share a level
      CHECK(f.values[static_cast<std::size_t>(r) * 4] ==
            f.values[static_cast<std::size_t>(r - 1) * 4]);
  }
  CHECK(distinct.size() <= 4);
  for (const double v : distinct) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("empty ranges are rejected") {
  PhantomSpec spec;
  spec.lo = 5.0;
  spec.hi = 4.0;
  CHECK_THROWS_AS(make_phantom(spec, GridShape::line(8)), Error);
}

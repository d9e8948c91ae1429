#include <cmath>
#include <cstring>

#include "core/color_space.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "doctest.h"
#include "support/oracles.hpp"

using tg::RgbImage;
using tg::UvPoint;

TEST_CASE("white maps to the origin") {
  const UvPoint p = tg::srgb_to_uv({255, 255, 255});
  CHECK(std::fabs(p.u) < 1e-6);
  CHECK(std::fabs(p.v) < 1e-6);
}

TEST_CASE("black maps to the origin exactly") {
  const UvPoint p = tg::srgb_to_uv({0, 0, 0});
  CHECK(p.u == 0.0);
  CHECK(p.v == 0.0);
}

TEST_CASE("red matches the independent colorimetry oracle") {
  // Pin the oracle itself against frozen high-precision values first.
  const UvPoint ref = oracle::srgb_to_uv(255, 0, 0);
  CHECK(ref.u == doctest::Approx(oracle::kRedUStar).epsilon(1e-9));
  CHECK(ref.v == doctest::Approx(oracle::kRedVStar).epsilon(1e-9));

  const UvPoint p = tg::srgb_to_uv({255, 0, 0});
  CHECK(std::fabs(p.u - ref.u) < 1e-3);
  CHECK(std::fabs(p.v - ref.v) < 1e-3);
}

TEST_CASE("oracle agreement on a coarse byte-triple grid") {
  for (int r = 0; r < 256; r += 51)
    for (int g = 0; g < 256; g += 51)
      for (int b = 0; b < 256; b += 51) {
        const auto lib = tg::srgb_to_uv({static_cast<std::uint8_t>(r),
                                         static_cast<std::uint8_t>(g),
                                         static_cast<std::uint8_t>(b)});
        const auto ref = oracle::srgb_to_uv(static_cast<std::uint8_t>(r),
                                            static_cast<std::uint8_t>(g),
                                            static_cast<std::uint8_t>(b));
        REQUIRE(std::fabs(lib.u - ref.u) < 1e-3);
        REQUIRE(std::fabs(lib.v - ref.v) < 1e-3);
      }
}

TEST_CASE("gray axis maps within 1e-6 of the origin") {
  for (int v = 0; v < 256; ++v) {
    const auto b = static_cast<std::uint8_t>(v);
    const UvPoint p = tg::srgb_to_uv({b, b, b});
    REQUIRE(std::fabs(p.u) < 1e-6);
    REQUIRE(std::fabs(p.v) < 1e-6);
  }
}

TEST_CASE("conversion is a pure function") {
  const UvPoint a = tg::srgb_to_uv({206, 38, 46});
  const UvPoint b = tg::srgb_to_uv({206, 38, 46});
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("1x1 white image maps to a single origin point") {
  RgbImage img(1, 1);
  img.at(0, 0) = {255, 255, 255};
  const auto plane = tg::image_to_uv(img);
  CHECK(plane.width() == 1);
  CHECK(plane.height() == 1);
  CHECK(std::fabs(plane.at(0, 0).u) < 1e-6);
  CHECK(std::fabs(plane.at(0, 0).v) < 1e-6);
}

TEST_CASE("identical pixels give identical points") {
  RgbImage img(2, 2);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) img.at(x, y) = {120, 33, 60};
  const auto plane = tg::image_to_uv(img);
  const UvPoint first = plane.at(0, 0);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) {
      CHECK(plane.at(x, y).u == first.u);
      CHECK(plane.at(x, y).v == first.v);
    }
}

TEST_CASE("image_to_uv equals a scalar srgb_to_uv loop exactly") {
  tg::Rng rng(42);
  RgbImage img(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      img.at(x, y) = {static_cast<std::uint8_t>(rng.index(256)),
                      static_cast<std::uint8_t>(rng.index(256)),
                      static_cast<std::uint8_t>(rng.index(256))};
  const auto plane = tg::image_to_uv(img);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const UvPoint direct = tg::srgb_to_uv(img.at(x, y));
      REQUIRE(plane.at(x, y).u == direct.u);
      REQUIRE(plane.at(x, y).v == direct.v);
    }
}

TEST_CASE("empty rasters are rejected") {
  CHECK_THROWS_AS(RgbImage(0, 1), tg::Error);
  CHECK_THROWS_AS(RgbImage(1, 0), tg::Error);
}

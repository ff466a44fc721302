#include "simspace/error.hpp"
#include "simspace/image.hpp"
#include "simspace/pixel_baseline.hpp"
#include "simspace/rng.hpp"

#include "support/jpeg_writer.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

using namespace simspace;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no simspace::Error thrown";
  return ErrorKind::InvalidArgument;
}

RasterImage random_image(std::size_t w, std::size_t h, std::size_t c, std::uint64_t seed, bool quantized = true) {
  simspace::Rng rng(seed);
  RasterImage img(w, h, c);
  for (auto& v : img.data) v = quantized ? static_cast<double>(rng.below(256)) / 255.0 : rng.uniform();
  return img;
}

RasterImage two_by_two() {
  RasterImage img(2, 2, 1);
  img.data = {1 / 255.0, 2 / 255.0, 3 / 255.0, 4 / 255.0};  // 8-bit levels 1..4
  return img;
}

}  // namespace

TEST(Image, BlackPng) {
  test_support::TempDir dir;
  save_png(RasterImage(2, 2, 1), dir / "black.png");
  const auto img = load_image(dir / "black.png");
  EXPECT_EQ(img.width, 2u);
  EXPECT_EQ(img.height, 2u);
  for (double v : img.data) EXPECT_EQ(v, 0.0);
}

TEST(Image, PngRoundTripIsExactOn8BitLevels) {
  test_support::TempDir dir;
  for (std::size_t c : {1u, 3u}) {
    const auto img = random_image(7, 5, c, c);
    save_png(img, dir / "x.png");
    const auto back = load_image(dir / "x.png");
    EXPECT_EQ(back.channels, c);
    ASSERT_EQ(back.data.size(), img.data.size());
    for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_EQ(back.data[i], img.data[i]);
  }
}

TEST(Image, RgbJpeg) {
  test_support::TempDir dir;
  test_support::write_jpeg(random_image(300, 300, 3, 1), dir / "big.jpg");
  const auto img = load_image(dir / "big.jpg");
  EXPECT_EQ(img.width, 300u);
  EXPECT_EQ(img.height, 300u);
  EXPECT_EQ(img.channels, 3u);
  EXPECT_NO_THROW(img.validate());
}

TEST(Image, TruncatedFilesFailToDecode) {
  test_support::TempDir dir;
  save_png(random_image(40, 40, 3, 2), dir / "full.png");
  test_support::write_jpeg(random_image(40, 40, 3, 3), dir / "full.jpg");
  for (const std::string name : {"full.png", "full.jpg"}) {
    const std::string bytes = dir.read(name);
    dir.write("cut_" + name, bytes.substr(0, bytes.size() / 2));
    EXPECT_EQ(kind_of([&] { load_image(dir / ("cut_" + name)); }), ErrorKind::Decode) << name;
  }
}

TEST(Image, UnsupportedAndMissing) {
  test_support::TempDir dir;
  dir.write("note.png", "GIF89a not really");
  EXPECT_EQ(kind_of([&] { load_image(dir / "note.png"); }), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of([&] { load_image(dir / "absent.png"); }), ErrorKind::Io);
}

TEST(Image, ListImagesSorted) {
  test_support::TempDir dir;
  save_png(RasterImage(1, 1, 1), dir / "b.png");
  save_png(RasterImage(1, 1, 1), dir / "a.png");
  dir.write("c.txt", "x");
  test_support::write_jpeg(RasterImage(1, 1, 1), dir / "c.jpeg");
  const auto files = list_images(dir.path());
  ASSERT_EQ(files.size(), 3u);
  EXPECT_EQ(files[0].filename(), "a.png");
  EXPECT_EQ(files[2].filename(), "c.jpeg");
}

TEST(BlockDownscale, SingleBlockAggregators) {
  const auto img = two_by_two();
  const auto level = [](const std::vector<double>& v) {
    EXPECT_EQ(v.size(), 1u);
    return v.front() * 255.0;
  };
  EXPECT_NEAR(level(block_downscale(img, 2, Aggregator::min)), 1.0, 1e-12);
  EXPECT_NEAR(level(block_downscale(img, 2, Aggregator::max)), 4.0, 1e-12);
  EXPECT_NEAR(level(block_downscale(img, 2, Aggregator::mean)), 2.5, 1e-12);
  EXPECT_NEAR(level(block_downscale(img, 2, Aggregator::median)), 2.5, 1e-12);
}

TEST(BlockDownscale, FeatureLengths) {
  const RasterImage img(300, 300, 3, 0.5);
  EXPECT_EQ(block_downscale(img, 24, Aggregator::mean).size(), 507u);
  EXPECT_EQ(block_downscale(img, 12, Aggregator::mean).size(), 1875u);
}

TEST(BlockDownscale, IdentityAtBlockOne) {
  const auto img = random_image(5, 3, 3, 9);
  for (auto agg : {Aggregator::min, Aggregator::mean, Aggregator::median, Aggregator::max}) {
    const auto f = block_downscale(img, 1, agg);
    ASSERT_EQ(f.size(), img.data.size());
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 5; ++x) EXPECT_EQ(f[(c * 3 + y) * 5 + x], img.at(x, y, c));
  }
}

TEST(BlockDownscale, EdgeBlocksUseAvailablePixels) {
  RasterImage img(3, 1, 1);
  img.data = {0.2, 0.4, 0.9};
  const auto mean = block_downscale(img, 2, Aggregator::mean);
  ASSERT_EQ(mean.size(), 2u);
  EXPECT_NEAR(mean[0], 0.3, 1e-15);
  EXPECT_EQ(mean[1], 0.9);
  EXPECT_EQ(block_downscale(img, 3, Aggregator::median), std::vector<double>{0.4});
}

TEST(BlockDownscale, InvalidBlock) {
  const auto img = two_by_two();
  EXPECT_EQ(kind_of([&] { block_downscale(img, 0, Aggregator::mean); }), ErrorKind::InvalidBlockSize);
  EXPECT_EQ(kind_of([&] { block_downscale(img, 3, Aggregator::mean); }), ErrorKind::InvalidBlockSize);
}

class BlockProperty : public ::testing::TestWithParam<int> {};

TEST_P(BlockProperty, OrderingLengthAndConstancy) {
  simspace::Rng rng(static_cast<std::uint64_t>(GetParam()) + 77);
  const std::size_t w = 1 + rng.below(30), h = 1 + rng.below(30), c = rng.below(2) ? 3 : 1;
  const std::size_t k = 1 + rng.below(std::max(w, h));
  const auto img = random_image(w, h, c, rng.next(), false);
  const auto lo = block_downscale(img, k, Aggregator::min);
  const auto hi = block_downscale(img, k, Aggregator::max);
  const auto mean = block_downscale(img, k, Aggregator::mean);
  const auto median = block_downscale(img, k, Aggregator::median);
  const std::size_t expected = c * ((w + k - 1) / k) * ((h + k - 1) / k);
  ASSERT_EQ(lo.size(), expected);
  ASSERT_EQ(median.size(), expected);
  for (std::size_t i = 0; i < expected; ++i) {
    EXPECT_LE(lo[i], median[i]);
    EXPECT_LE(median[i], hi[i]);
    EXPECT_LE(lo[i], mean[i] + 1e-15);
    EXPECT_LE(mean[i], hi[i] + 1e-15);
  }
  const double level = rng.uniform();
  const RasterImage flat(w, h, c, level);
  for (auto agg : {Aggregator::min, Aggregator::mean, Aggregator::median, Aggregator::max})
    for (double v : block_downscale(flat, k, agg)) EXPECT_NEAR(v, level, 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Random, BlockProperty, ::testing::Range(0, 50));

TEST(PixelFeatures, DirectoryToFeatureMatrix) {
  test_support::TempDir dir;
  save_png(random_image(6, 6, 3, 1), dir / "bird.png");
  save_png(random_image(6, 6, 3, 2), dir / "apple.png");
  const auto f = pixel_features(dir.path(), 3, Aggregator::mean);
  EXPECT_EQ(f.sample_ids(), (std::vector<std::string>{"apple", "bird"}));
  EXPECT_EQ(f.group_ids(), f.sample_ids());
  EXPECT_EQ(f.features(), 12u);

  const auto g = pixel_features(dir.path(), 3, Aggregator::mean, {{"bird", "b"}});
  EXPECT_EQ(g.group_ids(), (std::vector<std::string>{"apple", "b"}));
}

TEST(PixelFeatures, MixedShapesRejected) {
  test_support::TempDir dir;
  save_png(RasterImage(6, 6, 3), dir / "a.png");
  save_png(RasterImage(4, 6, 3), dir / "b.png");
  EXPECT_THROW(pixel_features(dir.path(), 2, Aggregator::mean), Error);
}

TEST(PixelFeatures, ParseAggregator) {
  EXPECT_EQ(parse_aggregator("median"), Aggregator::median);
  EXPECT_THROW(parse_aggregator("mode"), Error);
}

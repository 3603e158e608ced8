#include <random>
#include <stdexcept>

#include <gtest/gtest.h>
#include <opencv2/core.hpp>

#include "egotext/photometry.hpp"
#include "egotext/preprocess.hpp"
#include "oracles.hpp"

using egotext::Image;
using egotext::lighting_stats;

namespace {

Image random_color(std::mt19937& rng, int w, int h, int lo = 0, int hi = 255) {
  Image img = Image::color(w, h);
  std::uniform_int_distribution<int> v(lo, hi);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto& p = img.mat().at<cv::Vec3b>(y, x);
      p = cv::Vec3b(v(rng), v(rng), v(rng));
    }
  }
  return img;
}

}  // namespace

TEST(Photometry, ConstantGray) {
  const auto s = lighting_stats(Image::gray(7, 5, 128));
  EXPECT_EQ(s.mean_brightness, 128.0);
  EXPECT_EQ(s.std_brightness, 0.0);
  EXPECT_EQ(s.global_luminance, 128.0);
  EXPECT_EQ(s.contrast, 0.0);
}

TEST(Photometry, TwoPixelGray) {
  Image img = Image::gray(2, 1, 0);
  img.mat().at<unsigned char>(0, 1) = 255;
  const auto s = lighting_stats(img);
  EXPECT_DOUBLE_EQ(s.mean_brightness, 127.5);
  EXPECT_DOUBLE_EQ(s.std_brightness, 127.5);
  EXPECT_DOUBLE_EQ(s.contrast, 255.0);
}

TEST(Photometry, PureRed) {
  // Red is the last channel of a BGR raster.
  const auto s = lighting_stats(Image::color(4, 4, {0, 0, 255}));
  EXPECT_NEAR(s.mean_brightness, oracle::luma(0, 0, 255), 1e-9);
  EXPECT_NEAR(s.mean_brightness, 76.2, 0.05);
  EXPECT_EQ(s.global_luminance, 255.0);
  EXPECT_EQ(s.contrast, 0.0);
}

TEST(Photometry, MatchesFloatingOracle) {
  std::mt19937 rng(3);
  const Image img = random_color(rng, 31, 17);
  double sum = 0, sum_max = 0;
  std::vector<double> g;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto p = img.mat().at<cv::Vec3b>(y, x);
      g.push_back(oracle::luma(p[0], p[1], p[2]));
      sum += g.back();
      sum_max += std::max({p[0], p[1], p[2]});
    }
  }
  const double mean = sum / g.size();
  double var = 0;
  for (double v : g) var += (v - mean) * (v - mean);
  const auto s = lighting_stats(img);
  EXPECT_NEAR(s.mean_brightness, mean, 1e-9);
  EXPECT_NEAR(s.std_brightness, std::sqrt(var / g.size()), 1e-9);
  EXPECT_NEAR(s.global_luminance, sum_max / g.size(), 1e-9);
  EXPECT_NEAR(s.contrast, *std::max_element(g.begin(), g.end()) - *std::min_element(g.begin(), g.end()), 1e-9);
}

TEST(Photometry, ShiftInvariance) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = random_color(rng, 13, 9, 0, 200);
    const int c = 1 + trial * 2;
    Image shifted = img.clone();
    shifted.mat() += cv::Scalar(c, c, c);
    const auto a = lighting_stats(img);
    const auto b = lighting_stats(shifted);
    EXPECT_NEAR(b.mean_brightness - a.mean_brightness, c, 1e-9) << trial;
    EXPECT_EQ(b.std_brightness, a.std_brightness) << trial;
    EXPECT_EQ(b.contrast, a.contrast) << trial;
  }
}

TEST(Photometry, PermutationInvariance) {
  std::mt19937 rng(9);
  const Image img = random_color(rng, 16, 12);
  cv::Mat flat = img.mat().reshape(3, 1).clone();
  std::vector<cv::Vec3b> px(flat.begin<cv::Vec3b>(), flat.end<cv::Vec3b>());
  std::shuffle(px.begin(), px.end(), rng);
  cv::Mat perm(12, 16, CV_8UC3);
  std::copy(px.begin(), px.end(), perm.begin<cv::Vec3b>());
  const auto a = lighting_stats(img);
  const auto b = lighting_stats(Image(perm));
  EXPECT_EQ(a.mean_brightness, b.mean_brightness);
  EXPECT_EQ(a.std_brightness, b.std_brightness);
  EXPECT_EQ(a.global_luminance, b.global_luminance);
  EXPECT_EQ(a.contrast, b.contrast);
}

TEST(Photometry, GlobalAtLeastMeanAndBounds) {
  std::mt19937 rng(21);
  for (int i = 0; i < 50; ++i) {
    const auto s = lighting_stats(random_color(rng, 8, 8));
    EXPECT_GE(s.global_luminance, s.mean_brightness);
    EXPECT_LE(s.std_brightness, 127.5);
    EXPECT_GE(s.contrast, 0.0);
    EXPECT_LE(s.contrast, 255.0);
  }
}

TEST(Photometry, ConstantIffZeroStd) {
  Image img = Image::gray(3, 3, 40);
  EXPECT_EQ(lighting_stats(img).std_brightness, 0.0);
  img.mat().at<unsigned char>(1, 1) = 41;
  EXPECT_GT(lighting_stats(img).std_brightness, 0.0);
  EXPECT_EQ(lighting_stats(img).contrast, 1.0);
}

TEST(Photometry, EmptyImageThrows) { EXPECT_THROW(lighting_stats(Image()), std::invalid_argument); }

// ---------------------------------------------------------------------------

TEST(Preprocess, UpscaleDimensions) {
  const Image img = Image::gray(1408, 1408, 10);
  const Image up = egotext::upscale(img, 2);
  EXPECT_EQ(up.width(), 2816);
  EXPECT_EQ(up.height(), 2816);
}

TEST(Preprocess, UpscaleIdentity) {
  std::mt19937 rng(1);
  const Image img = random_color(rng, 9, 6);
  EXPECT_TRUE(egotext::upscale(img, 1).identical(img));
}

TEST(Preprocess, NearestReplicates) {
  const Image up = egotext::upscale(Image::gray(4, 4, 77), 2, egotext::Interpolation::kNearest);
  ASSERT_EQ(up.width(), 8);
  EXPECT_EQ(cv::countNonZero(up.mat() != 77), 0);
}

TEST(Preprocess, NearestKeepsValueSetAndContrast) {
  std::mt19937 rng(4);
  const Image img = random_color(rng, 10, 7);
  const Image up = egotext::upscale(img, 3, egotext::Interpolation::kNearest);
  EXPECT_EQ(up.pixel_count(), img.pixel_count() * 9);
  EXPECT_EQ(lighting_stats(up).contrast, lighting_stats(img).contrast);
  for (int y = 0; y < up.height(); ++y) {
    for (int x = 0; x < up.width(); ++x) {
      ASSERT_EQ(up.mat().at<cv::Vec3b>(y, x), img.mat().at<cv::Vec3b>(y / 3, x / 3));
    }
  }
}

TEST(Preprocess, UpscaleRejectsZero) { EXPECT_THROW(egotext::upscale(Image::gray(2, 2), 0), std::invalid_argument); }

TEST(Preprocess, BrightnessExamples) {
  const Image base = Image::gray(3, 3, 100);
  EXPECT_TRUE(egotext::adjust_brightness(base, 1, 0).identical(base));
  EXPECT_EQ(cv::countNonZero(egotext::adjust_brightness(base, 1, 50).mat() != 150), 0);
  EXPECT_EQ(cv::countNonZero(egotext::adjust_brightness(Image::gray(2, 2, 200), 2, 0).mat() != 255), 0);
  EXPECT_THROW(egotext::adjust_brightness(base, 0, 0), std::invalid_argument);
}

TEST(Preprocess, OffsetShiftsMeanExactly) {
  std::mt19937 rng(8);
  const Image img = random_color(rng, 20, 20, 0, 200);
  const auto a = lighting_stats(img);
  const auto b = lighting_stats(egotext::adjust_brightness(img, 1.0, 30));
  EXPECT_NEAR(b.mean_brightness - a.mean_brightness, 30.0, 1e-9);
}

TEST(Preprocess, LowLightGate) {
  egotext::LightingStats s;
  s.mean_brightness = 44.06;
  EXPECT_TRUE(egotext::select_low_light(s, 60));
  s.mean_brightness = 93.97;
  EXPECT_FALSE(egotext::select_low_light(s, 60));
  s.mean_brightness = 60;
  EXPECT_FALSE(egotext::select_low_light(s, 60));
}

TEST(Preprocess, ChainGatesOnInput) {
  egotext::PreprocessChain chain;
  chain.brighten = true;
  chain.gain = 2.0;
  chain.upscale_factor = 2;
  const auto dark = egotext::apply_chain(Image::gray(4, 4, 20), chain);
  EXPECT_TRUE(dark.brightened);
  EXPECT_EQ(dark.scale, 2);
  EXPECT_EQ(dark.image.width(), 8);
  EXPECT_EQ(lighting_stats(dark.image).mean_brightness, 40.0);
  const auto bright = egotext::apply_chain(Image::gray(4, 4, 120), chain);
  EXPECT_FALSE(bright.brightened);
  EXPECT_EQ(lighting_stats(bright.image).mean_brightness, 120.0);
  EXPECT_EQ(chain.label(), "both");
}

TEST(Preprocess, Deterministic) {
  std::mt19937 rng(2);
  const Image img = random_color(rng, 15, 11);
  EXPECT_TRUE(egotext::upscale(img, 2).identical(egotext::upscale(img, 2)));
  EXPECT_TRUE(egotext::adjust_brightness(img, 1.3, 5).identical(egotext::adjust_brightness(img, 1.3, 5)));
}

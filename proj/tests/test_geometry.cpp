#include <algorithm>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include "egotext/geometry.hpp"
#include "oracles.hpp"

using egotext::Box;
using egotext::MergeParams;

TEST(Iou, Identical) { EXPECT_DOUBLE_EQ(egotext::iou({0, 0, 2, 2}, {0, 0, 2, 2}), 1.0); }

TEST(Iou, Disjoint) { EXPECT_DOUBLE_EQ(egotext::iou({0, 0, 1, 1}, {5, 5, 6, 6}), 0.0); }

TEST(Iou, PartialOverlapMatchesRaster) {
  const Box a{0, 0, 2, 2};
  const Box b{1, 1, 3, 3};
  EXPECT_NEAR(egotext::iou(a, b), 1.0 / 7.0, 1e-12);
  EXPECT_NEAR(oracle::raster_iou(a, b, 8), 1.0 / 7.0, 1e-12);
}

TEST(Iou, DegenerateBoxes) {
  EXPECT_DOUBLE_EQ(egotext::iou({1, 1, 1, 1}, {1, 1, 1, 1}), 0.0);
  EXPECT_DOUBLE_EQ(egotext::iou({1, 1, 1, 5}, {0, 0, 4, 4}), 0.0);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> c(0, 20);
  for (int i = 0; i < 500; ++i) {
    auto box = [&] {
      int x0 = c(rng), x1 = c(rng), y0 = c(rng), y1 = c(rng);
      return Box{double(std::min(x0, x1)), double(std::min(y0, y1)), double(std::max(x0, x1)),
                 double(std::max(y0, y1))};
    };
    const Box a = box();
    const Box b = box();
    const double v = egotext::iou(a, b);
    EXPECT_EQ(v, egotext::iou(b, a));
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, oracle::raster_iou(a, b), 1e-9);
  }
}

TEST(Iou, FractionalCoordinatesAgainstFineRaster) {
  const Box a{0.25, 0.5, 3.75, 2.0};
  const Box b{1.5, 0.0, 4.25, 1.25};
  EXPECT_NEAR(egotext::iou(a, b), oracle::raster_iou(a, b, 4), 1e-12);
}

TEST(Envelope, Examples) {
  const std::vector<Box> one{{0, 0, 1, 1}};
  EXPECT_EQ(egotext::envelope(one), (Box{0, 0, 1, 1}));
  const std::vector<Box> row{{0, 0, 10, 10}, {12, 0, 22, 10}};
  EXPECT_EQ(egotext::envelope(row), (Box{0, 0, 22, 10}));
  const std::vector<Box> col{{0, 0, 1, 1}, {0, 5, 1, 6}};
  EXPECT_EQ(egotext::envelope(col), (Box{0, 0, 1, 6}));
}

TEST(Envelope, EmptyGroupThrows) {
  try {
    egotext::envelope({});
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "empty group");
  }
}

TEST(Merge, JoinsCloseWords) {
  const std::vector<Box> in{{0, 0, 10, 10}, {12, 0, 22, 10}};
  const auto out = egotext::merge_boxes(in, MergeParams::absolute(2, 5));
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0], (Box{0, 0, 22, 10}));
}

TEST(Merge, GapTooWide) {
  const std::vector<Box> in{{0, 0, 10, 10}, {12, 0, 22, 10}};
  EXPECT_EQ(egotext::merge_boxes(in, MergeParams::absolute(2, 1)), in);
}

TEST(Merge, SeparateLines) {
  const std::vector<Box> in{{0, 0, 10, 10}, {0, 30, 10, 40}};
  EXPECT_EQ(egotext::merge_boxes(in, MergeParams::absolute(2, 5)), in);
}

TEST(Merge, EmptyAndSingleton) {
  EXPECT_TRUE(egotext::merge_boxes({}, MergeParams{}).empty());
  const std::vector<Box> one{{3, 4, 9, 8}};
  EXPECT_EQ(egotext::merge_boxes(one, MergeParams{}), one);
}

TEST(Merge, RelativeModeScalesWithHeight) {
  // Median height 10: eps_x = 1.0 * 10 allows the 8 px gap; scaled by 3 it still does.
  const std::vector<Box> in{{0, 0, 20, 10}, {28, 1, 50, 11}, {0, 40, 20, 50}};
  const auto out = egotext::merge_boxes(in, MergeParams::relative(0.5, 1.0));
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], (Box{0, 0, 50, 11}));
  std::vector<Box> big;
  for (const Box& b : in) big.push_back(b.scaled(3, 3));
  const auto out3 = egotext::merge_boxes(big, MergeParams::relative(0.5, 1.0));
  ASSERT_EQ(out3.size(), 2u);
  EXPECT_EQ(out3[0], out[0].scaled(3, 3));
}

TEST(Merge, ResolveThresholds) {
  const std::vector<Box> in{{0, 0, 1, 4}, {0, 0, 1, 6}, {0, 0, 1, 20}};
  const MergeParams r = egotext::resolve_thresholds(in, MergeParams::relative(0.5, 2.0));
  EXPECT_EQ(r.mode, MergeParams::Mode::kAbsolute);
  EXPECT_DOUBLE_EQ(r.epsilon_y, 3.0);
  EXPECT_DOUBLE_EQ(r.epsilon_x, 12.0);
}

TEST(Merge, RejectsInvalidInput) {
  const std::vector<Box> bad{{5, 0, 1, 1}};
  EXPECT_THROW(egotext::merge_boxes(bad, MergeParams{}), std::invalid_argument);
  const std::vector<Box> ok{{0, 0, 1, 1}};
  EXPECT_THROW(egotext::merge_boxes(ok, MergeParams::absolute(-1, 0)), std::invalid_argument);
}

TEST(Merge, GroupedMembershipCoversInput) {
  const std::vector<Box> in{{0, 0, 10, 10}, {40, 0, 50, 10}, {12, 1, 22, 9}, {0, 50, 5, 60}};
  const auto res = egotext::merge_boxes_grouped(in, MergeParams::absolute(2, 5));
  std::vector<int> seen;
  for (std::size_t g = 0; g < res.boxes.size(); ++g) {
    for (int m : res.members[g]) {
      EXPECT_TRUE(res.boxes[g].contains(in[m]));
      seen.push_back(m);
    }
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(seen, (std::vector<int>{0, 1, 2, 3}));
}

namespace {

std::vector<Box> random_boxes(std::mt19937& rng, int n) {
  std::uniform_int_distribution<int> pos(0, 120);
  std::uniform_int_distribution<int> ext(0, 25);
  std::vector<Box> out;
  for (int i = 0; i < n; ++i) {
    const double x = pos(rng);
    const double y = pos(rng);
    out.push_back({x, y, x + ext(rng), y + ext(rng)});
  }
  return out;
}

}  // namespace

TEST(MergeProperty, ExactlyOneContainerIdempotentPermutationFree) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> count(0, 30);
  std::uniform_real_distribution<double> eps(0.0, 12.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_boxes(rng, count(rng));
    const MergeParams p = MergeParams::absolute(eps(rng), eps(rng));
    const auto out = egotext::merge_boxes(in, p);
    for (const Box& b : in) {
      const auto n = std::count_if(out.begin(), out.end(), [&](const Box& o) { return o.contains(b); });
      ASSERT_EQ(n, 1) << "trial " << trial;
    }
    ASSERT_EQ(egotext::merge_boxes(out, p), out) << "trial " << trial;
    auto shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    ASSERT_EQ(egotext::merge_boxes(shuffled, p), out) << "trial " << trial;
  }
}

TEST(Box, ClipAndContain) {
  const Box b{-5, 2, 30, 40};
  EXPECT_EQ(b.clipped(20, 30), (Box{0, 2, 20, 30}));
  EXPECT_TRUE((Box{0, 0, 10, 10}).contains({0, 0, 10, 10}));
  EXPECT_FALSE((Box{0, 0, 10, 10}).contains({0, 0, 10, 11}));
}

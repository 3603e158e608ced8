#pragma once

// Reference implementations that share no code with the library. Kept
// deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "egotext/geometry.hpp"

namespace oracle {

// IoU by counting covered sub-cells of a grid with `sub` cells per pixel.
// Exact for boxes whose coordinates are multiples of 1/sub.
inline double raster_iou(const egotext::Box& a, const egotext::Box& b, int sub = 1) {
  const auto lo = [&](double v) { return static_cast<long>(std::floor(v * sub)); };
  const auto hi = [&](double v) { return static_cast<long>(std::ceil(v * sub)); };
  const long x0 = std::min(lo(a.x_min), lo(b.x_min));
  const long x1 = std::max(hi(a.x_max), hi(b.x_max));
  const long y0 = std::min(lo(a.y_min), lo(b.y_min));
  const long y1 = std::max(hi(a.y_max), hi(b.y_max));
  long inter = 0;
  long uni = 0;
  for (long y = y0; y < y1; ++y) {
    for (long x = x0; x < x1; ++x) {
      const double cx = (x + 0.5) / sub;
      const double cy = (y + 0.5) / sub;
      const bool in_a = cx > a.x_min && cx < a.x_max && cy > a.y_min && cy < a.y_max;
      const bool in_b = cx > b.x_min && cx < b.x_max && cy > b.y_min && cy < b.y_max;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// Plain Wagner-Fischer distance over bytes.
inline long levenshtein(const std::string& s, const std::string& t) {
  std::vector<long> prev(t.size() + 1);
  std::vector<long> cur(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = static_cast<long>(j);
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = static_cast<long>(i);
    for (std::size_t j = 1; j <= t.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

// Memoised recursion over (i, j): the minimum over delete / insert / keep-or-
// substitute, written from the definition. Only for short strings.
class RecursiveEdit {
 public:
  RecursiveEdit(std::string s, std::string t) : s_(std::move(s)), t_(std::move(t)) {}
  long distance() { return go(0, 0); }

 private:
  long go(std::size_t i, std::size_t j) {
    if (i == s_.size()) return static_cast<long>(t_.size() - j);
    if (j == t_.size()) return static_cast<long>(s_.size() - i);
    const auto key = std::make_pair(i, j);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    long best = go(i + 1, j + 1) + (s_[i] == t_[j] ? 0 : 1);
    best = std::min(best, go(i + 1, j) + 1);
    best = std::min(best, go(i, j + 1) + 1);
    return memo_[key] = best;
  }

  std::string s_;
  std::string t_;
  std::map<std::pair<std::size_t, std::size_t>, long> memo_;
};

// Pearson via raw sums: (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2)),
// accumulated in long double.
inline double pearson_sums(const std::vector<double>& x, const std::vector<double>& y) {
  long double n = static_cast<long double>(x.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    syy += static_cast<long double>(y[i]) * y[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  return static_cast<double>((n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy)));
}

// Luma mean of a BGR buffer in double precision.
inline double luma(int b, int g, int r) { return 0.299 * r + 0.587 * g + 0.114 * b; }

}  // namespace oracle

#include "egotext/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace egotext {

bool Box::valid() const {
  return std::isfinite(x_min) && std::isfinite(y_min) && std::isfinite(x_max) &&
         std::isfinite(y_max) && x_min <= x_max && y_min <= y_max;
}

bool Box::contains(const Box& other) const {
  return other.x_min >= x_min && other.y_min >= y_min && other.x_max <= x_max &&
         other.y_max <= y_max;
}

Box Box::clipped(double width, double height) const {
  auto clamp = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
  return {clamp(x_min, width), clamp(y_min, height), clamp(x_max, width), clamp(y_max, height)};
}

bool reading_order_less(const Box& a, const Box& b) {
  return std::tie(a.y_min, a.x_min, a.x_max, a.y_max) <
         std::tie(b.y_min, b.x_min, b.x_max, b.y_max);
}

bool MergeParams::valid() const {
  return std::isfinite(epsilon_y) && std::isfinite(epsilon_x) && epsilon_y >= 0.0 &&
         epsilon_x >= 0.0;
}

double iou(const Box& a, const Box& b) {
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

Box envelope(std::span<const Box> boxes) {
  if (boxes.empty()) throw std::invalid_argument("empty group");
  Box env = boxes.front();
  for (const Box& b : boxes.subspan(1)) {
    env.x_min = std::min(env.x_min, b.x_min);
    env.y_min = std::min(env.y_min, b.y_min);
    env.x_max = std::max(env.x_max, b.x_max);
    env.y_max = std::max(env.y_max, b.y_max);
  }
  return env;
}

double median_height(std::span<const Box> boxes) {
  if (boxes.empty()) return 0.0;
  std::vector<double> h;
  h.reserve(boxes.size());
  for (const Box& b : boxes) h.push_back(b.height());
  std::sort(h.begin(), h.end());
  const std::size_t mid = h.size() / 2;
  return h.size() % 2 ? h[mid] : 0.5 * (h[mid - 1] + h[mid]);
}

MergeParams resolve_thresholds(std::span<const Box> boxes, const MergeParams& params) {
  if (params.mode == MergeParams::Mode::kAbsolute) return params;
  const double h = median_height(boxes);
  return MergeParams::absolute(params.epsilon_y * h, params.epsilon_x * h);
}

namespace {

struct Group {
  Box env;
  std::vector<int> members;  // kept sorted
};

void absorb(Group& into, const Group& from) {
  into.env = envelope(std::array{into.env, from.env});
  into.members.insert(into.members.end(), from.members.begin(), from.members.end());
  std::sort(into.members.begin(), into.members.end());
}

bool group_less(const Group& a, const Group& b) {
  if (reading_order_less(a.env, b.env)) return true;
  if (reading_order_less(b.env, a.env)) return false;
  return a.members.front() < b.members.front();
}

bool horizontal_less(const Group& a, const Group& b) {
  if (a.env.x_min != b.env.x_min) return a.env.x_min < b.env.x_min;
  return group_less(a, b);
}

// Line grouping then gap splitting; one round.
std::vector<Group> group_round(std::vector<Group> groups, double eps_y, double eps_x) {
  std::sort(groups.begin(), groups.end(), group_less);

  std::vector<std::vector<Group>> lines;
  std::vector<Box> line_env;
  for (Group& g : groups) {
    std::size_t target = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      if (std::abs(g.env.y_min - line_env[i].y_min) <= eps_y ||
          std::abs(g.env.y_max - line_env[i].y_max) <= eps_y) {
        target = i;
        break;
      }
    }
    if (target == lines.size()) {
      lines.emplace_back();
      line_env.push_back(g.env);
    } else {
      line_env[target] = envelope(std::array{line_env[target], g.env});
    }
    lines[target].push_back(std::move(g));
  }

  std::vector<Group> out;
  for (auto& line : lines) {
    std::sort(line.begin(), line.end(), horizontal_less);
    Group current = line.front();
    for (std::size_t i = 1; i < line.size(); ++i) {
      const double gap = std::max(0.0, line[i].env.x_min - current.env.x_max);
      if (gap > eps_x) {
        out.push_back(std::move(current));
        current = line[i];
      } else {
        absorb(current, line[i]);
      }
    }
    out.push_back(std::move(current));
  }
  return out;
}

// Fuses groups until no input box is contained in two envelopes.
std::vector<Group> resolve_containment(std::vector<Group> groups, std::span<const Box> inputs) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> parent(groups.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (const Box& b : inputs) {
      int first = -1;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (!groups[g].env.contains(b)) continue;
        if (first < 0) {
          first = static_cast<int>(g);
          continue;
        }
        const int ra = find(first);
        const int rb = find(static_cast<int>(g));
        if (ra != rb) {
          parent[std::max(ra, rb)] = std::min(ra, rb);
          changed = true;
        }
      }
    }
    if (!changed) break;
    std::vector<Group> fused;
    std::vector<int> slot(groups.size(), -1);
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const int root = find(static_cast<int>(g));
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(fused.size());
        fused.push_back(groups[g]);
      } else {
        absorb(fused[slot[root]], groups[g]);
      }
    }
    groups = std::move(fused);
  }
  return groups;
}

}  // namespace

MergeResult merge_boxes_grouped(std::span<const Box> boxes, const MergeParams& params) {
  if (!params.valid()) throw std::invalid_argument("merge thresholds must be finite and non-negative");
  for (const Box& b : boxes) {
    if (!b.valid()) throw std::invalid_argument("invalid box in merge input");
  }
  MergeResult result;
  if (boxes.empty()) return result;

  const MergeParams px = resolve_thresholds(boxes, params);
  std::vector<Group> groups;
  groups.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) groups.push_back({boxes[i], {static_cast<int>(i)}});

  // Each productive round removes at least one group.
  for (std::size_t round = 0; round <= boxes.size(); ++round) {
    const std::size_t before = groups.size();
    groups = resolve_containment(group_round(std::move(groups), px.epsilon_y, px.epsilon_x), boxes);
    if (groups.size() == before) break;
  }

  std::sort(groups.begin(), groups.end(), group_less);
  for (Group& g : groups) {
    result.boxes.push_back(g.env);
    result.members.push_back(std::move(g.members));
  }
  return result;
}

std::vector<Box> merge_boxes(std::span<const Box> boxes, const MergeParams& params) {
  return merge_boxes_grouped(boxes, params).boxes;
}

}  // namespace egotext

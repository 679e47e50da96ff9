// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/dice.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dm/common/error.hpp"

namespace dm::vision {

std::vector<std::pair<double, double>> pip_layout(int pips) {
  constexpr double a = 0.25, m = 0.5, b = 0.75;
  switch (pips) {
    case 1: return {{m, m}};
    case 2: return {{a, a}, {b, b}};
    case 3: return {{a, a}, {m, m}, {b, b}};
    case 4: return {{a, a}, {b, a}, {a, b}, {b, b}};
    case 5: return {{a, a}, {b, a}, {m, m}, {a, b}, {b, b}};
    case 6: return {{a, a}, {b, a}, {a, m}, {b, m}, {a, b}, {b, b}};
    default: throw Error(ErrorCode::PipCountOutOfRange, "die face must have 1..6 pips, got " + std::to_string(pips));
  }
}

std::vector<DieRegion> detect_dice_regions(const Raster& r, const DiceOptions& opts, Exec exec) {
  if (opts.mm_per_pixel <= 0 || opts.die_size_mm <= 0) throw Error(ErrorCode::InvalidConfig, "dice options");
  const Components pips = label_components(r);
  if (pips.stats.empty()) return {};

  std::vector<std::int64_t> areas;
  for (const auto& s : pips.stats) areas.push_back(s.area);
  std::nth_element(areas.begin(), areas.begin() + static_cast<std::ptrdiff_t>(areas.size() / 2), areas.end());
  const double median = static_cast<double>(areas[areas.size() / 2]);

  // Keep only pip-sized blobs, then merge pips of one die by dilation.
  Raster accepted(r.width(), r.height());
  std::vector<const ComponentStats*> kept;
  for (const auto& s : pips.stats) {
    const double a = static_cast<double>(s.area);
    if (a < opts.pip_area_lo * median || a > opts.pip_area_hi * median) continue;
    kept.push_back(&s);
  }
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const auto l = pips.at(x, y);
      if (l == 0) continue;
      const auto& s = pips.stats[static_cast<std::size_t>(l - 1)];
      const double a = static_cast<double>(s.area);
      if (a >= opts.pip_area_lo * median && a <= opts.pip_area_hi * median) accepted.set(x, y, 1);
    }
  }
  const int radius = std::max(1, static_cast<int>(std::lround(opts.die_size_mm / opts.mm_per_pixel / 2.0)));
  const Components regions = label_components(dilate(accepted, radius, exec));

  std::map<int, int> count;  // region label -> pips
  for (const ComponentStats* s : kept) ++count[regions.at(s->first_x, s->first_y)];

  std::vector<DieRegion> out;
  for (const auto& [label, n] : count) {
    const auto& rs = regions.stats[static_cast<std::size_t>(label - 1)];
    if (n > 6) {
      throw Error(ErrorCode::PipCountOutOfRange, "region with " + std::to_string(n) + " pips");
    }
    DieRegion d;
    d.pips = n;
    d.value = 7 - n;
    d.center_x = (rs.min_x + rs.max_x + 1) * 0.5 * opts.mm_per_pixel;
    d.center_y = (rs.min_y + rs.max_y + 1) * 0.5 * opts.mm_per_pixel;
    out.push_back(d);
  }
  std::stable_sort(out.begin(), out.end(), [](const DieRegion& a, const DieRegion& b) { return a.center_x < b.center_x; });
  return out;
}

std::vector<int> detect_dice(const Raster& r, const DiceOptions& opts, Exec exec) {
  std::vector<int> v;
  for (const auto& d : detect_dice_regions(r, opts, exec)) v.push_back(d.value);
  return v;
}

}  // namespace dm::vision

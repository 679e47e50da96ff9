// SPDX-License-Identifier: Apache-2.0
#include "dm/vision/tokens.hpp"

#include <algorithm>

namespace dm::vision {

std::vector<TokenDetection> order_tokens(std::span<const TokenDetection> dets, double row_tolerance_mm) {
  std::vector<TokenDetection> by_y(dets.begin(), dets.end());
  std::stable_sort(by_y.begin(), by_y.end(),
                   [](const TokenDetection& a, const TokenDetection& b) { return a.center.y < b.center.y; });
  std::vector<TokenDetection> out;
  out.reserve(by_y.size());
  std::size_t row_start = 0;
  for (std::size_t i = 1; i <= by_y.size(); ++i) {
    const bool row_break = i == by_y.size() || by_y[i].center.y - by_y[i - 1].center.y > row_tolerance_mm;
    if (!row_break) continue;
    std::stable_sort(by_y.begin() + static_cast<std::ptrdiff_t>(row_start), by_y.begin() + static_cast<std::ptrdiff_t>(i),
                     [](const TokenDetection& a, const TokenDetection& b) { return a.center.x < b.center.x; });
    out.insert(out.end(), by_y.begin() + static_cast<std::ptrdiff_t>(row_start), by_y.begin() + static_cast<std::ptrdiff_t>(i));
    row_start = i;
  }
  return out;
}

std::vector<TokenId> tokens_to_sequence(std::span<const TokenDetection> dets, double row_tolerance_mm) {
  std::vector<TokenId> ids;
  for (const auto& d : order_tokens(dets, row_tolerance_mm)) ids.push_back(d.id);
  return ids;
}

}  // namespace dm::vision

#pragma once

// Level-set polylines of a sampled 2-D field (marching squares).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace magsense {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

using Polyline = std::vector<Point2>;

/// values[iy][ix] sampled at (xs[ix], ys[iy]). Returns chained polylines of
/// the level set values == level; closed loops repeat their first point.
inline std::vector<Polyline> contour_lines(const std::vector<double>& xs,
                                           const std::vector<double>& ys,
                                           const std::vector<std::vector<double>>& values,
                                           double level) {
  const std::size_t nx = xs.size();
  const std::size_t ny = ys.size();
  if (nx < 2 || ny < 2) throw std::invalid_argument("contour_lines: need at least 2x2 samples");
  if (values.size() != ny) throw std::invalid_argument("contour_lines: row count mismatch");
  for (const auto& row : values) {
    if (row.size() != nx) throw std::invalid_argument("contour_lines: column count mismatch");
  }

  // Edge ids: horizontal edge (ix, iy)->(ix+1, iy) is 2*(iy*nx+ix),
  // vertical edge (ix, iy)->(ix, iy+1) is 2*(iy*nx+ix)+1.
  auto h_edge = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix); };
  auto v_edge = [&](std::size_t ix, std::size_t iy) { return 2 * (iy * nx + ix) + 1; };
  auto above = [&](std::size_t ix, std::size_t iy) { return values[iy][ix] >= level; };

  auto crossing = [&](std::size_t edge) {
    const std::size_t cell = edge / 2;
    const std::size_t ix = cell % nx;
    const std::size_t iy = cell / nx;
    const bool horizontal = edge % 2 == 0;
    const std::size_t jx = horizontal ? ix + 1 : ix;
    const std::size_t jy = horizontal ? iy : iy + 1;
    const double a = values[iy][ix];
    const double b = values[jy][jx];
    const double t = a == b ? 0.5 : (level - a) / (b - a);
    return Point2{xs[ix] + t * (xs[jx] - xs[ix]), ys[iy] + t * (ys[jy] - ys[iy])};
  };

  // Segments as edge-id pairs.
  std::vector<std::pair<std::size_t, std::size_t>> segs;
  for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      const int code = (above(ix, iy) ? 1 : 0) | (above(ix + 1, iy) ? 2 : 0) |
                       (above(ix + 1, iy + 1) ? 4 : 0) | (above(ix, iy + 1) ? 8 : 0);
      const std::size_t bottom = h_edge(ix, iy);
      const std::size_t top = h_edge(ix, iy + 1);
      const std::size_t left = v_edge(ix, iy);
      const std::size_t right = v_edge(ix + 1, iy);
      const double centre = 0.25 * (values[iy][ix] + values[iy][ix + 1] +
                                    values[iy + 1][ix] + values[iy + 1][ix + 1]);
      switch (code) {
        case 0:
        case 15:
          break;
        case 1:
        case 14:
          segs.emplace_back(left, bottom);
          break;
        case 2:
        case 13:
          segs.emplace_back(bottom, right);
          break;
        case 3:
        case 12:
          segs.emplace_back(left, right);
          break;
        case 4:
        case 11:
          segs.emplace_back(right, top);
          break;
        case 6:
        case 9:
          segs.emplace_back(bottom, top);
          break;
        case 7:
        case 8:
          segs.emplace_back(left, top);
          break;
        case 5:
          if (centre >= level) {
            segs.emplace_back(left, top);
            segs.emplace_back(bottom, right);
          } else {
            segs.emplace_back(left, bottom);
            segs.emplace_back(right, top);
          }
          break;
        case 10:
          if (centre >= level) {
            segs.emplace_back(left, bottom);
            segs.emplace_back(right, top);
          } else {
            segs.emplace_back(left, top);
            segs.emplace_back(bottom, right);
          }
          break;
      }
    }
  }

  // Chain segments sharing edges.
  std::multimap<std::size_t, std::size_t> by_edge;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    by_edge.emplace(segs[k].first, k);
    by_edge.emplace(segs[k].second, k);
  }
  std::vector<bool> used(segs.size(), false);
  auto next_segment = [&](std::size_t edge) -> std::ptrdiff_t {
    auto [lo, hi] = by_edge.equal_range(edge);
    for (auto it = lo; it != hi; ++it) {
      if (!used[it->second]) return static_cast<std::ptrdiff_t>(it->second);
    }
    return -1;
  };
  auto other_end = [&](std::size_t k, std::size_t edge) {
    return segs[k].first == edge ? segs[k].second : segs[k].first;
  };

  std::vector<Polyline> lines;
  for (std::size_t k0 = 0; k0 < segs.size(); ++k0) {
    if (used[k0]) continue;
    used[k0] = true;
    std::vector<std::size_t> chain{segs[k0].first, segs[k0].second};
    // Extend forward, then backward.
    for (int pass = 0; pass < 2; ++pass) {
      for (;;) {
        const std::size_t tail = chain.back();
        const auto k = next_segment(tail);
        if (k < 0) break;
        used[static_cast<std::size_t>(k)] = true;
        chain.push_back(other_end(static_cast<std::size_t>(k), tail));
        if (chain.back() == chain.front()) break;
      }
      if (chain.back() == chain.front()) break;
      std::reverse(chain.begin(), chain.end());
    }
    Polyline line;
    line.reserve(chain.size());
    for (std::size_t e : chain) line.push_back(crossing(e));
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace magsense

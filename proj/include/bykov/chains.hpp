#pragma once

// Discrete (epsilon, tau)-chains on the section. Cells of a grid are joined
// when a return orbit started at one cell centre lands within epsilon of the
// other's centre after more than tau units of flow time. The region reachable
// from the unstable-curve cells approximates the chain-accessible set B_lambda
// from the sigma2 side. It is not the attracting set A_lambda.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "core.hpp"
#include "maps.hpp"
#include "parallel.hpp"

namespace bykov {

struct ChainConfig {
  double epsilon = 0.05;
  double tau = pi;
  int grid_nx = 512;
  int grid_ny = 512;
  int max_iterates_per_hop = 6;
  double y_max = 0.5;      // grid covers [0, 2pi) x [-y_max, y_max]
  double y_log_top = 0.1;  // rows are logarithmic in |y| below this
  double y_min = 1e-12;    // collar row [0, y_min] on each side of y = 0
  bool check_resolution = true;
  unsigned workers = 0;    // 0: hardware concurrency
};

/// Uniform columns in x; rows split at y = 0, each half holding one collar
/// row, log-spaced rows up to y_log_top and uniform rows up to y_max.
class ChainGrid {
 public:
  ChainGrid() = default;

  ChainGrid(int nx, int ny, double y_max, double y_log_top, double y_min) : nx_(nx), ny_(ny) {
    if (nx < 4 || ny < 8 || ny % 2 != 0) throw Error(Errc::InvalidParams, "grid needs nx >= 4 and even ny >= 8");
    if (!(0.0 < y_min && y_min < y_log_top && y_log_top < y_max && y_max < 1.0))
      throw Error(Errc::InvalidParams, "need 0 < y_min < y_log_top < y_max < 1");
    dx_ = two_pi / nx;
    const int half = ny / 2;
    int n_lin = std::max(1, static_cast<int>(std::lround((y_max - y_log_top) / dx_)));
    n_lin = std::min(n_lin, half - 2);
    const int n_log = half - 1 - n_lin;
    std::vector<double> pos{0.0, y_min};
    const double l0 = std::log(y_min), l1 = std::log(y_log_top);
    for (int i = 1; i <= n_log; ++i) pos.push_back(std::exp(l0 + (l1 - l0) * i / n_log));
    pos.back() = y_log_top;
    for (int i = 1; i <= n_lin; ++i) pos.push_back(y_log_top + (y_max - y_log_top) * i / n_lin);
    pos.back() = y_max;
    edges_.reserve(static_cast<std::size_t>(ny + 1));
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) edges_.push_back(-*it);
    for (std::size_t i = 1; i < pos.size(); ++i) edges_.push_back(pos[i]);
    edges_[static_cast<std::size_t>(half)] = 0.0;
    for (int r = 0; r < ny; ++r) centers_.push_back(0.5 * (edges_[r] + edges_[r + 1]));
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  double dx() const { return dx_; }

  std::size_t index(int col, int row) const {
    return static_cast<std::size_t>(col) * static_cast<std::size_t>(ny_) + static_cast<std::size_t>(row);
  }
  int col_of(std::size_t cell) const { return static_cast<int>(cell / static_cast<std::size_t>(ny_)); }
  int row_of(std::size_t cell) const { return static_cast<int>(cell % static_cast<std::size_t>(ny_)); }

  double x_center(int col) const { return (col + 0.5) * dx_; }
  double x_lo(int col) const { return col * dx_; }
  double y_center(int row) const { return centers_[static_cast<std::size_t>(row)]; }
  double y_lo(int row) const { return edges_[static_cast<std::size_t>(row)]; }
  double y_hi(int row) const { return edges_[static_cast<std::size_t>(row) + 1]; }
  double y_max() const { return edges_.back(); }
  const std::vector<double>& row_centers() const { return centers_; }

  double max_cell_diameter() const {
    double m = 0.0;
    for (int r = 0; r < ny_; ++r) m = std::max(m, std::hypot(dx_, y_hi(r) - y_lo(r)));
    return m;
  }

  int col_containing(double x) const {
    const int c = static_cast<int>(std::floor(reduce_angle(x) / dx_));
    return std::clamp(c, 0, nx_ - 1);
  }
  /// Row containing y, or -1 outside [-y_max, y_max].
  int row_containing(double y) const {
    if (y < edges_.front() || y > edges_.back()) return -1;
    const auto it = std::upper_bound(edges_.begin(), edges_.end(), y);
    return std::clamp(static_cast<int>(it - edges_.begin()) - 1, 0, ny_ - 1);
  }

  /// Calls fn(col, row_lo, row_hi) for every column holding cells whose centre
  /// lies within eps of (x, y), x measured on the circle. Rows [row_lo, row_hi)
  /// are exactly the cells of that column inside the open disc.
  template <typename Fn>
  void for_each_near_column(double x, double y, double eps, Fn&& fn) const {
    const int reach = static_cast<int>(std::ceil(eps / dx_)) + 1;
    const int c0 = col_containing(x);
    const int span = std::min(nx_, 2 * reach + 1);
    for (int k = 0; k < span; ++k) {
      const int col = ((c0 - std::min(reach, (nx_ - 1) / 2) + k) % nx_ + nx_) % nx_;
      const double ddx = std::abs(angle_diff(x_center(col), x));
      if (ddx > eps) continue;
      const double h = std::sqrt(eps * eps - ddx * ddx);
      int lo = static_cast<int>(std::lower_bound(centers_.begin(), centers_.end(), y - h) - centers_.begin());
      int hi = static_cast<int>(std::upper_bound(centers_.begin(), centers_.end(), y + h) - centers_.begin());
      while (lo < hi && !(std::hypot(ddx, centers_[static_cast<std::size_t>(lo)] - y) < eps)) ++lo;
      while (hi > lo && !(std::hypot(ddx, centers_[static_cast<std::size_t>(hi) - 1] - y) < eps)) --hi;
      if (lo < hi) fn(col, lo, hi);
    }
  }

  /// Calls fn(cell) for every cell whose centre lies within eps of (x, y).
  template <typename Fn>
  void for_each_near(double x, double y, double eps, Fn&& fn) const {
    for_each_near_column(x, y, eps, [&](int col, int lo, int hi) {
      for (int row = lo; row < hi; ++row) fn(index(col, row));
    });
  }

 private:
  int nx_ = 0, ny_ = 0;
  double dx_ = 0.0;
  std::vector<double> edges_;
  std::vector<double> centers_;
};

/// One hop: the k-th return of a cell centre, after accumulated time > tau.
struct Hop {
  double x = 0.0;
  double y = 0.0;
  int k = 0;
  double time = 0.0;
  bool terminal = false;  // landed on y = 0 (W^s of sigma1)
};

/// Hops in compressed-row form. Edges are implicit: cell -> every cell whose
/// centre lies within epsilon of one of its hop landing points.
struct ChainGraph {
  ChainGrid grid;
  double epsilon = 0.0;
  double tau = 0.0;
  std::vector<std::size_t> offsets;  // size cells + 1
  std::vector<Hop> hops;

  std::size_t cell_count() const { return grid.size(); }

  template <typename Fn>
  void for_each_successor(std::size_t cell, Fn&& fn) const {
    for (std::size_t h = offsets[cell]; h < offsets[cell + 1]; ++h)
      grid.for_each_near(hops[h].x, hops[h].y, epsilon, fn);
  }
};

inline void validate(const ChainConfig& c) {
  if (!(c.epsilon > 0.0)) throw Error(Errc::InvalidParams, "epsilon must be positive");
  if (!(c.tau > 0.0)) throw Error(Errc::InvalidParams, "tau must be positive");
  if (c.max_iterates_per_hop < 1) throw Error(Errc::InvalidParams, "max_iterates_per_hop must be >= 1");
}

inline ChainGraph build_chain_graph(const ModelParams& p, const ChainConfig& cfg) {
  validate(cfg);
  ChainGraph g;
  g.grid = ChainGrid(cfg.grid_nx, cfg.grid_ny, cfg.y_max, cfg.y_log_top, cfg.y_min);
  g.epsilon = cfg.epsilon;
  g.tau = cfg.tau;
  if (cfg.check_resolution && g.grid.max_cell_diameter() > cfg.epsilon / 2.0)
    throw Error(Errc::ResolutionTooCoarse, "cell diameter " + std::to_string(g.grid.max_cell_diameter()) +
                                               " exceeds epsilon / 2");
  const std::size_t n = g.grid.size();
  std::vector<std::vector<Hop>> per_cell(n);
  parallel_for(
      n,
      [&](std::size_t cell) {
        SectionPoint q{g.grid.x_center(g.grid.col_of(cell)), g.grid.y_center(g.grid.row_of(cell))};
        double t = 0.0;
        for (int k = 1; k <= cfg.max_iterates_per_hop; ++k) {
          const ReturnOutcome out = advance(q, p);
          if (out.status == Termination::Escaped) break;
          t += return_time(q, p);
          const bool terminal = out.status == Termination::HitStableManifold;
          if (t > cfg.tau) per_cell[cell].push_back({out.x, out.y, k, t, terminal});
          if (terminal) break;
          q = out.point();
        }
      },
      cfg.workers ? cfg.workers : std::thread::hardware_concurrency());
  g.offsets.resize(n + 1, 0);
  for (std::size_t c = 0; c < n; ++c) g.offsets[c + 1] = g.offsets[c] + per_cell[c].size();
  g.hops.reserve(g.offsets[n]);
  for (auto& v : per_cell) g.hops.insert(g.hops.end(), v.begin(), v.end());
  return g;
}

// ------------------------------------------------------------------ seeds

struct ChainSeed {
  std::vector<std::size_t> cells;
  std::string description;
};

/// Cells met by the graph of y = lambda sin x.
inline ChainSeed seed_unstable_curve(const ChainGrid& grid, const ModelParams& p) {
  ChainSeed s{{}, "unstable curve y = lambda sin x (section trace of W^u(sigma2))"};
  const double lam = p.lambda();
  for (int col = 0; col < grid.nx(); ++col) {
    const double a = grid.x_lo(col), b = a + grid.dx();
    double lo = std::min(std::sin(a), std::sin(b)), hi = std::max(std::sin(a), std::sin(b));
    if (a < pi / 2 && pi / 2 < b) hi = 1.0;
    if (a < 3 * pi / 2 && 3 * pi / 2 < b) lo = -1.0;
    lo *= lam;
    hi *= lam;
    for (int row = 0; row < grid.ny(); ++row)
      if (grid.y_hi(row) >= lo && grid.y_lo(row) <= hi) s.cells.push_back(grid.index(col, row));
  }
  return s;
}

/// Cells whose centre lies within `width` of the stable line y = 0.
inline ChainSeed seed_stable_collar(const ChainGrid& grid, double width) {
  ChainSeed s{{}, "collar |y| < " + std::to_string(width) + " around W^s(sigma1)"};
  for (int col = 0; col < grid.nx(); ++col)
    for (int row = 0; row < grid.ny(); ++row)
      if (std::abs(grid.y_center(row)) < width) s.cells.push_back(grid.index(col, row));
  return s;
}

// ------------------------------------------------------------- reachability

struct ChainRegion {
  std::vector<std::uint8_t> member;
  std::string seed_description;
  double epsilon = 0.0;

  std::size_t count() const { return static_cast<std::size_t>(std::count(member.begin(), member.end(), 1)); }
  bool contains(std::size_t cell) const { return member[cell] != 0; }
};

/// Breadth-first closure of the seed under the chain graph. Each column keeps
/// a "next unvisited row" forest so a cell is touched once however many hops
/// land near it.
inline ChainRegion accessible_set(const ChainGraph& g, const ChainSeed& seed) {
  if (seed.cells.empty()) throw Error(Errc::EmptySeed, "seed has no cells");
  const ChainGrid& grid = g.grid;
  const std::size_t n = grid.size();
  const int ny = grid.ny();
  ChainRegion region{std::vector<std::uint8_t>(n, 0), seed.description, g.epsilon};

  // next_free[col * (ny + 1) + r]: smallest unvisited row >= r in the column (ny if none)
  std::vector<int> next_free(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(ny + 1));
  for (int c = 0; c < grid.nx(); ++c)
    for (int r = 0; r <= ny; ++r) next_free[static_cast<std::size_t>(c) * (ny + 1) + r] = r;
  const auto find = [&](int col, int r) {
    int* base = &next_free[static_cast<std::size_t>(col) * (ny + 1)];
    int root = r;
    while (base[root] != root) root = base[root];
    while (base[r] != root) {
      const int nxt = base[r];
      base[r] = root;
      r = nxt;
    }
    return root;
  };

  std::vector<std::size_t> frontier;
  const auto visit = [&](std::size_t cell) {
    region.member[cell] = 1;
    const int col = grid.col_of(cell), row = grid.row_of(cell);
    next_free[static_cast<std::size_t>(col) * (ny + 1) + row] = row + 1;
    frontier.push_back(cell);
  };
  for (std::size_t c : seed.cells)
    if (!region.member[c]) visit(c);

  for (std::size_t head = 0; head < frontier.size(); ++head) {
    const std::size_t cell = frontier[head];
    for (std::size_t h = g.offsets[cell]; h < g.offsets[cell + 1]; ++h)
      grid.for_each_near_column(g.hops[h].x, g.hops[h].y, g.epsilon, [&](int col, int lo, int hi) {
        for (int r = find(col, lo); r < hi; r = find(col, r)) visit(grid.index(col, r));
      });
  }
  return region;
}

/// Per-column prefix counts of member cells, for O(1) range queries.
class MemberCounts {
 public:
  MemberCounts(const ChainGrid& grid, const std::vector<std::uint8_t>& member)
      : ny_(grid.ny()), sums_(static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(ny_ + 1), 0) {
    for (int col = 0; col < grid.nx(); ++col) {
      const std::size_t base = static_cast<std::size_t>(col) * (ny_ + 1);
      for (int row = 0; row < ny_; ++row) sums_[base + row + 1] = sums_[base + row] + member[grid.index(col, row)];
    }
  }
  int members(int col, int lo, int hi) const {
    const std::size_t base = static_cast<std::size_t>(col) * (ny_ + 1);
    return sums_[base + hi] - sums_[base + lo];
  }

 private:
  int ny_;
  std::vector<int> sums_;
};

/// Postcondition scan: true when no edge leaves the region.
inline bool region_is_closed(const ChainGraph& g, const ChainRegion& region) {
  const MemberCounts counts(g.grid, region.member);
  bool closed = true;
  for (std::size_t c = 0; c < g.cell_count() && closed; ++c) {
    if (!region.contains(c)) continue;
    for (std::size_t h = g.offsets[c]; h < g.offsets[c + 1] && closed; ++h)
      g.grid.for_each_near_column(g.hops[h].x, g.hops[h].y, g.epsilon, [&](int col, int lo, int hi) {
        if (counts.members(col, lo, hi) != hi - lo) closed = false;
      });
  }
  return closed;
}

/// Region plus every cell in the 8-neighbourhood of a member (x periodic).
inline std::vector<std::uint8_t> fatten_one_cell(const ChainGrid& grid, const std::vector<std::uint8_t>& member) {
  std::vector<std::uint8_t> out(member.size(), 0);
  for (int col = 0; col < grid.nx(); ++col)
    for (int row = 0; row < grid.ny(); ++row) {
      if (!member[grid.index(col, row)]) continue;
      for (int dc = -1; dc <= 1; ++dc)
        for (int dr = -1; dr <= 1; ++dr) {
          const int r = row + dr;
          if (r < 0 || r >= grid.ny()) continue;
          const int c = ((col + dc) % grid.nx() + grid.nx()) % grid.nx();
          out[grid.index(c, r)] = 1;
        }
    }
  return out;
}

inline bool is_subset(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

// ------------------------------------------------------------- verification

struct ChainReport {
  std::vector<std::size_t> forward_violations;    // member whose image is > eps from the region
  std::vector<std::size_t> closedness_violations;  // non-member with >= 3 of 4 neighbours in the region
  std::vector<std::size_t> stability_violations;   // member at eps/2 outside the one-cell fattening
  bool closed_under_edges = true;

  bool passes() const {
    return forward_violations.empty() && closedness_violations.empty() && stability_violations.empty() &&
           closed_under_edges;
  }
};

inline bool near_region(const ChainGrid& grid, const MemberCounts& counts, double x, double y, double eps) {
  bool hit = false;
  grid.for_each_near_column(x, y, eps, [&](int col, int lo, int hi) { hit = hit || counts.members(col, lo, hi) > 0; });
  return hit;
}

/// (i) forward invariance of cell centres under one return, (ii) closedness
/// proxy on the 4-neighbourhood, (iii) rebuilding at epsilon / 2 from the
/// same seed stays inside the one-cell fattening.
inline ChainReport verify_chain_properties(const ChainRegion& region, const ChainGraph& g, const ChainSeed& seed,
                                           const ModelParams& p, const ChainConfig& cfg) {
  ChainReport rep;
  const ChainGrid& grid = g.grid;
  const std::size_t n = grid.size();
  const MemberCounts counts(grid, region.member);
  std::vector<std::uint8_t> bad(n, 0);
  parallel_for(
      n,
      [&](std::size_t c) {
        if (!region.contains(c)) return;
        const SectionPoint q{grid.x_center(grid.col_of(c)), grid.y_center(grid.row_of(c))};
        const ReturnOutcome out = advance(q, p);
        if (out.status == Termination::Escaped || !near_region(grid, counts, out.x, out.y, region.epsilon)) bad[c] = 1;
      },
      cfg.workers ? cfg.workers : std::thread::hardware_concurrency());
  for (std::size_t c = 0; c < n; ++c)
    if (bad[c]) rep.forward_violations.push_back(c);

  for (int col = 0; col < grid.nx(); ++col)
    for (int row = 0; row < grid.ny(); ++row) {
      const std::size_t c = grid.index(col, row);
      if (region.contains(c)) continue;
      int k = 0;
      k += region.contains(grid.index((col + 1) % grid.nx(), row));
      k += region.contains(grid.index((col + grid.nx() - 1) % grid.nx(), row));
      if (row > 0) k += region.contains(grid.index(col, row - 1));
      if (row + 1 < grid.ny()) k += region.contains(grid.index(col, row + 1));
      if (k >= 3) rep.closedness_violations.push_back(c);
    }

  ChainConfig half = cfg;
  half.epsilon = region.epsilon / 2.0;
  half.check_resolution = false;
  const ChainGraph g2 = build_chain_graph(p, half);
  const ChainRegion r2 = accessible_set(g2, seed);
  const auto fat = fatten_one_cell(grid, region.member);
  for (std::size_t c = 0; c < n; ++c)
    if (r2.member[c] && !fat[c]) rep.stability_violations.push_back(c);

  rep.closed_under_edges = region_is_closed(g, region);
  return rep;
}

}  // namespace bykov

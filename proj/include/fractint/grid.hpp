#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fractint/error.hpp"
#include "fractint/vec.hpp"

namespace fractint {

using Coord = std::array<std::int64_t, 3>;
using CellKey = std::uint64_t;

// Dyadic grid over the box [0, L]^d. Cells have side 2^-k in absolute units,
// so each axis carries L * 2^k cells.
class GridSpec {
 public:
  GridSpec() = default;

  int dim() const { return dim_; }
  int k() const { return k_; }
  std::int64_t box_side() const { return box_side_; }
  std::int64_t cells_per_axis() const { return box_side_ << k_; }
  double cell_side() const;
  // Euclidean half-diagonal of one cell.
  double half_diagonal() const;

  bool in_bounds(const Coord& c) const;
  CellKey encode(const Coord& c) const;
  Coord decode(CellKey key) const;
  Vec center(const Coord& c) const;
  Vec center(CellKey key) const { return center(decode(key)); }
  // Cell containing the point (half-open convention); may be out of bounds.
  Coord locate(const Vec& p) const;

  // Key offset produced by adding one to the coordinate along `axis`.
  CellKey axis_stride(int axis) const { return CellKey{1} << shift(axis); }

  // Same box and dimension at resolution j.
  GridSpec at_level(int j) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  static int axis_bits(int dim);

 private:
  friend GridSpec make_grid(int dim, int k, std::int64_t box_side);
  GridSpec(int dim, int k, std::int64_t box_side)
      : dim_(dim), k_(k), box_side_(box_side) {}
  int shift(int axis) const { return axis_bits(dim_) * (dim_ - 1 - axis); }

  int dim_ = 1;
  int k_ = 0;
  std::int64_t box_side_ = 1;
};

// Throws InvalidArgument when dim is outside 1..3, box_side is not a power of
// two, or the per-axis cell count does not fit the packed key.
GridSpec make_grid(int dim, int k, std::int64_t box_side = 1);

// Sorted, duplicate-free set of occupied cells. Keys pack the coordinates so
// that key order equals lexicographic coordinate order.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(const GridSpec& grid) : grid_(grid) {}
  CellSet(const GridSpec& grid, std::vector<CellKey> keys);

  static CellSet from_coords(const GridSpec& grid, std::span<const Coord> coords);
  static CellSet full(const GridSpec& grid);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }
  std::span<const CellKey> keys() const { return keys_; }
  CellKey key(std::size_t i) const { return keys_[i]; }
  Coord coord(std::size_t i) const { return grid_.decode(keys_[i]); }
  Vec center(std::size_t i) const { return grid_.center(keys_[i]); }

  bool contains(CellKey key) const;
  bool contains(const Coord& c) const;
  // Index of the key or npos.
  std::size_t find(CellKey key) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  GridSpec grid_;
  std::vector<CellKey> keys_;
};

// Calls fn(index) for every cell of `set` with lo <= coord <= hi componentwise.
// Runs in O(rows * log n + hits); rows are enumerated over all but the last axis.
template <class Fn>
void for_each_in_box(const CellSet& set, Coord lo, Coord hi, Fn&& fn) {
  const GridSpec& g = set.grid();
  const int d = g.dim();
  const std::int64_t n = g.cells_per_axis();
  for (int a = 0; a < d; ++a) {
    if (lo[a] < 0) lo[a] = 0;
    if (hi[a] > n - 1) hi[a] = n - 1;
    if (lo[a] > hi[a]) return;
  }
  auto keys = set.keys();
  auto scan_row = [&](Coord row) {
    row[d - 1] = lo[d - 1];
    const CellKey first = g.encode(row);
    row[d - 1] = hi[d - 1];
    const CellKey last = g.encode(row);
    auto it = std::lower_bound(keys.begin(), keys.end(), first);
    for (; it != keys.end() && *it <= last; ++it) {
      fn(static_cast<std::size_t>(it - keys.begin()));
    }
  };
  Coord row{0, 0, 0};
  if (d == 1) {
    scan_row(row);
  } else if (d == 2) {
    for (row[0] = lo[0]; row[0] <= hi[0]; ++row[0]) scan_row(row);
  } else {
    for (row[0] = lo[0]; row[0] <= hi[0]; ++row[0]) {
      for (row[1] = lo[1]; row[1] <= hi[1]; ++row[1]) scan_row(row);
    }
  }
}

// Like for_each_in_box but stops at the first index for which pred returns
// true; returns whether that happened.
template <class Pred>
bool any_in_box(const CellSet& set, Coord lo, Coord hi, Pred&& pred) {
  const GridSpec& g = set.grid();
  const int d = g.dim();
  const std::int64_t n = g.cells_per_axis();
  for (int a = 0; a < d; ++a) {
    if (lo[a] < 0) lo[a] = 0;
    if (hi[a] > n - 1) hi[a] = n - 1;
    if (lo[a] > hi[a]) return false;
  }
  auto keys = set.keys();
  auto scan_row = [&](Coord row) {
    row[d - 1] = lo[d - 1];
    const CellKey first = g.encode(row);
    row[d - 1] = hi[d - 1];
    const CellKey last = g.encode(row);
    for (auto it = std::lower_bound(keys.begin(), keys.end(), first); it != keys.end() && *it <= last; ++it) {
      if (pred(static_cast<std::size_t>(it - keys.begin()))) return true;
    }
    return false;
  };
  Coord row{0, 0, 0};
  if (d == 1) return scan_row(row);
  if (d == 2) {
    for (row[0] = lo[0]; row[0] <= hi[0]; ++row[0]) {
      if (scan_row(row)) return true;
    }
    return false;
  }
  for (row[0] = lo[0]; row[0] <= hi[0]; ++row[0]) {
    for (row[1] = lo[1]; row[1] <= hi[1]; ++row[1]) {
      if (scan_row(row)) return true;
    }
  }
  return false;
}

// Chebyshev dilation by r cells, clipped to the grid.
CellSet dilate(const CellSet& set, int r);

CellSet intersect(const CellSet& a, const CellSet& b);
CellSet unite(const CellSet& a, const CellSet& b);

// Dyadic parent cells at level j <= k; its size is the box count at 2^-j.
CellSet coarsen(const CellSet& set, int j);

// Same cells re-expressed at a finer level k2 >= k (each cell splits into
// 2^(d (k2 - k)) children).
CellSet refine(const CellSet& set, int k2);

// Embeds the cells into a larger box at the same resolution. Throws if the new
// box is smaller.
CellSet rebox(const CellSet& set, std::int64_t box_side);

// Text format: header "d k L count", then one cell per line.
void write_text(std::ostream& out, const CellSet& set);
CellSet read_text(std::istream& in);

// Binary format: "FRCS", then little-endian u32 d, k, L, u64 count, then
// d little-endian int32 coordinates per cell.
void write_binary(std::ostream& out, const CellSet& set);
CellSet read_binary(std::istream& in);

}  // namespace fractint

#include "fractint/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

namespace fractint {

int GridSpec::axis_bits(int dim) { return dim == 3 ? 21 : 31; }

double GridSpec::cell_side() const { return std::ldexp(1.0, -k_); }

double GridSpec::half_diagonal() const {
  return 0.5 * cell_side() * std::sqrt(static_cast<double>(dim_));
}

bool GridSpec::in_bounds(const Coord& c) const {
  const std::int64_t n = cells_per_axis();
  for (int a = 0; a < dim_; ++a) {
    if (c[a] < 0 || c[a] >= n) return false;
  }
  return true;
}

CellKey GridSpec::encode(const Coord& c) const {
  CellKey key = 0;
  for (int a = 0; a < dim_; ++a) key |= static_cast<CellKey>(c[a]) << shift(a);
  return key;
}

Coord GridSpec::decode(CellKey key) const {
  Coord c{0, 0, 0};
  const CellKey mask = (CellKey{1} << axis_bits(dim_)) - 1;
  for (int a = 0; a < dim_; ++a) c[a] = static_cast<std::int64_t>((key >> shift(a)) & mask);
  return c;
}

Vec GridSpec::center(const Coord& c) const {
  const double h = cell_side();
  Vec p = Vec::Zero();
  for (int a = 0; a < dim_; ++a) p[a] = (static_cast<double>(c[a]) + 0.5) * h;
  return p;
}

Coord GridSpec::locate(const Vec& p) const {
  const double inv = std::ldexp(1.0, k_);
  Coord c{0, 0, 0};
  for (int a = 0; a < dim_; ++a) c[a] = static_cast<std::int64_t>(std::floor(p[a] * inv));
  return c;
}

GridSpec GridSpec::at_level(int j) const { return make_grid(dim_, j, box_side_); }

GridSpec make_grid(int dim, int k, std::int64_t box_side) {
  if (dim < 1 || dim > 3) {
    throw InvalidArgument(fmt::format("grid dimension {} outside 1..3", dim));
  }
  if (k < 0) throw InvalidArgument(fmt::format("negative resolution exponent {}", k));
  if (box_side < 1 || !std::has_single_bit(static_cast<std::uint64_t>(box_side))) {
    throw InvalidArgument(fmt::format("box side {} is not a power of two", box_side));
  }
  const int bits = GridSpec::axis_bits(dim);
  const int side_bits = std::countr_zero(static_cast<std::uint64_t>(box_side));
  if (k + side_bits > bits) {
    throw InvalidArgument(
        fmt::format("L*2^k = 2^{} cells per axis exceeds the {}-bit index range", k + side_bits, bits));
  }
  return GridSpec(dim, k, box_side);
}

namespace {

void sort_unique(std::vector<CellKey>& keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
}

}  // namespace

CellSet::CellSet(const GridSpec& grid, std::vector<CellKey> keys)
    : grid_(grid), keys_(std::move(keys)) {
  if (!std::is_sorted(keys_.begin(), keys_.end()) ||
      std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end()) {
    sort_unique(keys_);
  }
}

CellSet CellSet::from_coords(const GridSpec& grid, std::span<const Coord> coords) {
  std::vector<CellKey> keys;
  keys.reserve(coords.size());
  for (const Coord& c : coords) {
    if (!grid.in_bounds(c)) {
      throw InvalidArgument(fmt::format("cell ({}, {}, {}) outside the grid", c[0], c[1], c[2]));
    }
    keys.push_back(grid.encode(c));
  }
  return CellSet(grid, std::move(keys));
}

CellSet CellSet::full(const GridSpec& grid) {
  const std::int64_t n = grid.cells_per_axis();
  std::size_t total = 1;
  for (int a = 0; a < grid.dim(); ++a) total *= static_cast<std::size_t>(n);
  std::vector<CellKey> keys;
  keys.reserve(total);
  Coord c{0, 0, 0};
  const std::int64_t n1 = grid.dim() > 1 ? n : 1;
  const std::int64_t n2 = grid.dim() > 2 ? n : 1;
  for (c[0] = 0; c[0] < n; ++c[0]) {
    for (c[1] = 0; c[1] < n1; ++c[1]) {
      for (c[2] = 0; c[2] < n2; ++c[2]) keys.push_back(grid.encode(c));
    }
  }
  return CellSet(grid, std::move(keys));
}

std::size_t CellSet::find(CellKey key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - keys_.begin());
}

bool CellSet::contains(CellKey key) const { return std::binary_search(keys_.begin(), keys_.end(), key); }

bool CellSet::contains(const Coord& c) const { return grid_.in_bounds(c) && contains(grid_.encode(c)); }

CellSet dilate(const CellSet& set, int r) {
  if (r < 0) throw InvalidArgument("dilation radius must be non-negative");
  if (r == 0 || set.empty()) return set;
  const GridSpec& g = set.grid();
  const std::int64_t n = g.cells_per_axis();
  std::vector<CellKey> current(set.keys().begin(), set.keys().end());
  for (int axis = 0; axis < g.dim(); ++axis) {
    const CellKey stride = g.axis_stride(axis);
    std::vector<CellKey> merged;
    merged.reserve(current.size() * static_cast<std::size_t>(2 * r + 1));
    std::vector<std::size_t> bounds{0};
    // Each shifted copy stays sorted; merge them pairwise afterwards.
    for (int delta = -r; delta <= r; ++delta) {
      for (CellKey key : current) {
        const std::int64_t c = g.decode(key)[axis] + delta;
        if (c < 0 || c >= n) continue;
        merged.push_back(delta >= 0 ? key + stride * static_cast<CellKey>(delta)
                                    : key - stride * static_cast<CellKey>(-delta));
      }
      bounds.push_back(merged.size());
    }
    while (bounds.size() > 2) {
      std::vector<std::size_t> next{0};
      for (std::size_t i = 0; i + 2 < bounds.size(); i += 2) {
        std::inplace_merge(merged.begin() + static_cast<std::ptrdiff_t>(bounds[i]),
                           merged.begin() + static_cast<std::ptrdiff_t>(bounds[i + 1]),
                           merged.begin() + static_cast<std::ptrdiff_t>(bounds[i + 2]));
        next.push_back(bounds[i + 2]);
      }
      if (bounds.size() % 2 == 0) next.push_back(bounds.back());
      bounds = std::move(next);
    }
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    current = std::move(merged);
  }
  return CellSet(g, std::move(current));
}

namespace {

void require_same_grid(const CellSet& a, const CellSet& b) {
  if (!(a.grid() == b.grid())) throw InvalidArgument("cell sets live on different grids");
}

}  // namespace

CellSet intersect(const CellSet& a, const CellSet& b) {
  require_same_grid(a, b);
  std::vector<CellKey> out;
  std::set_intersection(a.keys().begin(), a.keys().end(), b.keys().begin(), b.keys().end(),
                        std::back_inserter(out));
  return CellSet(a.grid(), std::move(out));
}

CellSet unite(const CellSet& a, const CellSet& b) {
  require_same_grid(a, b);
  std::vector<CellKey> out;
  std::set_union(a.keys().begin(), a.keys().end(), b.keys().begin(), b.keys().end(),
                 std::back_inserter(out));
  return CellSet(a.grid(), std::move(out));
}

CellSet coarsen(const CellSet& set, int j) {
  const GridSpec& g = set.grid();
  if (j < 0 || j > g.k()) {
    throw InvalidArgument(fmt::format("coarse level {} outside 0..{}", j, g.k()));
  }
  if (j == g.k()) return set;
  const GridSpec coarse = g.at_level(j);
  const int s = g.k() - j;
  std::vector<CellKey> keys;
  keys.reserve(set.size());
  CellKey last = ~CellKey{0};
  for (CellKey key : set.keys()) {
    Coord c = g.decode(key);
    for (int a = 0; a < g.dim(); ++a) c[a] >>= s;
    const CellKey ck = coarse.encode(c);
    if (ck != last) keys.push_back(ck);
    last = ck;
  }
  return CellSet(coarse, std::move(keys));
}

CellSet refine(const CellSet& set, int k2) {
  const GridSpec& g = set.grid();
  if (k2 < g.k()) throw InvalidArgument("refine target is coarser than the set");
  if (k2 == g.k()) return set;
  const GridSpec fine = make_grid(g.dim(), k2, g.box_side());
  const std::int64_t m = std::int64_t{1} << (k2 - g.k());
  std::vector<CellKey> keys;
  Coord hi{1, 1, 1};
  for (int a = 0; a < g.dim(); ++a) hi[a] = m;
  for (CellKey key : set.keys()) {
    const Coord c = g.decode(key);
    Coord f{0, 0, 0};
    for (f[0] = 0; f[0] < hi[0]; ++f[0]) {
      for (f[1] = 0; f[1] < hi[1]; ++f[1]) {
        for (f[2] = 0; f[2] < hi[2]; ++f[2]) {
          Coord child{0, 0, 0};
          for (int a = 0; a < g.dim(); ++a) child[a] = c[a] * m + f[a];
          keys.push_back(fine.encode(child));
        }
      }
    }
  }
  return CellSet(fine, std::move(keys));
}

CellSet rebox(const CellSet& set, std::int64_t box_side) {
  const GridSpec& g = set.grid();
  if (box_side < g.box_side()) throw InvalidArgument("rebox target is smaller than the source box");
  const GridSpec out = make_grid(g.dim(), g.k(), box_side);
  std::vector<CellKey> keys;
  keys.reserve(set.size());
  for (CellKey key : set.keys()) keys.push_back(out.encode(g.decode(key)));
  return CellSet(out, std::move(keys));
}

void write_text(std::ostream& out, const CellSet& set) {
  const GridSpec& g = set.grid();
  out << g.dim() << ' ' << g.k() << ' ' << g.box_side() << ' ' << set.size() << '\n';
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Coord c = set.coord(i);
    for (int a = 0; a < g.dim(); ++a) out << (a ? " " : "") << c[a];
    out << '\n';
  }
}

CellSet read_text(std::istream& in) {
  int d = 0, k = 0;
  std::int64_t box = 0;
  std::size_t count = 0;
  if (!(in >> d >> k >> box >> count)) throw FormatError("cell set text header unreadable");
  const GridSpec g = make_grid(d, k, box);
  std::vector<Coord> coords(count, Coord{0, 0, 0});
  for (std::size_t i = 0; i < count; ++i) {
    for (int a = 0; a < d; ++a) {
      if (!(in >> coords[i][a])) throw FormatError(fmt::format("cell {} unreadable", i));
    }
  }
  return CellSet::from_coords(g, coords);
}

namespace {

void put_le(std::ostream& out, std::uint64_t v, int bytes) {
  char buf[8];
  for (int i = 0; i < bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, bytes);
}

std::uint64_t get_le(std::istream& in, int bytes) {
  unsigned char buf[8];
  if (!in.read(reinterpret_cast<char*>(buf), bytes)) throw FormatError("binary cell set truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

constexpr char kMagic[4] = {'F', 'R', 'C', 'S'};

}  // namespace

void write_binary(std::ostream& out, const CellSet& set) {
  const GridSpec& g = set.grid();
  out.write(kMagic, 4);
  put_le(out, static_cast<std::uint64_t>(g.dim()), 4);
  put_le(out, static_cast<std::uint64_t>(g.k()), 4);
  put_le(out, static_cast<std::uint64_t>(g.box_side()), 4);
  put_le(out, set.size(), 8);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const Coord c = set.coord(i);
    for (int a = 0; a < g.dim(); ++a) put_le(out, static_cast<std::uint32_t>(c[a]), 4);
  }
}

CellSet read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || !std::equal(magic, magic + 4, kMagic)) {
    throw FormatError("binary cell set has a bad magic number");
  }
  const int d = static_cast<int>(get_le(in, 4));
  const int k = static_cast<int>(get_le(in, 4));
  const auto box = static_cast<std::int64_t>(get_le(in, 4));
  const std::uint64_t count = get_le(in, 8);
  const GridSpec g = make_grid(d, k, box);
  std::vector<Coord> coords(count, Coord{0, 0, 0});
  for (auto& c : coords) {
    for (int a = 0; a < d; ++a) c[a] = static_cast<std::int32_t>(get_le(in, 4));
  }
  return CellSet::from_coords(g, coords);
}

}  // namespace fractint

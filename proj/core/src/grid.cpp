#include "chainscape/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>

#include "chainscape/error.hpp"

namespace chainscape {

bool Box::contains(std::span<const double> p) const {
  if (p.size() != lo.size()) return false;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(p[i] >= lo[i] && p[i] <= hi[i])) return false;
  }
  return true;
}

void Box::validate() const {
  if (lo.empty()) throw InputError("box dimension must be at least 1");
  if (lo.size() != hi.size()) throw InputError("box lo/hi dimension mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw InputError("box requires finite lo < hi on every axis");
    }
  }
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

CellSet::CellSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

CellSet CellSet::full(std::size_t universe) {
  CellSet s(universe);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  if (universe % 64 != 0 && !s.words_.empty()) {
    s.words_.back() = (std::uint64_t{1} << (universe % 64)) - 1;
  }
  return s;
}

CellSet CellSet::from_indices(std::size_t universe, std::span<const std::size_t> cells) {
  CellSet s(universe);
  for (std::size_t c : cells) {
    if (c >= universe) throw InputError("cell index out of range");
    s.insert(c);
  }
  return s;
}

std::size_t CellSet::count() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool CellSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<std::size_t> CellSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t c) { out.push_back(c); });
  return out;
}

std::optional<std::size_t> CellSet::first() const {
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
  }
  return std::nullopt;
}

void CellSet::check_same(const CellSet& other) const {
  if (universe_ != other.universe_) throw InputError("cell sets over different grids");
}

bool CellSet::subset_of(const CellSet& other) const {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & ~other.words_[i]) return false;
  }
  return true;
}

bool CellSet::intersects(const CellSet& other) const {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] & other.words_[i]) return true;
  }
  return false;
}

CellSet& CellSet::operator|=(const CellSet& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& other) {
  check_same(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

Grid::Grid(Box domain, std::vector<std::size_t> subdivisions)
    : domain_(std::move(domain)), n_(std::move(subdivisions)) {
  domain_.validate();
  if (n_.size() != domain_.dimension()) throw InputError("grid subdivisions do not match domain dimension");
  count_ = 1;
  stride_.resize(n_.size());
  for (std::size_t i = 0; i < n_.size(); ++i) {
    if (n_[i] == 0) throw InputError("grid subdivisions must be positive");
    stride_[i] = count_;
    if (count_ > (std::size_t{1} << 40) / n_[i]) throw InputError("grid too large");
    count_ *= n_[i];
    h_.push_back((domain_.hi[i] - domain_.lo[i]) / static_cast<double>(n_[i]));
  }
}

double Grid::max_width() const { return *std::max_element(h_.begin(), h_.end()); }

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : h_) v *= h;
  return v;
}

double Grid::edge(std::size_t axis, std::size_t i) const {
  if (i == n_[axis]) return domain_.hi[axis];
  const double lo = domain_.lo[axis];
  const double hi = domain_.hi[axis];
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_[axis]);
}

std::size_t Grid::axis_cell(std::size_t axis, double x) const {
  const double lo = domain_.lo[axis];
  const double hi = domain_.hi[axis];
  const std::size_t n = n_[axis];
  double t = (x - lo) / (hi - lo) * static_cast<double>(n);
  std::size_t i;
  if (!(t > 0.0)) {
    i = 0;
  } else if (t >= static_cast<double>(n)) {
    i = n - 1;
  } else {
    i = static_cast<std::size_t>(t);
  }
  // Round-off guard so the result agrees with edge().
  while (i > 0 && x < edge(axis, i)) --i;
  while (i + 1 < n && x >= edge(axis, i + 1)) ++i;
  return i;
}

std::optional<std::size_t> Grid::cell_of(std::span<const double> p) const {
  if (p.size() != dimension()) throw InputError("point dimension does not match grid");
  if (!domain_.contains(p)) return std::nullopt;
  std::size_t c = 0;
  for (std::size_t a = 0; a < n_.size(); ++a) c += axis_cell(a, p[a]) * stride_[a];
  return c;
}

std::vector<std::size_t> Grid::multi_index(std::size_t c) const {
  std::vector<std::size_t> idx(n_.size());
  for (std::size_t a = 0; a < n_.size(); ++a) {
    idx[a] = c % n_[a];
    c /= n_[a];
  }
  return idx;
}

std::size_t Grid::flat_index(std::span<const std::size_t> idx) const {
  std::size_t c = 0;
  for (std::size_t a = 0; a < n_.size(); ++a) c += idx[a] * stride_[a];
  return c;
}

Box Grid::cell_box(std::size_t c) const {
  Box b;
  b.lo.resize(n_.size());
  b.hi.resize(n_.size());
  for (std::size_t a = 0; a < n_.size(); ++a) {
    std::size_t i = c % n_[a];
    c /= n_[a];
    b.lo[a] = edge(a, i);
    b.hi[a] = edge(a, i + 1);
  }
  return b;
}

Point Grid::cell_center(std::size_t c) const {
  Box b = cell_box(c);
  Point p(b.lo.size());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] = 0.5 * (b.lo[a] + b.hi[a]);
  return p;
}

std::size_t Grid::coarsen(std::size_t c) const {
  std::size_t out = 0;
  std::size_t stride = 1;
  for (std::size_t a = 0; a < n_.size(); ++a) {
    std::size_t i = c % n_[a];
    c /= n_[a];
    out += (i / 2) * stride;
    stride *= (n_[a] + 1) / 2;
  }
  return out;
}

Grid Grid::refined() const {
  std::vector<std::size_t> n = n_;
  for (auto& v : n) v *= 2;
  return Grid(domain_, n);
}

namespace {

template <class F>
void for_each_neighbor(const Grid& grid, std::size_t c, Adjacency adj, F&& f) {
  const auto& n = grid.subdivisions();
  const std::size_t d = n.size();
  std::vector<std::size_t> idx = grid.multi_index(c);
  if (adj == Adjacency::face) {
    std::size_t stride = 1;
    for (std::size_t a = 0; a < d; ++a) {
      if (idx[a] > 0) f(c - stride);
      if (idx[a] + 1 < n[a]) f(c + stride);
      stride *= n[a];
    }
    return;
  }
  std::vector<int> off(d, -1);
  while (true) {
    bool zero = true;
    bool inside = true;
    std::size_t t = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < d; ++a) {
      if (off[a] != 0) zero = false;
      long long v = static_cast<long long>(idx[a]) + off[a];
      if (v < 0 || v >= static_cast<long long>(n[a])) {
        inside = false;
        break;
      }
      t += static_cast<std::size_t>(v) * stride;
      stride *= n[a];
    }
    if (inside && !zero) f(t);
    std::size_t a = 0;
    while (a < d && off[a] == 1) off[a++] = -1;
    if (a == d) break;
    ++off[a];
  }
}

}  // namespace

std::vector<CellSet> components(const Grid& grid, const CellSet& cells, Adjacency adjacency) {
  std::vector<CellSet> out;
  CellSet seen(cells.universe());
  std::deque<std::size_t> queue;
  cells.for_each([&](std::size_t start) {
    if (seen.contains(start)) return;
    CellSet comp(cells.universe());
    seen.insert(start);
    queue.push_back(start);
    while (!queue.empty()) {
      std::size_t c = queue.front();
      queue.pop_front();
      comp.insert(c);
      for_each_neighbor(grid, c, adjacency, [&](std::size_t nb) {
        if (cells.contains(nb) && !seen.contains(nb)) {
          seen.insert(nb);
          queue.push_back(nb);
        }
      });
    }
    out.push_back(std::move(comp));
  });
  return out;
}

CellSet dilate(const Grid& grid, const CellSet& cells, std::size_t layers) {
  CellSet cur = cells;
  for (std::size_t l = 0; l < layers; ++l) {
    CellSet next = cur;
    cur.for_each([&](std::size_t c) {
      for_each_neighbor(grid, c, Adjacency::vertex, [&](std::size_t nb) { next.insert(nb); });
    });
    cur = std::move(next);
  }
  return cur;
}

}  // namespace chainscape

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace chainscape {

using Point = std::vector<double>;

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dimension() const { return lo.size(); }
  bool contains(std::span<const double> p) const;
  void validate() const;
  double volume() const;
};

// Dense bitset over the cells of one grid. Only the universe size is kept;
// mixing sets from grids with different cell counts is an error.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(std::size_t universe);
  static CellSet full(std::size_t universe);
  static CellSet from_indices(std::size_t universe, std::span<const std::size_t> cells);

  std::size_t universe() const { return universe_; }
  bool contains(std::size_t c) const { return (words_[c >> 6] >> (c & 63)) & 1u; }
  void insert(std::size_t c) { words_[c >> 6] |= std::uint64_t{1} << (c & 63); }
  void erase(std::size_t c) { words_[c >> 6] &= ~(std::uint64_t{1} << (c & 63)); }

  std::size_t count() const;
  bool empty() const;
  std::vector<std::size_t> indices() const;
  std::optional<std::size_t> first() const;
  bool subset_of(const CellSet& other) const;
  bool intersects(const CellSet& other) const;

  CellSet& operator|=(const CellSet& other);
  CellSet& operator&=(const CellSet& other);
  CellSet& operator-=(const CellSet& other);
  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }
  friend bool operator==(const CellSet& a, const CellSet& b) = default;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        int b = __builtin_ctzll(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

 private:
  void check_same(const CellSet& other) const;

  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

// Uniform partition of a box. Axis 0 varies fastest in the flat index.
class Grid {
 public:
  Grid(Box domain, std::vector<std::size_t> subdivisions);

  std::size_t dimension() const { return domain_.dimension(); }
  std::size_t cell_count() const { return count_; }
  const Box& domain() const { return domain_; }
  const std::vector<std::size_t>& subdivisions() const { return n_; }
  double width(std::size_t axis) const { return h_[axis]; }
  double max_width() const;
  double cell_volume() const;

  // Coordinate of the i-th cell boundary along an axis (i in [0, n]).
  double edge(std::size_t axis, std::size_t i) const;
  // Cell along one axis containing coordinate x under the half-open rule,
  // with the top boundary closed. Assumes x inside the domain extent.
  std::size_t axis_cell(std::size_t axis, double x) const;

  std::optional<std::size_t> cell_of(std::span<const double> p) const;
  Box cell_box(std::size_t c) const;
  Point cell_center(std::size_t c) const;
  std::vector<std::size_t> multi_index(std::size_t c) const;
  std::size_t flat_index(std::span<const std::size_t> idx) const;
  CellSet empty_set() const { return CellSet(count_); }
  CellSet full_set() const { return CellSet::full(count_); }

  // Parent cell on the grid with every subdivision halved.
  std::size_t coarsen(std::size_t c) const;
  Grid refined() const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.domain_.lo == b.domain_.lo && a.domain_.hi == b.domain_.hi && a.n_ == b.n_;
  }

 private:
  Box domain_;
  std::vector<std::size_t> n_;
  std::vector<double> h_;
  std::vector<std::size_t> stride_;
  std::size_t count_ = 0;
};

enum class Adjacency { face, vertex };

// Maximal adjacency-connected pieces, ordered by smallest member.
std::vector<CellSet> components(const Grid& grid, const CellSet& cells,
                                Adjacency adjacency = Adjacency::face);

// Union of the closed cells that meet a set of cells within `layers` steps of
// vertex adjacency.
CellSet dilate(const Grid& grid, const CellSet& cells, std::size_t layers);

}  // namespace chainscape

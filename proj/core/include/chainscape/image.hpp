#pragma once

#include <cstddef>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"

namespace chainscape {

struct CellImage {
  std::vector<std::size_t> cells;  // sorted, unique
  bool exterior = false;           // some image point left the domain
};

// Samples, image points and bloat radii for one system on one grid. The
// support set is computed once here; everything else is pure per cell, so a
// mapper can be shared across threads.
class CellMapper {
 public:
  CellMapper(const SystemSpec& spec, const Grid& grid, ImagePolicy policy);

  const SystemSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }
  const ImagePolicy& policy() const { return policy_; }
  const CellSet& support() const { return support_; }
  const Metric& metric() const { return spec_.metric; }

  // Lattice of samples_per_axis points per axis over the closed cell (all
  // corners included), plus the center.
  std::vector<Point> samples(std::size_t c) const;
  // F^k of every sample.
  std::vector<Point> images(const std::vector<Point>& samples, int k) const;
  // Max finite-difference quotient of F^k across the samples, times 1.5.
  double lipschitz(const std::vector<Point>& samples, const std::vector<Point>& images) const;
  double diagonal(std::size_t c) const;
  double bloat(std::size_t c, const std::vector<Point>& samples, const std::vector<Point>& images) const;

  // Union of closed balls B(F^k(s), bloat + extra) over samples s, clipped
  // to the support.
  CellImage image(std::size_t c, double extra, int k = 1) const;
  void collect(const std::vector<Point>& images, double radius, CellImage& out) const;

 private:
  const SystemSpec& spec_;
  const Grid& grid_;
  ImagePolicy policy_;
  CellSet support_;
  bool clipped_;
};

CellSet cell_image(const SystemSpec& spec, const Grid& grid, std::size_t c, const ImagePolicy& policy,
                   double extra_radius);
double lipschitz_estimate(const SystemSpec& spec, const Grid& grid, std::size_t c);

}  // namespace chainscape

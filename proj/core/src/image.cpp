#include "chainscape/image.hpp"

#include <algorithm>
#include <cmath>

#include "chainscape/error.hpp"

namespace chainscape {

CellMapper::CellMapper(const SystemSpec& spec, const Grid& grid, ImagePolicy policy)
    : spec_(spec), grid_(grid), policy_(policy) {
  policy_.validate();
  if (grid.dimension() != spec.dimension) throw InputError("grid dimension does not match system");
  clipped_ = static_cast<bool>(spec.support);
  support_ = spec.support_cells(grid);
}

std::vector<Point> CellMapper::samples(std::size_t c) const {
  const std::size_t d = grid_.dimension();
  const Box b = grid_.cell_box(c);
  const int m = policy_.samples_per_axis;
  std::vector<std::vector<double>> axis(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double w = b.hi[a] - b.lo[a];
    for (int i = 0; i < m; ++i) {
      double x = i + 1 == m ? b.hi[a] : b.lo[a] + w * i / (m - 1);
      if (policy_.half_open && i + 1 == m) x = b.hi[a] - policy_.nudge * w;
      axis[a].push_back(x);
    }
  }
  std::vector<Point> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Point p(d);
    for (std::size_t a = 0; a < d; ++a) p[a] = axis[a][static_cast<std::size_t>(idx[a])];
    out.push_back(std::move(p));
    std::size_t a = 0;
    while (a < d && idx[a] == m - 1) idx[a++] = 0;
    if (a == d) break;
    ++idx[a];
  }
  if (m % 2 == 0) out.push_back(grid_.cell_center(c));
  return out;
}

std::vector<Point> CellMapper::images(const std::vector<Point>& samples, int k) const {
  std::vector<Point> out;
  out.reserve(samples.size());
  for (const Point& s : samples) out.push_back(time_t_map(spec_, k, s));
  return out;
}

double CellMapper::lipschitz(const std::vector<Point>& samples, const std::vector<Point>& images) const {
  double best = 0.0;
  const Metric& m = spec_.metric;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double den = m.raw_distance(samples[i], samples[j]);
      if (den <= 0.0) continue;
      best = std::max(best, m.raw_distance(images[i], images[j]) / den);
    }
  }
  return 1.5 * best;
}

double CellMapper::diagonal(std::size_t c) const {
  const Box b = grid_.cell_box(c);
  return spec_.metric.diagonal(b.lo, b.hi);
}

double CellMapper::bloat(std::size_t c, const std::vector<Point>& samples,
                         const std::vector<Point>& images) const {
  if (policy_.bloat) return *policy_.bloat;
  const double h = diagonal(c);
  if (policy_.bloat_cells) return *policy_.bloat_cells * h;
  return 0.5 * h + lipschitz(samples, images) * 0.5 * h;
}

void CellMapper::collect(const std::vector<Point>& images, double radius, CellImage& out) const {
  for (const Point& y : images) {
    if (!grid_.domain().contains(y)) out.exterior = true;
    ball_cells_into(grid_, spec_.metric, y, radius, out.cells);
  }
  std::sort(out.cells.begin(), out.cells.end());
  out.cells.erase(std::unique(out.cells.begin(), out.cells.end()), out.cells.end());
  if (clipped_) {
    std::erase_if(out.cells, [&](std::size_t t) { return !support_.contains(t); });
  }
}

CellImage CellMapper::image(std::size_t c, double extra, int k) const {
  if (c >= grid_.cell_count()) throw InputError("cell index out of range");
  if (!(extra >= 0.0)) throw InputError("extra radius must be nonnegative");
  const auto s = samples(c);
  const auto y = images(s, k);
  CellImage out;
  collect(y, bloat(c, s, y) + extra, out);
  return out;
}

CellSet cell_image(const SystemSpec& spec, const Grid& grid, std::size_t c, const ImagePolicy& policy,
                   double extra_radius) {
  CellMapper mapper(spec, grid, policy);
  const CellImage img = mapper.image(c, extra_radius);
  return CellSet::from_indices(grid.cell_count(), img.cells);
}

double lipschitz_estimate(const SystemSpec& spec, const Grid& grid, std::size_t c) {
  CellMapper mapper(spec, grid, spec.default_policy());
  const auto s = mapper.samples(c);
  return mapper.lipschitz(s, mapper.images(s, 1));
}

}  // namespace chainscape

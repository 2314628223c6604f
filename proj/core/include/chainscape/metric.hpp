#pragma once

#include <span>
#include <string>
#include <vector>

#include "chainscape/grid.hpp"

namespace chainscape {

enum class MetricKind { euclidean, weighted, hyperbolic_halfplane, cantor_stretch };

// Distance on the phase space.
//
// hyperbolic_halfplane is the path metric of ds = |dx|/y + |dy| on y > 0:
// horizontal moves at height y cost |dx|/y and vertical moves cost |dy|.
// cantor_stretch is the pullback of the euclidean metric under a per-axis
// homeomorphism of [0,1] that carries the middle-thirds Cantor set onto a
// Cantor set of measure 1/2.
class Metric {
 public:
  Metric() = default;
  static Metric euclidean() { return Metric(); }
  static Metric weighted(std::vector<double> w);
  static Metric hyperbolic_halfplane();
  static Metric cantor_stretch();
  // "euclidean", "weighted:1,2", "hyperbolic", "cantor_stretch"
  static Metric parse(const std::string& text);

  MetricKind kind() const { return kind_; }
  const std::vector<double>& weights() const { return w_; }
  std::string name() const;

  // Rejects a metric that does not fit the domain (dimension, y >= 1, ...).
  void validate_for(const Box& domain) const;

  // Checked distance: hyperbolic points with y < 1 are an input error.
  double distance(std::span<const double> p, std::span<const double> q) const;
  // Unchecked distance used on image points that may leave the window.
  double raw_distance(std::span<const double> p, std::span<const double> q) const;
  // Exact distance from p to the closed box [lo, hi].
  double distance_to_box(std::span<const double> p, std::span<const double> lo,
                         std::span<const double> hi) const;
  // Axis-aligned box containing the closed ball B(p, r).
  Box ball_bounds(std::span<const double> p, double r) const;
  // Metric length of the main diagonal of a box.
  double diagonal(std::span<const double> lo, std::span<const double> hi) const;

  friend bool operator==(const Metric&, const Metric&) = default;

 private:
  MetricKind kind_ = MetricKind::euclidean;
  std::vector<double> w_;
};

double metric_dist(const Metric& metric, std::span<const double> p, std::span<const double> q);

// Cells whose closed box meets the closed ball B(p, r). The test is exact for
// every metric kind. r == 0 returns exactly cell_of(p).
CellSet ball_cells(const Grid& grid, const Metric& metric, std::span<const double> p, double r);
// Same, appending unsorted indices to `out`.
void ball_cells_into(const Grid& grid, const Metric& metric, std::span<const double> p, double r,
                     std::vector<std::size_t>& out);

namespace cantor {
// The stretch homeomorphism and its inverse; identity outside [0,1].
double stretch(double x);
double unstretch(double u);
// Distance from x to the middle-thirds Cantor set gap structure: returns the
// open gap (l, r) containing x, or false when x lies in the Cantor set.
bool gap_of(double x, double& l, double& r);
}  // namespace cantor

}  // namespace chainscape

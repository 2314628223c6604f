#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chainscape/expr.hpp"
#include "chainscape/grid.hpp"
#include "chainscape/metric.hpp"

namespace chainscape {

enum class SystemKind { map, ode };

// How a cell is turned into a set of image cells.
struct ImagePolicy {
  int samples_per_axis = 3;
  // Absolute bloat in metric units. When unset, bloat_cells is used; when
  // both are unset the default h/2 + L*h/2 applies, with h the metric
  // diagonal of the cell and L the local Lipschitz estimate.
  std::optional<double> bloat;
  // Bloat as a multiple of the cell's metric diagonal.
  std::optional<double> bloat_cells;
  // Pull samples on upper faces inward by nudge * width, so a cell is
  // sampled as the half-open box it owns.
  bool half_open = false;
  double nudge = 1e-6;

  void validate() const;
};

// Right-hand side supplied in code rather than as expressions.
using NativeFn = std::function<void(std::span<const double>, std::span<double>)>;

struct SystemSpec {
  std::string name;
  SystemKind kind = SystemKind::map;
  std::size_t dimension = 1;
  std::vector<Expression> expressions;
  NativeFn native;
  double time_step = 1.0;
  int integrator_substeps = 32;
  Box domain;
  Metric metric;
  // Optional phase space inside the box: images are clipped to it.
  std::function<CellSet(const Grid&)> support;
  std::optional<ImagePolicy> image_policy;

  void validate() const;
  // Map image (kind=map) or vector field (kind=ode) at x.
  void evaluate(std::span<const double> x, std::span<double> out) const;
  ImagePolicy default_policy() const { return image_policy.value_or(ImagePolicy{}); }
  CellSet support_cells(const Grid& grid) const;
};

// Builds a spec from the JSON interchange format. Unknown keys, bad types,
// and expression errors raise InputError (with a byte offset when the JSON
// itself is malformed).
SystemSpec spec_from_json(std::string_view text);
std::string spec_to_json(const SystemSpec& spec);

// F^k(p): k-fold map iteration, or k time steps of fixed-step RK4.
// Throws EvalError naming the step on non-finite values.
void time_t_map(const SystemSpec& spec, int k, std::span<const double> p, std::span<double> out);
Point time_t_map(const SystemSpec& spec, int k, std::span<const double> p);

}  // namespace chainscape

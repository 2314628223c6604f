#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"

namespace chainscape {

struct PresetInfo {
  std::string name;
  std::string description;
  std::vector<std::size_t> grid;  // base subdivisions
  int levels = 1;                 // shipped refinement levels
  // Chain epsilon at the base level; unset means 2h.
  std::optional<double> epsilon;
  // Epsilon for link-level graphs; unset means the chain epsilon.
  std::optional<double> link_epsilon;
  // Chain epsilon as a multiple of the axis-0 cell width; ignored when epsilon is set.
  std::optional<double> epsilon_cells;
};

// Shipped presets in listing order; the gs family appears as gs-truncated-8.
const std::vector<PresetInfo>& preset_catalogue();

// Accepts every catalogue name plus gs-truncated-<k> for 1 <= k <= 20.
// Throws InputError for anything else.
PresetInfo preset_info(const std::string& name);
SystemSpec make_preset(const std::string& name);

// 2h with h the widest cell side in domain units.
double default_epsilon(const Grid& grid);
// Base-level chain epsilon of a preset on the given grid.
double preset_epsilon(const PresetInfo& info, const Grid& grid);

}  // namespace chainscape

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"
#include "chainscape/transition.hpp"

namespace chainscape {

constexpr std::size_t kDefaultCellBudget = 4'000'000;

// CHAINSCAPE_CELL_BUDGET when set to a positive integer, else the default.
std::size_t cell_budget();

struct LevelRecord {
  std::vector<std::size_t> subdivisions;
  double epsilon = 0.0;
  std::size_t cr_cells = 0;
  double cr_measure = 0.0;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::string fingerprint;
  // Coarsened CR cells of this level missing from the previous level's CR.
  std::size_t nesting_violations = 0;
};

struct RefinementReport {
  std::vector<LevelRecord> levels;
  bool stabilized = false;
  bool nested() const;
};

// Level l uses subdivisions * 2^l and epsilon / 2^l. Throws InputError when
// the finest grid exceeds the cell budget.
RefinementReport run_pipeline(const SystemSpec& spec, const Grid& base_grid, double base_epsilon, int levels,
                              const ImagePolicy& policy, std::optional<std::size_t> budget = std::nullopt);

// Canonical text for a stream graph, independent of node numbering.
std::string graph_fingerprint(const StreamGraph& sg);

std::string refinement_to_json(const RefinementReport& report);
std::string refinement_to_csv(const RefinementReport& report);

}  // namespace chainscape

#pragma once
// Preset-level checks shared by the gtest suites and the acceptance binary.

#include <string>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"
#include "chainscape/transition.hpp"

namespace checks {

struct Level {
  chainscape::SystemSpec spec;
  chainscape::Grid grid;
  double epsilon;
  int index;
};

struct Outcome {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    ok = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

// Every shipped level of a preset, with the preset's own epsilon halved per level.
std::vector<Level> shipped_levels(const std::string& preset);
std::vector<std::string> preset_names();

chainscape::TransitionGraph chain_graph(const Level& lv, double epsilon);

Outcome epsilon_monotone(const Level& lv);
Outcome transpose_invariant(const Level& lv);
Outcome bracket_inclusions(const Level& lv);
Outcome refinement_nesting(const std::string& preset);
Outcome restriction_equal(const Level& lv);
Outcome time_maps_equal(const Level& lv);

}  // namespace checks

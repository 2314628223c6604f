#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"
#include "chainscape/transition.hpp"

namespace chainscape {

struct LinkPolicy {
  int samples = 64;
  int max_steps = 512;
  double epsilon = 0.1;
  std::optional<CellSet> restrict_to;
  std::uint64_t rng_seed = 1;
  // Source cells sampled per node in node-level queries.
  int representatives = 16;

  void validate() const;
};

enum class LinkVerdict { certified_true, not_found };

// Some sampled ζ with d(ζ, center(c1)) < ε has an orbit point F^t(ζ),
// 1 <= t <= max_steps, with d(F^t(ζ), center(c2)) < ε.
LinkVerdict link_reach(const SystemSpec& spec, const Grid& grid, const Metric& metric, std::size_t c1,
                       std::size_t c2, const LinkPolicy& policy);

// Node-level links: for each target cell list, whether some orbit sampled
// near the source cells enters the ε-ball of one of its cell centers.
std::vector<char> link_targets(const SystemSpec& spec, const Grid& grid, const Metric& metric,
                               const std::vector<std::size_t>& sources,
                               const std::vector<std::vector<std::size_t>>& targets, const LinkPolicy& policy);

struct NonwanderingEstimate {
  CellSet inner;       // certified self-links, clipped to outer
  CellSet outer;       // chain-recurrent cells ∩ attractor cells
  CellSet violations;  // self-linked cells outside outer
};

// `attractor` may be empty, meaning no attractor bound is applied.
NonwanderingEstimate nonwandering_cells(const SystemSpec& spec, const Grid& grid, const Metric& metric,
                                        const LinkPolicy& policy, const CellSet& region,
                                        const CellSet& attractor, const ImagePolicy& image_policy);

// Tags each edge M->N: strong when bloat-only reachability inside the
// attractor cells joins M to N without entering another node's cells; weak
// otherwise; unknown when M or N misses the attractor cells.
StreamGraph classify_edges(StreamGraph sg, const TransitionGraph& exact, const CellSet& attractor);

// Same nodes, edges replaced by certified node-level links.
StreamGraph link_graph(const SystemSpec& spec, const Grid& grid, const Metric& metric, const StreamGraph& sg,
                       const LinkPolicy& policy);

struct TimeMapEntry {
  int N = 1;
  std::size_t cr_cells = 0, nodes = 0, edges = 0;
  bool same_cells = false, same_nodes = false, same_edges = false;
};
struct TimeMapReport {
  std::vector<TimeMapEntry> entries;  // first entry is the N = 1 baseline
  bool all_equal() const;
};
TimeMapReport compare_time_maps(const SystemSpec& spec, const Grid& grid, double epsilon,
                                const std::vector<int>& N_list, const ImagePolicy& policy);

struct BracketPair {
  std::size_t from = 0, to = 0;
  bool orbit = false, link = false, sigma = false, chain = false;
};
struct BracketReport {
  std::size_t nodes = 0;
  std::vector<BracketPair> pairs;
  // Inclusion verdicts and the pairs that break them. Links are checked
  // against chains that may also jump before the first map step.
  bool orbit_in_sigma = true, sigma_in_chain = true, orbit_in_chain = true, link_in_chain = true;
  bool sigma_strictly_smaller = false;
  std::vector<std::string> violations;
};
BracketReport bracket(const SystemSpec& spec, const Grid& grid, const Metric& metric, double epsilon,
                      const LinkPolicy& link_policy, const ImagePolicy& image_policy);

// Orbits sampled over the region: after a burn-in of 0.9 * max_steps, the
// cells visited must lie in the ε-dilation of one node. Returns the number
// of orbits that fail.
std::size_t omega_limit_violations(const SystemSpec& spec, const Grid& grid, const StreamGraph& sg,
                                   const LinkPolicy& policy, const CellSet& region);

std::string time_map_to_json(const TimeMapReport& report);
std::string bracket_to_json(const BracketReport& report);

}  // namespace chainscape

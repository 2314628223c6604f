#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/metric.hpp"
#include "chainscape/system.hpp"

namespace chainscape {

enum class Mode { exact, chain, sigma, timeN };
std::string mode_name(Mode mode);

struct LevelParams {
  Grid grid;
  double epsilon = 0.0;
  Mode mode = Mode::chain;
  int N = 1;
  Metric metric;
  // Sigma mode keeps edges whose jump weight is at most this; defaults to
  // epsilon.
  std::optional<double> weight_cap;

  void validate() const;
  double cap() const { return weight_cap.value_or(epsilon); }
};

// Digraph over grid cells plus one EXTERIOR sink (index cell_count).
// Successor lists are sorted ascending. Cells outside the region have no
// edges.
struct TransitionGraph {
  LevelParams level;
  std::size_t cell_count = 0;
  CellSet region;
  std::vector<std::uint64_t> offsets;  // node_count() + 1 entries
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;         // parallel to targets, sigma mode only

  std::size_t node_count() const { return cell_count + 1; }
  std::size_t exterior() const { return cell_count; }
  std::size_t edge_count() const { return targets.size(); }
  bool weighted() const { return !weights.empty(); }
  std::span<const std::uint32_t> successors(std::size_t v) const {
    return {targets.data() + offsets[v], targets.data() + offsets[v + 1]};
  }
  std::span<const double> successor_weights(std::size_t v) const {
    return {weights.data() + offsets[v], weights.data() + offsets[v + 1]};
  }
  bool has_edge(std::size_t u, std::size_t v) const;
  // Cells hit by edges out of `cells` (EXTERIOR dropped).
  CellSet image_of(const CellSet& cells) const;
  // Cells of `cells` with an edge to EXTERIOR.
  CellSet escaping(const CellSet& cells) const;

  // Graph over a grid from explicit adjacency lists (tests, oracles). Lists
  // may name index cell_count for EXTERIOR; weights are optional.
  static TransitionGraph from_lists(const LevelParams& level,
                                    const std::vector<std::vector<std::pair<std::uint32_t, double>>>& lists,
                                    bool weighted);
};

TransitionGraph build_graph(const SystemSpec& spec, const LevelParams& level, const CellSet& region,
                            const ImagePolicy& policy);

struct SccDecomposition {
  std::vector<std::uint32_t> component;             // per node, EXTERIOR included
  std::vector<std::vector<std::uint32_t>> members;  // sorted; ids are reverse topological
  std::vector<char> recurrent;

  std::size_t count() const { return members.size(); }
};

SccDecomposition scc(const TransitionGraph& g);
CellSet chain_recurrent_cells(const TransitionGraph& g, const SccDecomposition& d);

enum class EdgeTag { strong, weak, unknown };
std::string tag_name(EdgeTag tag);

struct StreamNode {
  std::size_t id = 0;
  std::vector<std::size_t> cells;
  Box bounds;
};

struct StreamEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeTag tag = EdgeTag::unknown;
  friend bool operator==(const StreamEdge&, const StreamEdge&) = default;
};

struct StreamGraph {
  std::vector<std::size_t> subdivisions;
  Box domain;
  double epsilon = 0.0;
  Mode mode = Mode::chain;
  int N = 1;
  std::string metric = "euclidean";
  std::string closure = "transitive";
  std::vector<StreamNode> nodes;  // ordered by smallest member cell
  std::vector<StreamEdge> edges;  // sorted (from, to)

  std::vector<StreamEdge> reduction() const;
  bool weakly_connected() const;
  bool acyclic() const;
  // Node containing a cell, if any.
  std::optional<std::size_t> node_of(std::size_t cell) const;
};

StreamGraph condensation(const TransitionGraph& g, const SccDecomposition& d);

bool reach(const TransitionGraph& g, std::size_t c1, std::size_t c2);
// Nodes reachable from any source (sources included).
std::vector<char> reachable_from(const TransitionGraph& g, std::span<const std::size_t> sources);
// Smallest total weight from any source to any target; infinity if none.
double sigma_distance(const TransitionGraph& g, std::span<const std::size_t> sources,
                      std::span<const std::size_t> targets);
bool sigma_reach(const TransitionGraph& g, std::size_t c1, std::size_t c2, double budget);
TransitionGraph transpose_graph(const TransitionGraph& g);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace chainscape

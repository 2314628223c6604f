#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/system.hpp"
#include "chainscape/transition.hpp"

namespace chainscape {

struct TrappingReport {
  bool is_forward_invariant = false;
  CellSet violating;  // cells of Q whose image leaves Q
  bool is_global_candidate = false;
  std::optional<int> absorption_steps;  // steps for the whole domain to enter Q
  int budget = 200;
};

struct AttractorResult {
  CellSet cells;
  int iterations = 0;
  bool connected = false;
  std::vector<CellSet> components;  // face adjacency
  std::optional<int> attraction_steps;
};

// Bloat-only cell map over the system's whole phase space (its support, or
// every cell).
TransitionGraph exact_graph(const SystemSpec& spec, const Grid& grid, const ImagePolicy& policy);

TrappingReport verify_trapping(const TransitionGraph& exact, const CellSet& Q, int budget = 200);
TrappingReport verify_trapping(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                               const ImagePolicy& policy, int budget = 200);

// Greatest fixed point of A <- A ∩ image(A) starting from Q. Returns the
// number of shrinking rounds through `iterations`.
CellSet maximal_invariant(const TransitionGraph& g, const CellSet& Q, int* iterations = nullptr);

// Throws AnalysisError when the fixed point is empty.
AttractorResult global_attractor(const TransitionGraph& exact, const CellSet& Q);
AttractorResult global_attractor(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                                 const ImagePolicy& policy);

// Cells within metric distance r of some cell of A (box to box), over-
// approximated through a ball around each cell center.
CellSet dilate_metric(const Grid& grid, const Metric& metric, const CellSet& A, double r);

// Smallest k <= budget with image^k(Q) inside the r-dilation of A. Throws
// AnalysisError "no attraction witnessed" with the residual cell count.
int attraction_steps(const TransitionGraph& exact, const CellSet& Q, const CellSet& A, double eps_target,
                     int budget = 200);
int attraction_steps(const SystemSpec& spec, const Grid& grid, const CellSet& Q, const CellSet& A,
                     double eps_target, const ImagePolicy& policy, int budget = 200);

struct RestrictionReport {
  CellSet restricted_region;  // maximal invariant set of the level's cell map in Q
  std::size_t cr_full = 0, cr_restricted = 0;
  std::size_t nodes_full = 0, nodes_restricted = 0;
  std::size_t edges_full = 0, edges_restricted = 0;
  bool same_cells = false;
  bool same_nodes = false;
  bool same_edges = false;
  bool holds() const { return same_cells && same_nodes && same_edges; }
};

// Builds the level's graph on Q and on the invariant part of Q, and compares
// recurrent cells, node partitions and condensation edges.
RestrictionReport restrict_and_compare(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                                       const LevelParams& level, const ImagePolicy& policy);

// Node partition and edges keyed by each node's smallest cell, for
// comparing graphs built on different regions.
struct GraphSignature {
  std::vector<std::vector<std::size_t>> nodes;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  friend bool operator==(const GraphSignature&, const GraphSignature&) = default;
};
GraphSignature signature(const StreamGraph& sg);

std::string attractor_to_json(const Grid& grid, const AttractorResult& result);
std::string trapping_to_json(const Grid& grid, const TrappingReport& report);

}  // namespace chainscape

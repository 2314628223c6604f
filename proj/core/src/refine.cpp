#include "chainscape/refine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <cstdlib>
#include <json.hpp>
#include <numeric>
#include <sstream>
#include <tuple>

#include "chainscape/error.hpp"
#include "chainscape/serialize.hpp"

namespace chainscape {

std::size_t cell_budget() {
  const char* env = std::getenv("CHAINSCAPE_CELL_BUDGET");
  if (!env || !*env) return kDefaultCellBudget;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end != '\0' || v == 0) throw InputError("CHAINSCAPE_CELL_BUDGET must be a positive integer");
  return static_cast<std::size_t>(v);
}

bool RefinementReport::nested() const {
  return std::all_of(levels.begin(), levels.end(), [](const LevelRecord& r) { return r.nesting_violations == 0; });
}

RefinementReport run_pipeline(const SystemSpec& spec, const Grid& base_grid, double base_epsilon, int levels,
                              const ImagePolicy& policy, std::optional<std::size_t> budget) {
  if (levels < 1) throw InputError("levels must be >= 1");
  if (!(base_epsilon > 0.0)) throw InputError("epsilon must be > 0");
  const std::size_t limit = budget.value_or(cell_budget());
  {
    double finest = 1.0;
    for (auto n : base_grid.subdivisions()) finest *= static_cast<double>(n) * std::ldexp(1.0, levels - 1);
    if (finest > static_cast<double>(limit)) {
      throw InputError("finest grid has " + format_number(finest) + " cells, over the budget of " +
                       std::to_string(limit));
    }
  }
  RefinementReport report;
  Grid grid = base_grid;
  double eps = base_epsilon;
  CellSet prev_cr;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) {
      grid = grid.refined();
      eps /= 2.0;
    }
    LevelParams level{grid, eps, Mode::chain, 1, spec.metric, std::nullopt};
    const TransitionGraph g = build_graph(spec, level, spec.support_cells(grid), policy);
    const SccDecomposition d = scc(g);
    const CellSet cr = chain_recurrent_cells(g, d);
    const StreamGraph sg = condensation(g, d);

    LevelRecord rec;
    rec.subdivisions = grid.subdivisions();
    rec.epsilon = eps;
    rec.cr_cells = cr.count();
    rec.cr_measure = static_cast<double>(rec.cr_cells) * grid.cell_volume();
    rec.nodes = sg.nodes.size();
    rec.edges = sg.edges.size();
    rec.fingerprint = graph_fingerprint(sg);
    if (l > 0) {
      CellSet coarse(prev_cr.universe());
      cr.for_each([&](std::size_t c) { coarse.insert(grid.coarsen(c)); });
      rec.nesting_violations = (coarse - prev_cr).count();
    }
    prev_cr = cr;
    report.levels.push_back(std::move(rec));
  }
  // A single level has nothing to compare against.
  if (report.levels.size() >= 2) {
    const auto& a = report.levels[report.levels.size() - 2];
    const auto& b = report.levels.back();
    report.stabilized = a.nodes == b.nodes && a.fingerprint == b.fingerprint;
  }
  return report;
}

std::string graph_fingerprint(const StreamGraph& sg) {
  // Nodes are ranked by bounding box, then cell count. Box first: cell
  // counts roughly double per level and near-equal nodes would swap ranks.
  // Only the ranked structure goes into the string, so that levels compare.
  std::vector<std::size_t> order(sg.nodes.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    const auto& n = sg.nodes[i];
    return std::tuple(n.bounds.lo, n.bounds.hi, n.cells.size());
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  std::vector<std::size_t> rank(sg.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  std::vector<std::tuple<std::size_t, std::size_t, std::string>> edges;
  for (const auto& e : sg.edges) edges.emplace_back(rank[e.from], rank[e.to], tag_name(e.tag));
  std::sort(edges.begin(), edges.end());
  std::ostringstream out;
  out << "nodes " << sg.nodes.size() << " edges";
  for (const auto& [a, b, t] : edges) out << " " << a << ">" << b << ":" << t;
  return out.str();
}

std::string refinement_to_json(const RefinementReport& report) {
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : report.levels) {
    rows.push_back({{"subdivisions", r.subdivisions},
                    {"epsilon", r.epsilon},
                    {"cr_cells", r.cr_cells},
                    {"cr_measure", r.cr_measure},
                    {"nodes", r.nodes},
                    {"edges", r.edges},
                    {"fingerprint", r.fingerprint},
                    {"nesting_violations", r.nesting_violations}});
  }
  j["levels"] = rows;
  j["stabilized"] = report.stabilized;
  j["nested"] = report.nested();
  return j.dump(2) + "\n";
}

std::string refinement_to_csv(const RefinementReport& report) {
  std::ostringstream out;
  out << "level,cells,epsilon,cr_cells,cr_measure,nodes,edges,nesting_violations\n";
  for (std::size_t l = 0; l < report.levels.size(); ++l) {
    const auto& r = report.levels[l];
    const std::size_t cells = std::accumulate(r.subdivisions.begin(), r.subdivisions.end(), std::size_t{1},
                                              std::multiplies<>());
    out << l << "," << cells << "," << format_number(r.epsilon) << "," << r.cr_cells << ","
        << format_number(r.cr_measure) << "," << r.nodes << "," << r.edges << "," << r.nesting_violations << "\n";
  }
  return out.str();
}

}  // namespace chainscape

#include "chainscape/attractor.hpp"

#include <algorithm>
#include <json.hpp>

#include "chainscape/error.hpp"
#include "chainscape/image.hpp"

namespace chainscape {

using nlohmann::json;

TransitionGraph exact_graph(const SystemSpec& spec, const Grid& grid, const ImagePolicy& policy) {
  LevelParams level{grid, 0.0, Mode::exact, 1, spec.metric, std::nullopt};
  return build_graph(spec, level, spec.support_cells(grid), policy);
}

TrappingReport verify_trapping(const TransitionGraph& exact, const CellSet& Q, int budget) {
  if (Q.empty()) throw InputError("trapping candidate is empty");
  TrappingReport r;
  r.budget = budget;
  r.violating = CellSet(exact.cell_count);
  Q.for_each([&](std::size_t c) {
    for (auto t : exact.successors(c)) {
      if (t >= exact.cell_count || !Q.contains(t)) {
        r.violating.insert(c);
        break;
      }
    }
  });
  r.is_forward_invariant = r.violating.empty();
  CellSet S = exact.region;
  for (int k = 0; k <= budget; ++k) {
    if (S.subset_of(Q)) {
      r.is_global_candidate = true;
      r.absorption_steps = k;
      break;
    }
    CellSet next = exact.image_of(S);
    if (next == S) break;
    S = std::move(next);
  }
  return r;
}

TrappingReport verify_trapping(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                               const ImagePolicy& policy, int budget) {
  return verify_trapping(exact_graph(spec, grid, policy), Q, budget);
}

CellSet maximal_invariant(const TransitionGraph& g, const CellSet& Q, int* iterations) {
  const std::size_t n = g.cell_count;
  CellSet A = Q;
  std::vector<std::uint32_t> preds(n, 0);
  Q.for_each([&](std::size_t u) {
    for (auto v : g.successors(u)) {
      if (v < n && Q.contains(v)) ++preds[v];
    }
  });
  std::vector<std::size_t> frontier;
  Q.for_each([&](std::size_t c) {
    if (preds[c] == 0) frontier.push_back(c);
  });
  int rounds = 0;
  while (!frontier.empty()) {
    ++rounds;
    for (auto c : frontier) A.erase(c);
    std::vector<std::size_t> next;
    for (auto u : frontier) {
      for (auto v : g.successors(u)) {
        if (v < n && A.contains(v) && --preds[v] == 0) next.push_back(v);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  if (iterations) *iterations = rounds;
  return A;
}

AttractorResult global_attractor(const TransitionGraph& exact, const CellSet& Q) {
  if (Q.empty()) throw InputError("trapping region is empty");
  AttractorResult r;
  r.cells = maximal_invariant(exact, Q, &r.iterations);
  if (r.cells.empty()) throw AnalysisError("trapping region verification was inconsistent");
  r.components = components(exact.level.grid, r.cells, Adjacency::face);
  r.connected = r.components.size() == 1;
  return r;
}

AttractorResult global_attractor(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                                 const ImagePolicy& policy) {
  return global_attractor(exact_graph(spec, grid, policy), Q);
}

CellSet dilate_metric(const Grid& grid, const Metric& metric, const CellSet& A, double r) {
  CellSet out = A;
  const std::size_t d = grid.dimension();
  std::vector<std::size_t> cells;
  A.for_each([&](std::size_t a) {
    const Box b = grid.cell_box(a);
    const Point c = grid.cell_center(a);
    double reach = 0.0;
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
      Point corner(d);
      for (std::size_t k = 0; k < d; ++k) corner[k] = (mask >> k) & 1u ? b.hi[k] : b.lo[k];
      reach = std::max(reach, metric.raw_distance(c, corner));
    }
    cells.clear();
    ball_cells_into(grid, metric, c, r + reach, cells);
    for (auto t : cells) out.insert(t);
  });
  return out;
}

int attraction_steps(const TransitionGraph& exact, const CellSet& Q, const CellSet& A, double eps_target,
                     int budget) {
  if (!A.subset_of(Q)) throw InputError("attractor candidate must lie inside Q");
  const CellSet target = dilate_metric(exact.level.grid, exact.level.metric, A, eps_target);
  CellSet S = Q;
  for (int k = 0; k <= budget; ++k) {
    if (S.subset_of(target)) return k;
    S = exact.image_of(S);
  }
  throw AnalysisError("no attraction witnessed within " + std::to_string(budget) + " steps; " +
                      std::to_string((S - target).count()) + " residual cells");
}

int attraction_steps(const SystemSpec& spec, const Grid& grid, const CellSet& Q, const CellSet& A,
                     double eps_target, const ImagePolicy& policy, int budget) {
  return attraction_steps(exact_graph(spec, grid, policy), Q, A, eps_target, budget);
}

GraphSignature signature(const StreamGraph& sg) {
  GraphSignature s;
  for (const auto& n : sg.nodes) s.nodes.push_back(n.cells);
  for (const auto& e : sg.edges) s.edges.emplace_back(sg.nodes[e.from].cells.front(), sg.nodes[e.to].cells.front());
  std::sort(s.nodes.begin(), s.nodes.end());
  std::sort(s.edges.begin(), s.edges.end());
  return s;
}

RestrictionReport restrict_and_compare(const SystemSpec& spec, const Grid& grid, const CellSet& Q,
                                       const LevelParams& level, const ImagePolicy& policy) {
  RestrictionReport r;
  const TransitionGraph full = build_graph(spec, level, Q, policy);
  const SccDecomposition dfull = scc(full);
  const CellSet cr_full = chain_recurrent_cells(full, dfull);
  const StreamGraph sg_full = condensation(full, dfull);
  r.restricted_region = maximal_invariant(full, Q);
  CellSet cr_res(grid.cell_count());
  StreamGraph sg_res;
  if (!r.restricted_region.empty()) {
    const TransitionGraph res = build_graph(spec, level, r.restricted_region, policy);
    const SccDecomposition dres = scc(res);
    cr_res = chain_recurrent_cells(res, dres);
    sg_res = condensation(res, dres);
  }
  r.cr_full = cr_full.count();
  r.cr_restricted = cr_res.count();
  r.nodes_full = sg_full.nodes.size();
  r.nodes_restricted = sg_res.nodes.size();
  r.edges_full = sg_full.edges.size();
  r.edges_restricted = sg_res.edges.size();
  r.same_cells = cr_full == cr_res;
  const GraphSignature a = signature(sg_full);
  const GraphSignature b = signature(sg_res);
  r.same_nodes = a.nodes == b.nodes;
  r.same_edges = a.edges == b.edges;
  return r;
}

namespace {
json grid_json(const Grid& grid) {
  return {{"lo", grid.domain().lo}, {"hi", grid.domain().hi}, {"subdivisions", grid.subdivisions()}};
}
}  // namespace

std::string attractor_to_json(const Grid& grid, const AttractorResult& result) {
  json j;
  j["grid"] = grid_json(grid);
  j["cell_count"] = result.cells.count();
  j["iterations"] = result.iterations;
  j["connected"] = result.connected;
  json comps = json::array();
  for (const auto& c : result.components) {
    const auto idx = c.indices();
    Box b = grid.cell_box(idx.front());
    for (auto i : idx) {
      const Box cb = grid.cell_box(i);
      for (std::size_t a = 0; a < b.lo.size(); ++a) {
        b.lo[a] = std::min(b.lo[a], cb.lo[a]);
        b.hi[a] = std::max(b.hi[a], cb.hi[a]);
      }
    }
    comps.push_back({{"cell_count", idx.size()}, {"bounds", {{"lo", b.lo}, {"hi", b.hi}}}});
  }
  j["components"] = comps;
  if (result.attraction_steps) j["attraction_steps"] = *result.attraction_steps;
  j["cells"] = result.cells.indices();
  return j.dump(2) + "\n";
}

std::string trapping_to_json(const Grid& grid, const TrappingReport& report) {
  json j;
  j["grid"] = grid_json(grid);
  j["is_forward_invariant"] = report.is_forward_invariant;
  j["violating_cells"] = report.violating.indices();
  j["is_global_candidate"] = report.is_global_candidate;
  j["budget"] = report.budget;
  if (report.absorption_steps) j["absorption_steps"] = *report.absorption_steps;
  return j.dump(2) + "\n";
}

}  // namespace chainscape

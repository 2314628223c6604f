// Acceptance gate: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "chainscape/attractor.hpp"
#include "chainscape/error.hpp"
#include "chainscape/parallel.hpp"
#include "chainscape/presets.hpp"
#include "chainscape/streams.hpp"
#include "chainscape/transition.hpp"
#include "checks.hpp"
#include "cli.hpp"
#include "oracles.hpp"

using namespace chainscape;
using checks::Outcome;
namespace fs = std::filesystem;

namespace {

// Tolerances and limits, pinned.
constexpr double kMsinpixSeconds = 5.0;
constexpr double kLogisticSeconds = 10.0;
constexpr double kSquareSeconds = 60.0;
constexpr double kGsSeconds = 30.0;
constexpr double kLogisticMeasure = 0.99;
constexpr std::size_t kMsinpixNodeCells = 4;
constexpr std::size_t kGsComponents = 9;
constexpr double kHalfplaneEps = 0.2;
constexpr double kRestrictedLinkEps = 0.125;
constexpr int kClosureGraphs = 100;
constexpr int kShortestPathGraphs = 50;
constexpr std::size_t kMaxOracleCells = 200;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Chain {
  TransitionGraph g;
  CellSet cr;
  StreamGraph sg;
};

Chain chain_at(const SystemSpec& spec, const Grid& grid, double eps) {
  LevelParams p{grid, eps, Mode::chain, 1, spec.metric, std::nullopt};
  TransitionGraph g = build_graph(spec, p, spec.support_cells(grid), spec.default_policy());
  const auto d = scc(g);
  CellSet cr = chain_recurrent_cells(g, d);
  StreamGraph sg = condensation(g, d);
  return {std::move(g), std::move(cr), std::move(sg)};
}

std::optional<std::size_t> node_at(const Grid& grid, const StreamGraph& sg, std::initializer_list<double> p) {
  const std::vector<double> v(p);
  const auto c = grid.cell_of(v);
  return c ? sg.node_of(*c) : std::nullopt;
}

bool has_edge(const StreamGraph& sg, std::size_t a, std::size_t b) {
  for (const auto& e : sg.edges)
    if (e.from == a && e.to == b) return true;
  return false;
}

std::string timing(double s, double limit) {
  std::ostringstream os;
  os.precision(3);
  os << s << "s/" << limit << "s";
  return os.str();
}

Outcome c1_msinpix() {
  Outcome o;
  const auto t0 = Clock::now();
  const SystemSpec spec = make_preset("ode-msinpix");
  Grid grid(spec.domain, {256});
  double eps = 2.0 * grid.width(0);
  std::string summary;
  for (int l = 0; l < 2; ++l) {
    if (l > 0) {
      grid = grid.refined();
      eps /= 2.0;
    }
    const Chain c = chain_at(spec, grid, eps);
    const auto at1 = node_at(grid, c.sg, {1.0}), at0 = node_at(grid, c.sg, {0.0});
    const std::string lv = "L" + std::to_string(l);
    if (c.sg.nodes.size() != 2) o.fail(lv + " has " + std::to_string(c.sg.nodes.size()) + " nodes");
    if (!at1 || !at0 || *at1 == *at0) {
      o.fail(lv + " x=0 and x=1 are not separate nodes");
      continue;
    }
    if (c.sg.edges.size() != 1 || !has_edge(c.sg, *at1, *at0)) o.fail(lv + " edge set is not {x=1 -> x=0}");
    if (l == 1) {
      for (const auto& n : c.sg.nodes) {
        if (n.cells.size() > kMsinpixNodeCells) o.fail("finest node " + std::to_string(n.id) + " has " +
                                                       std::to_string(n.cells.size()) + " cells");
      }
      summary = "finest nodes " + std::to_string(c.sg.nodes[0].cells.size()) + "+" +
                std::to_string(c.sg.nodes[1].cells.size()) + " cells";
    }
  }
  const double s = seconds_since(t0);
  if (s >= kMsinpixSeconds) o.fail("took " + timing(s, kMsinpixSeconds));
  if (o.ok) o.detail = summary + ", " + timing(s, kMsinpixSeconds);
  return o;
}

Outcome c2_logistic() {
  Outcome o;
  const auto t0 = Clock::now();
  const SystemSpec spec = make_preset("map-logistic");
  const Grid grid(spec.domain, {1024});
  const Chain c = chain_at(spec, grid, 2.0 * grid.width(0));
  const double measure = static_cast<double>(c.cr.count()) * grid.cell_volume() / spec.domain.volume();
  if (c.sg.nodes.size() != 1) o.fail(std::to_string(c.sg.nodes.size()) + " nodes");
  if (measure < kLogisticMeasure) o.fail("cr measure " + std::to_string(measure));
  if (!c.sg.edges.empty()) o.fail(std::to_string(c.sg.edges.size()) + " edges");
  const double s = seconds_since(t0);
  if (s >= kLogisticSeconds) o.fail("took " + timing(s, kLogisticSeconds));
  if (o.ok) o.detail = "1 node, measure " + std::to_string(measure) + ", " + timing(s, kLogisticSeconds);
  return o;
}

Outcome c3_square() {
  Outcome o;
  const auto t0 = Clock::now();
  const SystemSpec spec = make_preset("square-semiflow");
  const PresetInfo info = preset_info("square-semiflow");
  const Grid grid(spec.domain, {128, 128});
  const CellSet region = spec.support_cells(grid);
  const TransitionGraph exact = exact_graph(spec, grid, spec.default_policy());
  const AttractorResult a = global_attractor(exact, region);

  // cells meeting [1/3,1]x{0} u {1}x[0,1], each within one cell of the attractor
  CellSet target = grid.empty_set();
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Box b = grid.cell_box(c);
    const bool bottom = b.lo[1] == 0.0 && b.hi[0] > 1.0 / 3.0;
    const bool right = b.hi[0] == 1.0;
    if (bottom || right) target.insert(c);
  }
  const CellSet slack = dilate(grid, a.cells, 1);
  if (!target.subset_of(slack)) {
    o.fail("attractor misses " + std::to_string((target - slack).count()) + " target cells by more than one cell");
  }
  if (!a.connected) o.fail("attractor has " + std::to_string(a.components.size()) + " components");

  const Chain c = chain_at(spec, grid, 2.0 * grid.max_width());
  const auto A = node_at(grid, c.sg, {1.0 / 3.0, 0.0}), B = node_at(grid, c.sg, {2.0 / 3.0, 0.0}),
             C = node_at(grid, c.sg, {1.0, 0.0});
  if (!A || !B || !C || *A == *B || *B == *C || *A == *C) {
    o.fail("A, B, C are not three distinct chain nodes");
  } else {
    LinkPolicy lp;
    lp.epsilon = *info.link_epsilon;
    const StreamGraph lg = classify_edges(link_graph(spec, grid, spec.metric, c.sg, lp), exact, a.cells);
    auto tag_of = [&](std::size_t x, std::size_t y) -> std::string {
      for (const auto& e : lg.edges)
        if (e.from == x && e.to == y) return tag_name(e.tag);
      return "missing";
    };
    const auto ab = tag_of(*A, *B), bc = tag_of(*B, *C), ac = tag_of(*A, *C);
    if (ab != "strong" || bc != "strong" || ac != "weak") {
      o.fail("tags A->B " + ab + ", B->C " + bc + ", A->C " + ac);
    }
    LinkPolicy rp = lp;
    rp.epsilon = kRestrictedLinkEps;
    rp.restrict_to = a.cells;
    const auto hit = link_targets(spec, grid, spec.metric, c.sg.nodes[*A].cells, {c.sg.nodes[*C].cells}, rp);
    if (hit[0]) o.fail("restricted A->C link was certified");
  }
  const double s = seconds_since(t0);
  if (s >= kSquareSeconds) o.fail("took " + timing(s, kSquareSeconds));
  if (o.ok) {
    o.detail = "attractor " + std::to_string(a.cells.count()) + " cells, connected; tags strong/strong/weak; " +
               timing(s, kSquareSeconds);
  }
  return o;
}

Outcome over_levels(const std::function<Outcome(const checks::Level&)>& f, bool ode_only = false) {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& name : checks::preset_names()) {
    for (const auto& lv : checks::shipped_levels(name)) {
      if (ode_only && lv.spec.kind != SystemKind::ode) break;
      const Outcome r = f(lv);
      ++runs;
      if (!r.ok) o.fail(name + " " + r.detail);
    }
  }
  if (o.ok) o.detail = std::to_string(runs) + " preset levels";
  return o;
}

Outcome c6_connected() {
  Outcome o;
  std::size_t checked = 0, vacuous = 0;
  for (const auto& name : checks::preset_names()) {
    for (const auto& lv : checks::shipped_levels(name)) {
      const CellSet region = lv.spec.support_cells(lv.grid);
      AttractorResult a;
      try {
        a = global_attractor(lv.spec, lv.grid, region, lv.spec.default_policy());
      } catch (const AnalysisError&) {
        ++vacuous;
        continue;
      }
      if (!a.connected) {
        ++vacuous;
        continue;
      }
      ++checked;
      const Chain c = chain_at(lv.spec, lv.grid, lv.epsilon);
      if (!c.sg.weakly_connected()) o.fail(name + " L" + std::to_string(lv.index) + " graph is disconnected");
    }
  }
  if (checked == 0) o.fail("no preset has a connected attractor");
  if (o.ok) o.detail = std::to_string(checked) + " connected cases, " + std::to_string(vacuous) + " vacuous";
  return o;
}

Outcome c7_gs() {
  Outcome o;
  const auto t0 = Clock::now();
  const PresetInfo info = preset_info("gs-truncated-8");
  const SystemSpec spec = make_preset("gs-truncated-8");
  const Grid grid(spec.domain, info.grid);
  if (grid.subdivisions()[0] < 512) o.fail("grid is coarser than 512 in x");
  const AttractorResult a = global_attractor(spec, grid, spec.support_cells(grid), spec.default_policy());
  if (a.components.size() < kGsComponents) o.fail(std::to_string(a.components.size()) + " attractor components");
  const Chain c = chain_at(spec, grid, preset_epsilon(info, grid));
  const auto left = node_at(grid, c.sg, {0.0, 0.0}), right = node_at(grid, c.sg, {1.5, 0.0});
  if (c.sg.nodes.size() != 2 || c.sg.edges.size() != 1) {
    o.fail(std::to_string(c.sg.nodes.size()) + " nodes, " + std::to_string(c.sg.edges.size()) + " edges");
  } else if (!left || !right || !has_edge(c.sg, *left, *right)) {
    o.fail("the edge does not join the fixed points (0,0) -> (3/2,0)");
  }
  const double s = seconds_since(t0);
  if (s >= kGsSeconds) o.fail("took " + timing(s, kGsSeconds));
  if (o.ok) {
    o.detail = std::to_string(a.components.size()) + " components, 2 nodes, 1 edge, " + timing(s, kGsSeconds);
  }
  return o;
}

Outcome c8_halfplane() {
  Outcome o;
  SystemSpec spec = make_preset("map-halfplane-shift");
  std::string detail;
  for (const auto& lv : checks::shipped_levels("map-halfplane-shift")) {
    const std::string tag = "L" + std::to_string(lv.index);
    spec.metric = Metric::euclidean();
    const Chain e = chain_at(spec, lv.grid, kHalfplaneEps);
    if (!e.cr.empty()) o.fail(tag + " euclidean cr has " + std::to_string(e.cr.count()) + " cells");
    spec.metric = Metric::hyperbolic_halfplane();
    const Chain h = chain_at(spec, lv.grid, kHalfplaneEps);
    if (h.cr.empty()) {
      o.fail(tag + " hyperbolic cr is empty");
      continue;
    }
    std::vector<std::size_t> high;  // nodes holding cells above y = 10
    double xlo = 1e300, xhi = -1e300;
    for (const auto& n : h.sg.nodes) {
      bool any = false;
      for (auto c : n.cells) {
        const Box b = lv.grid.cell_box(c);
        if (b.lo[1] < 10.0) continue;
        any = true;
        xlo = std::min(xlo, b.lo[0]);
        xhi = std::max(xhi, b.hi[0]);
      }
      if (any) high.push_back(n.id);
    }
    if (high.size() != 1) o.fail(tag + " " + std::to_string(high.size()) + " nodes above y=10");
    if (xlo != spec.domain.lo[0] || xhi != spec.domain.hi[0]) o.fail(tag + " high node does not span the window");
    detail += (detail.empty() ? "" : ", ") + tag + " hyperbolic cr " + std::to_string(h.cr.count());
  }
  if (o.ok) o.detail = "euclidean cr empty; " + detail;
  return o;
}

TransitionGraph graph_of(std::size_t n, const std::vector<oracle::WeightedEdge>& edges, bool weighted) {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> lists(n);
  for (const auto& e : edges) lists[e.from].emplace_back(static_cast<std::uint32_t>(e.to), e.w);
  LevelParams p{Grid(Box{{0.0}, {1.0}}, {n}), weighted ? 1.0 : 0.5, weighted ? Mode::sigma : Mode::chain, 1,
                Metric::euclidean(), std::nullopt};
  return TransitionGraph::from_lists(p, lists, weighted);
}

Outcome c9_oracles() {
  Outcome o;
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<std::size_t> size(1, kMaxOracleCells);
  for (int t = 0; t < kClosureGraphs && o.ok; ++t) {
    const std::size_t n = size(rng);
    const auto pairs = oracle::random_digraph(rng, n, 2.0 / static_cast<double>(n));
    std::vector<oracle::WeightedEdge> edges;
    for (auto [a, b] : pairs) edges.push_back({a, b, 0.0});
    const auto g = graph_of(n, edges, false);
    const auto cl = oracle::closure(n, pairs);
    const auto cls = oracle::mutual_classes(cl);
    const auto d = scc(g);
    for (std::size_t i = 0; i < n && o.ok; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if ((cls[i] == cls[j]) != (d.component[i] == d.component[j])) {
          o.fail("graph " + std::to_string(t) + ": scc split differs at " + std::to_string(i) + "," + std::to_string(j));
          break;
        }
      }
      bool self = false;
      for (auto [a, b] : pairs) self = self || (a == i && b == i);
      const bool rec_oracle = self || std::count(cls.begin(), cls.end(), cls[i]) > 1;
      if (rec_oracle != (d.recurrent[d.component[i]] != 0)) o.fail("graph " + std::to_string(t) + ": recurrence flag");
      const std::size_t src[] = {i};
      const auto row = reachable_from(g, src);
      for (std::size_t j = 0; j < n; ++j) {
        if ((row[j] != 0) != (cl[i][j] != 0) || reach(g, i, j) != (cl[i][j] != 0)) {
          o.fail("graph " + std::to_string(t) + ": reach " + std::to_string(i) + "->" + std::to_string(j));
          break;
        }
      }
    }
  }
  // dyadic weights keep every path sum exact in double
  std::uniform_int_distribution<int> eighths(0, 16);
  for (int t = 0; t < kShortestPathGraphs && o.ok; ++t) {
    const std::size_t n = size(rng);
    const auto pairs = oracle::random_digraph(rng, n, 3.0 / static_cast<double>(n));
    std::vector<oracle::WeightedEdge> edges;
    for (auto [a, b] : pairs) edges.push_back({a, b, eighths(rng) / 8.0});
    const auto g = graph_of(n, edges, true);
    // from_lists keeps the lightest parallel edge; the oracle sees all of them, same optimum
    for (std::size_t src = 0; src < n && o.ok; src += std::max<std::size_t>(1, n / 7)) {
      const auto dist = oracle::bellman_ford(n, edges, src);
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t s[] = {src}, tt[] = {j};
        const double got = sigma_distance(g, s, tt);
        const double budget = eighths(rng) / 4.0;
        if (got != dist[j] || sigma_reach(g, src, j, budget) != (dist[j] <= budget) ||
            sigma_reach(g, src, j, kInfinity) != !std::isinf(dist[j])) {
          o.fail("weighted graph " + std::to_string(t) + ": " + std::to_string(src) + "->" + std::to_string(j));
          break;
        }
      }
    }
  }
  if (o.ok) o.detail = std::to_string(kClosureGraphs) + " closure + " + std::to_string(kShortestPathGraphs) +
                       " shortest-path graphs agree";
  return o;
}

Outcome c10_properties() {
  Outcome o;
  std::size_t runs = 0;
  for (const auto& name : checks::preset_names()) {
    for (const auto& lv : checks::shipped_levels(name)) {
      for (const auto& r : {checks::epsilon_monotone(lv), checks::transpose_invariant(lv),
                            checks::bracket_inclusions(lv)}) {
        ++runs;
        if (!r.ok) o.fail(name + " " + r.detail);
      }
    }
    const auto r = checks::refinement_nesting(name);
    ++runs;
    if (!r.ok) o.fail(name + " nesting: " + r.detail);
  }
  if (o.ok) o.detail = std::to_string(runs) + " property checks";
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome c11_determinism() {
  Outcome o;
  const fs::path base = fs::temp_directory_path() / ("chainscape_acceptance_" + std::to_string(::getpid()));
  std::string text[2], file[2];
  const char* threads[2] = {"1", "8"};
  for (int i = 0; i < 2; ++i) {
    const fs::path dir = base / threads[i];
    std::ostringstream out, err;
    const int code = cli::run({"verify", "--threads", threads[i], "--out", dir.string()}, out, err);
    if (code != 0) o.fail(std::string("verify --threads ") + threads[i] + " exited " + std::to_string(code));
    text[i] = out.str();
    file[i] = slurp(dir / "verify.json");
  }
  set_thread_count(0);
  std::error_code ec;
  fs::remove_all(base, ec);
  if (file[0].empty()) o.fail("verify.json missing");
  if (text[0] != text[1]) o.fail("stdout differs");
  if (file[0] != file[1]) o.fail("verify.json differs");
  if (o.ok) o.detail = "verify.json " + std::to_string(file[0].size()) + " bytes identical";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> all = {
      {1, "msinpix two nodes", c1_msinpix},
      {2, "logistic single node", c2_logistic},
      {3, "square attractor and tags", c3_square},
      {4, "restriction equality", [] { return over_levels(checks::restriction_equal); }},
      {5, "time-N maps", [] { return over_levels(checks::time_maps_equal, true); }},
      {6, "connected attractor, connected graph", c6_connected},
      {7, "gs-truncated-8", c7_gs},
      {8, "halfplane metric dependence", c8_halfplane},
      {9, "closure and shortest-path oracles", c9_oracles},
      {10, "property suites", c10_properties},
      {11, "thread determinism", c11_determinism},
  };
  int failed = 0;
  for (const auto& c : all) {
    Outcome r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.fail(std::string("threw: ") + e.what());
    }
    if (!r.ok) ++failed;
    std::printf("%s criterion %d (%s): %s\n", r.ok ? "PASS" : "FAIL", c.id, c.name, r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}

#include "chainscape/streams.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <json.hpp>
#include <queue>
#include <random>

#include "chainscape/attractor.hpp"
#include "chainscape/error.hpp"
#include "chainscape/image.hpp"
#include "chainscape/parallel.hpp"

namespace chainscape {

using nlohmann::json;

void LinkPolicy::validate() const {
  if (samples < 1) throw InputError("link samples must be >= 1");
  if (max_steps < 1) throw InputError("link max_steps must be >= 1");
  if (!(epsilon > 0.0)) throw InputError("link epsilon must be > 0");
  if (representatives < 1) throw InputError("link representatives must be >= 1");
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Seeded stratified samples of the open ball B(center, eps): one jittered
// point per stratum of a lattice over the ball's bounding box, center first.
std::vector<Point> ball_samples(const Grid& grid, const Metric& metric, const Point& center, double eps,
                                const LinkPolicy& policy, std::uint64_t stream) {
  const std::size_t d = grid.dimension();
  Box bb = metric.ball_bounds(center, eps);
  for (std::size_t a = 0; a < d; ++a) {
    bb.lo[a] = std::max(bb.lo[a], grid.domain().lo[a]);
    bb.hi[a] = std::min(bb.hi[a], grid.domain().hi[a]);
  }
  auto admissible = [&](const Point& z) {
    if (metric.raw_distance(z, center) >= eps) return false;
    auto c = grid.cell_of(z);
    if (!c) return false;
    return !policy.restrict_to || policy.restrict_to->contains(*c);
  };
  std::vector<Point> out;
  if (admissible(center)) out.push_back(center);
  std::seed_seq seq{static_cast<std::uint32_t>(policy.rng_seed), static_cast<std::uint32_t>(policy.rng_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  const auto m = static_cast<std::size_t>(
      std::max(1.0, std::ceil(std::pow(static_cast<double>(policy.samples), 1.0 / static_cast<double>(d)))));
  std::size_t strata = 1;
  for (std::size_t a = 0; a < d; ++a) strata *= m;
  const std::size_t want = static_cast<std::size_t>(policy.samples);
  for (int round = 0; round < 8 && out.size() < want; ++round) {
    for (std::size_t s = 0; s < strata && out.size() < want; ++s) {
      Point z(d);
      std::size_t rest = s;
      for (std::size_t a = 0; a < d; ++a) {
        const std::size_t i = rest % m;
        rest /= m;
        const double w = (bb.hi[a] - bb.lo[a]) / static_cast<double>(m);
        z[a] = bb.lo[a] + w * (static_cast<double>(i) + unit(rng));
      }
      if (admissible(z)) out.push_back(std::move(z));
    }
  }
  return out;
}

struct TargetIndex {
  // (covered cell, target list, target cell), sorted by covered cell
  std::vector<std::array<std::size_t, 3>> entries;
  std::vector<Point> centers;  // by cell, filled lazily per entry
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<char> link_targets(const SystemSpec& spec, const Grid& grid, const Metric& metric,
                               const std::vector<std::size_t>& sources,
                               const std::vector<std::vector<std::size_t>>& targets, const LinkPolicy& policy) {
  policy.validate();
  const double eps = policy.epsilon;
  std::vector<std::array<std::size_t, 3>> entries;
  std::vector<std::size_t> covered;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (std::size_t c : targets[t]) {
      covered.clear();
      ball_cells_into(grid, metric, grid.cell_center(c), eps, covered);
      for (auto m : covered) entries.push_back({m, t, c});
    }
  }
  std::sort(entries.begin(), entries.end());
  std::vector<char> hit(targets.size(), 0);
  if (sources.empty() || targets.empty()) return hit;

  std::vector<std::size_t> reps;
  const std::size_t r = std::min(sources.size(), static_cast<std::size_t>(policy.representatives));
  for (std::size_t i = 0; i < r; ++i) reps.push_back(sources[i * sources.size() / r]);

  std::vector<std::vector<char>> partial(reps.size());
  parallel_for(reps.size(), [&](std::size_t i) {
    std::vector<char> mine(targets.size(), 0);
    std::size_t remaining = targets.size();
    const Point center = grid.cell_center(reps[i]);
    const auto zetas = ball_samples(grid, metric, center, eps, policy, mix(reps[i]));
    Point clamped(grid.dimension());
    for (const Point& z : zetas) {
      if (!remaining) break;
      Point x = z;
      for (int t = 1; t <= policy.max_steps && remaining; ++t) {
        Point y;
        try {
          y = time_t_map(spec, 1, x);
        } catch (const EvalError&) {
          break;  // orbit blew up; it links nothing further
        }
        const bool fixed = y == x;
        x = std::move(y);
        for (std::size_t a = 0; a < x.size(); ++a) {
          clamped[a] = std::clamp(x[a], grid.domain().lo[a], grid.domain().hi[a]);
        }
        const std::size_t cell = *grid.cell_of(clamped);
        auto it = std::lower_bound(entries.begin(), entries.end(), std::array<std::size_t, 3>{cell, 0, 0});
        for (; it != entries.end() && (*it)[0] == cell; ++it) {
          const std::size_t ti = (*it)[1];
          if (mine[ti]) continue;
          if (metric.raw_distance(x, grid.cell_center((*it)[2])) < eps) {
            mine[ti] = 1;
            --remaining;
          }
        }
        if (fixed) break;
      }
    }
    partial[i] = std::move(mine);
  });
  for (const auto& p : partial) {
    for (std::size_t t = 0; t < hit.size(); ++t) hit[t] |= p[t];
  }
  return hit;
}

LinkVerdict link_reach(const SystemSpec& spec, const Grid& grid, const Metric& metric, std::size_t c1,
                       std::size_t c2, const LinkPolicy& policy) {
  if (c1 >= grid.cell_count() || c2 >= grid.cell_count()) throw InputError("cell index out of range");
  const auto hit = link_targets(spec, grid, metric, {c1}, {{c2}}, policy);
  return hit[0] ? LinkVerdict::certified_true : LinkVerdict::not_found;
}

NonwanderingEstimate nonwandering_cells(const SystemSpec& spec, const Grid& grid, const Metric& metric,
                                        const LinkPolicy& policy, const CellSet& region,
                                        const CellSet& attractor, const ImagePolicy& image_policy) {
  NonwanderingEstimate est;
  LevelParams level{grid, policy.epsilon, Mode::chain, 1, metric, std::nullopt};
  const TransitionGraph g = build_graph(spec, level, region, image_policy);
  est.outer = chain_recurrent_cells(g, scc(g));
  if (!attractor.empty()) est.outer &= attractor;

  const auto cells = region.indices();
  std::vector<char> linked(cells.size(), 0);
  LinkPolicy single = policy;
  single.representatives = 1;
  parallel_for(cells.size(), [&](std::size_t i) {
    linked[i] = link_targets(spec, grid, metric, {cells[i]}, {{cells[i]}}, single)[0];
  });
  CellSet self(grid.cell_count());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (linked[i]) self.insert(cells[i]);
  }
  est.violations = self - est.outer;
  est.inner = self & est.outer;
  return est;
}

StreamGraph classify_edges(StreamGraph sg, const TransitionGraph& exact, const CellSet& attractor) {
  const std::size_t n = exact.cell_count;
  std::vector<std::int64_t> owner(n, -1);
  for (const auto& node : sg.nodes) {
    for (auto c : node.cells) owner[c] = static_cast<std::int64_t>(node.id);
  }
  for (auto& e : sg.edges) {
    const auto& from = sg.nodes[e.from].cells;
    const auto& to = sg.nodes[e.to].cells;
    auto meets = [&](const std::vector<std::size_t>& cells) {
      return std::any_of(cells.begin(), cells.end(), [&](std::size_t c) { return attractor.contains(c); });
    };
    if (!meets(from) || !meets(to)) {
      e.tag = EdgeTag::unknown;
      continue;
    }
    auto allowed = [&](std::size_t c) {
      if (c >= n || !attractor.contains(c)) return false;
      const auto o = owner[c];
      return o < 0 || o == static_cast<std::int64_t>(e.from) || o == static_cast<std::int64_t>(e.to);
    };
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack;
    for (auto c : from) {
      if (attractor.contains(c)) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
    bool found = false;
    while (!stack.empty() && !found) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (auto w : exact.successors(v)) {
        if (!allowed(w) || seen[w]) continue;
        if (owner[w] == static_cast<std::int64_t>(e.to)) {
          found = true;
          break;
        }
        seen[w] = 1;
        stack.push_back(w);
      }
    }
    e.tag = found ? EdgeTag::strong : EdgeTag::weak;
  }
  return sg;
}

StreamGraph link_graph(const SystemSpec& spec, const Grid& grid, const Metric& metric, const StreamGraph& sg,
                       const LinkPolicy& policy) {
  StreamGraph out = sg;
  out.edges.clear();
  out.closure = "direct";
  std::vector<std::vector<std::size_t>> targets;
  for (const auto& n : sg.nodes) targets.push_back(n.cells);
  for (const auto& m : sg.nodes) {
    const auto hit = link_targets(spec, grid, metric, m.cells, targets, policy);
    for (std::size_t t = 0; t < hit.size(); ++t) {
      if (hit[t] && t != m.id) out.edges.push_back({m.id, t, EdgeTag::unknown});
    }
  }
  return out;
}

bool TimeMapReport::all_equal() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const TimeMapEntry& e) { return e.same_cells && e.same_nodes && e.same_edges; });
}

TimeMapReport compare_time_maps(const SystemSpec& spec, const Grid& grid, double epsilon,
                                const std::vector<int>& N_list, const ImagePolicy& policy) {
  if (spec.kind != SystemKind::ode) throw InputError("time-map comparison needs an ode system");
  const CellSet region = spec.support_cells(grid);
  auto run = [&](int N, CellSet& cr, GraphSignature& sig, TimeMapEntry& e) {
    LevelParams level{grid, epsilon, Mode::timeN, N, spec.metric, std::nullopt};
    const TransitionGraph g = build_graph(spec, level, region, policy);
    const SccDecomposition d = scc(g);
    cr = chain_recurrent_cells(g, d);
    const StreamGraph sg = condensation(g, d);
    sig = signature(sg);
    e.N = N;
    e.cr_cells = cr.count();
    e.nodes = sg.nodes.size();
    e.edges = sg.edges.size();
  };
  TimeMapReport report;
  CellSet base_cr;
  GraphSignature base_sig;
  TimeMapEntry base;
  run(1, base_cr, base_sig, base);
  base.same_cells = base.same_nodes = base.same_edges = true;
  report.entries.push_back(base);
  for (int N : N_list) {
    if (N == 1) continue;
    CellSet cr;
    GraphSignature sig;
    TimeMapEntry e;
    run(N, cr, sig, e);
    e.same_cells = cr == base_cr;
    e.same_nodes = sig.nodes == base_sig.nodes;
    e.same_edges = sig.edges == base_sig.edges;
    report.entries.push_back(e);
  }
  return report;
}

namespace {

// Cells reachable from `from` by paths of length >= 1.
std::vector<char> step_reach(const TransitionGraph& g, const std::vector<std::size_t>& from) {
  std::vector<std::size_t> start;
  for (auto c : from) {
    for (auto w : g.successors(c)) start.push_back(w);
  }
  return reachable_from(g, start);
}

// Least total weight over paths of length >= 1 out of `from`.
std::vector<double> step_sigma(const TransitionGraph& g, const std::vector<std::size_t>& from) {
  std::vector<double> dist(g.node_count(), kInfinity);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto c : from) {
    auto succ = g.successors(c);
    auto w = g.successor_weights(c);
    for (std::size_t i = 0; i < succ.size(); ++i) {
      if (w[i] < dist[succ[i]]) {
        dist[succ[i]] = w[i];
        pq.emplace(w[i], succ[i]);
      }
    }
  }
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    auto succ = g.successors(v);
    auto w = g.successor_weights(v);
    for (std::size_t i = 0; i < succ.size(); ++i) {
      if (dv + w[i] < dist[succ[i]]) {
        dist[succ[i]] = dv + w[i];
        pq.emplace(dist[succ[i]], succ[i]);
      }
    }
  }
  return dist;
}

}  // namespace

BracketReport bracket(const SystemSpec& spec, const Grid& grid, const Metric& metric, double epsilon,
                      const LinkPolicy& link_policy, const ImagePolicy& image_policy) {
  const CellSet region = spec.support_cells(grid);
  LevelParams chain_level{grid, epsilon, Mode::chain, 1, metric, std::nullopt};
  LevelParams exact_level{grid, 0.0, Mode::exact, 1, metric, std::nullopt};
  LevelParams sigma_level{grid, epsilon, Mode::sigma, 1, metric, epsilon};
  const TransitionGraph chain = build_graph(spec, chain_level, region, image_policy);
  const TransitionGraph exact = build_graph(spec, exact_level, region, image_policy);
  const TransitionGraph sigma = build_graph(spec, sigma_level, region, image_policy);
  const StreamGraph sg = condensation(chain, scc(chain));

  BracketReport r;
  r.nodes = sg.nodes.size();
  std::vector<std::vector<std::size_t>> targets;
  for (const auto& n : sg.nodes) targets.push_back(n.cells);
  LinkPolicy lp = link_policy;
  lp.epsilon = epsilon;
  for (const auto& m : sg.nodes) {
    const auto linked = link_targets(spec, grid, metric, m.cells, targets, lp);
    const auto orbit = step_reach(exact, m.cells);
    const auto chained = step_reach(chain, m.cells);
    // A link is a chain with a jump before the orbit and one after it, so it
    // is compared against chains leaving the ε-balls of M's centers.
    std::vector<std::size_t> ball;
    for (auto c : m.cells) ball_cells_into(grid, metric, grid.cell_center(c), epsilon, ball);
    std::sort(ball.begin(), ball.end());
    ball.erase(std::unique(ball.begin(), ball.end()), ball.end());
    std::erase_if(ball, [&](std::size_t c) { return !region.contains(c); });
    const auto jumped = step_reach(chain, ball);
    const auto dist = step_sigma(sigma, m.cells);
    for (const auto& n : sg.nodes) {
      BracketPair p;
      p.from = m.id;
      p.to = n.id;
      for (auto c : n.cells) {
        p.orbit = p.orbit || orbit[c];
        p.chain = p.chain || chained[c];
        p.sigma = p.sigma || dist[c] <= epsilon;
      }
      p.link = linked[n.id] != 0;
      auto note = [&](const char* what) {
        r.violations.push_back(std::string(what) + " fails for " + std::to_string(p.from) + "->" +
                               std::to_string(p.to));
      };
      if (p.orbit && !p.sigma) { r.orbit_in_sigma = false; note("orbit<=sigma"); }
      if (p.sigma && !p.chain) { r.sigma_in_chain = false; note("sigma<=chain"); }
      if (p.orbit && !p.chain) { r.orbit_in_chain = false; note("orbit<=chain"); }
      bool two_jump = false;
      for (auto c : n.cells) two_jump = two_jump || jumped[c];
      if (p.link && !two_jump) { r.link_in_chain = false; note("link<=chain"); }
      if (p.chain && !p.sigma) r.sigma_strictly_smaller = true;
      r.pairs.push_back(p);
    }
  }
  return r;
}

std::size_t omega_limit_violations(const SystemSpec& spec, const Grid& grid, const StreamGraph& sg,
                                   const LinkPolicy& policy, const CellSet& region) {
  std::vector<CellSet> dil;
  for (const auto& n : sg.nodes) {
    dil.push_back(dilate_metric(grid, spec.metric, CellSet::from_indices(grid.cell_count(), n.cells), policy.epsilon));
  }
  const auto cells = region.indices();
  if (cells.empty()) return 0;
  const std::size_t count = std::min(cells.size(), static_cast<std::size_t>(policy.samples));
  const int burn = static_cast<int>(0.9 * policy.max_steps);
  std::vector<char> bad(count, 0);
  parallel_for(count, [&](std::size_t i) {
    Point x = grid.cell_center(cells[i * cells.size() / count]);
    std::vector<std::size_t> tail;
    for (int t = 1; t <= policy.max_steps; ++t) {
      try {
        x = time_t_map(spec, 1, x);
      } catch (const EvalError&) {
        return;
      }
      if (t < burn) continue;
      auto c = grid.cell_of(x);
      if (!c) return;  // escaped the window
      tail.push_back(*c);
    }
    const bool ok = std::any_of(dil.begin(), dil.end(), [&](const CellSet& d) {
      return std::all_of(tail.begin(), tail.end(), [&](std::size_t c) { return d.contains(c); });
    });
    bad[i] = !ok;
  });
  return static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
}

std::string time_map_to_json(const TimeMapReport& report) {
  json j;
  json rows = json::array();
  for (const auto& e : report.entries) {
    rows.push_back({{"N", e.N},
                    {"cr_cells", e.cr_cells},
                    {"nodes", e.nodes},
                    {"edges", e.edges},
                    {"same_cells", e.same_cells},
                    {"same_nodes", e.same_nodes},
                    {"same_edges", e.same_edges}});
  }
  j["entries"] = rows;
  j["all_equal"] = report.all_equal();
  return j.dump(2) + "\n";
}

std::string bracket_to_json(const BracketReport& report) {
  json j;
  j["nodes"] = report.nodes;
  j["orbit_in_sigma"] = report.orbit_in_sigma;
  j["sigma_in_chain"] = report.sigma_in_chain;
  j["orbit_in_chain"] = report.orbit_in_chain;
  j["link_in_chain"] = report.link_in_chain;
  j["sigma_strictly_smaller"] = report.sigma_strictly_smaller;
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"from", p.from}, {"to", p.to}, {"orbit", p.orbit}, {"link", p.link}, {"sigma", p.sigma},
                     {"chain", p.chain}});
  }
  j["pairs"] = pairs;
  j["violations"] = report.violations;
  return j.dump(2) + "\n";
}

}  // namespace chainscape

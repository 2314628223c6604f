#include "chainscape/transition.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>

#include "chainscape/error.hpp"
#include "chainscape/image.hpp"
#include "chainscape/parallel.hpp"

namespace chainscape {

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::exact: return "exact";
    case Mode::chain: return "chain";
    case Mode::sigma: return "sigma";
    case Mode::timeN: return "timeN";
  }
  return "chain";
}

std::string tag_name(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::strong: return "strong";
    case EdgeTag::weak: return "weak";
    case EdgeTag::unknown: return "unknown";
  }
  return "unknown";
}

void LevelParams::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InputError("epsilon must be finite and >= 0");
  if (mode == Mode::exact && epsilon != 0.0) throw InputError("exact mode requires epsilon = 0");
  if (N < 1) throw InputError("N must be positive");
  if (weight_cap && !(*weight_cap >= 0.0)) throw InputError("weight cap must be >= 0");
  metric.validate_for(grid.domain());
}

bool TransitionGraph::has_edge(std::size_t u, std::size_t v) const {
  auto s = successors(u);
  return std::binary_search(s.begin(), s.end(), static_cast<std::uint32_t>(v));
}

CellSet TransitionGraph::image_of(const CellSet& cells) const {
  CellSet out(cell_count);
  cells.for_each([&](std::size_t c) {
    for (auto t : successors(c)) {
      if (t < cell_count) out.insert(t);
    }
  });
  return out;
}

CellSet TransitionGraph::escaping(const CellSet& cells) const {
  CellSet out(cell_count);
  cells.for_each([&](std::size_t c) {
    auto s = successors(c);
    if (!s.empty() && s.back() == cell_count) out.insert(c);
  });
  return out;
}

TransitionGraph TransitionGraph::from_lists(
    const LevelParams& level, const std::vector<std::vector<std::pair<std::uint32_t, double>>>& lists,
    bool weighted) {
  TransitionGraph g{level, 0, {}, {}, {}, {}};
  g.cell_count = level.grid.cell_count();
  if (lists.size() > g.node_count()) throw InputError("too many adjacency lists");
  g.region = CellSet::full(g.cell_count);
  g.offsets.assign(g.node_count() + 1, 0);
  for (std::size_t v = 0; v < g.node_count(); ++v) {
    g.offsets[v] = g.targets.size();
    if (v >= lists.size()) continue;
    auto list = lists[v];
    std::sort(list.begin(), list.end());
    // keep the lightest parallel edge
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (i > 0 && list[i].first == list[i - 1].first) continue;
      if (list[i].first >= g.node_count()) throw InputError("edge target out of range");
      g.targets.push_back(list[i].first);
      if (weighted) g.weights.push_back(list[i].second);
    }
  }
  g.offsets[g.node_count()] = g.targets.size();
  return g;
}

namespace {

struct Block {
  std::vector<std::uint64_t> counts;
  std::vector<std::uint32_t> targets;
  std::vector<double> weights;
};

// Points on the closed lattice of a target cell, where a sigma jump must land.
std::vector<Point> cover_lattice(const Grid& grid, std::size_t c, int m) {
  const std::size_t d = grid.dimension();
  const Box b = grid.cell_box(c);
  std::vector<Point> out;
  std::vector<int> idx(d, 0);
  while (true) {
    Point p(d);
    for (std::size_t a = 0; a < d; ++a) {
      p[a] = idx[a] + 1 == m ? b.hi[a] : b.lo[a] + (b.hi[a] - b.lo[a]) * idx[a] / (m - 1);
    }
    out.push_back(std::move(p));
    std::size_t a = 0;
    while (a < d && idx[a] == m - 1) idx[a++] = 0;
    if (a == d) break;
    ++idx[a];
  }
  return out;
}

}  // namespace

TransitionGraph build_graph(const SystemSpec& spec, const LevelParams& level, const CellSet& region,
                            const ImagePolicy& policy) {
  level.validate();
  if (region.universe() != level.grid.cell_count()) throw InputError("region does not match grid");
  if (region.empty()) throw InputError("region is empty");
  SystemSpec local = spec;
  local.metric = level.metric;
  const CellMapper mapper(local, level.grid, policy);
  const std::size_t n = level.grid.cell_count();
  const std::vector<std::size_t> cells = region.indices();
  const std::uint32_t ext = static_cast<std::uint32_t>(n);
  const bool sigma = level.mode == Mode::sigma;
  const double cap = level.cap();

  const std::size_t block_size = 512;
  const std::size_t nblocks = (cells.size() + block_size - 1) / block_size;
  std::vector<Block> blocks(nblocks);

  parallel_for(nblocks, [&](std::size_t b) {
    Block& out = blocks[b];
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(cells.size(), lo + block_size);
    CellImage img;
    for (std::size_t i = lo; i < hi; ++i) {
      const std::size_t c = cells[i];
      std::vector<std::uint32_t> succ;
      std::vector<double> wts;
      try {
        const auto s = mapper.samples(c);
        img.cells.clear();
        img.exterior = false;
        if (level.mode == Mode::timeN) {
          std::vector<Point> y = mapper.images(s, level.N);
          for (int k = level.N; k < 2 * level.N; ++k) {
            if (k > level.N) {
              for (auto& p : y) p = time_t_map(local, 1, p);
            }
            mapper.collect(y, mapper.bloat(c, s, y) + level.epsilon, img);
          }
        } else {
          const auto y = mapper.images(s, 1);
          const double b0 = mapper.bloat(c, s, y);
          if (!sigma) {
            mapper.collect(y, b0 + level.epsilon, img);
          } else {
            CellImage exact;
            mapper.collect(y, b0, exact);
            mapper.collect(y, b0 + cap, img);
            const int m = std::max(2, policy.samples_per_axis);
            for (std::size_t t : img.cells) {
              double w = 0.0;
              if (!std::binary_search(exact.cells.begin(), exact.cells.end(), t)) {
                for (const Point& q : cover_lattice(level.grid, t, m)) {
                  double nearest = kInfinity;
                  for (const Point& p : y) nearest = std::min(nearest, level.metric.raw_distance(q, p));
                  w = std::max(w, nearest - b0);
                }
                w = std::max(w, 0.0);
              }
              if (w <= cap) {
                succ.push_back(static_cast<std::uint32_t>(t));
                wts.push_back(w);
              }
            }
          }
        }
      } catch (const EvalError& e) {
        throw EvalError(std::string(e.what()) + " (cell " + std::to_string(c) + ")");
      }
      if (!sigma) {
        for (std::size_t t : img.cells) succ.push_back(static_cast<std::uint32_t>(t));
      }
      // Targets outside the region collapse into EXTERIOR.
      bool exterior = img.exterior;
      std::vector<std::uint32_t> kept;
      std::vector<double> kept_w;
      for (std::size_t j = 0; j < succ.size(); ++j) {
        if (region.contains(succ[j])) {
          kept.push_back(succ[j]);
          if (sigma) kept_w.push_back(wts[j]);
        } else {
          exterior = true;
        }
      }
      if (exterior) {
        kept.push_back(ext);
        if (sigma) kept_w.push_back(0.0);
      }
      out.counts.push_back(kept.size());
      out.targets.insert(out.targets.end(), kept.begin(), kept.end());
      out.weights.insert(out.weights.end(), kept_w.begin(), kept_w.end());
    }
  });

  TransitionGraph g{level, 0, {}, {}, {}, {}};
  g.cell_count = n;
  g.region = region;
  g.offsets.assign(n + 2, 0);
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.targets.size();
  g.targets.reserve(total);
  if (sigma) g.weights.reserve(total);
  std::vector<std::uint64_t> count(n + 1, 0);
  for (std::size_t b = 0; b < nblocks; ++b) {
    for (std::size_t j = 0; j < blocks[b].counts.size(); ++j) count[cells[b * block_size + j]] = blocks[b].counts[j];
  }
  for (std::size_t v = 0; v <= n; ++v) g.offsets[v + 1] = g.offsets[v] + count[v];
  for (const auto& b : blocks) {
    g.targets.insert(g.targets.end(), b.targets.begin(), b.targets.end());
    if (sigma) g.weights.insert(g.weights.end(), b.weights.begin(), b.weights.end());
  }
  return g;
}

SccDecomposition scc(const TransitionGraph& g) {
  // Iterative Tarjan. Components are numbered in completion order, so every
  // edge between components points from a higher id to a lower one.
  const std::size_t n = g.node_count();
  constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, unvisited), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::uint64_t>> calls;
  SccDecomposition d;
  d.component.assign(n, 0);
  std::uint32_t counter = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unvisited) continue;
    calls.emplace_back(static_cast<std::uint32_t>(root), g.offsets[root]);
    index[root] = low[root] = counter++;
    stack.push_back(static_cast<std::uint32_t>(root));
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& [v, pos] = calls.back();
      if (pos < g.offsets[v + 1]) {
        const std::uint32_t w = g.targets[pos++];
        if (index[w] == unvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.emplace_back(w, g.offsets[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      calls.pop_back();
      if (!calls.empty()) {
        const std::uint32_t parent = calls.back().first;
        low[parent] = std::min(low[parent], low[done]);
      }
      if (low[done] == index[done]) {
        std::vector<std::uint32_t> comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          d.component[w] = static_cast<std::uint32_t>(d.members.size());
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        d.members.push_back(std::move(comp));
      }
    }
  }

  d.recurrent.assign(d.members.size(), 0);
  for (std::size_t k = 0; k < d.members.size(); ++k) {
    const auto& m = d.members[k];
    if (m.size() >= 2) {
      d.recurrent[k] = 1;
    } else if (g.has_edge(m[0], m[0])) {
      d.recurrent[k] = 1;
    }
  }
  d.recurrent[d.component[g.exterior()]] = 0;
  return d;
}

CellSet chain_recurrent_cells(const TransitionGraph& g, const SccDecomposition& d) {
  CellSet out(g.cell_count);
  for (std::size_t k = 0; k < d.count(); ++k) {
    if (!d.recurrent[k]) continue;
    for (auto v : d.members[k]) {
      if (v < g.cell_count) out.insert(v);
    }
  }
  return out;
}

namespace {

Box cells_bounds(const Grid& grid, const std::vector<std::size_t>& cells) {
  Box b = grid.cell_box(cells.front());
  for (std::size_t c : cells) {
    const Box cb = grid.cell_box(c);
    for (std::size_t a = 0; a < b.lo.size(); ++a) {
      b.lo[a] = std::min(b.lo[a], cb.lo[a]);
      b.hi[a] = std::max(b.hi[a], cb.hi[a]);
    }
  }
  return b;
}

}  // namespace

StreamGraph condensation(const TransitionGraph& g, const SccDecomposition& d) {
  StreamGraph sg;
  sg.subdivisions = g.level.grid.subdivisions();
  sg.domain = g.level.grid.domain();
  sg.epsilon = g.level.epsilon;
  sg.mode = g.level.mode;
  sg.N = g.level.N;
  sg.metric = g.level.metric.name();

  std::vector<std::size_t> rec;
  for (std::size_t k = 0; k < d.count(); ++k) {
    if (d.recurrent[k]) rec.push_back(k);
  }
  std::sort(rec.begin(), rec.end(), [&](std::size_t a, std::size_t b) {
    return d.members[a].front() < d.members[b].front();
  });
  std::vector<std::int64_t> node_of_comp(d.count(), -1);
  for (std::size_t i = 0; i < rec.size(); ++i) {
    node_of_comp[rec[i]] = static_cast<std::int64_t>(i);
    StreamNode node;
    node.id = i;
    node.cells.assign(d.members[rec[i]].begin(), d.members[rec[i]].end());
    node.bounds = cells_bounds(g.level.grid, node.cells);
    sg.nodes.push_back(std::move(node));
  }
  if (rec.empty()) return sg;

  // Component ids are reverse topological, so successors are final before
  // their predecessors are visited.
  const std::size_t words = (rec.size() + 63) / 64;
  std::vector<std::uint64_t> below(d.count() * words, 0);
  for (std::size_t k = 0; k < d.count(); ++k) {
    std::uint64_t* mine = &below[k * words];
    for (auto v : d.members[k]) {
      for (auto w : g.successors(v)) {
        const std::size_t kw = d.component[w];
        if (kw == k) continue;
        const std::uint64_t* theirs = &below[kw * words];
        for (std::size_t i = 0; i < words; ++i) mine[i] |= theirs[i];
        if (node_of_comp[kw] >= 0) {
          const auto bit = static_cast<std::size_t>(node_of_comp[kw]);
          mine[bit / 64] |= std::uint64_t{1} << (bit % 64);
        }
      }
    }
  }
  for (std::size_t i = 0; i < rec.size(); ++i) {
    const std::uint64_t* mine = &below[rec[i] * words];
    for (std::size_t j = 0; j < rec.size(); ++j) {
      if ((mine[j / 64] >> (j % 64)) & 1u) sg.edges.push_back({i, j, EdgeTag::unknown});
    }
  }
  return sg;
}

std::vector<StreamEdge> StreamGraph::reduction() const {
  const std::size_t n = nodes.size();
  std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
  for (const auto& e : edges) adj[e.from][e.to] = 1;
  std::vector<StreamEdge> out;
  for (const auto& e : edges) {
    bool implied = false;
    for (std::size_t w = 0; w < n && !implied; ++w) {
      implied = w != e.from && w != e.to && adj[e.from][w] && adj[w][e.to];
    }
    if (!implied) out.push_back(e);
  }
  return out;
}

bool StreamGraph::weakly_connected() const {
  const std::size_t n = nodes.size();
  if (n <= 1) return true;
  std::vector<std::size_t> parent(n);
  for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : edges) parent[find(e.from)] = find(e.to);
  const std::size_t r = find(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (find(i) != r) return false;
  }
  return true;
}

bool StreamGraph::acyclic() const {
  const std::size_t n = nodes.size();
  std::vector<std::size_t> indeg(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& e : edges) {
    if (e.from == e.to) return false;
    out[e.from].push_back(e.to);
    ++indeg[e.to];
  }
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < n; ++i) {
    if (!indeg[i]) q.push_back(i);
  }
  std::size_t seen = 0;
  while (!q.empty()) {
    auto v = q.front();
    q.pop_front();
    ++seen;
    for (auto w : out[v]) {
      if (--indeg[w] == 0) q.push_back(w);
    }
  }
  return seen == n;
}

std::optional<std::size_t> StreamGraph::node_of(std::size_t cell) const {
  for (const auto& n : nodes) {
    if (std::binary_search(n.cells.begin(), n.cells.end(), cell)) return n.id;
  }
  return std::nullopt;
}

std::vector<char> reachable_from(const TransitionGraph& g, std::span<const std::size_t> sources) {
  std::vector<char> seen(g.node_count(), 0);
  std::vector<std::size_t> stack;
  for (auto s : sources) {
    if (s >= g.node_count()) throw InputError("cell index out of range");
    if (!seen[s]) {
      seen[s] = 1;
      stack.push_back(s);
    }
  }
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (auto w : g.successors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

bool reach(const TransitionGraph& g, std::size_t c1, std::size_t c2) {
  if (c1 >= g.node_count() || c2 >= g.node_count()) throw InputError("cell index out of range");
  if (c1 == c2) return true;
  const std::size_t src[] = {c1};
  return reachable_from(g, src)[c2] != 0;
}

double sigma_distance(const TransitionGraph& g, std::span<const std::size_t> sources,
                      std::span<const std::size_t> targets) {
  std::vector<double> dist(g.node_count(), kInfinity);
  std::vector<char> is_target(g.node_count(), 0);
  for (auto t : targets) is_target.at(t) = 1;
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto s : sources) {
    dist.at(s) = 0.0;
    pq.emplace(0.0, s);
  }
  while (!pq.empty()) {
    auto [dv, v] = pq.top();
    pq.pop();
    if (dv > dist[v]) continue;
    if (is_target[v]) return dv;
    auto succ = g.successors(v);
    for (std::size_t i = 0; i < succ.size(); ++i) {
      const double w = g.weighted() ? g.weights[g.offsets[v] + i] : 0.0;
      const double nd = dv + w;
      if (nd < dist[succ[i]]) {
        dist[succ[i]] = nd;
        pq.emplace(nd, succ[i]);
      }
    }
  }
  return kInfinity;
}

bool sigma_reach(const TransitionGraph& g, std::size_t c1, std::size_t c2, double budget) {
  if (c1 >= g.node_count() || c2 >= g.node_count()) throw InputError("cell index out of range");
  if (!(budget >= 0.0)) throw InputError("budget must be >= 0");
  const std::size_t s[] = {c1};
  const std::size_t t[] = {c2};
  const double d = sigma_distance(g, s, t);
  if (std::isinf(budget)) return !std::isinf(d);
  return d <= budget;
}

TransitionGraph transpose_graph(const TransitionGraph& g) {
  TransitionGraph t{g.level, 0, {}, {}, {}, {}};
  t.cell_count = g.cell_count;
  t.region = g.region;
  const std::size_t n = g.node_count();
  std::vector<std::uint64_t> count(n, 0);
  for (auto v : g.targets) ++count[v];
  t.offsets.assign(n + 1, 0);
  for (std::size_t v = 0; v < n; ++v) t.offsets[v + 1] = t.offsets[v] + count[v];
  t.targets.resize(g.targets.size());
  if (g.weighted()) t.weights.resize(g.weights.size());
  std::vector<std::uint64_t> fill(t.offsets.begin(), t.offsets.end() - 1);
  // Sources are visited in ascending order, so each reversed list is sorted.
  for (std::size_t u = 0; u < n; ++u) {
    for (std::uint64_t e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
      const std::uint64_t slot = fill[g.targets[e]]++;
      t.targets[slot] = static_cast<std::uint32_t>(u);
      if (g.weighted()) t.weights[slot] = g.weights[e];
    }
  }
  return t;
}

}  // namespace chainscape

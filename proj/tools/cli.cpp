#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "chainscape/attractor.hpp"
#include "chainscape/error.hpp"
#include "chainscape/parallel.hpp"
#include "chainscape/presets.hpp"
#include "chainscape/refine.hpp"
#include "chainscape/serialize.hpp"
#include "chainscape/streams.hpp"

namespace chainscape::cli {

namespace {

using nlohmann::json;

struct Options {
  std::string preset;
  std::string spec_file;
  std::string grid;
  std::string metric;
  std::string out = ".";
  std::optional<double> epsilon;
  int levels = 0;  // 0: command default
  std::uint64_t seed = 1;
  int threads = 0;
  std::string mode = "chain";
  int N = 1;
  bool links = false;
  std::vector<int> n_list{1, 2, 3};
  std::string from, to;
  std::optional<double> budget;
};

struct Setup {
  std::string name;
  SystemSpec spec;
  Grid grid{Box{{0.0}, {1.0}}, {1}};
  double epsilon = 0.0;
  int levels = 1;
  ImagePolicy policy;
  double link_epsilon = 0.0;
  std::optional<PresetInfo> preset;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("write failed: " + path.string());
}

std::filesystem::path out_dir(const Options& o) {
  std::filesystem::path dir(o.out);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory " + o.out + ": " + ec.message());
  return dir;
}

std::vector<std::size_t> parse_grid(const std::string& text, std::size_t dimension) {
  std::vector<std::size_t> n;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(part, &used);
    } catch (const std::exception&) {
      throw InputError("bad --grid value: " + text);
    }
    if (used != part.size() || v < 1) throw InputError("bad --grid value: " + text);
    n.push_back(static_cast<std::size_t>(v));
  }
  if (n.size() == 1) n.assign(dimension, n[0]);
  if (n.size() != dimension) {
    throw InputError("--grid needs 1 or " + std::to_string(dimension) + " values");
  }
  return n;
}

std::vector<double> parse_point(const std::string& text, std::size_t dimension, const char* flag) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InputError(std::string("bad ") + flag + " value: " + text);
    }
    if (used != part.size() || !std::isfinite(v)) throw InputError(std::string("bad ") + flag + " value: " + text);
    p.push_back(v);
  }
  if (p.size() != dimension) throw InputError(std::string(flag) + " needs " + std::to_string(dimension) + " coordinates");
  return p;
}

std::size_t cell_total(const std::vector<std::size_t>& n, int levels) {
  double total = 1.0;
  for (auto v : n) total *= static_cast<double>(v) * std::ldexp(1.0, levels - 1);
  if (total > static_cast<double>(cell_budget())) {
    throw InputError("grid of " + format_number(total) + " cells exceeds the cell budget of " +
                     std::to_string(cell_budget()));
  }
  return static_cast<std::size_t>(total);
}

Setup make_setup(const Options& o, int default_levels) {
  if (o.preset.empty() == o.spec_file.empty()) throw InputError("give exactly one of --preset and --spec");
  Setup s;
  if (!o.preset.empty()) {
    s.preset = preset_info(o.preset);
    s.spec = make_preset(o.preset);
    s.name = o.preset;
  } else {
    const std::string text = read_file(o.spec_file);
    try {
      s.spec = spec_from_json(text);
    } catch (const InputError& e) {
      if (e.offset() != InputError::npos) {
        throw InputError(o.spec_file + ": " + e.what() + " (byte " + std::to_string(e.offset()) + ")",
                         e.offset());
      }
      throw InputError(o.spec_file + ": " + e.what());
    }
    s.name = s.spec.name.empty() ? "spec" : s.spec.name;
  }
  if (!o.metric.empty()) {
    Metric m = Metric::parse(o.metric);
    m.validate_for(s.spec.domain);
    s.spec.metric = m;
  }
  std::vector<std::size_t> n;
  if (!o.grid.empty()) n = parse_grid(o.grid, s.spec.dimension);
  else if (s.preset) n = s.preset->grid;
  else n.assign(s.spec.dimension, 64);
  if (o.levels < 0) throw InputError("--levels must be >= 1");
  s.levels = o.levels > 0 ? o.levels : (default_levels > 0 ? default_levels : (s.preset ? s.preset->levels : 3));
  cell_total(n, s.levels);
  s.grid = Grid(s.spec.domain, n);
  if (o.epsilon) s.epsilon = *o.epsilon;
  else if (s.preset) s.epsilon = preset_epsilon(*s.preset, s.grid);
  else s.epsilon = default_epsilon(s.grid);
  if (!(s.epsilon > 0.0) || !std::isfinite(s.epsilon)) throw InputError("--epsilon must be a positive number");
  s.policy = s.spec.default_policy();
  if (s.preset && s.preset->link_epsilon) s.link_epsilon = *s.preset->link_epsilon;
  return s;
}

// A preset's link epsilon is absolute; otherwise links follow the level's
// chain epsilon.
double link_epsilon_at(const Setup& s, int level) {
  return s.link_epsilon > 0.0 ? s.link_epsilon : std::ldexp(s.epsilon, -level);
}

Grid level_grid(const Grid& base, int level) {
  Grid g = base;
  for (int l = 0; l < level; ++l) g = g.refined();
  return g;
}

Mode parse_mode(const std::string& m) {
  if (m == "chain") return Mode::chain;
  if (m == "exact") return Mode::exact;
  if (m == "sigma") return Mode::sigma;
  if (m == "timeN") return Mode::timeN;
  throw InputError("unknown --mode: " + m + " (chain, exact, sigma, timeN)");
}

std::string box_text(const Box& b) {
  std::string s = "[";
  for (std::size_t a = 0; a < b.lo.size(); ++a) {
    s += (a ? ", " : "") + format_number(b.lo[a]) + ".." + format_number(b.hi[a]);
  }
  return s + "]";
}

Box cells_bounds(const Grid& grid, const CellSet& cells) {
  Box b;
  bool first = true;
  cells.for_each([&](std::size_t c) {
    const Box cb = grid.cell_box(c);
    if (first) {
      b = cb;
      first = false;
      return;
    }
    for (std::size_t a = 0; a < cb.lo.size(); ++a) {
      b.lo[a] = std::min(b.lo[a], cb.lo[a]);
      b.hi[a] = std::max(b.hi[a], cb.hi[a]);
    }
  });
  return b;
}

// ---- attractor

int cmd_attractor(const Options& o, std::ostream& out) {
  const Setup s = make_setup(o, 1);
  const auto dir = out_dir(o);
  const CellSet Q = s.spec.support_cells(s.grid);
  const TransitionGraph exact = exact_graph(s.spec, s.grid, s.policy);
  const TrappingReport trap = verify_trapping(exact, Q);
  write_file(dir / "trapping_report.json", trapping_to_json(s.grid, trap));
  if (!trap.is_forward_invariant) {
    out << "trapping region check failed: " << trap.violating.count() << " cells leave the region\n";
    return 1;
  }
  AttractorResult a = global_attractor(exact, Q);
  try {
    a.attraction_steps = attraction_steps(exact, Q, a.cells, s.epsilon);
  } catch (const AnalysisError& e) {
    out << "attraction: " << e.what() << "\n";
  }
  write_file(dir / "attractor.json", attractor_to_json(s.grid, a));
  out << "attractor cells: " << a.cells.count() << "\n";
  out << "components: " << a.components.size() << "\n";
  out << "connected: " << (a.connected ? "true" : "false") << "\n";
  out << "iterations: " << a.iterations << "\n";
  const std::size_t shown = std::min<std::size_t>(a.components.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) {
    out << "  component " << i << ": " << a.components[i].count() << " cells "
        << box_text(cells_bounds(s.grid, a.components[i])) << "\n";
  }
  if (shown < a.components.size()) out << "  ... " << a.components.size() - shown << " more\n";
  return a.attraction_steps ? 0 : 1;
}

// ---- graph

int cmd_graph(const Options& o, std::ostream& out) {
  const Setup s = make_setup(o, 1);
  const Mode mode = parse_mode(o.mode);
  if (mode == Mode::timeN && s.spec.kind != SystemKind::ode) throw InputError("timeN mode needs an ode system");
  if (o.N < 1) throw InputError("--N must be >= 1");
  const auto dir = out_dir(o);
  for (int l = 0; l < s.levels; ++l) {
    const Grid grid = level_grid(s.grid, l);
    const double eps = std::ldexp(s.epsilon, -l);
    LevelParams level{grid, mode == Mode::exact ? 0.0 : eps, mode, o.N, s.spec.metric, std::nullopt};
    const CellSet region = s.spec.support_cells(grid);
    const TransitionGraph g = build_graph(s.spec, level, region, s.policy);
    const SccDecomposition d = scc(g);
    const CellSet cr = chain_recurrent_cells(g, d);
    StreamGraph sg = condensation(g, d);
    const std::string suffix = s.levels > 1 ? "_level" + std::to_string(l) : "";
    write_file(dir / ("stream_graph" + suffix + ".dot"), stream_graph_to_dot(sg));
    write_file(dir / ("stream_graph" + suffix + ".json"), stream_graph_to_json(sg));
    write_file(dir / ("cr_cells" + suffix + ".json"), cells_to_json(grid, cr));
    out << "level " << l << ": cells " << grid.cell_count() << ", epsilon " << format_number(eps) << ", cr cells "
        << cr.count() << ", nodes " << sg.nodes.size() << ", edges " << sg.edges.size() << "\n";
    if (o.links) {
      LinkPolicy lp;
      lp.epsilon = link_epsilon_at(s, l);
      lp.rng_seed = o.seed;
      StreamGraph lg = link_graph(s.spec, grid, s.spec.metric, sg, lp);
      const TransitionGraph exact = exact_graph(s.spec, grid, s.policy);
      CellSet att = grid.empty_set();
      try {
        att = global_attractor(exact, region).cells;
      } catch (const AnalysisError&) {
        // no attractor: every tag stays unknown
      }
      lg = classify_edges(std::move(lg), exact, att);
      write_file(dir / ("link_graph" + suffix + ".dot"), stream_graph_to_dot(lg));
      write_file(dir / ("link_graph" + suffix + ".json"), stream_graph_to_json(lg));
      out << "  link graph: " << lg.edges.size() << " edges at link epsilon " << format_number(lp.epsilon) << "\n";
    }
  }
  return 0;
}

// ---- compare-time1

int cmd_compare_time1(const Options& o, std::ostream& out) {
  const Setup s = make_setup(o, 1);
  const auto dir = out_dir(o);
  for (int n : o.n_list) {
    if (n < 1) throw InputError("--N-list entries must be >= 1");
  }
  const TimeMapReport r = compare_time_maps(s.spec, s.grid, s.epsilon, o.n_list, s.policy);
  write_file(dir / "time_map.json", time_map_to_json(r));
  for (const auto& e : r.entries) {
    out << "N=" << e.N << ": cr cells " << e.cr_cells << ", nodes " << e.nodes << ", edges " << e.edges
        << (e.same_cells && e.same_nodes && e.same_edges ? "  same" : "  DIFFERENT") << "\n";
  }
  return r.all_equal() ? 0 : 1;
}

// ---- sigma

int cmd_sigma(const Options& o, std::ostream& out) {
  const Setup s = make_setup(o, 1);
  if (o.from.empty() || o.to.empty()) throw InputError("sigma needs --from and --to");
  const auto p = parse_point(o.from, s.spec.dimension, "--from");
  const auto q = parse_point(o.to, s.spec.dimension, "--to");
  const auto c1 = s.grid.cell_of(p);
  const auto c2 = s.grid.cell_of(q);
  if (!c1 || !c2) throw InputError("--from and --to must lie in the domain");
  const double budget = o.budget.value_or(s.epsilon);
  if (!(budget >= 0.0)) throw InputError("--budget must be >= 0");
  const auto dir = out_dir(o);
  LevelParams level{s.grid, s.epsilon, Mode::sigma, 1, s.spec.metric, budget};
  const TransitionGraph g = build_graph(s.spec, level, s.spec.support_cells(s.grid), s.policy);
  const std::size_t src[] = {*c1};
  const std::size_t dst[] = {*c2};
  const double d = sigma_distance(g, src, dst);
  const bool ok = sigma_reach(g, *c1, *c2, budget);
  json j;
  j["from_cell"] = *c1;
  j["to_cell"] = *c2;
  j["budget"] = budget;
  j["distance"] = std::isinf(d) ? json(nullptr) : json(d);
  j["reachable"] = ok;
  write_file(dir / "sigma.json", j.dump(2) + "\n");
  out << "sigma distance " << (std::isinf(d) ? std::string("inf") : format_number(d)) << ", budget "
      << format_number(budget) << ": " << (ok ? "reachable" : "not reachable") << "\n";
  return 0;
}

// ---- refine

int cmd_refine(const Options& o, std::ostream& out) {
  const Setup s = make_setup(o, 0);
  const auto dir = out_dir(o);
  const RefinementReport r = run_pipeline(s.spec, s.grid, s.epsilon, s.levels, s.policy);
  write_file(dir / "refinement.json", refinement_to_json(r));
  write_file(dir / "refinement.csv", refinement_to_csv(r));
  for (std::size_t l = 0; l < r.levels.size(); ++l) {
    const auto& rec = r.levels[l];
    out << "level " << l << ": epsilon " << format_number(rec.epsilon) << ", cr cells " << rec.cr_cells
        << ", measure " << format_number(rec.cr_measure) << ", nodes " << rec.nodes << ", edges " << rec.edges
        << ", nesting violations " << rec.nesting_violations << "\n";
  }
  out << "stabilized: " << (r.stabilized ? "true" : "false") << "\n";
  return r.nested() ? 0 : 1;
}

// ---- verify

struct Row {
  std::string preset;
  std::string check;
  std::string status;  // PASS, FAIL, SKIP
  std::string witness;
};

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

void verify_square(const Setup& s, const Options& o, std::vector<Row>& rows) {
  const int l = s.levels - 1;
  const Grid grid = level_grid(s.grid, l);
  const double eps = std::ldexp(s.epsilon, -l);
  const CellSet region = s.spec.support_cells(grid);
  LevelParams level{grid, eps, Mode::chain, 1, s.spec.metric, std::nullopt};
  const TransitionGraph g = build_graph(s.spec, level, region, s.policy);
  const StreamGraph sg = condensation(g, scc(g));
  auto node_at = [&](double x, double y) -> std::optional<std::size_t> {
    const double p[] = {x, y};
    return sg.node_of(*grid.cell_of(p));
  };
  const auto A = node_at(1.0 / 3.0, 0.0), B = node_at(2.0 / 3.0, 0.0), C = node_at(1.0, 0.0);
  const std::string lv = " L" + std::to_string(l);
  if (!A || !B || !C || *A == *B || *B == *C || *A == *C) {
    rows.push_back({s.name, "edge-tags" + lv, "FAIL", "A, B, C are not three distinct nodes"});
    return;
  }
  const TransitionGraph exact = exact_graph(s.spec, grid, s.policy);
  const CellSet att = global_attractor(exact, region).cells;
  LinkPolicy lp;
  lp.epsilon = link_epsilon_at(s, l);
  lp.rng_seed = o.seed;
  const StreamGraph lg = classify_edges(link_graph(s.spec, grid, s.spec.metric, sg, lp), exact, att);
  auto tag_of = [&](std::size_t a, std::size_t b) -> std::string {
    for (const auto& e : lg.edges) {
      if (e.from == a && e.to == b) return tag_name(e.tag);
    }
    return "missing";
  };
  const std::string ab = tag_of(*A, *B), bc = tag_of(*B, *C), ac = tag_of(*A, *C);
  const bool ok = ab == "strong" && bc == "strong" && ac == "weak";
  rows.push_back({s.name, "edge-tags" + lv, pass_fail(ok), "A->B " + ab + ", B->C " + bc + ", A->C " + ac});

  LinkPolicy rp = lp;
  rp.epsilon = 0.125;
  rp.restrict_to = att;
  const auto hit = link_targets(s.spec, grid, s.spec.metric, sg.nodes[*A].cells, {sg.nodes[*C].cells}, rp);
  rows.push_back({s.name, "restricted-link" + lv, pass_fail(!hit[0]),
                  hit[0] ? "A->C certified inside the attractor" : "A->C not_found"});
}

std::vector<Row> verify_preset(const std::string& name, const Options& o) {
  Options po = o;
  po.preset = name;
  po.spec_file.clear();
  po.grid.clear();
  po.epsilon.reset();
  po.levels = 0;
  const Setup s = make_setup(po, 0);
  std::vector<Row> rows;
  const bool ode = s.spec.kind == SystemKind::ode;

  for (int l = 0; l < s.levels; ++l) {
    const Grid grid = level_grid(s.grid, l);
    const double eps = std::ldexp(s.epsilon, -l);
    const std::string lv = " L" + std::to_string(l);
    const CellSet Q = s.spec.support_cells(grid);
    LevelParams level{grid, eps, Mode::chain, 1, s.spec.metric, std::nullopt};
    const RestrictionReport rr = restrict_and_compare(s.spec, grid, Q, level, s.policy);
    std::ostringstream w;
    w << "cr " << rr.cr_full << "/" << rr.cr_restricted << ", nodes " << rr.nodes_full << "/"
      << rr.nodes_restricted << ", edges " << rr.edges_full << "/" << rr.edges_restricted;
    rows.push_back({name, "restriction" + lv, pass_fail(rr.holds()), w.str()});

    if (ode) {
      const TimeMapReport tr = compare_time_maps(s.spec, grid, eps, {1, 2, 3}, s.policy);
      std::ostringstream tw;
      for (const auto& e : tr.entries) tw << (e.N > 1 ? ", " : "") << "N=" << e.N << " cr " << e.cr_cells;
      rows.push_back({name, "time-map" + lv, pass_fail(tr.all_equal()), tw.str()});
    }
  }

  {
    const CellSet Q = s.spec.support_cells(s.grid);
    LevelParams level{s.grid, s.epsilon, Mode::chain, 1, s.spec.metric, std::nullopt};
    const TransitionGraph g = build_graph(s.spec, level, Q, s.policy);
    const StreamGraph sg = condensation(g, scc(g));
    try {
      const AttractorResult a = global_attractor(s.spec, s.grid, Q, s.policy);
      if (!a.connected) {
        rows.push_back({name, "connectedness L0", "SKIP",
                        "attractor has " + std::to_string(a.components.size()) + " components"});
      } else {
        rows.push_back({name, "connectedness L0", pass_fail(sg.weakly_connected()),
                        std::to_string(sg.nodes.size()) + " nodes, " + std::to_string(sg.edges.size()) + " edges"});
      }
    } catch (const AnalysisError& e) {
      rows.push_back({name, "connectedness L0", "SKIP", e.what()});
    }
  }

  {
    LinkPolicy lp;
    lp.rng_seed = o.seed;
    const BracketReport br = bracket(s.spec, s.grid, s.spec.metric, s.epsilon, lp, s.policy);
    const bool ok = br.orbit_in_sigma && br.sigma_in_chain && br.orbit_in_chain && br.link_in_chain;
    rows.push_back({name, "bracket L0", pass_fail(ok),
                    ok ? std::to_string(br.nodes) + " nodes" : br.violations.front()});
  }

  if (s.levels >= 2) {
    const RefinementReport r = run_pipeline(s.spec, s.grid, s.epsilon, s.levels, s.policy);
    std::string w;
    for (const auto& rec : r.levels) w += (w.empty() ? "" : ", ") + std::to_string(rec.nesting_violations);
    rows.push_back({name, "nesting", pass_fail(r.nested()), "violations " + w});
  }

  if (name == "square-semiflow") verify_square(s, o, rows);
  return rows;
}

int cmd_verify(const Options& o, std::ostream& out) {
  if (!o.spec_file.empty()) throw InputError("verify runs presets; --spec is not accepted");
  std::vector<std::string> names;
  if (!o.preset.empty()) {
    preset_info(o.preset);
    names.push_back(o.preset);
  } else {
    for (const auto& p : preset_catalogue()) names.push_back(p.name);
  }
  const auto dir = out_dir(o);
  std::vector<Row> rows;
  for (const auto& n : names) {
    auto r = verify_preset(n, o);
    rows.insert(rows.end(), r.begin(), r.end());
  }
  bool all = true;
  json j = json::array();
  std::size_t w1 = 6, w2 = 5;
  for (const auto& r : rows) {
    w1 = std::max(w1, r.preset.size());
    w2 = std::max(w2, r.check.size());
  }
  for (const auto& r : rows) {
    all = all && r.status != "FAIL";
    j.push_back({{"preset", r.preset}, {"check", r.check}, {"status", r.status}, {"witness", r.witness}});
    out << std::left << std::setw(static_cast<int>(w1) + 2) << r.preset << std::setw(static_cast<int>(w2) + 2)
        << r.check << std::setw(6) << r.status << r.witness << "\n";
  }
  json doc;
  doc["rows"] = j;
  doc["all_pass"] = all;
  write_file(dir / "verify.json", doc.dump(2) + "\n");
  return all ? 0 : 1;
}

int cmd_presets(std::ostream& out) {
  for (const auto& p : preset_catalogue()) {
    std::string grid;
    for (auto n : p.grid) grid += (grid.empty() ? "" : "x") + std::to_string(n);
    out << std::left << std::setw(22) << p.name << std::setw(10) << grid << "levels " << p.levels << "  "
        << p.description << "\n";
  }
  out << "(gs-truncated-<k> accepts any k in 1..20)\n";
  return 0;
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--preset", o.preset, "Shipped preset name");
  sub->add_option("--spec", o.spec_file, "System spec JSON file");
  sub->add_option("--grid", o.grid, "Subdivisions, n or n,n,...");
  sub->add_option("--epsilon", o.epsilon, "Chain epsilon (default 2h)");
  sub->add_option("--levels", o.levels, "Refinement levels");
  sub->add_option("--metric", o.metric, "euclidean | weighted:w1,w2,... | hyperbolic | cantor_stretch");
  sub->add_option("--seed", o.seed, "Seed for link sampling");
  sub->add_option("--threads", o.threads, "Worker cap");
  sub->add_option("--out", o.out, "Output directory");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Chain-recurrence and stream-graph analysis on uniform grids", "chainscape"};
  app.require_subcommand(1);
  auto* attractor = app.add_subcommand("attractor", "Global attractor inside the phase space");
  auto* graph = app.add_subcommand("graph", "Stream graph of the chain map");
  auto* verify = app.add_subcommand("verify", "Theorem checks over shipped presets");
  auto* time1 = app.add_subcommand("compare-time1", "timeN chain graphs against the time-1 map");
  auto* sigma = app.add_subcommand("sigma", "Strong-chain reach between two points");
  auto* refine = app.add_subcommand("refine", "Multi-level refinement pipeline");
  auto* presets = app.add_subcommand("presets", "List shipped presets");
  for (auto* sub : {attractor, graph, verify, time1, sigma, refine}) add_common(sub, o);
  graph->add_option("--mode", o.mode, "chain | exact | sigma | timeN");
  graph->add_option("--N", o.N, "Time multiple for timeN");
  graph->add_flag("--links", o.links, "Also write the link-level graph with edge tags");
  time1->add_option("--N-list", o.n_list, "Time multiples to compare")->delimiter(',');
  sigma->add_option("--from", o.from, "Source point x[,y...]");
  sigma->add_option("--to", o.to, "Target point x[,y...]");
  sigma->add_option("--budget", o.budget, "Jump budget (default epsilon)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (o.threads < 0) throw InputError("--threads must be >= 0");
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    set_thread_count(o.threads > 0 ? o.threads : static_cast<int>(hw));
    if (*presets) return cmd_presets(out);
    if (*attractor) return cmd_attractor(o, out);
    if (*graph) return cmd_graph(o, out);
    if (*verify) return cmd_verify(o, out);
    if (*time1) return cmd_compare_time1(o, out);
    if (*sigma) return cmd_sigma(o, out);
    if (*refine) return cmd_refine(o, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const AnalysisError& e) {
    err << "analysis failed: " << e.what() << "\n";
    return 1;
  } catch (const EvalError& e) {
    err << "evaluation failed: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace chainscape::cli

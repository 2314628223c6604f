#include "chainscape/serialize.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "chainscape/error.hpp"

namespace chainscape {

using nlohmann::json;

std::string format_number(double x) { return json(x).dump(); }

namespace {

json box_json(const Box& b) { return {{"lo", b.lo}, {"hi", b.hi}}; }

json level_json(const StreamGraph& sg) {
  return {{"subdivisions", sg.subdivisions},
          {"domain", box_json(sg.domain)},
          {"epsilon", sg.epsilon},
          {"mode", mode_name(sg.mode)},
          {"N", sg.N},
          {"metric", sg.metric},
          {"closure", sg.closure}};
}

std::string bounds_text(const Box& b) {
  std::string s;
  for (std::size_t a = 0; a < b.lo.size(); ++a) {
    if (a) s += " x ";
    s += "[" + format_number(b.lo[a]) + ", " + format_number(b.hi[a]) + "]";
  }
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string stream_graph_to_dot(const StreamGraph& sg) {
  std::ostringstream os;
  os << "digraph stream_graph {\n";
  os << "  graph [mode=" << quote(mode_name(sg.mode)) << ", epsilon=" << quote(format_number(sg.epsilon))
     << ", N=" << sg.N << ", metric=" << quote(sg.metric) << ", closure=" << quote(sg.closure) << "];\n";
  os << "  node [shape=box];\n";
  for (const auto& n : sg.nodes) {
    os << "  n" << n.id << " [label=" << quote(std::to_string(n.id) + "\n" + std::to_string(n.cells.size()) +
                                               " cells\n" + bounds_text(n.bounds))
       << ", cells=" << n.cells.size() << "];\n";
  }
  const auto red = sg.reduction();
  for (const auto& e : sg.edges) {
    const bool reduced = std::find(red.begin(), red.end(), e) != red.end();
    os << "  n" << e.from << " -> n" << e.to << " [tag=" << tag_name(e.tag)
       << ", reduced=" << (reduced ? "true" : "false");
    if (e.tag == EdgeTag::weak) os << ", style=dashed";
    if (!reduced) os << ", color=gray";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string stream_graph_to_json(const StreamGraph& sg) {
  json j;
  j["level"] = level_json(sg);
  json nodes = json::array();
  for (const auto& n : sg.nodes) {
    nodes.push_back({{"id", n.id}, {"cell_count", n.cells.size()}, {"bounds", box_json(n.bounds)}, {"cells", n.cells}});
  }
  j["nodes"] = nodes;
  const auto red = sg.reduction();
  json edges = json::array();
  for (const auto& e : sg.edges) {
    const bool reduced = std::find(red.begin(), red.end(), e) != red.end();
    edges.push_back({{"from", e.from}, {"to", e.to}, {"tag", tag_name(e.tag)}, {"reduced", reduced}});
  }
  j["edges"] = edges;
  return j.dump(2) + "\n";
}

std::string cells_to_json(const Grid& grid, const CellSet& cells) {
  json j;
  j["grid"] = {{"lo", grid.domain().lo}, {"hi", grid.domain().hi}, {"subdivisions", grid.subdivisions()}};
  j["cell_count"] = cells.count();
  j["cells"] = cells.indices();
  return j.dump(2) + "\n";
}

std::string cells_to_rle(const Grid& grid, const CellSet& cells) {
  std::ostringstream os;
  os << "chainscape-cells 1\n";
  os << "subdivisions";
  for (auto n : grid.subdivisions()) os << ' ' << n;
  os << "\nlo";
  for (double v : grid.domain().lo) os << ' ' << format_number(v);
  os << "\nhi";
  for (double v : grid.domain().hi) os << ' ' << format_number(v);
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  cells.for_each([&](std::size_t c) {
    if (!runs.empty() && runs.back().first + runs.back().second == c) {
      ++runs.back().second;
    } else {
      runs.emplace_back(c, 1);
    }
  });
  os << "\nruns " << runs.size() << '\n';
  for (auto [s, l] : runs) os << s << ' ' << l << '\n';
  return os.str();
}

RleCells cells_from_rle(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line, word;
  auto fail = [](const std::string& msg) -> InputError { return InputError("bad cell file: " + msg); };
  if (!std::getline(is, line) || line != "chainscape-cells 1") throw fail("missing header");
  std::vector<std::size_t> n;
  Box box;
  for (const char* key : {"subdivisions", "lo", "hi"}) {
    if (!std::getline(is, line)) throw fail("truncated");
    std::istringstream ls(line);
    ls >> word;
    if (word != key) throw fail(std::string("expected ") + key);
    double v;
    while (ls >> v) {
      if (word == "subdivisions") n.push_back(static_cast<std::size_t>(v));
      else if (word == "lo") box.lo.push_back(v);
      else box.hi.push_back(v);
    }
  }
  Grid grid(box, n);
  CellSet cells = grid.empty_set();
  std::size_t count = 0;
  if (!(is >> word >> count) || word != "runs") throw fail("expected runs");
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t s, l;
    if (!(is >> s >> l)) throw fail("truncated run list");
    if (s + l > grid.cell_count()) throw fail("run out of range");
    for (std::size_t c = s; c < s + l; ++c) cells.insert(c);
  }
  return {std::move(grid), std::move(cells)};
}

}  // namespace chainscape

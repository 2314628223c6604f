#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "chainscape/grid.hpp"
#include "chainscape/transition.hpp"

namespace chainscape {

// Shortest round-trip decimal form of a double, as used in every artifact.
std::string format_number(double x);

std::string stream_graph_to_dot(const StreamGraph& sg);
std::string stream_graph_to_json(const StreamGraph& sg);

// {"grid": {...}, "cells": [...]}
std::string cells_to_json(const Grid& grid, const CellSet& cells);

// Plain-text run-length form, one "start length" run per line.
std::string cells_to_rle(const Grid& grid, const CellSet& cells);
struct RleCells {
  Grid grid;
  CellSet cells;
};
RleCells cells_from_rle(std::string_view text);

// Minimal reader for the DOT language: graph/digraph with node, edge and
// attribute statements. Subgraphs and ports are rejected.
struct DotGraph {
  bool directed = true;
  bool strict = false;
  std::string name;
  std::map<std::string, std::string> graph_attrs;
  struct Node {
    std::string id;
    std::map<std::string, std::string> attrs;
  };
  struct Edge {
    std::string from;
    std::string to;
    std::map<std::string, std::string> attrs;
  };
  std::vector<Node> nodes;
  std::vector<Edge> edges;
};
DotGraph parse_dot(std::string_view text);

}  // namespace chainscape

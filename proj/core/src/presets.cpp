#include "chainscape/presets.hpp"

#include <algorithm>
#include <cmath>

#include "chainscape/error.hpp"

namespace chainscape {

namespace {

SystemSpec expression_system(std::string name, SystemKind kind, Box domain, const std::vector<std::string>& exprs) {
  SystemSpec s;
  s.name = std::move(name);
  s.kind = kind;
  s.dimension = domain.dimension();
  for (const auto& e : exprs) s.expressions.push_back(parse_expr(e, static_cast<int>(s.dimension)));
  s.domain = std::move(domain);
  return s;
}

// Square semiflow. Bottom edge: A = 1/3 repelling, B = 2/3 attracting,
// C = (1,0) attracting; right edge fixed. Above a thin strip points drift
// right at speed <= c and sink slowly, so orbits near A reach the right edge
// only off the bottom. The sinking keeps cell images from creeping upward.
constexpr double kA = 1.0 / 3.0, kB = 2.0 / 3.0, kC = 0.1, kK = 1.0;
constexpr double kYb = 1.0 / 32.0, kYc = 1.0 / 16.0, kLambda = 0.1, kFall = 0.04;

double bottom_drift(double x) {
  if (x < kA) return std::min(kC, kA - x);
  if (x < kB) return std::min({kK * (x - kA), kC, kB - x});
  return std::max(0.0, std::min({kK * (x - kB), kC, 1.0 - x}));
}

double top_drift(double x) { return std::max(0.0, std::min(kC, 1.0 - x)); }

void square_map(std::span<const double> p, std::span<double> out) {
  const double x = p[0], y = p[1];
  const double psi = std::clamp((y - kYb) / (kYc - kYb), 0.0, 1.0);
  out[0] = std::min(1.0, x + (1.0 - psi) * bottom_drift(x) + psi * top_drift(x));
  double v;
  if (y <= kYb) v = kLambda * y;
  else if (y < kYc) v = kLambda * kYb + (y - kYb) * (kYc - kFall - kLambda * kYb) / (kYc - kYb);
  else v = y - kFall;
  // pull-down fades out toward the fixed right edge
  const double chi = std::clamp((1.0 - x) / 0.1, 0.0, 1.0);
  out[1] = y - chi * (y - v);
}

// Cantor set fixed; a gap (l, r) point moves right by half its distance to
// the nearer end, so it creeps toward r.
void cantor_map(std::span<const double> p, std::span<double> out) {
  double l = 0.0, r = 0.0;
  const double x = std::clamp(p[0], 0.0, 1.0);
  out[0] = cantor::gap_of(x, l, r) ? x + 0.5 * std::min(x - l, r - x) : x;
}

// Truncated Gobbino-Sardella space: base points P_n on the x axis with
// P_n = 2^(n-1) for n < 0 and 3/2 - 2^-n for n >= 0, the equal sides of the
// triangles over [P_n, P_n+1] with height 2^-n for n < k, and a tail block
// over [P_k, 3/2] absorbing the rest.
double gs_point(int n) { return n < 0 ? std::ldexp(1.0, n - 1) : 1.5 - std::ldexp(1.0, -n); }

void gs_map(std::span<const double> p, std::span<double> out) {
  const double x = p[0];
  out[0] = x <= 0.5 ? 2.0 * x : 0.75 + 0.5 * x;
  out[1] = 0.5 * p[1];
}

// Cells whose closed box holds p.
void touching(const Grid& grid, double x, double y, CellSet& out) {
  const auto& dom = grid.domain();
  if (x < dom.lo[0] || x > dom.hi[0] || y < dom.lo[1] || y > dom.hi[1]) return;
  std::size_t ix[2], iy[2], nx = 0, ny = 0;
  auto collect = [&](std::size_t axis, double v, std::size_t* idx, std::size_t& n) {
    const std::size_t i = grid.axis_cell(axis, v);
    idx[n++] = i;
    if (i > 0 && v == grid.edge(axis, i)) idx[n++] = i - 1;
    else if (i + 1 < grid.subdivisions()[axis] && v == grid.edge(axis, i + 1)) idx[n++] = i + 1;
  };
  collect(0, x, ix, nx);
  collect(1, y, iy, ny);
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      const std::size_t idx[2] = {ix[a], iy[b]};
      out.insert(grid.flat_index(idx));
    }
  }
}

void segment(const Grid& grid, double x0, double y0, double x1, double y1, CellSet& out) {
  const double step = 0.25 * std::min(grid.width(0), grid.width(1));
  const auto n = static_cast<std::size_t>(std::ceil(std::hypot(x1 - x0, y1 - y0) / step)) + 1;
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n);
    touching(grid, x0 + t * (x1 - x0), y0 + t * (y1 - y0), out);
  }
}

CellSet gs_support(const Grid& grid, int k) {
  CellSet s = grid.empty_set();
  touching(grid, 0.0, 0.0, s);
  for (int n = -1; gs_point(n) > 0.25 * grid.width(0); --n) touching(grid, gs_point(n), 0.0, s);
  for (int n = 0; n <= k; ++n) touching(grid, gs_point(n), 0.0, s);
  for (int n = 0; n < k; ++n) {
    const double a = gs_point(n), b = gs_point(n + 1), h = std::ldexp(1.0, -n);
    segment(grid, a, 0.0, 0.5 * (a + b), h, s);
    segment(grid, 0.5 * (a + b), h, b, 0.0, s);
  }
  const double x0 = gs_point(k), top = std::ldexp(1.0, -k);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Box b = grid.cell_box(c);
    if (b.hi[0] >= x0 && b.lo[1] <= top) s.insert(c);
  }
  return s;
}

std::optional<int> gs_depth(const std::string& name) {
  const std::string prefix = "gs-truncated-";
  if (name.rfind(prefix, 0) != 0) return std::nullopt;
  const std::string digits = name.substr(prefix.size());
  if (digits.empty() || digits.size() > 2 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
    throw InputError("bad gs depth in preset name: " + name);
  }
  const int k = std::stoi(digits);
  if (k < 1 || k > 20) throw InputError("gs depth must lie in 1..20: " + name);
  return k;
}

}  // namespace

const std::vector<PresetInfo>& preset_catalogue() {
  static const std::vector<PresetInfo> presets = {
      {"ode-1mx2", "x' = 1 - x^2 on [-1, 1], time-2 map", {64}, 3, std::nullopt, std::nullopt, std::nullopt},
      {"ode-msinpix", "x' = -sin(pi x) on [0, 1], time-1 map", {256}, 2, std::nullopt, std::nullopt, std::nullopt},
      {"map-logistic", "x -> 4x(1 - x) on [0, 1]", {256}, 3, std::nullopt, std::nullopt, std::nullopt},
      {"square-semiflow", "unit square, repeller A and attractors B, C on the bottom edge, fixed right edge",
       {64, 64}, 2, std::nullopt, 0.1, std::nullopt},
      // At 2h a ring of self-looping cells survives around (3/2, 0): the sink
      // contracts by exactly 1/2, so the chain-reach band is one cell wide.
      // Three x-cells puts the lattice outside that band on 2:1 grids.
      {"gs-truncated-8", "Gobbino-Sardella space truncated after 8 triangles", {512, 256}, 1, std::nullopt,
       std::nullopt, 3.0},
      {"map-cantor-fixed", "ternary Cantor set fixed, gap points creep right", {729}, 2, std::nullopt,
       std::nullopt, std::nullopt},
      {"map-halfplane-shift", "(x, y) -> (x + 1, y) on [0, 20] x [1, 12]", {80, 44}, 2, 0.2, std::nullopt, std::nullopt},
  };
  return presets;
}

PresetInfo preset_info(const std::string& name) {
  for (const auto& p : preset_catalogue()) {
    if (p.name == name) return p;
  }
  if (auto k = gs_depth(name)) {
    PresetInfo p = preset_info("gs-truncated-8");
    p.name = name;
    p.description = "Gobbino-Sardella space truncated after " + std::to_string(*k) + " triangles";
    return p;
  }
  throw InputError("unknown preset: " + name);
}

SystemSpec make_preset(const std::string& name) {
  preset_info(name);  // validates the name
  if (name == "ode-1mx2") {
    auto s = expression_system(name, SystemKind::ode, Box{{-1.0}, {1.0}}, {"1 - x0^2"});
    s.time_step = 2.0;  // at T = 1 the time-N maps lose one fringe cell near x = 1
    return s;
  }
  if (name == "ode-msinpix") {
    return expression_system(name, SystemKind::ode, Box{{0.0}, {1.0}}, {"-sin(pi*x0)"});
  }
  if (name == "map-logistic") {
    return expression_system(name, SystemKind::map, Box{{0.0}, {1.0}}, {"4*x0*(1 - x0)"});
  }
  if (name == "map-halfplane-shift") {
    return expression_system(name, SystemKind::map, Box{{0.0, 1.0}, {20.0, 12.0}}, {"x0 + 1", "x1"});
  }
  SystemSpec s;
  s.name = name;
  s.kind = SystemKind::map;
  if (name == "square-semiflow") {
    s.dimension = 2;
    s.domain = Box{{0.0, 0.0}, {1.0, 1.0}};
    s.native = square_map;
  } else if (name == "map-cantor-fixed") {
    s.dimension = 1;
    s.domain = Box{{0.0}, {1.0}};
    s.native = cantor_map;
    ImagePolicy p;
    p.samples_per_axis = 5;
    p.bloat = 0.0;
    p.half_open = true;
    s.image_policy = p;
  } else {
    const int k = *gs_depth(name);
    s.dimension = 2;
    s.domain = Box{{0.0, 0.0}, {1.5, 1.0}};
    s.native = gs_map;
    s.support = [k](const Grid& g) { return gs_support(g, k); };
    ImagePolicy p;
    p.samples_per_axis = 5;
    p.bloat_cells = 0.5;
    s.image_policy = p;
  }
  s.validate();
  return s;
}

double default_epsilon(const Grid& grid) { return 2.0 * grid.max_width(); }

double preset_epsilon(const PresetInfo& info, const Grid& grid) {
  if (info.epsilon) return *info.epsilon;
  if (info.epsilon_cells) return *info.epsilon_cells * grid.width(0);
  return default_epsilon(grid);
}

}  // namespace chainscape

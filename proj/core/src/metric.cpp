#include "chainscape/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "chainscape/error.hpp"

namespace chainscape {

namespace cantor {

double stretch(double x) {
  if (!(x > 0.0) || !(x < 1.0)) return x;
  double a = 0.0, len = 1.0;  // current Cantor interval
  double A = 0.0, M = 1.0;    // its image
  double g = 0.25;            // gap removed at this level of the target set
  for (int depth = 0; depth < 64; ++depth) {
    const double third = len / 3.0;
    const double half = 0.5 * (M - g);
    if (x < a + third) {
      len = third;
      M = half;
    } else if (x <= a + 2.0 * third) {
      const double t = (x - (a + third)) / third;
      return A + half + t * g;
    } else {
      a += 2.0 * third;
      A += half + g;
      len = third;
      M = half;
    }
    g *= 0.25;
  }
  return A + (x - a) / len * M;
}

double unstretch(double u) {
  if (!(u > 0.0) || !(u < 1.0)) return u;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (stretch(mid) < u) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool gap_of(double x, double& l, double& r) {
  if (!(x > 0.0) || !(x < 1.0)) return false;
  double a = 0.0, len = 1.0;
  for (int depth = 0; depth < 64; ++depth) {
    const double third = len / 3.0;
    if (x < a + third) {
      len = third;
    } else if (x <= a + 2.0 * third) {
      l = a + third;
      r = a + 2.0 * third;
      return x > l && x < r;
    } else {
      a += 2.0 * third;
      len = third;
    }
  }
  return false;
}

}  // namespace cantor

namespace {

// min over Y >= max(y1, y2) of 2Y - y1 - y2 + dx / Y
double hyperbolic_dist(double dx, double y1, double y2) {
  dx = std::abs(dx);
  y1 = std::max(y1, 1e-12);
  y2 = std::max(y2, 1e-12);
  const double ymax = std::max(y1, y2);
  const double Y = std::max(ymax, std::sqrt(0.5 * dx));
  return 2.0 * Y - y1 - y2 + dx / Y;
}

double hyperbolic_to_box(double px, double py, double x0, double x1, double y0, double y1) {
  const double dx = px < x0 ? x0 - px : (px > x1 ? px - x1 : 0.0);
  py = std::max(py, 1e-12);
  double best = std::numeric_limits<double>::infinity();
  // Target point on the box at height Y = qy, reached from below or level.
  const double lo = std::max(py, y0);
  if (lo <= y1) {
    const double Y = std::clamp(std::sqrt(dx), lo, y1);
    best = std::min(best, Y - py + dx / Y);
  }
  // Path climbing above the box top and descending onto it.
  const double Y = std::max(std::max(py, y1), std::sqrt(0.5 * dx));
  best = std::min(best, 2.0 * Y - py - y1 + dx / Y);
  return best;
}

}  // namespace

Metric Metric::weighted(std::vector<double> w) {
  if (w.empty()) throw InputError("weighted metric needs at least one weight");
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InputError("metric weights must be positive");
  }
  Metric m;
  m.kind_ = MetricKind::weighted;
  m.w_ = std::move(w);
  return m;
}

Metric Metric::hyperbolic_halfplane() {
  Metric m;
  m.kind_ = MetricKind::hyperbolic_halfplane;
  return m;
}

Metric Metric::cantor_stretch() {
  Metric m;
  m.kind_ = MetricKind::cantor_stretch;
  return m;
}

Metric Metric::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  if (kind == "euclidean") return euclidean();
  if (kind == "hyperbolic" || kind == "hyperbolic_halfplane") return hyperbolic_halfplane();
  if (kind == "cantor_stretch") return cantor_stretch();
  if (kind == "weighted") {
    if (colon == std::string::npos) throw InputError("weighted metric needs weights, e.g. weighted:1,2");
    std::vector<double> w;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        w.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw InputError("bad metric weight '" + item + "'");
      }
    }
    return weighted(std::move(w));
  }
  throw InputError("unknown metric kind '" + kind + "'");
}

std::string Metric::name() const {
  switch (kind_) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::hyperbolic_halfplane: return "hyperbolic_halfplane";
    case MetricKind::cantor_stretch: return "cantor_stretch";
    case MetricKind::weighted: {
      std::ostringstream os;
      os << "weighted:";
      for (std::size_t i = 0; i < w_.size(); ++i) os << (i ? "," : "") << w_[i];
      return os.str();
    }
  }
  return "euclidean";
}

void Metric::validate_for(const Box& domain) const {
  if (kind_ == MetricKind::weighted && w_.size() != domain.dimension()) {
    throw InputError("weighted metric needs one weight per axis");
  }
  if (kind_ == MetricKind::hyperbolic_halfplane) {
    if (domain.dimension() != 2) throw InputError("hyperbolic_halfplane metric requires dimension 2");
    if (domain.lo[1] < 1.0) throw InputError("hyperbolic_halfplane metric requires domain lo[1] >= 1");
  }
}

double Metric::distance(std::span<const double> p, std::span<const double> q) const {
  if (p.size() != q.size()) throw InputError("point dimension mismatch");
  if (kind_ == MetricKind::hyperbolic_halfplane) {
    if (p.size() != 2) throw InputError("hyperbolic_halfplane metric requires dimension 2");
    if (p[1] < 1.0 || q[1] < 1.0) throw InputError("hyperbolic_halfplane metric requires y >= 1");
  }
  if (kind_ == MetricKind::weighted && w_.size() != p.size()) {
    throw InputError("weighted metric needs one weight per axis");
  }
  return raw_distance(p, q);
}

double Metric::raw_distance(std::span<const double> p, std::span<const double> q) const {
  switch (kind_) {
    case MetricKind::hyperbolic_halfplane:
      return hyperbolic_dist(p[0] - q[0], p[1], q[1]);
    case MetricKind::weighted: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = w_[i] * (p[i] - q[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::cantor_stretch: {
      double s = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = cantor::stretch(p[i]) - cantor::stretch(q[i]);
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::euclidean:
      break;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p[i] - q[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double Metric::distance_to_box(std::span<const double> p, std::span<const double> lo,
                               std::span<const double> hi) const {
  switch (kind_) {
    case MetricKind::hyperbolic_halfplane:
      return hyperbolic_to_box(p[0], p[1], lo[0], hi[0], lo[1], hi[1]);
    case MetricKind::weighted:
    case MetricKind::euclidean:
    case MetricKind::cantor_stretch:
      break;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double x = p[i], a = lo[i], b = hi[i];
    if (kind_ == MetricKind::cantor_stretch) {
      x = cantor::stretch(x);
      a = cantor::stretch(a);
      b = cantor::stretch(b);
    }
    double d = x < a ? a - x : (x > b ? x - b : 0.0);
    if (kind_ == MetricKind::weighted) d *= w_[i];
    s += d * d;
  }
  return std::sqrt(s);
}

Box Metric::ball_bounds(std::span<const double> p, double r) const {
  Box b;
  b.lo.resize(p.size());
  b.hi.resize(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    double reach = r;
    if (kind_ == MetricKind::weighted) reach = r / w_[i];
    b.lo[i] = p[i] - reach;
    b.hi[i] = p[i] + reach;
  }
  if (kind_ == MetricKind::hyperbolic_halfplane) {
    // Any path of length r stays below y + r, where horizontal speed is at
    // most y + r per unit length.
    const double reach = r * (std::max(p[1], 1e-12) + r);
    b.lo[0] = p[0] - reach;
    b.hi[0] = p[0] + reach;
  } else if (kind_ == MetricKind::cantor_stretch) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double u = cantor::stretch(p[i]);
      b.lo[i] = cantor::unstretch(u - r);
      b.hi[i] = cantor::unstretch(u + r);
      // bisection slack
      b.lo[i] -= 1e-12;
      b.hi[i] += 1e-12;
    }
  }
  return b;
}

double Metric::diagonal(std::span<const double> lo, std::span<const double> hi) const {
  return raw_distance(lo, hi);
}

double metric_dist(const Metric& metric, std::span<const double> p, std::span<const double> q) {
  return metric.distance(p, q);
}

namespace {
constexpr std::size_t kMaxDim = 8;
}

void ball_cells_into(const Grid& grid, const Metric& metric, std::span<const double> p, double r,
                     std::vector<std::size_t>& out) {
  const std::size_t d = grid.dimension();
  if (p.size() != d) throw InputError("point dimension does not match grid");
  if (!(r >= 0.0)) throw InputError("ball radius must be nonnegative");
  if (d > kMaxDim) throw InputError("dimension above 8 is not supported");
  if (r == 0.0) {
    if (auto c = grid.cell_of(p)) out.push_back(*c);
    return;
  }
  const Box& dom = grid.domain();
  const Box bb = metric.ball_bounds(p, r);
  std::array<std::size_t, kMaxDim> first{}, last{}, idx{};
  for (std::size_t a = 0; a < d; ++a) {
    if (bb.hi[a] < dom.lo[a] || bb.lo[a] > dom.hi[a]) return;
    const std::size_t n = grid.subdivisions()[a];
    std::size_t i0 = grid.axis_cell(a, std::max(bb.lo[a], dom.lo[a]));
    std::size_t i1 = grid.axis_cell(a, std::min(bb.hi[a], dom.hi[a]));
    first[a] = i0 > 0 ? i0 - 1 : 0;
    last[a] = std::min(i1 + 1, n - 1);
    idx[a] = first[a];
  }
  const double tol = 1e-12 * std::max(1.0, r);
  std::array<double, kMaxDim> lo{}, hi{};
  while (true) {
    std::size_t c = 0, stride = 1;
    for (std::size_t a = 0; a < d; ++a) {
      lo[a] = grid.edge(a, idx[a]);
      hi[a] = grid.edge(a, idx[a] + 1);
      c += idx[a] * stride;
      stride *= grid.subdivisions()[a];
    }
    if (metric.distance_to_box(p, std::span(lo.data(), d), std::span(hi.data(), d)) <= r + tol) {
      out.push_back(c);
    }
    std::size_t a = 0;
    while (a < d && idx[a] == last[a]) {
      idx[a] = first[a];
      ++a;
    }
    if (a == d) break;
    ++idx[a];
  }
}

CellSet ball_cells(const Grid& grid, const Metric& metric, std::span<const double> p, double r) {
  std::vector<std::size_t> cells;
  ball_cells_into(grid, metric, p, r, cells);
  CellSet s = grid.empty_set();
  for (std::size_t c : cells) s.insert(c);
  return s;
}

}  // namespace chainscape

#include <gtest/gtest.h>

#include <cmath>

#include "chainscape/error.hpp"
#include "chainscape/expr.hpp"
#include "chainscape/image.hpp"
#include "chainscape/presets.hpp"
#include "chainscape/system.hpp"
#include "oracles.hpp"

using namespace chainscape;

namespace {

SystemSpec map1(const std::string& expr) {
  return spec_from_json(R"({"kind":"map","dimension":1,"expressions":[")" + expr +
                        R"("],"domain":{"lo":[0],"hi":[1]}})");
}

}  // namespace

TEST(Expr, Examples) {
  const double half[] = {0.5};
  EXPECT_DOUBLE_EQ(parse_expr("4*x0*(1-x0)").eval(half), 1.0);
  EXPECT_NEAR(parse_expr("-sin(pi*x0)").eval(half), -1.0, 1e-15);
  try {
    parse_expr("x0 +");
    FAIL() << "no error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 4u);
  }
}

TEST(Expr, PrecedenceAndFunctions) {
  const double x[] = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(parse_expr("1 + 2*3^2").eval(x), 19.0);
  EXPECT_DOUBLE_EQ(parse_expr("-x0^2").eval(x), -4.0);
  EXPECT_DOUBLE_EQ(parse_expr("2^3^2").eval(x), 512.0);
  EXPECT_DOUBLE_EQ(parse_expr("min(x0, x1) + max(x0, x1)").eval(x), 5.0);
  EXPECT_DOUBLE_EQ(parse_expr("abs(x0 - x1) * sqrt(x1 + 1)").eval(x), 2.0);
  EXPECT_NEAR(parse_expr("exp(0) + cos(0)").eval(x), 2.0, 1e-15);
}

TEST(Expr, Errors) {
  EXPECT_THROW(parse_expr("x2", 2), ParseError);
  EXPECT_THROW(parse_expr("foo(1)"), ParseError);
  EXPECT_THROW(parse_expr("(1 + 2"), ParseError);
  EXPECT_THROW(parse_expr(""), ParseError);
  const double x[] = {0.0};
  EXPECT_THROW(parse_expr("1/x0").eval(x), EvalError);
  EXPECT_THROW(parse_expr("sqrt(x0 - 1)").eval(x), EvalError);
}

TEST(TimeMap, LogisticAndSemigroup) {
  const SystemSpec s = make_preset("map-logistic");
  const double p[] = {0.5};
  EXPECT_DOUBLE_EQ(time_t_map(s, 1, p)[0], 1.0);
  const double q[] = {0.3};
  const Point once = time_t_map(s, 1, q);
  EXPECT_DOUBLE_EQ(time_t_map(s, 2, q)[0], time_t_map(s, 1, once)[0]);
}

TEST(TimeMap, OdeMatchesClosedFormAndFineIntegration) {
  const SystemSpec s = spec_from_json(
      R"({"kind":"ode","dimension":1,"expressions":["1 - x0^2"],"domain":{"lo":[-1],"hi":[1]},"time_step":1})");
  const double p[] = {0.0};
  const double got = time_t_map(s, 1, p)[0];
  EXPECT_NEAR(got, std::tanh(1.0), 1e-6);
  const auto fine = oracle::rk4([](const std::vector<double>& x, std::vector<double>& d) { d[0] = 1 - x[0] * x[0]; },
                                {0.0}, 1.0, 10000);
  EXPECT_NEAR(got, fine[0], 1e-6);
  // semigroup for the flow
  const Point one = time_t_map(s, 1, p);
  EXPECT_NEAR(time_t_map(s, 2, p)[0], time_t_map(s, 1, one)[0], 1e-12);
}

TEST(TimeMap, MsinpixAgainstFineIntegration) {
  const SystemSpec s = make_preset("ode-msinpix");
  for (double x0 : {0.05, 0.3, 0.5, 0.77, 0.99}) {
    const double p[] = {x0};
    const auto fine = oracle::rk4(
        [](const std::vector<double>& x, std::vector<double>& d) { d[0] = -std::sin(M_PI * x[0]); }, {x0}, 1.0, 10000);
    EXPECT_NEAR(time_t_map(s, 1, p)[0], fine[0], 1e-6) << x0;
  }
}

TEST(Spec, JsonRoundTripAndErrors) {
  const SystemSpec s = spec_from_json(
      R"({"name":"h","kind":"map","dimension":2,"expressions":["x0 + 1","x1"],
          "domain":{"lo":[0,1],"hi":[20,12]},"metric":{"kind":"hyperbolic"}})");
  EXPECT_EQ(s.metric.kind(), MetricKind::hyperbolic_halfplane);
  const SystemSpec t = spec_from_json(spec_to_json(s));
  EXPECT_EQ(t.name, "h");
  EXPECT_EQ(t.metric, s.metric);
  EXPECT_EQ(t.domain.hi, s.domain.hi);
  try {
    spec_from_json(R"({"kind": "map", )");
    FAIL() << "no error";
  } catch (const InputError& e) {
    EXPECT_NE(e.offset(), InputError::npos);
  }
  EXPECT_THROW(spec_from_json(R"({"kind":"map","dimension":1,"expressions":["x1"],"domain":{"lo":[0],"hi":[1]}})"),
               InputError);
  EXPECT_THROW(spec_from_json(R"({"kind":"flow","dimension":1,"expressions":["x0"],"domain":{"lo":[0],"hi":[1]}})"),
               InputError);
  EXPECT_THROW(spec_from_json(R"({"dimension":1,"expressions":["x0"],"domain":{"lo":[0],"hi":[1]},"extra":1})"),
               InputError);
}

TEST(CellImage, ConstantMap) {
  const SystemSpec s = map1("0.3");
  const Grid g(s.domain, {10});
  ImagePolicy p;
  p.bloat = 0.0;
  for (std::size_t c = 0; c < 10; ++c) {
    EXPECT_EQ(cell_image(s, g, c, p, 0.0).indices(), (std::vector<std::size_t>{3}));
  }
}

TEST(CellImage, IdentityCornersReachNeighbours) {
  const SystemSpec s = map1("x0");
  const Grid g(s.domain, {8});
  ImagePolicy p;
  p.bloat = 0.0;
  p.samples_per_axis = 2;
  // half-open cells: the low corner stays home, the high corner lands next door
  EXPECT_EQ(cell_image(s, g, 3, p, 0.0).indices(), (std::vector<std::size_t>{3, 4}));
  EXPECT_EQ(cell_image(s, g, 0, p, 0.0).indices(), (std::vector<std::size_t>{0, 1}));
}

TEST(CellImage, LogisticCoversBruteForceImage) {
  const SystemSpec s = make_preset("map-logistic");
  const Grid g(s.domain, {64});
  const double half[] = {0.5};
  const std::size_t c = *g.cell_of(half);
  const CellSet img = cell_image(s, g, c, s.default_policy(), 0.0);
  const Box b = g.cell_box(c);
  for (int i = 0; i <= 1000; ++i) {
    const double x = b.lo[0] + (b.hi[0] - b.lo[0]) * i / 1000.0;
    const double y[] = {4 * x * (1 - x)};
    EXPECT_TRUE(img.contains(*g.cell_of(y))) << x;
  }
  const double one[] = {1.0};
  EXPECT_TRUE(img.contains(*g.cell_of(one)));
}

TEST(Lipschitz, Examples) {
  const Grid g(Box{{0.0}, {1.0}}, {64});
  EXPECT_NEAR(lipschitz_estimate(map1("0.25"), g, 10), 0.0, 1e-12);
  // the estimate carries a 1.5 safety factor
  EXPECT_NEAR(lipschitz_estimate(map1("x0"), g, 10) / 1.5, 1.0, 1e-9);
  const double l0 = lipschitz_estimate(make_preset("map-logistic"), g, 0) / 1.5;
  EXPECT_NEAR(l0, 4.0, 4.0 * 2.0 / 64.0);
}

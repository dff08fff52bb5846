#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "mts/expr.hpp"

using namespace mts;

TEST_CASE("parse the sphere surface file") {
  SurfaceDef s = parse_surface_file(data_path("sphere.surf"));
  CHECK(s.name == "sphere");
  CHECK(s.u0 == doctest::Approx(0.0));
  CHECK(s.u1 == doctest::Approx(2 * M_PI));
  CHECK(s.periodic_u);
  CHECK(!s.periodic_v);
  REQUIRE(s.x);
  CHECK(eval_scalar(*s.x, 0.3, 0.4) == doctest::Approx(std::sin(0.3) * std::cos(0.4)));
}

TEST_CASE("range endpoints accept pi expressions") {
  SurfaceDef s = parse_surface(
      "name = t\nx = u\ny = v\nz = 0\n"
      "u_range = -pi/2..pi/2\nv_range = 0..1\n");
  CHECK(s.u0 == doctest::Approx(-M_PI / 2));
  CHECK(s.u1 == doctest::Approx(M_PI / 2));
}

TEST_CASE("single variable expression") {
  AstPtr e = parse_expression("u");
  CHECK(e->kind == Ast::Kind::Var);
  CHECK(e->var == 0);
}

TEST_CASE("intu expression parses and contains the body") {
  AstPtr e = parse_expression("intu(u*(1 + u^2)/sqrt(u^2*4 + 1))");
  CHECK(e->kind == Ast::Kind::Intu);
  REQUIRE(e->a);
}

TEST_CASE("parse errors carry position information") {
  CHECK_THROWS_AS(parse_expression("sin(u"), ParseError);
  CHECK_THROWS_AS(parse_expression("3 + * 4"), ParseError);
  try {
    parse_expression("u + w");
    CHECK(false);
  } catch (const ParseError& pe) {
    CHECK(pe.col == 5);
  }
  CHECK_THROWS_AS(parse_expression("intu(u + v)"), ParseError);
  CHECK_THROWS_AS(parse_expression("u ^ v"), ParseError);
}

TEST_CASE("parse-print-parse is a fixed point on the AST") {
  const char* exprs[] = {
      "sin(u)*cos(v)",
      "u + u*v*(1 + 2*u) - v^3",
      "intu(u*(1 + 2*u)/sqrt(u^2 + 1)) + v*sqrt(u^2 + 1)",
      "-u^(2/3) + exp(tanh(v))/3",
      "(u + v)^(-1/3)",
  };
  for (const char* t : exprs) {
    AstPtr a = parse_expression(t);
    AstPtr b = parse_expression(to_string(*a));
    CHECK(ast_equal(*a, *b));
  }
}

TEST_CASE("sphere jet at (0, pi/4)") {
  SurfaceDef s = parse_surface_file(data_path("sphere.surf"));
  V3<Jet2> f = eval_jet(s, 0.0, M_PI / 4, 2);
  CHECK(f.x.value() == doctest::Approx(0.0));
  CHECK(f.x.at(1, 0) == doctest::Approx(std::cos(M_PI / 4)).epsilon(1e-12));
  // symbolic second partials of sin(u)cos(v)
  CHECK(2 * f.x.at(2, 0) == doctest::Approx(0.0));
  CHECK(f.x.at(1, 1) == doctest::Approx(-std::cos(0.0) * std::sin(M_PI / 4)).epsilon(1e-12));
}

TEST_CASE("constant expression jet") {
  AstPtr e = parse_expression("3");
  Jet2 j = eval_jet2(*e, 0.7, -0.2, 3);
  CHECK(j.value() == 3.0);
  for (int a = 0; a <= 3; ++a)
    for (int b = 0; a + b <= 3; ++b)
      if (a + b > 0) CHECK(j.at(a, b) == 0.0);
}

TEST_CASE("degree-1 jets agree with central differences on all fixtures") {
  const char* files[] = {"sphere.surf", "pseudosphere.surf", "cylinder.surf",
                         "helicoid.surf", "spiral_l3.surf"};
  Rng rng(31);
  for (const char* fn : files) {
    SurfaceDef s = parse_surface_file(data_path(fn));
    for (int trial = 0; trial < 25; ++trial) {
      const double u = rng.uniform(s.u0 + 0.1, s.u1 - 0.1);
      const double v = rng.uniform(s.v0 + 0.1, s.v1 - 0.1);
      V3<Jet2> f = eval_jet(s, u, v, 1);
      auto fx_u = [&](double uu) { return eval_point(s, uu, v).x; };
      auto fx_v = [&](double vv) { return eval_point(s, u, vv).x; };
      CHECK(close_rel(f.x.at(1, 0), fd_derivative(fx_u, u, 1, 1e-5 * 100), 1e-6, 1e-9));
      CHECK(close_rel(f.x.at(0, 1), fd_derivative(fx_v, v, 1, 1e-5 * 100), 1e-6, 1e-9));
    }
  }
}

TEST_CASE("jets of random polynomial surfaces are exact") {
  Rng rng(33);
  for (int trial = 0; trial < 20; ++trial) {
    // random total-degree-3 polynomial with known coefficients
    double c[4][4] = {};
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b) {
        c[a][b] = rng.uniform(-1, 1);
        if (!first) os << " + ";
        os << c[a][b] << "*u^" << a << "*v^" << b;
        first = false;
      }
    AstPtr e = parse_expression(os.str());
    const double u0 = rng.uniform(-1, 1), v0 = rng.uniform(-1, 1);
    Jet2 j = eval_jet2(*e, u0, v0, 3);
    // analytic shift of the polynomial to (u0, v0) via binomials
    auto binom = [](int n, int k) {
      double r = 1;
      for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
      return r;
    };
    for (int a = 0; a <= 3; ++a)
      for (int b = 0; a + b <= 3; ++b) {
        double want = 0.0;
        for (int p = a; p <= 3; ++p)
          for (int q = b; p + q <= 3; ++q)
            want += c[p][q] * binom(p, a) * binom(q, b) * std::pow(u0, p - a) *
                    std::pow(v0, q - b);
        CHECK(close_rel(j.at(a, b), want, 1e-12, 1e-12));
      }
  }
}

TEST_CASE("intu satisfies the fundamental theorem of calculus") {
  AstPtr e = parse_expression("intu(u*u - 2*u + 3)");
  Rng rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const double u0 = rng.uniform(-2, 2);
    Jet2 j = eval_jet2(*e, u0, 0.0, 3);
    const double g = u0 * u0 - 2 * u0 + 3;
    CHECK(j.at(1, 0) == doctest::Approx(g).epsilon(1e-12));
    // and the value is the exact antiderivative u^3/3 - u^2 + 3u
    CHECK(j.value() ==
          doctest::Approx(u0 * u0 * u0 / 3 - u0 * u0 + 3 * u0).epsilon(1e-11));
    for (int b = 1; b <= 3; ++b) CHECK(j.at(0, b) == 0.0);
  }
}

TEST_CASE("periodic wrapping maps into the fundamental rectangle") {
  SurfaceDef s = parse_surface_file(data_path("sphere.surf"));
  V3<double> p1 = eval_point(s, 0.3, 0.2);
  V3<double> p2 = eval_point(s, 0.3 + 2 * M_PI, 0.2);
  CHECK(p1.x == doctest::Approx(p2.x).epsilon(1e-12));
  CHECK(p1.z == doctest::Approx(p2.z).epsilon(1e-12));
  CHECK_THROWS_AS(eval_point(s, 0.3, 7.0), EvalError);
}

TEST_CASE("immersion violations are reported") {
  // f_u vanishes along u = 0
  SurfaceDef s = parse_surface(
      "name = bad\nx = u*v\ny = u\nz = 0\n"
      "u_range = -1..1\nv_range = -1..1\n");
  CHECK_THROWS_AS(eval_jet(s, 0.0, 0.5, 1), EvalError);
}

TEST_CASE("surface file errors") {
  CHECK_THROWS_AS(parse_surface("name = t\nx = u\ny = v\n"), ParseError);
  CHECK_THROWS_AS(parse_surface("x = u $ v\ny = v\nz = 0\nu_range = 0..1\nv_range = 0..1\n"),
                  ParseError);
}

// Small expression language for surface definitions: parser, printer and
// jet evaluation. Grammar: literals (pi, decimals, rationals), variables u/v,
// + - * /, ^ with constant rational exponent, unary minus, the elementary
// functions of jet.hpp, and intu(g) = integral of g(t) dt from 0 to u where
// g may reference only u.
#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "mts/jet.hpp"
#include "mts/lorentz.hpp"

namespace mts {

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line, col;
};

struct Ast;
using AstPtr = std::shared_ptr<const Ast>;

struct Ast {
  enum class Kind { Number, Var, Add, Sub, Mul, Div, Neg, Pow, Call, Intu };
  Kind kind;
  double number = 0.0;       // Number
  int var = 0;               // Var: 0 = u, 1 = v
  long long pnum = 0;        // Pow exponent p/q, q > 0, gcd-reduced
  long long pden = 1;
  Elem fn = Elem::Sin;       // Call
  AstPtr a, b;
};

AstPtr parse_expression(std::string_view text);
std::string to_string(const Ast& e);
bool ast_equal(const Ast& a, const Ast& b);

double eval_scalar(const Ast& e, double u, double v);
Jet2 eval_jet2(const Ast& e, double u, double v, int degree);
// univariate jet in u along v = const (intu bodies, test oracles)
Jet1 eval_jet1_u(const Ast& e, double u, double v, int degree);

struct SurfaceDef {
  std::string name;
  AstPtr x, y, z;
  double u0 = 0, u1 = 1, v0 = 0, v1 = 1;
  bool periodic_u = false, periodic_v = false;

  double period_u() const { return u1 - u0; }
  double period_v() const { return v1 - v0; }
  // map into the fundamental rectangle (periodic directions only)
  std::array<double, 2> wrap(double u, double v) const;
  bool contains(double u, double v, double margin_rel = 1e-9) const;
  double diag() const;
};

// key-value surface file: name, x, y, z, u_range = a..b, v_range = a..b,
// u_periodic, v_periodic; range endpoints are constant expressions
SurfaceDef parse_surface(std::string_view text);
SurfaceDef parse_surface_file(const std::string& path);

// all partials of the immersion at (u,v) up to `degree`, after periodic
// wrapping; checks the rank-2 (immersion) condition when degree >= 1
V3<Jet2> eval_jet(const SurfaceDef& s, double u, double v, int degree);
V3<double> eval_point(const SurfaceDef& s, double u, double v);

}  // namespace mts

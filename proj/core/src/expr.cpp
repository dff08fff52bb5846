#include "mts/expr.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace mts {

namespace {

// ---------------------------------------------------------------------------
// lexer

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Lexer {
  std::string_view src;
  size_t pos = 0;
  int line = 1, col = 1;

  Tok tok = Tok::End;
  double number = 0.0;
  std::string ident;
  int tline = 1, tcol = 1;

  explicit Lexer(std::string_view s) : src(s) { next(); }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, tline, tcol); }

  void advance() {
    if (pos < src.size() && src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void next() {
    while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) advance();
    tline = line;
    tcol = col;
    if (pos >= src.size()) {
      tok = Tok::End;
      return;
    }
    const char c = src[pos];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
      size_t start = pos;
      while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) advance();
      // '.' begins a fraction only if not part of a '..' range separator
      if (pos + 1 < src.size() && src[pos] == '.' && src[pos + 1] != '.') {
        advance();
        while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) advance();
      }
      if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
        size_t save = pos;
        advance();
        if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) advance();
        if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
          while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) advance();
        } else {
          pos = save;  // not an exponent
        }
      }
      number = std::strtod(std::string(src.substr(start, pos - start)).c_str(), nullptr);
      tok = Tok::Number;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos;
      while (pos < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
        advance();
      ident = std::string(src.substr(start, pos - start));
      tok = Tok::Ident;
      return;
    }
    advance();
    switch (c) {
      case '+': tok = Tok::Plus; return;
      case '-': tok = Tok::Minus; return;
      case '*': tok = Tok::Star; return;
      case '/': tok = Tok::Slash; return;
      case '^': tok = Tok::Caret; return;
      case '(': tok = Tok::LParen; return;
      case ')': tok = Tok::RParen; return;
      default: break;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tline, tcol);
  }
};

AstPtr make_number(double v) {
  auto n = std::make_shared<Ast>();
  n->kind = Ast::Kind::Number;
  n->number = v;
  return n;
}

AstPtr make_binary(Ast::Kind k, AstPtr a, AstPtr b) {
  auto n = std::make_shared<Ast>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

const std::map<std::string, Elem, std::less<>>& function_table() {
  static const std::map<std::string, Elem, std::less<>> t = {
      {"sin", Elem::Sin},   {"cos", Elem::Cos},   {"tan", Elem::Tan},
      {"sinh", Elem::Sinh}, {"cosh", Elem::Cosh}, {"tanh", Elem::Tanh},
      {"exp", Elem::Exp},   {"log", Elem::Log},   {"sqrt", Elem::Sqrt},
      {"atan", Elem::Atan}};
  return t;
}

// ---------------------------------------------------------------------------
// parser

struct Parser {
  Lexer lx;
  explicit Parser(std::string_view s) : lx(s) {}

  AstPtr parse() {
    AstPtr e = expr();
    if (lx.tok != Tok::End) lx.fail("trailing input after expression");
    return e;
  }

  AstPtr expr() {
    AstPtr e = term();
    while (lx.tok == Tok::Plus || lx.tok == Tok::Minus) {
      const bool add = lx.tok == Tok::Plus;
      lx.next();
      e = make_binary(add ? Ast::Kind::Add : Ast::Kind::Sub, e, term());
    }
    return e;
  }

  AstPtr term() {
    AstPtr e = factor();
    while (lx.tok == Tok::Star || lx.tok == Tok::Slash) {
      const bool mul = lx.tok == Tok::Star;
      lx.next();
      e = make_binary(mul ? Ast::Kind::Mul : Ast::Kind::Div, e, factor());
    }
    return e;
  }

  AstPtr factor() {
    if (lx.tok == Tok::Minus) {
      lx.next();
      auto n = std::make_shared<Ast>();
      n->kind = Ast::Kind::Neg;
      n->a = factor();
      return n;
    }
    AstPtr e = base();
    if (lx.tok == Tok::Caret) {
      lx.next();
      auto [p, q] = exponent();
      auto n = std::make_shared<Ast>();
      n->kind = Ast::Kind::Pow;
      n->a = e;
      n->pnum = p;
      n->pden = q;
      return n;
    }
    return e;
  }

  // constant rational exponent: [-] int [/ int], decimals allowed,
  // optionally parenthesized
  std::pair<long long, long long> exponent() {
    if (lx.tok == Tok::LParen) {
      lx.next();
      auto pq = exponent();
      if (lx.tok != Tok::RParen) lx.fail("expected ')' in exponent");
      lx.next();
      return pq;
    }
    long long sign = 1;
    if (lx.tok == Tok::Minus) {
      sign = -1;
      lx.next();
    }
    if (lx.tok != Tok::Number) lx.fail("expected rational constant exponent");
    auto to_rational = [this](double x) -> std::pair<long long, long long> {
      for (long long den = 1; den <= 1000000; den *= 10) {
        const double scaled = x * static_cast<double>(den);
        if (std::fabs(scaled - std::llround(scaled)) < 1e-9) return {std::llround(scaled), den};
      }
      lx.fail("exponent is not a rational constant");
    };
    auto [p, q] = to_rational(lx.number);
    lx.next();
    if (lx.tok == Tok::Slash) {
      lx.next();
      if (lx.tok != Tok::Number) lx.fail("expected integer denominator in exponent");
      auto [p2, q2] = to_rational(lx.number);
      lx.next();
      if (p2 == 0) lx.fail("zero denominator in exponent");
      p *= q2;
      q *= p2;
    }
    if (q < 0) {
      p = -p;
      q = -q;
    }
    const long long g = std::gcd(p < 0 ? -p : p, q);
    if (g > 1) {
      p /= g;
      q /= g;
    }
    return {sign * p, q};
  }

  AstPtr base() {
    switch (lx.tok) {
      case Tok::Number: {
        AstPtr n = make_number(lx.number);
        lx.next();
        return n;
      }
      case Tok::LParen: {
        lx.next();
        AstPtr e = expr();
        if (lx.tok != Tok::RParen) lx.fail("expected ')'");
        lx.next();
        return e;
      }
      case Tok::Ident: {
        const std::string id = lx.ident;
        const int iline = lx.tline, icol = lx.tcol;
        lx.next();
        if (id == "pi") return make_number(M_PI);
        if (id == "u" || id == "v") {
          auto n = std::make_shared<Ast>();
          n->kind = Ast::Kind::Var;
          n->var = (id == "v") ? 1 : 0;
          return n;
        }
        if (lx.tok == Tok::LParen) {
          lx.next();
          AstPtr arg = expr();
          if (lx.tok != Tok::RParen) lx.fail("expected ')' after function argument");
          lx.next();
          if (id == "intu") {
            auto n = std::make_shared<Ast>();
            n->kind = Ast::Kind::Intu;
            n->a = arg;
            check_no_v(*n->a, iline, icol);
            return n;
          }
          auto it = function_table().find(id);
          if (it == function_table().end())
            throw ParseError("unknown function '" + id + "'", iline, icol);
          auto n = std::make_shared<Ast>();
          n->kind = Ast::Kind::Call;
          n->fn = it->second;
          n->a = arg;
          return n;
        }
        throw ParseError("unknown identifier '" + id + "'", iline, icol);
      }
      default:
        lx.fail("expected expression");
    }
    return nullptr;
  }

  static void check_no_v(const Ast& e, int line, int col) {
    if (e.kind == Ast::Kind::Var && e.var == 1)
      throw ParseError("'v' is not allowed inside intu", line, col);
    if (e.a) check_no_v(*e.a, line, col);
    if (e.b) check_no_v(*e.b, line, col);
  }
};

// ---------------------------------------------------------------------------
// generic evaluation

struct ScalarCtx {
  double u, v;
};

double eval_d(const Ast& e, const ScalarCtx& c);

double quad_intu(const Ast& body, double u, double v) {
  if (u == 0.0) return 0.0;
  auto f = [&](double t) { return eval_d(body, {t, v}); };
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, 0.0, u, 12, 1e-12,
                                                                       &err);
}

double elem_d(Elem f, double x) {
  switch (f) {
    case Elem::Sin: return std::sin(x);
    case Elem::Cos: return std::cos(x);
    case Elem::Tan: return std::tan(x);
    case Elem::Sinh: return std::sinh(x);
    case Elem::Cosh: return std::cosh(x);
    case Elem::Tanh: return std::tanh(x);
    case Elem::Exp: return std::exp(x);
    case Elem::Log:
      if (x <= 0.0) throw EvalError("log of non-positive value");
      return std::log(x);
    case Elem::Sqrt:
      if (x < 0.0) throw EvalError("sqrt of negative value");
      return std::sqrt(x);
    case Elem::Atan: return std::atan(x);
  }
  throw EvalError("bad function");
}

double eval_d(const Ast& e, const ScalarCtx& c) {
  switch (e.kind) {
    case Ast::Kind::Number: return e.number;
    case Ast::Kind::Var: return e.var == 0 ? c.u : c.v;
    case Ast::Kind::Add: return eval_d(*e.a, c) + eval_d(*e.b, c);
    case Ast::Kind::Sub: return eval_d(*e.a, c) - eval_d(*e.b, c);
    case Ast::Kind::Mul: return eval_d(*e.a, c) * eval_d(*e.b, c);
    case Ast::Kind::Div: {
      const double den = eval_d(*e.b, c);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_d(*e.a, c) / den;
    }
    case Ast::Kind::Neg: return -eval_d(*e.a, c);
    case Ast::Kind::Pow: return real_pow_rational(eval_d(*e.a, c), e.pnum, e.pden);
    case Ast::Kind::Call: return elem_d(e.fn, eval_d(*e.a, c));
    case Ast::Kind::Intu: return quad_intu(*e.a, c.u, c.v);
  }
  throw EvalError("bad node");
}

Jet1 eval_j1(const Ast& e, double u, double v, int degree);

// jet of intu(g) at u0: value by quadrature, u-coefficients from the
// integrand's jet via the fundamental theorem of calculus
Jet1 intu_jet1(const Ast& body, double u0, double v, int degree) {
  Jet1 r(degree);
  r[0] = quad_intu(body, u0, v);
  if (degree >= 1) {
    Jet1 g = eval_j1(body, u0, v, degree - 1);
    for (int k = 1; k <= degree; ++k) r[k] = g[k - 1] / k;
  }
  return r;
}

Jet1 eval_j1(const Ast& e, double u, double v, int degree) {
  switch (e.kind) {
    case Ast::Kind::Number: return Jet1::constant(degree, e.number);
    case Ast::Kind::Var:
      return e.var == 0 ? Jet1::variable(degree, u) : Jet1::constant(degree, v);
    case Ast::Kind::Add: return eval_j1(*e.a, u, v, degree) + eval_j1(*e.b, u, v, degree);
    case Ast::Kind::Sub: return eval_j1(*e.a, u, v, degree) - eval_j1(*e.b, u, v, degree);
    case Ast::Kind::Mul: return eval_j1(*e.a, u, v, degree) * eval_j1(*e.b, u, v, degree);
    case Ast::Kind::Div: return eval_j1(*e.a, u, v, degree) / eval_j1(*e.b, u, v, degree);
    case Ast::Kind::Neg: return -eval_j1(*e.a, u, v, degree);
    case Ast::Kind::Pow: return pow_rational(eval_j1(*e.a, u, v, degree), e.pnum, e.pden);
    case Ast::Kind::Call: return apply(e.fn, eval_j1(*e.a, u, v, degree));
    case Ast::Kind::Intu: return intu_jet1(*e.a, u, v, degree);
  }
  throw EvalError("bad node");
}

Jet2 eval_j2(const Ast& e, double u, double v, int degree) {
  switch (e.kind) {
    case Ast::Kind::Number: return Jet2::constant(degree, e.number);
    case Ast::Kind::Var:
      return e.var == 0 ? Jet2::variable_u(degree, u) : Jet2::variable_v(degree, v);
    case Ast::Kind::Add: return eval_j2(*e.a, u, v, degree) + eval_j2(*e.b, u, v, degree);
    case Ast::Kind::Sub: return eval_j2(*e.a, u, v, degree) - eval_j2(*e.b, u, v, degree);
    case Ast::Kind::Mul: return eval_j2(*e.a, u, v, degree) * eval_j2(*e.b, u, v, degree);
    case Ast::Kind::Div: return eval_j2(*e.a, u, v, degree) / eval_j2(*e.b, u, v, degree);
    case Ast::Kind::Neg: return -eval_j2(*e.a, u, v, degree);
    case Ast::Kind::Pow: return pow_rational(eval_j2(*e.a, u, v, degree), e.pnum, e.pden);
    case Ast::Kind::Call: return apply(e.fn, eval_j2(*e.a, u, v, degree));
    case Ast::Kind::Intu: {
      Jet1 g = intu_jet1(*e.a, u, v, degree);
      Jet2 r(degree);
      for (int k = 0; k <= degree; ++k) r.at(k, 0) = g[k];
      return r;
    }
  }
  throw EvalError("bad node");
}

// ---------------------------------------------------------------------------
// printer

const char* elem_name(Elem f) {
  switch (f) {
    case Elem::Sin: return "sin";
    case Elem::Cos: return "cos";
    case Elem::Tan: return "tan";
    case Elem::Sinh: return "sinh";
    case Elem::Cosh: return "cosh";
    case Elem::Tanh: return "tanh";
    case Elem::Exp: return "exp";
    case Elem::Log: return "log";
    case Elem::Sqrt: return "sqrt";
    case Elem::Atan: return "atan";
  }
  return "?";
}

int precedence(const Ast& e) {
  switch (e.kind) {
    case Ast::Kind::Add:
    case Ast::Kind::Sub: return 1;
    case Ast::Kind::Mul:
    case Ast::Kind::Div: return 2;
    case Ast::Kind::Neg: return 3;
    case Ast::Kind::Pow: return 4;
    default: return 5;
  }
}

void print(std::ostream& os, const Ast& e, int parent_prec) {
  const int prec = precedence(e);
  const bool paren = prec < parent_prec;
  if (paren) os << '(';
  switch (e.kind) {
    case Ast::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", e.number);
      os << buf;
      break;
    }
    case Ast::Kind::Var: os << (e.var == 0 ? 'u' : 'v'); break;
    case Ast::Kind::Add:
      print(os, *e.a, prec);
      os << " + ";
      print(os, *e.b, prec + 1);
      break;
    case Ast::Kind::Sub:
      print(os, *e.a, prec);
      os << " - ";
      print(os, *e.b, prec + 1);
      break;
    case Ast::Kind::Mul:
      print(os, *e.a, prec);
      os << "*";
      print(os, *e.b, prec + 1);
      break;
    case Ast::Kind::Div:
      print(os, *e.a, prec);
      os << "/";
      print(os, *e.b, prec + 1);
      break;
    case Ast::Kind::Neg:
      os << '-';
      print(os, *e.a, prec);
      break;
    case Ast::Kind::Pow:
      print(os, *e.a, prec + 1);
      os << '^';
      if (e.pden == 1 && e.pnum >= 0)
        os << e.pnum;
      else
        os << '(' << e.pnum << '/' << e.pden << ')';
      break;
    case Ast::Kind::Call:
      os << elem_name(e.fn) << '(';
      print(os, *e.a, 0);
      os << ')';
      break;
    case Ast::Kind::Intu:
      os << "intu(";
      print(os, *e.a, 0);
      os << ')';
      break;
  }
  if (paren) os << ')';
}

}  // namespace

AstPtr parse_expression(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Ast& e) {
  std::ostringstream os;
  print(os, e, 0);
  return os.str();
}

bool ast_equal(const Ast& a, const Ast& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Ast::Kind::Number: return a.number == b.number;
    case Ast::Kind::Var: return a.var == b.var;
    case Ast::Kind::Pow:
      return a.pnum == b.pnum && a.pden == b.pden && ast_equal(*a.a, *b.a);
    case Ast::Kind::Call:
      return a.fn == b.fn && ast_equal(*a.a, *b.a);
    case Ast::Kind::Neg:
    case Ast::Kind::Intu: return ast_equal(*a.a, *b.a);
    default: return ast_equal(*a.a, *b.a) && ast_equal(*a.b, *b.b);
  }
}

double eval_scalar(const Ast& e, double u, double v) { return eval_d(e, {u, v}); }
Jet2 eval_jet2(const Ast& e, double u, double v, int degree) { return eval_j2(e, u, v, degree); }
Jet1 eval_jet1_u(const Ast& e, double u, double v, int degree) {
  return eval_j1(e, u, v, degree);
}

// ---------------------------------------------------------------------------
// surface files

std::array<double, 2> SurfaceDef::wrap(double u, double v) const {
  if (periodic_u) {
    const double p = period_u();
    u = u0 + std::fmod(u - u0, p);
    if (u < u0) u += p;
  }
  if (periodic_v) {
    const double p = period_v();
    v = v0 + std::fmod(v - v0, p);
    if (v < v0) v += p;
  }
  return {u, v};
}

bool SurfaceDef::contains(double u, double v, double margin_rel) const {
  const double mu = margin_rel * period_u();
  const double mv = margin_rel * period_v();
  const bool oku = periodic_u || (u >= u0 - mu && u <= u1 + mu);
  const bool okv = periodic_v || (v >= v0 - mv && v <= v1 + mv);
  return oku && okv;
}

double SurfaceDef::diag() const { return std::hypot(u1 - u0, v1 - v0); }

namespace {

double constant_value(std::string_view text, int line) {
  AstPtr e = parse_expression(text);
  struct NoVars {
    static void check(const Ast& n, int line) {
      if (n.kind == Ast::Kind::Var) throw ParseError("range endpoint must be constant", line, 1);
      if (n.a) check(*n.a, line);
      if (n.b) check(*n.b, line);
    }
  };
  NoVars::check(*e, line);
  return eval_scalar(*e, 0.0, 0.0);
}

std::pair<double, double> parse_range(std::string_view text, int line) {
  const size_t sep = text.find("..");
  if (sep == std::string_view::npos)
    throw ParseError("range must have the form a..b", line, 1);
  const double a = constant_value(text.substr(0, sep), line);
  const double b = constant_value(text.substr(sep + 2), line);
  if (!(a < b)) throw ParseError("empty range", line, 1);
  return {a, b};
}

bool parse_bool(std::string_view text, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ParseError("expected true or false", line, 1);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

SurfaceDef parse_surface(std::string_view text) {
  SurfaceDef s;
  bool have[3] = {false, false, false};
  bool have_ur = false, have_vr = false;
  int line = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::string_view ln = trim(raw);
    if (ln.empty()) continue;
    const size_t eq = ln.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line, 1);
    const std::string_view key = trim(ln.substr(0, eq));
    const std::string_view val = trim(ln.substr(eq + 1));
    try {
      if (key == "name") {
        s.name = std::string(val);
      } else if (key == "x" || key == "y" || key == "z") {
        AstPtr e = parse_expression(val);
        if (key == "x") s.x = e, have[0] = true;
        if (key == "y") s.y = e, have[1] = true;
        if (key == "z") s.z = e, have[2] = true;
      } else if (key == "u_range") {
        std::tie(s.u0, s.u1) = parse_range(val, line);
        have_ur = true;
      } else if (key == "v_range") {
        std::tie(s.v0, s.v1) = parse_range(val, line);
        have_vr = true;
      } else if (key == "u_periodic") {
        s.periodic_u = parse_bool(val, line);
      } else if (key == "v_periodic") {
        s.periodic_v = parse_bool(val, line);
      } else {
        throw ParseError("unknown key '" + std::string(key) + "'", line, 1);
      }
    } catch (ParseError& pe) {
      // keep the surface-file line number, expression columns are local
      throw ParseError(pe.what(), line, pe.col);
    }
  }
  if (!(have[0] && have[1] && have[2]))
    throw ParseError("surface file must define x, y and z", line, 1);
  if (!have_ur || !have_vr) throw ParseError("surface file must define u_range and v_range", line, 1);
  return s;
}

SurfaceDef parse_surface_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EvalError("cannot open surface file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_surface(ss.str());
}

V3<Jet2> eval_jet(const SurfaceDef& s, double u, double v, int degree) {
  if (!s.contains(u, v)) throw EvalError("parameter point outside domain");
  const auto [wu, wv] = s.wrap(u, v);
  V3<Jet2> f{eval_jet2(*s.x, wu, wv, degree), eval_jet2(*s.y, wu, wv, degree),
             eval_jet2(*s.z, wu, wv, degree)};
  auto finite = [](const Jet2& j) {
    for (int a = 0; a <= j.degree(); ++a)
      for (int b = 0; a + b <= j.degree(); ++b)
        if (!std::isfinite(j.at(a, b))) return false;
    return true;
  };
  if (!finite(f.x) || !finite(f.y) || !finite(f.z)) throw EvalError("non-finite surface value");
  if (degree >= 1) {
    const Vec3 fu{f.x.at(1, 0), f.y.at(1, 0), f.z.at(1, 0)};
    const Vec3 fv{f.x.at(0, 1), f.y.at(0, 1), f.z.at(0, 1)};
    // rank-2 check in the Euclidean sense (equivalent to the Lorentz cross)
    const Vec3 c = minkowski_cross(fu, fv);
    const double n2 = c.x * c.x + c.y * c.y + c.z * c.z;
    const double s2 = (fu.x * fu.x + fu.y * fu.y + fu.z * fu.z) *
                      (fv.x * fv.x + fv.y * fv.y + fv.z * fv.z);
    if (n2 <= 1e-24 * s2) throw EvalError("immersion violated: df has rank < 2");
  }
  return f;
}

V3<double> eval_point(const SurfaceDef& s, double u, double v) {
  if (!s.contains(u, v)) throw EvalError("parameter point outside domain");
  const auto [wu, wv] = s.wrap(u, v);
  return {eval_scalar(*s.x, wu, wv), eval_scalar(*s.y, wu, wv), eval_scalar(*s.z, wu, wv)};
}

}  // namespace mts

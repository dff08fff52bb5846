#include "mts/monge.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mts {

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string poly_u(const std::vector<double>& c) {
  std::ostringstream os;
  bool first = true;
  for (size_t k = 0; k < c.size(); ++k) {
    if (c[k] == 0.0) continue;
    if (!first) os << " + ";
    os << num(c[k]);
    if (k >= 1) os << "*u";
    if (k >= 2) os << "^" << k;
    first = false;
  }
  if (first) return "0";
  return "(" + os.str() + ")";
}

std::string poly_uv(const std::vector<std::vector<double>>& c) {
  std::ostringstream os;
  bool first = true;
  for (size_t i = 0; i < c.size(); ++i)
    for (size_t j = 0; j < c[i].size(); ++j) {
      if (c[i][j] == 0.0) continue;
      if (!first) os << " + ";
      os << num(c[i][j]);
      if (i >= 1) os << "*u";
      if (i >= 2) os << "^" << i;
      if (j >= 1) os << "*v";
      if (j >= 2) os << "^" << j;
      first = false;
    }
  if (first) return "0";
  return "(" + os.str() + ")";
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  std::vector<double> d;
  for (size_t k = 1; k < c.size(); ++k) d.push_back(k * c[k]);
  return d;
}

double at00(const std::vector<std::vector<double>>& b, size_t i, size_t j) {
  if (i >= b.size() || j >= b[i].size()) return 0.0;
  return b[i][j];
}

void validate(const MongeCoeffs& c) {
  if (std::fabs(at00(c.b2, 0, 0) - 0.25) > 1e-12)
    throw EvalError("Monge coefficients require b2(0,0) = 1/4");
}

std::vector<double> parse_row(std::string_view text) {
  std::vector<double> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    const std::string tok(text.substr(pos, comma - pos));
    if (!tok.empty()) out.push_back(std::strtod(tok.c_str(), nullptr));
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

std::vector<std::vector<double>> parse_rows(std::string_view text) {
  std::vector<std::vector<double>> out;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos) semi = text.size();
    out.push_back(parse_row(text.substr(pos, semi - pos)));
    pos = semi + 1;
    if (semi == text.size()) break;
  }
  return out;
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

MongeCoeffs parse_monge_coeffs(std::string_view text) {
  MongeCoeffs c;
  c.b2 = {{0.25}};
  size_t pos = 0;
  int line = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line;
    const size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view ln = trimmed(raw);
    if (ln.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    const size_t eq = ln.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key = value", line, 1);
    const std::string_view key = trimmed(ln.substr(0, eq));
    const std::string_view val = trimmed(ln.substr(eq + 1));
    if (key == "a1")
      c.a1 = parse_row(val);
    else if (key == "a2")
      c.a2 = parse_row(val);
    else if (key == "a3")
      c.a3 = parse_row(val);
    else if (key == "b1")
      c.b1 = parse_rows(val);
    else if (key == "b2")
      c.b2 = parse_rows(val);
    else
      throw ParseError("unknown key '" + std::string(key) + "'", line, 1);
    if (nl == text.size()) break;
  }
  validate(c);
  return c;
}

std::string monge_surface_text(const MongeCoeffs& c, const std::string& name, double half_u,
                               double half_v) {
  validate(c);
  const std::string A1 = poly_u(c.a1);
  const std::string A2 = poly_u(c.a2);
  const std::string A3 = poly_u(c.a3);
  const std::string dA2 = poly_u(poly_derivative(c.a2));
  const std::string B1 = poly_uv(c.b1);
  const std::string B2 = poly_uv(c.b2);
  const std::string S = "sqrt(u^2*" + A1 + "^2 + 1)";

  std::ostringstream os;
  os << "name = " << name << "\n";
  os << "x = u + u*v*" << A1 << " + u*v^2*" << A3 << " + v^3*" << B1 << "\n";
  os << "y = v + u^2*" << A2 << "\n";
  os << "z = intu(u*(" << A1 << " + 2*" << A2 << " + u*" << dA2 << ")/" << S << ") + v*" << S
     << " + v^2*" << B2 << "\n";
  os << "u_range = " << num(-half_u) << ".." << num(half_u) << "\n";
  os << "v_range = " << num(-half_v) << ".." << num(half_v) << "\n";
  os << "u_periodic = false\n";
  os << "v_periodic = false\n";
  return os.str();
}

SurfaceDef build_monge(const MongeCoeffs& c, const std::string& name, double half_u,
                       double half_v) {
  return parse_surface(monge_surface_text(c, name, half_u, half_v));
}

OriginInvariants monge_origin_invariants(const MongeCoeffs& c) {
  validate(c);
  auto a0 = [](const std::vector<double>& p) { return p.empty() ? 0.0 : p[0]; };
  const double a1 = a0(c.a1), a2 = a0(c.a2);
  const double b2u = at00(c.b2, 1, 0);
  const double b2v = at00(c.b2, 0, 1);
  OriginInvariants oi;
  oi.kL = a1;
  oi.kN = -0.5 * a1 - 2.0 * a2;
  oi.kG = (4.0 / 3.0) * b2u;
  oi.kB = -a2 + (a1 / 5.0) * (-5.0 * a1 + 12.0 * b2v - 2.0);
  return oi;
}

}  // namespace mts

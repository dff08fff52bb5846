// Mixed type surfaces in Monge normal form at a first-kind lightlike point,
// with closed-form origin invariants used as test oracles.
#pragma once

#include <vector>

#include "mts/expr.hpp"

namespace mts {

struct MongeCoeffs {
  // univariate polynomials, ascending coefficients
  std::vector<double> a1, a2, a3;
  // bivariate polynomials, b[i][j] multiplies u^i v^j; b2[0][0] must be 1/4
  std::vector<std::vector<double>> b1, b2;
};

// key-value coefficient file: a1 = c0,c1,... ; b1/b2 rows (u powers)
// separated by ';', columns (v powers) by ','
MongeCoeffs parse_monge_coeffs(std::string_view text);

// surface-file text implementing the normal form; the third component's
// integral term is expressed through intu
std::string monge_surface_text(const MongeCoeffs& c, const std::string& name,
                               double half_u = 0.15, double half_v = 0.15);

SurfaceDef build_monge(const MongeCoeffs& c, const std::string& name = "monge",
                       double half_u = 0.15, double half_v = 0.15);

struct OriginInvariants {
  double kL = 0, kN = 0, kG = 0, kB = 0;
};

OriginInvariants monge_origin_invariants(const MongeCoeffs& c);

}  // namespace mts

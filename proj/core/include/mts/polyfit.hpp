// Small dense solves and centered local least-squares polynomial fits.
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "mts/jet.hpp"

namespace mts {

// Gaussian elimination with partial pivoting; A is n x n row-major,
// overwritten. Returns false if singular.
bool solve_dense(int n, double* A, double* b);

// Least-squares fit of y(t) by a degree-`deg` polynomial in (t - center),
// returns ascending coefficients. Internally scaled by the window half-width
// for conditioning.
std::vector<double> polyfit(std::span<const double> ts, std::span<const double> ys, int deg,
                            double center);

double poly_eval(std::span<const double> coeffs, double x, int deriv = 0);

inline Jet1 poly_jet(std::span<const double> coeffs, int degree) {
  Jet1 j(degree);
  for (int k = 0; k <= degree && k < static_cast<int>(coeffs.size()); ++k) j[k] = coeffs[k];
  return j;
}

}  // namespace mts

#include "mts/polyfit.hpp"

#include <algorithm>
#include <cassert>

namespace mts {

bool solve_dense(int n, double* A, double* b) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(A[r * n + col]) > std::fabs(A[piv * n + col])) piv = r;
    if (A[piv * n + col] == 0.0) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
      std::swap(b[piv], b[col]);
    }
    const double d = A[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double m = A[r * n + col] / d;
      if (m == 0.0) continue;
      for (int c = col; c < n; ++c) A[r * n + c] -= m * A[col * n + c];
      b[r] -= m * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double acc = b[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r * n + c] * b[c];
    b[r] = acc / A[r * n + r];
  }
  return true;
}

std::vector<double> polyfit(std::span<const double> ts, std::span<const double> ys, int deg,
                            double center) {
  assert(ts.size() == ys.size());
  const int n = deg + 1;
  double w = 0.0;
  for (double t : ts) w = std::max(w, std::fabs(t - center));
  if (w == 0.0) w = 1.0;

  std::vector<double> A(static_cast<size_t>(n) * n, 0.0), rhs(n, 0.0), pw(n);
  for (size_t i = 0; i < ts.size(); ++i) {
    const double z = (ts[i] - center) / w;
    pw[0] = 1.0;
    for (int k = 1; k < n; ++k) pw[k] = pw[k - 1] * z;
    for (int r = 0; r < n; ++r) {
      rhs[r] += pw[r] * ys[i];
      for (int c = 0; c < n; ++c) A[r * n + c] += pw[r] * pw[c];
    }
  }
  if (!solve_dense(n, A.data(), rhs.data())) throw EvalError("singular polynomial fit");
  double scale = 1.0;
  for (int k = 0; k < n; ++k) {
    rhs[k] /= scale;
    scale *= w;
  }
  return rhs;
}

double poly_eval(std::span<const double> coeffs, double x, int deriv) {
  double r = 0.0;
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= deriv; --k) {
    double f = 1.0;
    for (int j = 0; j < deriv; ++j) f *= (k - j);
    r = r * x + coeffs[k] * f;
  }
  return r;
}

}  // namespace mts

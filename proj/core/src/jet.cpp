#include "mts/jet.hpp"

#include <cmath>
#include <cstdlib>

namespace mts {

// ---------------------------------------------------------------------------
// Jet1

Jet1 Jet1::derivative() const {
  Jet1 r(deg_ > 0 ? deg_ - 1 : 0);
  if (deg_ == 0) return r;
  for (int k = 1; k <= deg_; ++k) r[k - 1] = k * c_[k];
  return r;
}

Jet1 Jet1::operator-() const {
  Jet1 r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Jet1& Jet1::operator+=(const Jet1& o) {
  assert(deg_ == o.deg_);
  for (int k = 0; k <= deg_; ++k) c_[k] += o.c_[k];
  return *this;
}

Jet1& Jet1::operator-=(const Jet1& o) {
  assert(deg_ == o.deg_);
  for (int k = 0; k <= deg_; ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet1 operator+(const Jet1& a, const Jet1& b) {
  Jet1 r = a;
  r += b;
  return r;
}

Jet1 operator-(const Jet1& a, const Jet1& b) {
  Jet1 r = a;
  r -= b;
  return r;
}

Jet1 operator*(const Jet1& a, const Jet1& b) {
  assert(a.degree() == b.degree());
  const int d = a.degree();
  Jet1 r(d);
  for (int i = 0; i <= d; ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j + i <= d; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

static Jet1 reciprocal(const Jet1& b) {
  const int d = b.degree();
  if (b.value() == 0.0) throw EvalError("jet division by zero value");
  // 1/b = (1/b0) * sum (-(b-b0)/b0)^k
  Jet1 t = b / b.value();
  t[0] = 0.0;
  Jet1 acc = Jet1::constant(d, 1.0);
  Jet1 term = Jet1::constant(d, 1.0);
  for (int k = 1; k <= d; ++k) {
    term = term * t;
    if (k % 2 == 1)
      acc -= term;
    else
      acc += term;
  }
  return acc / b.value();
}

Jet1 operator/(const Jet1& a, const Jet1& b) { return a * reciprocal(b); }

Jet1 operator+(const Jet1& a, double s) {
  Jet1 r = a;
  r[0] += s;
  return r;
}
Jet1 operator-(const Jet1& a, double s) { return a + (-s); }
Jet1 operator*(const Jet1& a, double s) {
  Jet1 r = a;
  for (int k = 0; k <= r.degree(); ++k) r[k] *= s;
  return r;
}
Jet1 operator*(double s, const Jet1& a) { return a * s; }
Jet1 operator/(const Jet1& a, double s) { return a * (1.0 / s); }

Jet1 compose_poly(std::span<const double> coeffs, const Jet1& arg) {
  assert(arg.value() == 0.0);
  const int d = arg.degree();
  Jet1 r = Jet1::constant(d, coeffs.empty() ? 0.0 : coeffs.back());
  for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k) r = r * arg + coeffs[k];
  return r;
}

Jet1 apply(Elem f, const Jet1& a) {
  if (f == Elem::Tan) return apply(Elem::Sin, a) / apply(Elem::Cos, a);
  if (f == Elem::Tanh) return apply(Elem::Sinh, a) / apply(Elem::Cosh, a);
  const int d = a.degree();
  std::vector<double> c(d + 1);
  elem_taylor_coeffs(f, a.value(), d, c.data());
  Jet1 delta = a;
  delta[0] = 0.0;
  return compose_poly(c, delta);
}

Jet1 pow_rational(const Jet1& a, long long p, long long q) {
  const int d = a.degree();
  if (q == 1) {
    if (p == 0) return Jet1::constant(d, 1.0);
    Jet1 acc = Jet1::constant(d, 1.0);
    long long n = p < 0 ? -p : p;
    Jet1 base = a;
    while (n > 0) {
      if (n & 1) acc = acc * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return p < 0 ? reciprocal(acc) : acc;
  }
  const double x0 = a.value();
  if (q % 2 == 0 && x0 <= 0.0) throw EvalError("even root of non-positive value");
  if (q % 2 == 1 && x0 == 0.0) throw EvalError("rational power at zero base");
  std::vector<double> c(d + 1);
  const double r = static_cast<double>(p) / static_cast<double>(q);
  c[0] = real_pow_rational(x0, p, q);
  for (int k = 1; k <= d; ++k) c[k] = c[k - 1] * (r - (k - 1)) / (k * x0);
  Jet1 delta = a;
  delta[0] = 0.0;
  return compose_poly(c, delta);
}

Jet1 invert_series(const Jet1& x) {
  const int d = x.degree();
  assert(x.value() == 0.0);
  if (d < 1 || x[1] == 0.0) throw EvalError("series inversion needs nonzero linear term");
  Jet1 id = Jet1::variable(d, 0.0);
  Jet1 tau = id / x[1];
  Jet1 dx = x.derivative();
  for (int it = 0; it < d + 2; ++it) {
    Jet1 val = compose_poly(x.coeffs(), tau);
    // pad derivative back to full degree for the update
    Jet1 der(d);
    Jet1 dlow = dx;
    for (int k = 0; k <= dlow.degree(); ++k) der[k] = dlow[k];
    Jet1 dval = compose_poly(der.coeffs(), tau);
    tau -= (val - id) / dval;
  }
  return tau;
}

// ---------------------------------------------------------------------------
// Jet2

Jet2 Jet2::du() const {
  Jet2 r(deg_ > 0 ? deg_ - 1 : 0);
  if (deg_ == 0) return r;
  for (int a = 1; a <= deg_; ++a)
    for (int b = 0; a + b <= deg_; ++b) r.at(a - 1, b) = a * at(a, b);
  return r;
}

Jet2 Jet2::dv() const {
  Jet2 r(deg_ > 0 ? deg_ - 1 : 0);
  if (deg_ == 0) return r;
  for (int a = 0; a < deg_; ++a)
    for (int b = 1; a + b <= deg_; ++b) r.at(a, b - 1) = b * at(a, b);
  return r;
}

Jet2 Jet2::truncated(int degree) const {
  assert(degree <= deg_);
  Jet2 r(degree);
  for (int a = 0; a <= degree; ++a)
    for (int b = 0; a + b <= degree; ++b) r.at(a, b) = at(a, b);
  return r;
}

Jet2 Jet2::operator-() const {
  Jet2 r = *this;
  for (auto& x : r.c_) x = -x;
  return r;
}

Jet2& Jet2::operator+=(const Jet2& o) {
  assert(deg_ == o.deg_);
  for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
  return *this;
}

Jet2& Jet2::operator-=(const Jet2& o) {
  assert(deg_ == o.deg_);
  for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
  return *this;
}

Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r += b;
  return r;
}

Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r -= b;
  return r;
}

Jet2 operator*(const Jet2& a, const Jet2& b) {
  assert(a.degree() == b.degree());
  const int d = a.degree();
  Jet2 r(d);
  for (int i = 0; i <= d; ++i)
    for (int j = 0; i + j <= d; ++j) {
      const double aij = a.at(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; i + j + k <= d; ++k)
        for (int l = 0; i + j + k + l <= d; ++l) r.at(i + k, j + l) += aij * b.at(k, l);
    }
  return r;
}

static Jet2 reciprocal(const Jet2& b) {
  const int d = b.degree();
  if (b.value() == 0.0) throw EvalError("jet division by zero value");
  Jet2 t = b / b.value();
  t.at(0, 0) = 0.0;
  Jet2 acc = Jet2::constant(d, 1.0);
  Jet2 term = Jet2::constant(d, 1.0);
  for (int k = 1; k <= d; ++k) {
    term = term * t;
    if (k % 2 == 1)
      acc -= term;
    else
      acc += term;
  }
  return acc / b.value();
}

Jet2 operator/(const Jet2& a, const Jet2& b) { return a * reciprocal(b); }

Jet2 operator+(const Jet2& a, double s) {
  Jet2 r = a;
  r.at(0, 0) += s;
  return r;
}
Jet2 operator-(const Jet2& a, double s) { return a + (-s); }
Jet2 operator*(const Jet2& a, double s) {
  Jet2 r = a;
  for (int i = 0; i <= r.degree(); ++i)
    for (int j = 0; i + j <= r.degree(); ++j) r.at(i, j) *= s;
  return r;
}
Jet2 operator*(double s, const Jet2& a) { return a * s; }
Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }

static Jet2 compose_series(std::span<const double> coeffs, const Jet2& delta) {
  assert(delta.value() == 0.0);
  const int d = delta.degree();
  Jet2 r = Jet2::constant(d, coeffs.empty() ? 0.0 : coeffs.back());
  for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k) r = r * delta + coeffs[k];
  return r;
}

Jet2 apply(Elem f, const Jet2& a) {
  if (f == Elem::Tan) return apply(Elem::Sin, a) / apply(Elem::Cos, a);
  if (f == Elem::Tanh) return apply(Elem::Sinh, a) / apply(Elem::Cosh, a);
  const int d = a.degree();
  std::vector<double> c(d + 1);
  elem_taylor_coeffs(f, a.value(), d, c.data());
  Jet2 delta = a;
  delta.at(0, 0) = 0.0;
  return compose_series(c, delta);
}

Jet2 pow_rational(const Jet2& a, long long p, long long q) {
  const int d = a.degree();
  if (q == 1) {
    if (p == 0) return Jet2::constant(d, 1.0);
    Jet2 acc = Jet2::constant(d, 1.0);
    long long n = p < 0 ? -p : p;
    Jet2 base = a;
    while (n > 0) {
      if (n & 1) acc = acc * base;
      n >>= 1;
      if (n) base = base * base;
    }
    return p < 0 ? reciprocal(acc) : acc;
  }
  const double x0 = a.value();
  if (q % 2 == 0 && x0 <= 0.0) throw EvalError("even root of non-positive value");
  if (q % 2 == 1 && x0 == 0.0) throw EvalError("rational power at zero base");
  std::vector<double> c(d + 1);
  const double r = static_cast<double>(p) / static_cast<double>(q);
  c[0] = real_pow_rational(x0, p, q);
  for (int k = 1; k <= d; ++k) c[k] = c[k - 1] * (r - (k - 1)) / (k * x0);
  Jet2 delta = a;
  delta.at(0, 0) = 0.0;
  return compose_series(c, delta);
}

Jet2 compose2(const Jet2& F, const Jet2& dx, const Jet2& dy) {
  assert(dx.value() == 0.0 && dy.value() == 0.0);
  assert(dx.degree() == dy.degree());
  const int d = dx.degree();
  const int df = F.degree();
  // Horner in dx of polynomials in dy: F = sum_a dx^a * (sum_b F[a][b] dy^b)
  Jet2 r = Jet2::constant(d, 0.0);
  for (int a = df; a >= 0; --a) {
    Jet2 row = Jet2::constant(d, 0.0);
    for (int b = df - a; b >= 0; --b) row = row * dy + F.at(a, b);
    r = r * dx + row;
  }
  return r;
}

Jet1 compose_curve(const Jet2& F, const Jet1& du, const Jet1& dv) {
  assert(du.value() == 0.0 && dv.value() == 0.0);
  assert(du.degree() == dv.degree());
  if (du.degree() > F.degree()) throw EvalError("curve degree exceeds jet degree");
  const int d = du.degree();
  const int df = F.degree();
  Jet1 r = Jet1::constant(d, 0.0);
  for (int a = df; a >= 0; --a) {
    Jet1 row = Jet1::constant(d, 0.0);
    for (int b = df - a; b >= 0; --b) row = row * dv + F.at(a, b);
    r = r * du + row;
  }
  return r;
}

// ---------------------------------------------------------------------------
// elementary-function Taylor coefficients

double real_pow_rational(double x, long long p, long long q) {
  const double r = static_cast<double>(p) / static_cast<double>(q);
  if (x >= 0.0) return std::pow(x, r);
  if (q % 2 == 0) throw EvalError("even root of negative value");
  const double mag = std::pow(-x, r);
  return (p % 2 == 0) ? mag : -mag;
}

void elem_taylor_coeffs(Elem f, double x0, int n, double* out) {
  switch (f) {
    case Elem::Sin:
    case Elem::Cos: {
      const double s = std::sin(x0), c = std::cos(x0);
      // derivative cycle of sin: sin, cos, -sin, -cos
      double cyc[4] = {s, c, -s, -c};
      const int off = (f == Elem::Cos) ? 1 : 0;
      double fact = 1.0;
      for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        out[k] = cyc[(k + off) % 4] / fact;
      }
      return;
    }
    case Elem::Sinh:
    case Elem::Cosh: {
      const double s = std::sinh(x0), c = std::cosh(x0);
      double fact = 1.0;
      for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        const bool even = (k % 2 == 0);
        const double d = (f == Elem::Sinh) ? (even ? s : c) : (even ? c : s);
        out[k] = d / fact;
      }
      return;
    }
    case Elem::Exp: {
      const double e = std::exp(x0);
      double fact = 1.0;
      for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        out[k] = e / fact;
      }
      return;
    }
    case Elem::Log: {
      if (x0 <= 0.0) throw EvalError("log of non-positive value");
      out[0] = std::log(x0);
      double pw = 1.0;
      for (int k = 1; k <= n; ++k) {
        pw *= x0;
        out[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (k * pw);
      }
      return;
    }
    case Elem::Sqrt: {
      if (x0 <= 0.0) throw EvalError("sqrt of non-positive value");
      out[0] = std::sqrt(x0);
      for (int k = 1; k <= n; ++k) out[k] = out[k - 1] * (0.5 - (k - 1)) / (k * x0);
      return;
    }
    case Elem::Atan: {
      // y' (1+x^2) = 1  =>  (1+x0^2) y^(k+1) = -2k x0 y^(k) - k(k-1) y^(k-1)
      std::vector<double> d(n + 1);
      d[0] = std::atan(x0);
      const double den = 1.0 + x0 * x0;
      if (n >= 1) d[1] = 1.0 / den;
      for (int k = 1; k < n; ++k)
        d[k + 1] = (-2.0 * k * x0 * d[k] - static_cast<double>(k) * (k - 1) * d[k - 1]) / den;
      double fact = 1.0;
      for (int k = 0; k <= n; ++k) {
        if (k > 0) fact *= k;
        out[k] = d[k] / fact;
      }
      return;
    }
    case Elem::Tan:
    case Elem::Tanh:
      break;  // handled by jet-level division
  }
  throw EvalError("unsupported elementary function");
}

}  // namespace mts

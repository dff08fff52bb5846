// Truncated Taylor arithmetic: bivariate jets (Jet2) for surface derivatives
// and univariate jets (Jet1) for quantities along curves.
#pragma once

#include <cassert>
#include <span>
#include <stdexcept>
#include <vector>

namespace mts {

struct EvalError : std::runtime_error {
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

enum class Elem { Sin, Cos, Tan, Sinh, Cosh, Tanh, Exp, Log, Sqrt, Atan };

// 1D Taylor coefficients f^(k)(x0)/k!, k = 0..n. Throws EvalError outside the
// function's differentiable domain. Tan/Tanh are handled at the jet level.
void elem_taylor_coeffs(Elem f, double x0, int n, double* out);

// Univariate truncated Taylor polynomial around a base point; c[k] is the
// coefficient of tau^k.
class Jet1 {
 public:
  Jet1() : deg_(0), c_(1, 0.0) {}
  explicit Jet1(int degree) : deg_(degree), c_(degree + 1, 0.0) { assert(degree >= 0); }

  static Jet1 constant(int degree, double v) {
    Jet1 j(degree);
    j.c_[0] = v;
    return j;
  }
  // base value v, unit first coefficient: represents v + tau
  static Jet1 variable(int degree, double v) {
    Jet1 j(degree);
    j.c_[0] = v;
    if (degree >= 1) j.c_[1] = 1.0;
    return j;
  }

  int degree() const { return deg_; }
  double value() const { return c_[0]; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }
  std::span<const double> coeffs() const { return c_; }

  // d/dtau, one degree lower
  Jet1 derivative() const;

  Jet1 operator-() const;
  Jet1& operator+=(const Jet1& o);
  Jet1& operator-=(const Jet1& o);

 private:
  int deg_;
  std::vector<double> c_;
};

Jet1 operator+(const Jet1& a, const Jet1& b);
Jet1 operator-(const Jet1& a, const Jet1& b);
Jet1 operator*(const Jet1& a, const Jet1& b);
Jet1 operator/(const Jet1& a, const Jet1& b);
Jet1 operator+(const Jet1& a, double s);
Jet1 operator-(const Jet1& a, double s);
Jet1 operator*(const Jet1& a, double s);
Jet1 operator*(double s, const Jet1& a);
Jet1 operator/(const Jet1& a, double s);

Jet1 apply(Elem f, const Jet1& a);
Jet1 pow_rational(const Jet1& a, long long p, long long q);
// evaluate a polynomial (coefficients around 0) at a jet argument
Jet1 compose_poly(std::span<const double> coeffs, const Jet1& arg);
// functional inverse of x(tau) with x(0)=0, x'(0) != 0; result tau(x)
Jet1 invert_series(const Jet1& x);

// Bivariate truncated Taylor polynomial of fixed total degree; at(a,b) is the
// coefficient of du^a dv^b, a + b <= degree. Dense triangular storage, the
// degree is a run-time field.
class Jet2 {
 public:
  Jet2() : deg_(0), c_(1, 0.0) {}
  explicit Jet2(int degree) : deg_(degree), c_(count(degree), 0.0) { assert(degree >= 0); }

  static int count(int degree) { return (degree + 1) * (degree + 2) / 2; }

  static Jet2 constant(int degree, double v) {
    Jet2 j(degree);
    j.c_[0] = v;
    return j;
  }
  static Jet2 variable_u(int degree, double u0) {
    Jet2 j(degree);
    j.c_[0] = u0;
    if (degree >= 1) j.at(1, 0) = 1.0;
    return j;
  }
  static Jet2 variable_v(int degree, double v0) {
    Jet2 j(degree);
    j.c_[0] = v0;
    if (degree >= 1) j.at(0, 1) = 1.0;
    return j;
  }

  int degree() const { return deg_; }
  double value() const { return c_[0]; }

  int index(int a, int b) const {
    assert(a >= 0 && b >= 0 && a + b <= deg_);
    return a * (deg_ + 1) - a * (a - 1) / 2 + b;
  }
  double at(int a, int b) const { return c_[index(a, b)]; }
  double& at(int a, int b) { return c_[index(a, b)]; }

  // partial derivatives, one degree lower
  Jet2 du() const;
  Jet2 dv() const;

  // copy of the leading coefficients up to a lower degree
  Jet2 truncated(int degree) const;

  Jet2 operator-() const;
  Jet2& operator+=(const Jet2& o);
  Jet2& operator-=(const Jet2& o);

 private:
  int deg_;
  std::vector<double> c_;
};

Jet2 operator+(const Jet2& a, const Jet2& b);
Jet2 operator-(const Jet2& a, const Jet2& b);
Jet2 operator*(const Jet2& a, const Jet2& b);
Jet2 operator/(const Jet2& a, const Jet2& b);
Jet2 operator+(const Jet2& a, double s);
Jet2 operator-(const Jet2& a, double s);
Jet2 operator*(const Jet2& a, double s);
Jet2 operator*(double s, const Jet2& a);
Jet2 operator/(const Jet2& a, double s);

Jet2 apply(Elem f, const Jet2& a);
Jet2 pow_rational(const Jet2& a, long long p, long long q);

// F composed with the map (u,w) -> (x0 + dx(u,w), y0 + dy(u,w)); dx, dy must
// have zero value (offsets from F's base point).
Jet2 compose2(const Jet2& F, const Jet2& dx, const Jet2& dy);
// F composed with a curve (du(t), dv(t)), both zero-value offsets.
Jet1 compose_curve(const Jet2& F, const Jet1& du, const Jet1& dv);

// sign-preserving real root: x^(p/q) with odd q defined for negative x
double real_pow_rational(double x, long long p, long long q);
inline double real_cbrt(double x) { return real_pow_rational(x, 1, 3); }

}  // namespace mts

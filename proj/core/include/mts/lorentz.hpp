// Linear algebra of the Lorentz-Minkowski 3-space with inner product
// <x,x> = x^2 + y^2 - z^2 (z is the timelike axis; fixed convention).
#pragma once

#include <cmath>

#include "mts/jet.hpp"

namespace mts {

template <class T>
struct V3 {
  T x{}, y{}, z{};
};

using Vec3 = V3<double>;

template <class T>
V3<T> operator+(const V3<T>& a, const V3<T>& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

template <class T>
V3<T> operator-(const V3<T>& a, const V3<T>& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

template <class T>
V3<T> operator-(const V3<T>& a) {
  return {-a.x, -a.y, -a.z};
}

template <class T, class S>
V3<T> operator*(const S& s, const V3<T>& a) {
  return {s * a.x, s * a.y, s * a.z};
}

template <class T>
T minkowski_inner(const V3<T>& a, const V3<T>& b) {
  return a.x * b.x + a.y * b.y - a.z * b.z;
}

// determinant expansion with respect to the orthonormal basis; satisfies
// <v x w, v> = 0 and <v x w, v x w> = -<v,v><w,w> + <v,w>^2
template <class T>
V3<T> minkowski_cross(const V3<T>& v, const V3<T>& w) {
  return {v.y * w.z - v.z * w.y, v.z * w.x - v.x * w.z, -(v.x * w.y - v.y * w.x)};
}

inline double minkowski_norm(const Vec3& v) { return std::sqrt(std::fabs(minkowski_inner(v, v))); }

enum class CausalChar { Spacelike, Timelike, Lightlike };

inline CausalChar causal_character(const Vec3& v, double tol) {
  const double q = minkowski_inner(v, v);
  const double s = std::fabs(v.x) + std::fabs(v.y) + std::fabs(v.z);
  if (std::fabs(q) <= tol * s * s) return CausalChar::Lightlike;
  return q > 0.0 ? CausalChar::Spacelike : CausalChar::Timelike;
}

inline char causal_letter(CausalChar c) {
  switch (c) {
    case CausalChar::Spacelike: return 'S';
    case CausalChar::Timelike: return 'T';
    case CausalChar::Lightlike: return 'L';
  }
  return '?';
}

}  // namespace mts

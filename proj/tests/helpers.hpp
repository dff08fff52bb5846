#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <string>

#ifndef MTS_DATA_DIR
#define MTS_DATA_DIR "."
#endif

inline std::string data_path(const std::string& name) {
  return std::string(MTS_DATA_DIR) + "/" + name;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 0.0) {
  const double d = std::fabs(a - b);
  return d <= rel * std::max(std::fabs(a), std::fabs(b)) || d <= abs_floor;
}

// Richardson-extrapolated central difference of the k-th derivative
inline double fd_derivative(const std::function<double(double)>& f, double x, int order,
                            double h) {
  std::function<double(const std::function<double(double)>&, double, int, double)> central =
      [&](const std::function<double(double)>& g, double x0, int k, double hh) -> double {
    if (k == 0) return g(x0);
    auto lower = [&](double xx) { return central(g, xx, k - 1, hh); };
    return (lower(x0 + hh) - lower(x0 - hh)) / (2 * hh);
  };
  const double d1 = central(f, x, order, h);
  const double d2 = central(f, x, order, h / 2);
  return (4.0 * d2 - d1) / 3.0;
}

struct Rng {
  std::mt19937 gen;
  explicit Rng(uint32_t seed) : gen(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
};

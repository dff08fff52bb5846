// First fundamental form, the discriminant function lambda = EG - F^2, and
// the curvature fields K, H and K^ = lambda^2 K (smooth across the lightlike
// point set). Flat ambient R^3_1 only.
#pragma once

#include <iosfwd>
#include <optional>

#include "mts/expr.hpp"

namespace mts {

struct MetricJet {
  Jet2 E, F, G, lambda;
};

// metric coefficients and lambda as jets of the given degree (surface jets
// are taken one degree higher)
MetricJet first_fundamental(const SurfaceDef& s, double u, double v, int degree);

// lambda^2 K computed from unnormalized cross products; smooth across LD
double khat(const SurfaceDef& s, double u, double v);

struct CurvatureSample {
  double khat = 0.0;
  double lambda = 0.0;
  std::optional<double> K;  // empty within lightlike tolerance
  std::optional<double> H;
};

inline constexpr double kLightlikeTol = 1e-9;

CurvatureSample curvatures(const SurfaceDef& s, double u, double v,
                           double lightlike_tol = kLightlikeTol);

CausalChar causal_at(const SurfaceDef& s, double u, double v,
                     double lightlike_tol = kLightlikeTol);

// CSV header u,v,lambda,khat,K,H,causal; undefined K/H as empty cells
void write_field_csv(std::ostream& os, const SurfaceDef& s, int nu, int nv,
                     double lightlike_tol = kLightlikeTol, int threads = 1);

}  // namespace mts

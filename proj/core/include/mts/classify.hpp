// Null directions along the locus, the tangency function
// delta(t) = det(gamma'(t), eta(t)), and the lightlike point taxonomy:
// first kind, L_k (k = 3..5), admissible second kind, L_infinity.
#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mts/locus.hpp"

namespace mts {

// unit kernel direction of the Gram matrix [[E,F],[F,G]]; deterministic sign
// (first nonzero component positive)
std::array<double, 2> null_direction(double E, double F, double G);

// checked variant at a surface point (lightlike + corank-1 preconditions)
std::array<double, 2> null_direction_at(const SurfaceDef& s, double u, double v,
                                        double lightlike_tol = kLightlikeTol);

struct NullField {
  // Euclidean-normalized, sign-continuous along the curve
  std::vector<std::array<double, 2>> eta;
  // beta = eta <eta f, eta f>, the directional derivative along the kernel
  // field extension
  std::vector<double> beta;
  // -1 when a closed curve's null line field flips sign across the seam
  double seam_sign = 1.0;
};

NullField null_field(const SurfaceDef& s, const LocusCurve& c);

// beta at an arbitrary on-locus point for a prescribed eta direction
double beta_at(const SurfaceDef& s, double u, double v, std::array<double, 2> eta);

struct DeltaField {
  std::vector<double> delta;          // per locus sample
  double scale = 1.0;                 // max(RMS |delta|, 1)
  double max_abs = 0.0;               // component max of |delta|
  std::array<double, 5> deriv_scale{};  // RMS of fitted |delta^(j)|
  int window = 11;
  int degree = 5;

  // local least-squares fit around t; order <= 4
  double eval(const LocusCurve& c, const NullField& nf, double t, int order) const;
};

DeltaField delta_function(const LocusCurve& c, const NullField& nf, int window = 11,
                          int degree = 5);

enum class PointKind { FirstKind, Lk, AdmissibleSecondKind, LInfinity, Degenerate };

struct PointClass {
  PointKind kind = PointKind::FirstKind;
  int k = 0;                      // for Lk
  double delta = 0.0;             // witness values delta, delta', ...
  std::array<double, 4> derivs{};
};

inline constexpr double kClassifyTolRel = 1e-6;

PointClass classify_point(const LocusCurve& c, const NullField& nf, const DeltaField& df,
                          double t, double tol_rel = kClassifyTolRel);

struct SecondKindCandidate {
  double t;
  double u, v;
  PointClass cls;
};

// isolated zeros / grazing minima of delta on the component
std::vector<SecondKindCandidate> second_kind_candidates(const LocusCurve& c, const NullField& nf,
                                                        const DeltaField& df,
                                                        double tol_rel = kClassifyTolRel);

const char* point_kind_name(PointKind k);

// CSV t,u,v,delta,class,k (per-sample rows plus isolated candidates)
void write_classification_csv(std::ostream& os, const LocusCurve& c, const NullField& nf,
                              const DeltaField& df, double tol_rel = kClassifyTolRel);

// shared window machinery (used by the invariants module as well)
struct Window {
  std::vector<size_t> idx;
  std::vector<double> ts;     // unwrapped around the center
  std::vector<double> sign;   // seam multiplier for wrapped entries
  std::vector<int> wrap;      // loop count for coordinate unwrapping
  bool shrunk = false;
};

Window make_window(const LocusCurve& c, const NullField& nf, double t, int window);

}  // namespace mts

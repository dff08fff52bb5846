// Theorem-level verdicts: boundedness of the Gaussian curvature, shape
// classification, second-kind asymptotics, the K^ expansion identity, the
// geodesic-curvature limit, and the Gauss-Bonnet identity on flat tori.
#pragma once

#include "mts/invariants.hpp"

namespace mts {

struct PreconditionError : std::runtime_error {
  explicit PreconditionError(const std::string& w) : std::runtime_error(w) {}
};

struct BoundednessVerdict {
  bool bounded = false;
  bool all_first_kind = false;
  double max_abs_kL = 0;
  double max_abs_kN_minus_kB = 0;
  double tol = 0;
  std::vector<double> offending_ts;
};

BoundednessVerdict boundedness_verdict(const std::vector<InvariantSample>& table,
                                       bool all_first_kind, double tol = 1e-6);

enum class ShapeClass { LocallyConvex, Saddle, Inconclusive };

ShapeClass shape_class(double kL, double tol = 1e-6);
const char* shape_class_name(ShapeClass s);

struct PowerLawFit {
  double slope = 0;    // d log|kappa| / d log|eps|
  double constant = 0; // extrapolated scaled limit
  size_t n = 0;
  double log_rms = 0;  // residual of the log-log fit
};

struct AsymptoticOptions {
  double eps_min = 3e-5;
  double eps_max = 6e-4;
  size_t max_extrap = 12;   // samples used for the constant extrapolation
  double tol_rel = kClassifyTolRel;
};

struct AsymptoticFit {
  double t_star = 0;
  PowerLawFit kL, kN, kG, kB;  // scaled by |eps|^{4/3}, |eps|^{8/3}, eps|eps|, |eps|^{8/3}
};

// power-law fit of the invariants against eps = delta/|gamma'| approaching a
// second-kind parameter t_star
AsymptoticFit asymptotic_fit(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                             const DeltaField& df, double t_star,
                             const AsymptoticOptions& opt = {});

struct ExpansionReport {
  double residual0 = 0;                 // max |K^(u,0) + kappa_L/2|
  std::optional<double> residual1;      // max |2 K^_v(u,0) - (kappa_N - kappa_B)| where kL ~ 0
  size_t n = 0;
};

ExpansionReport khat_expansion_check(const SurfaceDef& s, const LocusCurve& c,
                                     const NullField& nf, const DeltaField& df,
                                     size_t max_samples = 32, double kL_zero_tol = 1e-6,
                                     double tol_rel = kClassifyTolRel);

// max over sampled first-kind points of |sqrt|lambda| kappa_g - kappa_L|
// with the s -> 0 limit taken by two-level Richardson
double geodesic_curvature_limit(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                                const DeltaField& df, size_t max_samples = 16, double s0 = 1e-2,
                                double tol_rel = kClassifyTolRel);

struct GaussBonnetOptions {
  int base_grid = 64;
  std::array<double, 3> taus{1e-3, 1e-4, 1e-5};  // tube radii relative to max |lambda|
  int max_depth = 5;
  int threads = 1;
  int scan_grid = 64;
  double verdict_tol = 1e-6;
};

struct GaussBonnetResult {
  double integral = 0;   // tau -> 0 extrapolation
  double expected = 0;   // 2 pi chi, always 0 for the torus topology
  double residual = 0;
  std::array<double, 3> tube_integrals{};
  size_t cells = 0;
};

// integral of K dA over a doubly periodic surface with the tube |lambda| < tau
// excluded and tau -> 0 extrapolated; requires every locus component
// nondegenerate and the boundedness verdict to hold
GaussBonnetResult gauss_bonnet(const SurfaceDef& s, const GaussBonnetOptions& opt = {});

}  // namespace mts

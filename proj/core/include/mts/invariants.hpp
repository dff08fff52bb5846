// Invariants along first-kind stretches of the locus: the frame (e, L, N),
// the extrinsic curvatures kappa_L / kappa_N / kappa_G, the causal curvature
// theta, and the adapted-chart (intrinsic) route for kappa_L and the
// balancing curvature kappa_B.
#pragma once

#include <iosfwd>

#include "mts/classify.hpp"

namespace mts {

struct Frame {
  Vec3 e;            // unit spacelike tangent of the image curve
  Vec3 L;            // df(eta), lightlike
  Vec3 N;            // <N,e> = 0, <N,N> = 0, <N,L> = 1
  double beta = 0;   // canonical (positive) directional derivative
  double speed2 = 0; // <gamma^', gamma^'> of the image curve
  Vec3 gamma_d1, gamma_d2;
  std::array<double, 2> eta{};
  std::array<double, 2> point{};
};

Frame frame_at(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
               int window = 11);

struct Kappas {
  double kL = 0, kN = 0, kG = 0;
};

Kappas kappa_LNG(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
                 int window = 11);

double causal_theta(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
                    int window = 11);

// Local chart psi(x, w) = p(x) + w q(x) built from windowed fits of the
// traced locus p and the null direction q; the u-axis is LD and d/dw is null,
// so the chart is adapted: F(x,0) = G(x,0) = 0. With `special` the locus is
// reparametrized by image arclength and w rescaled so that E(x,0) = 1 and
// lambda_w(x,0) = 1.
class AdaptedChart {
 public:
  AdaptedChart() = default;

  static AdaptedChart build(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                            double t0, int window = 11, bool special = false);

  const Jet2& E() const { return E_; }
  const Jet2& F() const { return F_; }
  const Jet2& G() const { return G_; }
  bool special() const { return special_; }

  // K^ = lambda^2 K of this chart's parametrization, and its w-derivative
  double khat0() const { return khat0_; }
  double khat_v() const { return khat_v_; }

  // metric jets re-anchored at (0, w) on the transversal through the base
  MetricJet metric_at(double w) const;

  // max |F|, |G| coefficient along the axis, relative
  double adapted_residual() const;
  // |E(0,0) - 1| and |G_w(0,0) - 1| for specially adapted charts
  double special_residual() const;

 private:
  const SurfaceDef* surf_ = nullptr;
  bool special_ = false;
  Jet1 p1_, p2_, q1_, q2_;  // chart map coefficients around the anchor
  Jet2 E_, F_, G_;
  double khat0_ = 0, khat_v_ = 0;
};

// eq-level intrinsic route: kappa_L = -E_v / (2 E cbrt(G_v)) on the axis
double kappa_L_intrinsic(const AdaptedChart& chart);
// adapted-coordinate balancing curvature (third-order intrinsic invariant)
double kappa_B(const AdaptedChart& chart);

struct InvariantSample {
  double t = 0, s = 0;
  double kL = 0, kN = 0, kG = 0, kB = 0;
  double theta = 0;
  double khat = 0;          // specially-adapted K^(u,0)
  double khat_v = 0;        // specially-adapted K^_v(u,0)
  double kL_intrinsic = 0;  // second route for kappa_L
};

// Conditioning floor for frame-based invariants: below |delta| ~ 1e-4 the
// image tangent is null up to the double-precision cancellation floor
// (speed^2 ~ delta^2 vs the eps-level rounding of the ambient inner product),
// so emitted values would carry noise-dominated digits.
inline constexpr double kFrameDeltaFloor = 1e-4;

// invariants at up to max_samples evenly spread first-kind samples whose
// frames are numerically well-posed
std::vector<InvariantSample> invariant_table(const SurfaceDef& s, const LocusCurve& c,
                                             const NullField& nf, const DeltaField& df,
                                             size_t max_samples = 256,
                                             double tol_rel = kClassifyTolRel);

// CSV t,s,kappa_L,kappa_N,kappa_G,kappa_B,theta,khat
void write_invariants_csv(std::ostream& os, const std::vector<InvariantSample>& table);

}  // namespace mts

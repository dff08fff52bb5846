// Locating and tracing the lightlike point set LD = {lambda = 0} as oriented
// curves in the parameter plane (pseudo-arclength predictor-corrector).
#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "mts/surface.hpp"

namespace mts {

struct LocusSample {
  double t = 0;        // uniform trace parameter (parameter-plane arclength)
  double u = 0, v = 0; // universal-cover coordinates for periodic domains
  double dlu = 0, dlv = 0;  // grad lambda
  double s = 0;        // accumulated arclength of the image curve f(gamma)
  double E = 0, F = 0, G = 0;
};

struct LocusCurve {
  std::vector<LocusSample> samples;
  bool closed = false;
  bool nondegenerate = true;
  double h = 0;            // nominal step
  double closure_gap = 0;  // parameter-plane distance from last back to first sample
  // lattice vector added to (u,v) per full loop on the universal cover
  std::array<double, 2> loop_shift{0.0, 0.0};

  // trace-parameter period of a closed curve
  double t_period() const { return t_max() - t_min() + closure_gap; }

  size_t size() const { return samples.size(); }
  double t_min() const { return samples.front().t; }
  double t_max() const { return samples.back().t; }
  // index of the sample nearest to trace parameter t (wraps when closed)
  size_t nearest(double t) const;
  // unit tangent (90 deg counterclockwise rotation of grad lambda)
  std::array<double, 2> tangent(size_t i) const;
};

struct TraceOptions {
  double h = 0;               // 0 = domain diagonal / 512
  double nondeg_tol = 1e-6;   // relative to RMS |grad lambda|
  size_t max_steps = 2000000;
};

inline double default_step(const SurfaceDef& s) { return s.diag() / 512.0; }

// one refined seed per sign-change cell on an (nu x nv) grid
std::vector<std::array<double, 2>> scan_locus(const SurfaceDef& s, int nu, int nv);

struct TraceError : std::runtime_error {
  explicit TraceError(const std::string& w) : std::runtime_error(w) {}
};

LocusCurve trace_locus(const SurfaceDef& s, std::array<double, 2> seed,
                       const TraceOptions& opt = {});

// scan + trace with seeds on already-traced components skipped
std::vector<LocusCurve> trace_all(const SurfaceDef& s, int nu = 64, int nv = 64,
                                  const TraceOptions& opt = {});

// CSV t,u,v,s,grad_lambda_u,grad_lambda_v
void write_locus_csv(std::ostream& os, const LocusCurve& c);

}  // namespace mts

#include "mts/locus.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace mts {

namespace {

struct LambdaEval {
  double lambda, du, dv;
  double E, F, G;
  double scale;  // metric-squared scale for relative lambda tolerances
};

LambdaEval lambda_at(const SurfaceDef& s, double u, double v) {
  MetricJet m = first_fundamental(s, u, v, 1);
  LambdaEval e;
  e.lambda = m.lambda.value();
  e.du = m.lambda.at(1, 0);
  e.dv = m.lambda.at(0, 1);
  e.E = m.E.value();
  e.F = m.F.value();
  e.G = m.G.value();
  const double ms = std::fabs(e.E) + 2 * std::fabs(e.F) + std::fabs(e.G);
  e.scale = std::max(ms * ms, 1e-300);
  return e;
}

constexpr double kCorrectorTol = 1e-13;

// Newton steps along grad lambda; returns false on divergence
bool correct(const SurfaceDef& s, double& u, double& v, LambdaEval& e) {
  e = lambda_at(s, u, v);
  for (int it = 0; it < 10; ++it) {
    if (std::fabs(e.lambda) <= kCorrectorTol * e.scale) return true;
    const double g2 = e.du * e.du + e.dv * e.dv;
    if (g2 == 0.0) return false;
    const double step = e.lambda / g2;
    const double nu = u - step * e.du, nv = v - step * e.dv;
    if (!s.contains(nu, nv, 1e-6)) return false;
    u = nu;
    v = nv;
    e = lambda_at(s, u, v);
  }
  return std::fabs(e.lambda) <= kCorrectorTol * e.scale;
}

double wrap_delta(double d, double period, bool periodic) {
  if (!periodic) return d;
  return d - period * std::round(d / period);
}

double param_dist(const SurfaceDef& s, double ua, double va, double ub, double vb) {
  return std::hypot(wrap_delta(ua - ub, s.period_u(), s.periodic_u),
                    wrap_delta(va - vb, s.period_v(), s.periodic_v));
}

}  // namespace

size_t LocusCurve::nearest(double t) const {
  if (samples.empty()) return 0;
  if (closed) {
    const double span = t_period();
    t = t_min() + std::fmod(t - t_min(), span) + (t < t_min() ? span : 0.0);
  }
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const LocusSample& a, double x) { return a.t < x; });
  if (it == samples.end()) return samples.size() - 1;
  if (it == samples.begin()) return 0;
  const size_t i = static_cast<size_t>(it - samples.begin());
  return (t - samples[i - 1].t <= samples[i].t - t) ? i - 1 : i;
}

std::array<double, 2> LocusCurve::tangent(size_t i) const {
  const auto& sm = samples[i];
  const double n = std::hypot(sm.dlu, sm.dlv);
  return {-sm.dlv / n, sm.dlu / n};
}

std::vector<std::array<double, 2>> scan_locus(const SurfaceDef& s, int nu, int nv) {
  if (nu < 8 || nv < 8) throw EvalError("scan grid must be at least 8x8");
  const int cu = nu, cv = nv;
  std::vector<double> lam((cu + 1) * (cv + 1)), scl((cu + 1) * (cv + 1));
  auto node_u = [&](int i) { return s.u0 + (s.u1 - s.u0) * static_cast<double>(i) / cu; };
  auto node_v = [&](int j) { return s.v0 + (s.v1 - s.v0) * static_cast<double>(j) / cv; };
  for (int j = 0; j <= cv; ++j)
    for (int i = 0; i <= cu; ++i) {
      const LambdaEval e = lambda_at(s, node_u(i), node_v(j));
      lam[j * (cu + 1) + i] = e.lambda;
      scl[j * (cu + 1) + i] = e.scale;
    }

  std::vector<std::array<double, 2>> seeds;
  auto near_zero = [&](int i, int j) {
    return std::fabs(lam[j * (cu + 1) + i]) <= 1e-12 * scl[j * (cu + 1) + i];
  };
  auto bisect_edge = [&](double ua, double va, double la, double ub, double vb) {
    // lambda changes sign between the endpoints
    for (int it = 0; it < 200; ++it) {
      const double um = 0.5 * (ua + ub), vm = 0.5 * (va + vb);
      const LambdaEval e = lambda_at(s, um, vm);
      if (std::fabs(e.lambda) <= 1e-12 * e.scale) return std::array<double, 2>{um, vm};
      if ((e.lambda > 0) == (la > 0)) {
        ua = um;
        va = vm;
        la = e.lambda;
      } else {
        ub = um;
        vb = vm;
      }
    }
    return std::array<double, 2>{0.5 * (ua + ub), 0.5 * (va + vb)};
  };

  for (int j = 0; j < cv; ++j)
    for (int i = 0; i < cu; ++i) {
      // node zeros give seeds directly (locus passing through grid lines)
      if (near_zero(i, j)) {
        seeds.push_back({node_u(i), node_v(j)});
        continue;
      }
      const int corners[4][2] = {{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
      bool found = false;
      for (int e = 0; e < 4 && !found; ++e) {
        const auto [ia, ja] = corners[e];
        const auto [ib, jb] = corners[(e + 1) % 4];
        const double la = lam[ja * (cu + 1) + ia], lb = lam[jb * (cu + 1) + ib];
        if (std::fabs(la) <= 1e-12 * scl[ja * (cu + 1) + ia] ||
            std::fabs(lb) <= 1e-12 * scl[jb * (cu + 1) + ib])
          continue;
        if ((la > 0) != (lb > 0)) {
          seeds.push_back(bisect_edge(node_u(ia), node_v(ja), la, node_u(ib), node_v(jb)));
          found = true;
        }
      }
    }
  return seeds;
}

namespace {

struct RawSample {
  double u, v, dlu, dlv, E, F, G;
};

// trace in one direction until closure, domain exit or degeneracy;
// returns exit reason
enum class Stop { Closed, Exit, Degenerate };

Stop trace_direction(const SurfaceDef& s, double u0, double v0, double dir, double h,
                     const TraceOptions& opt, std::vector<RawSample>& out, bool& degenerate) {
  LambdaEval e = lambda_at(s, u0, v0);
  double u = u0, v = v0;
  if (!correct(s, u, v, e)) throw TraceError("corrector failed at seed");

  auto tangent = [&](const LambdaEval& le) {
    const double n = std::hypot(le.du, le.dv);
    return std::array<double, 2>{-le.dv / n * dir, le.du / n * dir};
  };

  double grad_sq_sum = e.du * e.du + e.dv * e.dv;
  size_t nsamp = 1;
  out.push_back({u, v, e.du, e.dv, e.E, e.F, e.G});
  auto t0 = tangent(e);
  const double su = u, sv = v;

  for (size_t step = 0; step < opt.max_steps; ++step) {
    const auto tg = tangent(e);
    double hs = h;
    double nu_ = 0, nv_ = 0;
    LambdaEval ne;
    bool ok = false;
    while (hs >= 1e-8) {
      nu_ = u + hs * tg[0];
      nv_ = v + hs * tg[1];
      if (!s.contains(nu_, nv_)) return Stop::Exit;
      if (correct(s, nu_, nv_, ne)) {
        // reject corrector solutions that jumped to another branch or turned
        // sharply (tangent continuity, 0.2 rad)
        const auto ntg = tangent(ne);
        if (param_dist(s, nu_, nv_, u, v) <= 2.0 * hs &&
            tg[0] * ntg[0] + tg[1] * ntg[1] > std::cos(0.2)) {
          ok = true;
          break;
        }
      }
      hs *= 0.5;
    }
    if (!ok) throw TraceError("corrector divergence below minimum step");

    const double gn = std::hypot(ne.du, ne.dv);
    const double rms = std::sqrt(grad_sq_sum / static_cast<double>(nsamp));
    if (gn < opt.nondeg_tol * rms) {
      degenerate = true;
      return Stop::Degenerate;
    }
    u = nu_;
    v = nv_;
    e = ne;
    out.push_back({u, v, e.du, e.dv, e.E, e.F, e.G});
    grad_sq_sum += gn * gn;
    ++nsamp;

    if (out.size() > 8) {
      const double dclose = param_dist(s, u, v, su, sv);
      if (dclose < 0.5 * h && tg[0] * t0[0] + tg[1] * t0[1] > 0.9) return Stop::Closed;
    }
  }
  throw TraceError("maximum trace steps exceeded");
}

}  // namespace

LocusCurve trace_locus(const SurfaceDef& s, std::array<double, 2> seed, const TraceOptions& opt) {
  LocusCurve c;
  c.h = opt.h > 0 ? opt.h : default_step(s);
  {
    const LambdaEval e = lambda_at(s, seed[0], seed[1]);
    if (std::hypot(e.du, e.dv) == 0.0) throw TraceError("zero gradient at seed");
  }

  bool degenerate = false;
  std::vector<RawSample> fwd;
  const Stop reason = trace_direction(s, seed[0], seed[1], +1.0, c.h, opt, fwd, degenerate);

  std::vector<RawSample> all;
  if (reason == Stop::Closed) {
    c.closed = true;
    c.closure_gap = param_dist(s, fwd.back().u, fwd.back().v, fwd.front().u, fwd.front().v);
    if (s.periodic_u)
      c.loop_shift[0] = s.period_u() * std::round((fwd.back().u - fwd.front().u) / s.period_u());
    if (s.periodic_v)
      c.loop_shift[1] = s.period_v() * std::round((fwd.back().v - fwd.front().v) / s.period_v());
    all = std::move(fwd);
  } else {
    // open curve: extend backward from the seed and keep forward orientation
    std::vector<RawSample> bwd;
    bool deg2 = false;
    trace_direction(s, seed[0], seed[1], -1.0, c.h, opt, bwd, deg2);
    degenerate = degenerate || deg2;
    all.reserve(bwd.size() + fwd.size());
    for (size_t i = bwd.size(); i-- > 1;) all.push_back(bwd[i]);
    for (auto& r : fwd) all.push_back(r);
  }
  c.nondegenerate = !degenerate;

  c.samples.resize(all.size());
  double t = 0.0, arc = 0.0, prev_speed = 0.0;
  for (size_t i = 0; i < all.size(); ++i) {
    const RawSample& r = all[i];
    LocusSample& m = c.samples[i];
    m.u = r.u;
    m.v = r.v;
    m.dlu = r.dlu;
    m.dlv = r.dlv;
    m.E = r.E;
    m.F = r.F;
    m.G = r.G;
    const double gn = std::hypot(r.dlu, r.dlv);
    const std::array<double, 2> tg{-r.dlv / gn, r.dlu / gn};
    // Minkowski speed of the image curve; nonnegative on LD, zero only at
    // second-kind points
    const double q = r.E * tg[0] * tg[0] + 2 * r.F * tg[0] * tg[1] + r.G * tg[1] * tg[1];
    const double speed = std::sqrt(std::max(q, 0.0));
    if (i > 0) {
      const double dt = param_dist(s, r.u, r.v, all[i - 1].u, all[i - 1].v);
      t += dt;
      arc += 0.5 * (speed + prev_speed) * dt;
    }
    m.t = t;
    m.s = arc;
    prev_speed = speed;
  }
  return c;
}

std::vector<LocusCurve> trace_all(const SurfaceDef& s, int nu, int nv, const TraceOptions& opt) {
  const auto seeds = scan_locus(s, nu, nv);
  std::vector<LocusCurve> curves;
  const double h = opt.h > 0 ? opt.h : default_step(s);
  for (const auto& seed : seeds) {
    bool used = false;
    for (const auto& c : curves) {
      for (const auto& sm : c.samples) {
        if (param_dist(s, seed[0], seed[1], sm.u, sm.v) < 1.5 * h) {
          used = true;
          break;
        }
      }
      if (used) break;
    }
    if (used) continue;
    curves.push_back(trace_locus(s, seed, opt));
  }
  return curves;
}

void write_locus_csv(std::ostream& os, const LocusCurve& c) {
  os << "t,u,v,s,grad_lambda_u,grad_lambda_v\n";
  char buf[256];
  for (const auto& m : c.samples) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m.t, m.u, m.v, m.s,
                  m.dlu, m.dlv);
    os << buf;
  }
}

}  // namespace mts

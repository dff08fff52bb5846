#include "mts/classify.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mts/polyfit.hpp"

namespace mts {

std::array<double, 2> null_direction(double E, double F, double G) {
  double a, b;
  if (std::fabs(E) >= std::fabs(G)) {
    a = -F;
    b = E;
  } else {
    a = G;
    b = -F;
  }
  const double n = std::hypot(a, b);
  if (n == 0.0) throw EvalError("rank-0 Gram matrix: internal inconsistency");
  a /= n;
  b /= n;
  // deterministic sign: first nonzero component positive
  const double lead = (std::fabs(a) > 1e-14) ? a : b;
  if (lead < 0) {
    a = -a;
    b = -b;
  }
  return {a, b};
}

std::array<double, 2> null_direction_at(const SurfaceDef& s, double u, double v,
                                        double lightlike_tol) {
  MetricJet m = first_fundamental(s, u, v, 0);
  const double E = m.E.value(), F = m.F.value(), G = m.G.value();
  const double ms = std::fabs(E) + 2 * std::fabs(F) + std::fabs(G);
  if (std::fabs(E * G - F * F) > lightlike_tol * ms * ms)
    throw EvalError("point is not lightlike");
  if (ms <= 1e-14) throw EvalError("rank-0 Gram matrix: internal inconsistency");
  return null_direction(E, F, G);
}

namespace {

// kernel-formula field extension evaluated as jets; eta value follows the
// branch with the dominant Gram entry, then Euclidean normalization
struct EtaJets {
  Jet2 e1, e2;
};

EtaJets eta_field_jets(const MetricJet& m) {
  const bool branchE = std::fabs(m.E.value()) >= std::fabs(m.G.value());
  Jet2 a = branchE ? -m.F : m.G;
  Jet2 b = branchE ? m.E : -m.F;
  Jet2 n2 = a * a + b * b;
  Jet2 n = pow_rational(n2, 1, 2);
  return {a / n, b / n};
}

double beta_from_metric(const MetricJet& m, std::array<double, 2>& eta_inout) {
  EtaJets ej = eta_field_jets(m);
  // align the field with the requested direction
  double sgn = 1.0;
  if (ej.e1.value() * eta_inout[0] + ej.e2.value() * eta_inout[1] < 0) sgn = -1.0;
  eta_inout = {sgn * ej.e1.value(), sgn * ej.e2.value()};
  // g = <eta f, eta f> is quadratic in the field, so its jet is sign-free;
  // the directional derivative along the aligned direction carries the sign
  Jet2 g = ej.e1 * ej.e1 * m.E + 2.0 * (ej.e1 * ej.e2 * m.F) + ej.e2 * ej.e2 * m.G;
  return eta_inout[0] * g.at(1, 0) + eta_inout[1] * g.at(0, 1);
}

}  // namespace

double beta_at(const SurfaceDef& s, double u, double v, std::array<double, 2> eta) {
  MetricJet m = first_fundamental(s, u, v, 2);
  return beta_from_metric(m, eta);
}

NullField null_field(const SurfaceDef& s, const LocusCurve& c) {
  NullField nf;
  nf.eta.resize(c.size());
  nf.beta.resize(c.size());
  std::array<double, 2> prev{0.0, 0.0};
  for (size_t i = 0; i < c.size(); ++i) {
    const auto& sm = c.samples[i];
    auto eta = null_direction(sm.E, sm.F, sm.G);
    if (i > 0 && eta[0] * prev[0] + eta[1] * prev[1] < 0) eta = {-eta[0], -eta[1]};
    MetricJet m = first_fundamental(s, sm.u, sm.v, 2);
    nf.beta[i] = beta_from_metric(m, eta);
    nf.eta[i] = eta;
    prev = eta;
  }
  if (c.closed && c.size() > 1) {
    const auto& a = nf.eta.back();
    const auto& b = nf.eta.front();
    if (a[0] * b[0] + a[1] * b[1] < 0) nf.seam_sign = -1.0;
  }
  return nf;
}

Window make_window(const LocusCurve& c, const NullField& nf, double t, int window) {
  Window w;
  const size_t n = c.size();
  if (n == 0) return w;
  const size_t center = c.nearest(t);
  const int half = window / 2;
  // trace-parameter period for wrapped offsets
  const double period = c.closed ? c.t_period() : 0.0;
  int lo = static_cast<int>(center) - half;
  int hi = static_cast<int>(center) + half;
  if (!c.closed) {
    if (lo < 0) {
      hi = std::min<int>(hi - lo, static_cast<int>(n) - 1);
      lo = 0;
      w.shrunk = true;
    }
    if (hi >= static_cast<int>(n)) {
      lo = std::max(0, lo - (hi - static_cast<int>(n) + 1));
      hi = static_cast<int>(n) - 1;
      w.shrunk = true;
    }
  }
  for (int j = lo; j <= hi; ++j) {
    int wrap = 0;
    int idx = j;
    if (c.closed) {
      while (idx < 0) {
        idx += static_cast<int>(n);
        --wrap;
      }
      while (idx >= static_cast<int>(n)) {
        idx -= static_cast<int>(n);
        ++wrap;
      }
    }
    w.idx.push_back(static_cast<size_t>(idx));
    w.ts.push_back(c.samples[static_cast<size_t>(idx)].t + wrap * period);
    w.sign.push_back(wrap == 0 ? 1.0 : std::pow(nf.seam_sign, std::abs(wrap)));
    w.wrap.push_back(wrap);
  }
  // re-center the unwrapped parameters on the requested t, which may itself
  // lie a period away from the stored values
  if (c.closed && period > 0.0) {
    const double tc = c.samples[center].t;
    const double shift = period * std::round((t - tc) / period);
    if (shift != 0.0)
      for (auto& x : w.ts) x += shift;
  }
  return w;
}

namespace {

double delta_sample(const LocusCurve& c, const NullField& nf, size_t i) {
  const auto tg = c.tangent(i);
  const auto& e = nf.eta[i];
  return tg[0] * e[1] - tg[1] * e[0];
}

std::vector<double> fit_delta(const LocusCurve& c, const NullField& nf, const DeltaField& df,
                              double t) {
  Window w = make_window(c, nf, t, df.window);
  std::vector<double> ys(w.idx.size());
  for (size_t k = 0; k < w.idx.size(); ++k) ys[k] = w.sign[k] * df.delta[w.idx[k]];
  const int deg = std::min<int>(df.degree, static_cast<int>(w.idx.size()) - 1);
  return polyfit(w.ts, ys, deg, t);
}

}  // namespace

double DeltaField::eval(const LocusCurve& c, const NullField& nf, double t, int order) const {
  auto coeffs = fit_delta(c, nf, *this, t);
  return poly_eval(coeffs, 0.0, order);
}

DeltaField delta_function(const LocusCurve& c, const NullField& nf, int window, int degree) {
  DeltaField df;
  df.window = window;
  df.degree = degree;
  df.delta.resize(c.size());
  double sum2 = 0.0;
  for (size_t i = 0; i < c.size(); ++i) {
    df.delta[i] = delta_sample(c, nf, i);
    sum2 += df.delta[i] * df.delta[i];
    df.max_abs = std::max(df.max_abs, std::fabs(df.delta[i]));
  }
  const double rms = std::sqrt(sum2 / std::max<size_t>(c.size(), 1));
  // gamma' and eta are Euclidean-unit, so |delta| <= 1; the natural unit
  // keeps the L_infinity threshold meaningful when delta vanishes identically
  df.scale = std::max(rms, 1.0);

  std::array<double, 5> s2{};
  for (size_t i = 0; i < c.size(); ++i) {
    auto coeffs = fit_delta(c, nf, df, c.samples[i].t);
    for (int j = 0; j <= 4; ++j) {
      const double d = poly_eval(coeffs, 0.0, j);
      s2[j] += d * d;
    }
  }
  for (int j = 0; j <= 4; ++j)
    df.deriv_scale[j] = std::sqrt(s2[j] / std::max<size_t>(c.size(), 1));
  return df;
}

PointClass classify_point(const LocusCurve& c, const NullField& nf, const DeltaField& df,
                          double t, double tol_rel) {
  PointClass pc;
  auto coeffs = fit_delta(c, nf, df, t);
  pc.delta = poly_eval(coeffs, 0.0, 0);
  for (int j = 1; j <= 4; ++j) pc.derivs[j - 1] = poly_eval(coeffs, 0.0, j);

  if (!c.nondegenerate) {
    pc.kind = PointKind::Degenerate;
    return pc;
  }
  if (df.max_abs <= tol_rel * df.scale) {
    pc.kind = PointKind::LInfinity;
    return pc;
  }
  if (std::fabs(pc.delta) > tol_rel * df.scale) {
    pc.kind = PointKind::FirstKind;
    return pc;
  }
  const double span = std::max(c.t_max() - c.t_min(), c.h);
  auto thr = [&](int j) {
    const double floor = df.scale / std::pow(span, j);
    return tol_rel * std::max(df.deriv_scale[j], floor);
  };
  for (int k = 3; k <= 5; ++k) {
    bool lower_ok = true;
    for (int j = 1; j <= k - 3; ++j)
      if (std::fabs(pc.derivs[j - 1]) > thr(j)) lower_ok = false;
    if (lower_ok && std::fabs(pc.derivs[k - 3]) > thr(k - 2)) {
      pc.kind = PointKind::Lk;
      pc.k = k;
      return pc;
    }
  }
  pc.kind = PointKind::AdmissibleSecondKind;
  return pc;
}

std::vector<SecondKindCandidate> second_kind_candidates(const LocusCurve& c, const NullField& nf,
                                                        const DeltaField& df, double tol_rel) {
  std::vector<SecondKindCandidate> out;
  if (!c.nondegenerate || df.max_abs <= tol_rel * df.scale) return out;
  const size_t n = c.size();
  auto push = [&](double t) {
    for (const auto& o : out)
      if (std::fabs(o.t - t) < c.h) return;
    SecondKindCandidate sc;
    sc.t = t;
    const size_t i = c.nearest(t);
    // interpolate the parameter-plane point linearly between samples
    size_t j = i;
    if (t > c.samples[i].t && i + 1 < n)
      j = i + 1;
    else if (t < c.samples[i].t && i > 0)
      j = i - 1;
    if (i == j) {
      sc.u = c.samples[i].u;
      sc.v = c.samples[i].v;
    } else {
      const double dt = c.samples[j].t - c.samples[i].t;
      const double a = dt != 0.0 ? (t - c.samples[i].t) / dt : 0.0;
      sc.u = (1 - a) * c.samples[i].u + a * c.samples[j].u;
      sc.v = (1 - a) * c.samples[i].v + a * c.samples[j].v;
    }
    sc.cls = classify_point(c, nf, df, t, tol_rel);
    if (sc.cls.kind != PointKind::FirstKind) out.push_back(sc);
  };

  auto dval = [&](double t) { return df.eval(c, nf, t, 0); };
  auto dder = [&](double t) { return df.eval(c, nf, t, 1); };
  for (size_t i = 0; i + 1 < n; ++i) {
    double ta = c.samples[i].t, tb = c.samples[i + 1].t;
    const double da = df.delta[i], db = df.delta[i + 1];
    if ((da > 0) != (db > 0) && da != 0.0) {
      double fa = da;
      for (int it = 0; it < 80; ++it) {
        const double tm = 0.5 * (ta + tb);
        const double fm = dval(tm);
        if ((fm > 0) == (fa > 0)) {
          ta = tm;
          fa = fm;
        } else {
          tb = tm;
        }
      }
      push(0.5 * (ta + tb));
    } else {
      // grazing zero: local minimum of |delta| below threshold
      const double ga = dder(ta), gb = dder(tb);
      if ((ga > 0) != (gb > 0)) {
        double la = ta, lb = tb, fa = ga;
        for (int it = 0; it < 80; ++it) {
          const double tm = 0.5 * (la + lb);
          const double fm = dder(tm);
          if ((fm > 0) == (fa > 0)) {
            la = tm;
            fa = fm;
          } else {
            lb = tm;
          }
        }
        const double tm = 0.5 * (la + lb);
        if (std::fabs(dval(tm)) <= tol_rel * df.scale) push(tm);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SecondKindCandidate& a, const SecondKindCandidate& b) { return a.t < b.t; });
  return out;
}

const char* point_kind_name(PointKind k) {
  switch (k) {
    case PointKind::FirstKind: return "first_kind";
    case PointKind::Lk: return "L_k";
    case PointKind::AdmissibleSecondKind: return "admissible_second_kind";
    case PointKind::LInfinity: return "L_infinity";
    case PointKind::Degenerate: return "degenerate";
  }
  return "?";
}

void write_classification_csv(std::ostream& os, const LocusCurve& c, const NullField& nf,
                              const DeltaField& df, double tol_rel) {
  os << "t,u,v,delta,class,k\n";
  char buf[256];
  auto row = [&](double t, double u, double v, double delta, const PointClass& pc) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,", t, u, v, delta,
                  point_kind_name(pc.kind));
    os << buf;
    if (pc.kind == PointKind::Lk) os << pc.k;
    os << '\n';
  };
  for (size_t i = 0; i < c.size(); ++i) {
    const auto& sm = c.samples[i];
    row(sm.t, sm.u, sm.v, df.delta[i], classify_point(c, nf, df, sm.t, tol_rel));
  }
  for (const auto& sc : second_kind_candidates(c, nf, df, tol_rel))
    row(sc.t, sc.u, sc.v, sc.cls.delta, sc.cls);
}

}  // namespace mts

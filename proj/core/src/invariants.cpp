#include "mts/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mts/polyfit.hpp"

namespace mts {

namespace {

struct CurveFit {
  double t0 = 0;
  Jet1 p1, p2;  // locus components as polynomials in x = t - t0
  Jet1 q1, q2;  // null direction components (not renormalized)
};

CurveFit fit_curve(const LocusCurve& c, const NullField& nf, double t, int window, int degree) {
  Window w = make_window(c, nf, t, window);
  if (w.idx.size() < static_cast<size_t>(degree + 1))
    throw EvalError("window too small for curve fit");
  std::vector<double> us(w.idx.size()), vs(w.idx.size()), e1(w.idx.size()), e2(w.idx.size());
  for (size_t k = 0; k < w.idx.size(); ++k) {
    const auto& sm = c.samples[w.idx[k]];
    us[k] = sm.u + w.wrap[k] * c.loop_shift[0];
    vs[k] = sm.v + w.wrap[k] * c.loop_shift[1];
    e1[k] = w.sign[k] * nf.eta[w.idx[k]][0];
    e2[k] = w.sign[k] * nf.eta[w.idx[k]][1];
  }
  CurveFit cf;
  cf.t0 = t;
  const int deg = std::min<int>(degree, static_cast<int>(w.idx.size()) - 1);
  cf.p1 = poly_jet(polyfit(w.ts, us, deg, t), 3);
  cf.p2 = poly_jet(polyfit(w.ts, vs, deg, t), 3);
  cf.q1 = poly_jet(polyfit(w.ts, e1, deg, t), 3);
  cf.q2 = poly_jet(polyfit(w.ts, e2, deg, t), 3);
  return cf;
}

Jet1 zero_value(const Jet1& j) {
  Jet1 r = j;
  r[0] = 0.0;
  return r;
}

// polish a fitted anchor onto the locus; machine-level lambda keeps the frame
// relations <e,L> and <L,L> tight even where the image tangent is nearly null
void refine_to_locus(const SurfaceDef& s, double& u, double& v) {
  for (int it = 0; it < 3; ++it) {
    MetricJet m = first_fundamental(s, u, v, 1);
    const double lam = m.lambda.value();
    const double gu = m.lambda.at(1, 0), gv = m.lambda.at(0, 1);
    const double g2 = gu * gu + gv * gv;
    if (g2 == 0.0 || lam == 0.0) return;
    const double nu = u - lam * gu / g2, nv = v - lam * gv / g2;
    if (!s.contains(nu, nv, 1e-6)) return;
    u = nu;
    v = nv;
  }
}

struct GammaJets {
  V3<Jet1> g;             // image curve jets to degree 3
  Vec3 d1, d2;            // first and second t-derivatives
  double speed2 = 0;
  std::array<double, 2> point{};
  V3<Jet2> f;             // surface jets at the base point
};

GammaJets gamma_jets(const SurfaceDef& s, const CurveFit& cf) {
  GammaJets gj;
  gj.point = {cf.p1.value(), cf.p2.value()};
  refine_to_locus(s, gj.point[0], gj.point[1]);
  gj.f = eval_jet(s, gj.point[0], gj.point[1], 3);
  const Jet1 du = zero_value(cf.p1), dv = zero_value(cf.p2);
  gj.g = {compose_curve(gj.f.x, du, dv), compose_curve(gj.f.y, du, dv),
          compose_curve(gj.f.z, du, dv)};
  gj.d1 = {gj.g.x[1], gj.g.y[1], gj.g.z[1]};
  gj.d2 = {2 * gj.g.x[2], 2 * gj.g.y[2], 2 * gj.g.z[2]};
  gj.speed2 = minkowski_inner(gj.d1, gj.d1);
  return gj;
}

}  // namespace

Frame frame_at(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
               int window) {
  const CurveFit cf = fit_curve(c, nf, t, window, 3);
  const GammaJets gj = gamma_jets(s, cf);
  Frame fr;
  fr.point = gj.point;
  fr.gamma_d1 = gj.d1;
  fr.gamma_d2 = gj.d2;
  fr.speed2 = gj.speed2;
  if (!(fr.speed2 > 0)) throw EvalError("frame requires a first-kind point");

  std::array<double, 2> eta{cf.q1.value(), cf.q2.value()};
  const double qn = std::hypot(eta[0], eta[1]);
  eta = {eta[0] / qn, eta[1] / qn};
  double beta = beta_at(s, gj.point[0], gj.point[1], eta);
  // canonical sign: beta > 0 pins the normalized null field
  if (beta < 0) {
    eta = {-eta[0], -eta[1]};
    beta = -beta;
  }
  fr.eta = eta;
  fr.beta = beta;

  const Vec3 fu{gj.f.x.at(1, 0), gj.f.y.at(1, 0), gj.f.z.at(1, 0)};
  const Vec3 fv{gj.f.x.at(0, 1), gj.f.y.at(0, 1), gj.f.z.at(0, 1)};
  fr.L = eta[0] * fu + eta[1] * fv;
  fr.e = (1.0 / std::sqrt(fr.speed2)) * fr.gamma_d1;

  // N = N0 + sigma L stays on the two linear conditions for every sigma;
  // <N,N> is linear in sigma since L is lightlike, so the solution is unique
  const Vec3 a{fr.e.x, fr.e.y, -fr.e.z};
  const Vec3 b{fr.L.x, fr.L.y, -fr.L.z};
  auto edot = [](const Vec3& p, const Vec3& q) { return p.x * q.x + p.y * q.y + p.z * q.z; };
  const double aa = edot(a, a), ab = edot(a, b), bb = edot(b, b);
  const double det = aa * bb - ab * ab;
  if (std::fabs(det) < 1e-30) throw EvalError("degenerate frame system");
  const double alpha = -ab / det, betac = aa / det;
  Vec3 n0 = alpha * a + betac * b;
  const double sigma = -0.5 * minkowski_inner(n0, n0);
  fr.N = n0 + sigma * fr.L;
  return fr;
}

Kappas kappa_LNG(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
                 int window) {
  const Frame f0 = frame_at(s, c, nf, t, window);
  Kappas k;
  const double cbrt_beta = std::cbrt(f0.beta);
  k.kL = minkowski_inner(f0.gamma_d2, f0.L) / (f0.speed2 * cbrt_beta);
  k.kN = cbrt_beta * minkowski_inner(f0.gamma_d2, f0.N) / f0.speed2;

  // dN/dt and (log beta)' by fourth-order central differences of exactly
  // solved frames
  const double span = std::max(c.t_max() - c.t_min(), c.h);
  double ht = 1e-4 * span;
  double tc = t;
  if (!c.closed) {
    const double lo = c.t_min() + 2 * ht, hi = c.t_max() - 2 * ht;
    tc = std::clamp(t, std::min(lo, hi), std::max(lo, hi));
  }
  const Frame fp = frame_at(s, c, nf, tc + ht, window);
  const Frame fm = frame_at(s, c, nf, tc - ht, window);
  const Frame fp2 = frame_at(s, c, nf, tc + 2 * ht, window);
  const Frame fm2 = frame_at(s, c, nf, tc - 2 * ht, window);
  auto diff4 = [&](double p1, double m1, double p2, double m2) {
    return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * ht);
  };
  const Vec3 dN{diff4(fp.N.x, fm.N.x, fp2.N.x, fm2.N.x),
                diff4(fp.N.y, fm.N.y, fp2.N.y, fm2.N.y),
                diff4(fp.N.z, fm.N.z, fp2.N.z, fm2.N.z)};
  const double dlogbeta =
      diff4(std::log(fp.beta), std::log(fm.beta), std::log(fp2.beta), std::log(fm2.beta));
  k.kG = (minkowski_inner(f0.L, dN) + dlogbeta / 3.0) / std::sqrt(f0.speed2);
  return k;
}

double causal_theta(const SurfaceDef& s, const LocusCurve& c, const NullField& nf, double t,
                    int window) {
  const CurveFit cf = fit_curve(c, nf, t, window, 3);
  const GammaJets gj = gamma_jets(s, cf);
  if (!(gj.speed2 > 0)) throw EvalError("theta requires a first-kind point");
  const double a = minkowski_inner(gj.d2, gj.d2);
  const double b = minkowski_inner(gj.d1, gj.d2);
  return (gj.speed2 * a - b * b) / (gj.speed2 * gj.speed2 * gj.speed2);
}

namespace {

struct ChartJets {
  V3<Jet2> h;
  Jet2 E, F, G;
};

ChartJets chart_metric(const SurfaceDef& s, const Jet1& p1, const Jet1& p2, const Jet1& q1,
                       const Jet1& q2, double w0) {
  const double bu = p1.value() + w0 * q1.value();
  const double bv = p2.value() + w0 * q2.value();
  V3<Jet2> f = eval_jet(s, bu, bv, 4);
  Jet2 dx(4), dy(4);
  for (int a = 0; a <= 3; ++a) {
    const double pa = (a == 0) ? 0.0 : p1[a] + w0 * q1[a];
    const double pb = (a == 0) ? 0.0 : p2[a] + w0 * q2[a];
    dx.at(a, 0) = pa;
    dy.at(a, 0) = pb;
    dx.at(a, 1) = q1[a];
    dy.at(a, 1) = q2[a];
  }
  ChartJets cj;
  cj.h = {compose2(f.x, dx, dy), compose2(f.y, dx, dy), compose2(f.z, dx, dy)};
  const V3<Jet2> hu{cj.h.x.du(), cj.h.y.du(), cj.h.z.du()};
  const V3<Jet2> hw{cj.h.x.dv(), cj.h.y.dv(), cj.h.z.dv()};
  cj.E = minkowski_inner(hu, hu);
  cj.F = minkowski_inner(hu, hw);
  cj.G = minkowski_inner(hw, hw);
  return cj;
}

}  // namespace

AdaptedChart AdaptedChart::build(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                                 double t0, int window, bool special) {
  {
    // the chart degenerates where gamma' and eta align; require a
    // first-kind window
    Window w = make_window(c, nf, t0, window);
    for (size_t idx : w.idx) {
      const auto tg = c.tangent(idx);
      const auto& e = nf.eta[idx];
      if (std::fabs(tg[0] * e[1] - tg[1] * e[0]) <= kClassifyTolRel)
        throw EvalError("adapted chart window touches a non-first-kind sample");
    }
  }
  CurveFit cf = fit_curve(c, nf, t0, window, 3);
  {
    double au = cf.p1.value(), av = cf.p2.value();
    refine_to_locus(s, au, av);
    cf.p1[0] = au;
    cf.p2[0] = av;
  }
  {
    // canonical orientation of the chart's null leg: beta > 0 at the anchor
    std::array<double, 2> eta{cf.q1.value(), cf.q2.value()};
    const double qn = std::hypot(eta[0], eta[1]);
    eta = {eta[0] / qn, eta[1] / qn};
    if (beta_at(s, cf.p1.value(), cf.p2.value(), eta) < 0) {
      cf.q1 = -cf.q1;
      cf.q2 = -cf.q2;
    }
  }

  AdaptedChart ch;
  ch.surf_ = &s;
  ch.special_ = special;
  ch.p1_ = cf.p1;
  ch.p2_ = cf.p2;
  ch.q1_ = cf.q1;
  ch.q2_ = cf.q2;

  if (special) {
    ChartJets plain = chart_metric(s, cf.p1, cf.p2, cf.q1, cf.q2, 0.0);
    // arclength reparametrization x(t): x' = sqrt(E(t,0))
    Jet1 e_axis(3), gv_axis(3);
    for (int a = 0; a <= 3; ++a) e_axis[a] = plain.E.at(a, 0);
    for (int a = 0; a <= 2; ++a) gv_axis[a] = plain.G.at(a, 1);
    const Jet1 sq = pow_rational(e_axis, 1, 2);
    Jet1 X(3);
    for (int k = 1; k <= 3; ++k) X[k] = sq[k - 1] / k;
    const Jet1 tau = invert_series(X);
    // w-rescaling by the real cube root of G_w(x,0) makes lambda_w = 1
    const Jet1 kappa = pow_rational(compose_poly(gv_axis.coeffs(), tau), 1, 3);
    ch.p1_ = compose_poly(cf.p1.coeffs(), tau);
    ch.p2_ = compose_poly(cf.p2.coeffs(), tau);
    ch.q1_ = compose_poly(cf.q1.coeffs(), tau) / kappa;
    ch.q2_ = compose_poly(cf.q2.coeffs(), tau) / kappa;
  }

  ChartJets cj = chart_metric(s, ch.p1_, ch.p2_, ch.q1_, ch.q2_, 0.0);
  ch.E_ = cj.E;
  ch.F_ = cj.F;
  ch.G_ = cj.G;

  const V3<Jet2> hu{cj.h.x.du(), cj.h.y.du(), cj.h.z.du()};
  const V3<Jet2> hw{cj.h.x.dv(), cj.h.y.dv(), cj.h.z.dv()};
  const V3<Jet2> nhat = minkowski_cross(hu, hw);
  const V3<Jet2> nt{nhat.x.truncated(2), nhat.y.truncated(2), nhat.z.truncated(2)};
  const V3<Jet2> huu{hu.x.du().truncated(2), hu.y.du().truncated(2), hu.z.du().truncated(2)};
  const V3<Jet2> huw{hu.x.dv().truncated(2), hu.y.dv().truncated(2), hu.z.dv().truncated(2)};
  const V3<Jet2> hww{hw.x.dv().truncated(2), hw.y.dv().truncated(2), hw.z.dv().truncated(2)};
  const Jet2 m12 = minkowski_inner(huw, nt);
  const Jet2 khat_jet = m12 * m12 - minkowski_inner(huu, nt) * minkowski_inner(hww, nt);
  ch.khat0_ = khat_jet.value();
  ch.khat_v_ = khat_jet.at(0, 1);
  return ch;
}

MetricJet AdaptedChart::metric_at(double w) const {
  ChartJets cj = chart_metric(*surf_, p1_, p2_, q1_, q2_, w);
  MetricJet m{cj.E, cj.F, cj.G, Jet2()};
  m.lambda = m.E * m.G - m.F * m.F;
  return m;
}

double AdaptedChart::adapted_residual() const {
  // F(u,0) and G(u,0) must vanish along the axis to the fitted order
  double r = 0.0;
  const int amax = special_ ? 2 : 3;
  for (int a = 0; a <= amax; ++a)
    r = std::max({r, std::fabs(F_.at(a, 0)), std::fabs(G_.at(a, 0))});
  const double scale = std::fabs(E_.value()) + std::fabs(G_.at(0, 1)) + 1e-300;
  return r / scale;
}

double AdaptedChart::special_residual() const {
  if (!special_) return 0.0;
  return std::max(std::fabs(E_.value() - 1.0), std::fabs(G_.at(0, 1) - 1.0));
}

double kappa_L_intrinsic(const AdaptedChart& chart) {
  const double E = chart.E().value();
  const double Ev = chart.E().at(0, 1);
  const double Gv = chart.G().at(0, 1);
  if (std::fabs(Gv) < 1e-300) throw EvalError("G_v vanishes: not a first-kind point");
  return -Ev / (2.0 * E * real_cbrt(Gv));
}

double kappa_B(const AdaptedChart& chart) {
  const double E = chart.E().value();
  const double Ev = chart.E().at(0, 1);
  const double Eu = chart.E().at(1, 0);
  const double Evv = 2.0 * chart.E().at(0, 2);
  const double Fv = chart.F().at(0, 1);
  const double Fuv = chart.F().at(1, 1);
  const double Gv = chart.G().at(0, 1);
  const double Gvv = 2.0 * chart.G().at(0, 2);
  if (std::fabs(Gv) < 1e-300) throw EvalError("G_v vanishes: not a first-kind point");
  const double cb = real_cbrt(Gv);
  const double gv53 = Gv * cb * cb;
  return (-5.0 * Gv * (E * Evv - 2.0 * E * Fuv + Eu * Fv) + Ev * (E * Gvv - 2.0 * Fv * Fv)) /
         (10.0 * E * E * gv53);
}

std::vector<InvariantSample> invariant_table(const SurfaceDef& s, const LocusCurve& c,
                                             const NullField& nf, const DeltaField& df,
                                             size_t max_samples, double tol_rel) {
  std::vector<size_t> eligible;
  const size_t n = c.size();
  const size_t margin = c.closed ? 0 : 6;
  const double thr = std::max(tol_rel, kFrameDeltaFloor) * df.scale;
  for (size_t i = margin; i + margin < n; ++i) {
    if (std::fabs(df.delta[i]) > thr) eligible.push_back(i);
  }
  std::vector<InvariantSample> table;
  if (eligible.empty()) return table;
  const size_t count = std::min(max_samples, eligible.size());
  table.reserve(count);
  for (size_t k = 0; k < count; ++k) {
    const size_t i = eligible[k * eligible.size() / count];
    const auto& sm = c.samples[i];
    InvariantSample row;
    row.t = sm.t;
    row.s = sm.s;
    try {
      const Kappas kk = kappa_LNG(s, c, nf, sm.t);
      row.kL = kk.kL;
      row.kN = kk.kN;
      row.kG = kk.kG;
      row.theta = causal_theta(s, c, nf, sm.t);
      const AdaptedChart plain = AdaptedChart::build(s, c, nf, sm.t, df.window, false);
      row.kB = kappa_B(plain);
      row.kL_intrinsic = kappa_L_intrinsic(plain);
      const AdaptedChart sa = AdaptedChart::build(s, c, nf, sm.t, df.window, true);
      row.khat = sa.khat0();
      row.khat_v = sa.khat_v();
    } catch (const EvalError&) {
      continue;  // window grazes a second-kind point
    }
    table.push_back(row);
  }
  return table;
}

void write_invariants_csv(std::ostream& os, const std::vector<InvariantSample>& table) {
  os << "t,s,kappa_L,kappa_N,kappa_G,kappa_B,theta,khat\n";
  char buf[320];
  for (const auto& r : table) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.s,
                  r.kL, r.kN, r.kG, r.kB, r.theta, r.khat);
    os << buf;
  }
}

}  // namespace mts

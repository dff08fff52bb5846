#include "mts/surface.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <vector>

#include "mts/parallel.hpp"

namespace mts {

MetricJet first_fundamental(const SurfaceDef& s, double u, double v, int degree) {
  V3<Jet2> f = eval_jet(s, u, v, degree + 1);
  V3<Jet2> fu{f.x.du(), f.y.du(), f.z.du()};
  V3<Jet2> fv{f.x.dv(), f.y.dv(), f.z.dv()};
  MetricJet m{minkowski_inner(fu, fu), minkowski_inner(fu, fv), minkowski_inner(fv, fv), Jet2()};
  m.lambda = m.E * m.G - m.F * m.F;
  return m;
}

namespace {

struct SecondOrderData {
  double E, F, G, lambda;
  double h11, h12, h22;  // <f_uu, n>, <f_uv, n>, <f_vv, n> with n = f_u x f_v
  double metric_scale;
};

SecondOrderData second_order(const SurfaceDef& s, double u, double v) {
  V3<Jet2> f = eval_jet(s, u, v, 2);
  const Vec3 fu{f.x.at(1, 0), f.y.at(1, 0), f.z.at(1, 0)};
  const Vec3 fv{f.x.at(0, 1), f.y.at(0, 1), f.z.at(0, 1)};
  const Vec3 fuu{2 * f.x.at(2, 0), 2 * f.y.at(2, 0), 2 * f.z.at(2, 0)};
  const Vec3 fuv{f.x.at(1, 1), f.y.at(1, 1), f.z.at(1, 1)};
  const Vec3 fvv{2 * f.x.at(0, 2), 2 * f.y.at(0, 2), 2 * f.z.at(0, 2)};
  const Vec3 n = minkowski_cross(fu, fv);
  SecondOrderData d;
  d.E = minkowski_inner(fu, fu);
  d.F = minkowski_inner(fu, fv);
  d.G = minkowski_inner(fv, fv);
  d.lambda = d.E * d.G - d.F * d.F;
  d.h11 = minkowski_inner(fuu, n);
  d.h12 = minkowski_inner(fuv, n);
  d.h22 = minkowski_inner(fvv, n);
  const double m = std::fabs(d.E) + 2 * std::fabs(d.F) + std::fabs(d.G);
  d.metric_scale = m * m;
  return d;
}

}  // namespace

double khat(const SurfaceDef& s, double u, double v) {
  const SecondOrderData d = second_order(s, u, v);
  return d.h12 * d.h12 - d.h11 * d.h22;
}

CurvatureSample curvatures(const SurfaceDef& s, double u, double v, double lightlike_tol) {
  const SecondOrderData d = second_order(s, u, v);
  CurvatureSample c;
  c.lambda = d.lambda;
  c.khat = d.h12 * d.h12 - d.h11 * d.h22;
  if (std::fabs(d.lambda) > lightlike_tol * d.metric_scale) {
    c.K = c.khat / (d.lambda * d.lambda);
    const double root = std::sqrt(std::fabs(d.lambda));
    c.H = (d.E * d.h22 - 2 * d.F * d.h12 + d.G * d.h11) / (2 * d.lambda * root);
  }
  return c;
}

CausalChar causal_at(const SurfaceDef& s, double u, double v, double lightlike_tol) {
  const SecondOrderData d = second_order(s, u, v);
  if (std::fabs(d.lambda) <= lightlike_tol * d.metric_scale) return CausalChar::Lightlike;
  return d.lambda > 0 ? CausalChar::Spacelike : CausalChar::Timelike;
}

namespace {

void fmt_num(std::ostream& os, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  os << buf;
}

}  // namespace

void write_field_csv(std::ostream& os, const SurfaceDef& s, int nu, int nv,
                     double lightlike_tol, int threads) {
  os << "u,v,lambda,khat,K,H,causal\n";
  const int rows = nv + 1, cols = nu + 1;
  std::vector<std::string> lines(static_cast<size_t>(rows) * cols);
  parallel_for(rows, threads, [&](size_t j) {
    const double v = s.v0 + (s.v1 - s.v0) * static_cast<double>(j) / nv;
    for (int i = 0; i <= nu; ++i) {
      const double u = s.u0 + (s.u1 - s.u0) * static_cast<double>(i) / nu;
      const CurvatureSample c = curvatures(s, u, v, lightlike_tol);
      const CausalChar cc = causal_at(s, u, v, lightlike_tol);
      std::ostringstream ln;
      fmt_num(ln, u);
      ln << ',';
      fmt_num(ln, v);
      ln << ',';
      fmt_num(ln, c.lambda);
      ln << ',';
      fmt_num(ln, c.khat);
      ln << ',';
      if (c.K) fmt_num(ln, *c.K);
      ln << ',';
      if (c.H) fmt_num(ln, *c.H);
      ln << ',' << causal_letter(cc) << '\n';
      lines[j * cols + i] = ln.str();
    }
  });
  for (const auto& ln : lines) os << ln;
}

}  // namespace mts

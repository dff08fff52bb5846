#include "mts/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "mts/parallel.hpp"
#include "mts/polyfit.hpp"

namespace mts {

BoundednessVerdict boundedness_verdict(const std::vector<InvariantSample>& table,
                                       bool all_first_kind, double tol) {
  BoundednessVerdict v;
  v.all_first_kind = all_first_kind;
  v.tol = tol;
  double rmsN = 0, rmsB = 0;
  for (const auto& r : table) {
    rmsN += r.kN * r.kN;
    rmsB += r.kB * r.kB;
  }
  const size_t n = std::max<size_t>(table.size(), 1);
  const double scale = 1.0 + std::sqrt(rmsN / n) + std::sqrt(rmsB / n);
  for (const auto& r : table) {
    const double dk = std::fabs(r.kN - r.kB);
    v.max_abs_kL = std::max(v.max_abs_kL, std::fabs(r.kL));
    v.max_abs_kN_minus_kB = std::max(v.max_abs_kN_minus_kB, dk);
    if (std::fabs(r.kL) > tol * scale || dk > tol * scale) v.offending_ts.push_back(r.t);
  }
  v.bounded = all_first_kind && v.max_abs_kL <= tol * scale &&
              v.max_abs_kN_minus_kB <= tol * scale;
  return v;
}

ShapeClass shape_class(double kL, double tol) {
  if (kL > tol) return ShapeClass::LocallyConvex;
  if (kL < -tol) return ShapeClass::Saddle;
  return ShapeClass::Inconclusive;
}

const char* shape_class_name(ShapeClass s) {
  switch (s) {
    case ShapeClass::LocallyConvex: return "locally_convex";
    case ShapeClass::Saddle: return "saddle";
    case ShapeClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

struct AsymptoticSample {
  double x;    // t - t_star
  double eps;  // signed tangency scale delta/|gamma'|
  double kL, kN, kG, kB;
  bool has_kB = true;
};

PowerLawFit fit_power_law(const std::vector<AsymptoticSample>& rows, double scale_exp,
                          bool signed_eps, double (*pick)(const AsymptoticSample&),
                          size_t max_extrap) {
  PowerLawFit f;
  f.n = rows.size();
  // slope of log|kappa| against log|eps|
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    const double lx = std::log(std::fabs(r.eps));
    const double ly = std::log(std::fabs(pick(r)));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(rows.size());
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double b = (sy - f.slope * sx) / n;
  double rss = 0;
  for (const auto& r : rows) {
    const double lx = std::log(std::fabs(r.eps));
    const double res = std::log(std::fabs(pick(r))) - (f.slope * lx + b);
    rss += res * res;
  }
  f.log_rms = std::sqrt(rss / n);

  // scaled limit, extrapolated in x over the samples closest to t_star
  std::vector<AsymptoticSample> closest = rows;
  std::sort(closest.begin(), closest.end(),
            [](const AsymptoticSample& a, const AsymptoticSample& b2) {
              return std::fabs(a.x) < std::fabs(b2.x);
            });
  if (closest.size() > max_extrap) closest.resize(max_extrap);
  std::vector<double> xs, gs;
  for (const auto& r : closest) {
    const double mag = std::pow(std::fabs(r.eps), scale_exp);
    const double g = (signed_eps ? (r.eps < 0 ? -1.0 : 1.0) : 1.0) * mag * pick(r);
    xs.push_back(r.x);
    gs.push_back(g);
  }
  const int deg = xs.size() >= 6 ? 2 : (xs.size() >= 3 ? 1 : 0);
  auto coeffs = polyfit(xs, gs, deg, 0.0);
  f.constant = coeffs[0];
  return f;
}

}  // namespace

AsymptoticFit asymptotic_fit(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                             const DeltaField& df, double t_star, const AsymptoticOptions& opt) {
  {
    const PointClass pc = classify_point(c, nf, df, t_star, opt.tol_rel);
    if (pc.kind == PointKind::FirstKind || pc.kind == PointKind::LInfinity ||
        pc.kind == PointKind::Degenerate)
      throw PreconditionError("asymptotic fit requires an isolated second-kind parameter");
  }
  std::vector<AsymptoticSample> rows;
  const size_t margin = c.closed ? 0 : 6;
  for (size_t i = margin; i + margin < c.size(); ++i) {
    const auto& sm = c.samples[i];
    const double eps = df.delta[i];  // gamma' and eta are unit vectors
    const double mag = std::fabs(eps);
    if (mag < opt.eps_min || mag > opt.eps_max) continue;
    if (mag <= opt.tol_rel * df.scale) continue;
    AsymptoticSample row;
    row.x = sm.t - t_star;
    row.eps = eps;
    const Kappas kk = kappa_LNG(s, c, nf, sm.t);
    row.kL = kk.kL;
    row.kN = kk.kN;
    row.kG = kk.kG;
    try {
      row.kB = kappa_B(AdaptedChart::build(s, c, nf, sm.t, df.window, false));
    } catch (const EvalError&) {
      row.kB = 0.0;  // chart window grazes the second-kind point
      row.has_kB = false;
    }
    rows.push_back(row);
  }
  if (rows.size() < 6) throw PreconditionError("fewer than 6 usable samples for asymptotics");

  AsymptoticFit fit;
  fit.t_star = t_star;
  fit.kL = fit_power_law(rows, 4.0 / 3.0, false, [](const AsymptoticSample& r) { return r.kL; },
                         opt.max_extrap);
  fit.kN = fit_power_law(rows, 8.0 / 3.0, false, [](const AsymptoticSample& r) { return r.kN; },
                         opt.max_extrap);
  fit.kG = fit_power_law(rows, 2.0, true, [](const AsymptoticSample& r) { return r.kG; },
                         opt.max_extrap);
  std::vector<AsymptoticSample> kb_rows;
  for (const auto& r : rows)
    if (r.has_kB) kb_rows.push_back(r);
  if (kb_rows.size() >= 6)
    fit.kB = fit_power_law(kb_rows, 8.0 / 3.0, false,
                           [](const AsymptoticSample& r) { return r.kB; }, opt.max_extrap);
  return fit;
}

namespace {

std::vector<size_t> first_kind_subsample(const LocusCurve& c, const DeltaField& df,
                                         size_t max_samples, double tol_rel) {
  std::vector<size_t> eligible;
  const size_t margin = c.closed ? 0 : 6;
  const double thr = std::max(tol_rel, kFrameDeltaFloor) * df.scale;
  for (size_t i = margin; i + margin < c.size(); ++i)
    if (std::fabs(df.delta[i]) > thr) eligible.push_back(i);
  std::vector<size_t> out;
  const size_t count = std::min(max_samples, eligible.size());
  for (size_t k = 0; k < count; ++k) out.push_back(eligible[k * eligible.size() / count]);
  return out;
}

}  // namespace

ExpansionReport khat_expansion_check(const SurfaceDef& s, const LocusCurve& c,
                                     const NullField& nf, const DeltaField& df,
                                     size_t max_samples, double kL_zero_tol, double tol_rel) {
  ExpansionReport rep;
  for (size_t i : first_kind_subsample(c, df, max_samples, tol_rel)) {
    const double t = c.samples[i].t;
    const Kappas kk = kappa_LNG(s, c, nf, t);
    AdaptedChart sa;
    try {
      sa = AdaptedChart::build(s, c, nf, t, df.window, true);
    } catch (const EvalError&) {
      continue;
    }
    rep.residual0 = std::max(rep.residual0, std::fabs(sa.khat0() + 0.5 * kk.kL));
    const double scale = 1.0 + std::fabs(kk.kN);
    if (std::fabs(kk.kL) <= kL_zero_tol * scale) {
      const double kB = kappa_B(AdaptedChart::build(s, c, nf, t, df.window, false));
      const double r1 = std::fabs(2.0 * sa.khat_v() - (kk.kN - kB));
      rep.residual1 = std::max(rep.residual1.value_or(0.0), r1);
    }
    ++rep.n;
  }
  return rep;
}

double geodesic_curvature_limit(const SurfaceDef& s, const LocusCurve& c, const NullField& nf,
                                const DeltaField& df, size_t max_samples, double s0,
                                double tol_rel) {
  double worst = 0.0;
  auto kg_tilde = [](const MetricJet& m) {
    // sqrt|lambda| * kappa_g of the u-curve family, smooth across the axis
    const double E = m.E.value(), F = m.F.value();
    const double Eu = m.E.at(1, 0), Ev = m.E.at(0, 1), Fu = m.F.at(1, 0);
    return (-F * Eu + 2 * E * Fu - E * Ev) / (2 * std::pow(E, 1.5));
  };
  for (size_t i : first_kind_subsample(c, df, max_samples, tol_rel)) {
    const double t = c.samples[i].t;
    const double kL = kappa_LNG(s, c, nf, t).kL;
    AdaptedChart sa;
    try {
      sa = AdaptedChart::build(s, c, nf, t, df.window, true);
    } catch (const EvalError&) {
      continue;
    }
    for (double side : {1.0, -1.0}) {
      const double k1 = kg_tilde(sa.metric_at(side * s0));
      const double k2 = kg_tilde(sa.metric_at(side * s0 * 0.5));
      const double lim = 2.0 * k2 - k1;
      worst = std::max(worst, std::fabs(lim - kL));
    }
  }
  return worst;
}

namespace {

struct TubeIntegral {
  const SurfaceDef* s;
  double tau_abs;
  int max_depth;

  double lam(double u, double v) const {
    MetricJet m = first_fundamental(*s, u, v, 0);
    return m.E.value() * m.G.value() - m.F.value() * m.F.value();
  }

  // K sqrt|lambda| masked outside the tube
  double integrand(double u, double v) const {
    const CurvatureSample cs = curvatures(*s, u, v, 0.0);
    if (std::fabs(cs.lambda) < tau_abs || !cs.K) return 0.0;
    return *cs.K * std::sqrt(std::fabs(cs.lambda));
  }

  double cell(double u0, double u1, double v0, double v1, int depth, size_t& cells) const {
    // 5-point Gauss-Legendre per axis
    static const double gx[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
    static const double gw[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};
    bool straddles = false;
    {
      double mn = 1e300, mx = -1e300;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          const double l = lam(u0 + (u1 - u0) * 0.5 * i, v0 + (v1 - v0) * 0.5 * j);
          mn = std::min(mn, std::fabs(l));
          mx = std::max(mx, std::fabs(l));
        }
      straddles = mn < 4.0 * tau_abs;
    }
    if (straddles && depth < max_depth) {
      const double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
      return cell(u0, um, v0, vm, depth + 1, cells) + cell(um, u1, v0, vm, depth + 1, cells) +
             cell(u0, um, vm, v1, depth + 1, cells) + cell(um, u1, vm, v1, depth + 1, cells);
    }
    ++cells;
    const double su = 0.5 * (u1 - u0), sv = 0.5 * (v1 - v0);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j)
        acc += gw[i] * gw[j] * integrand(u0 + su * (1 + gx[i]), v0 + sv * (1 + gx[j]));
    return acc * su * sv;
  }
};

}  // namespace

GaussBonnetResult gauss_bonnet(const SurfaceDef& s, const GaussBonnetOptions& opt) {
  if (!(s.periodic_u && s.periodic_v))
    throw PreconditionError("Gauss-Bonnet requires a closed (doubly periodic) surface");

  // hypotheses: non-degenerate locus with bounded Gaussian curvature
  const auto curves = trace_all(s, opt.scan_grid, opt.scan_grid);
  for (const auto& c : curves) {
    if (!c.nondegenerate) throw PreconditionError("degenerate lightlike locus");
    const NullField nf = null_field(s, c);
    const DeltaField df = delta_function(c, nf);
    bool all_first = true;
    for (size_t i = 0; i < c.size(); ++i)
      if (std::fabs(df.delta[i]) <= kClassifyTolRel * df.scale) all_first = false;
    const auto table = invariant_table(s, c, nf, df, 32);
    const BoundednessVerdict v = boundedness_verdict(table, all_first, opt.verdict_tol);
    if (!v.bounded) throw PreconditionError("Gaussian curvature unbounded near the locus");
  }

  // scale for the tube radii
  double lam_scale = 0.0;
  for (int j = 0; j <= opt.scan_grid; ++j)
    for (int i = 0; i <= opt.scan_grid; ++i) {
      const double u = s.u0 + (s.u1 - s.u0) * static_cast<double>(i) / opt.scan_grid;
      const double v = s.v0 + (s.v1 - s.v0) * static_cast<double>(j) / opt.scan_grid;
      MetricJet m = first_fundamental(s, u, v, 0);
      lam_scale = std::max(lam_scale,
                           std::fabs(m.E.value() * m.G.value() - m.F.value() * m.F.value()));
    }
  if (lam_scale == 0.0) lam_scale = 1.0;

  GaussBonnetResult res;
  res.expected = 0.0;  // 2 pi chi(torus)
  const int n = opt.base_grid;
  for (int k = 0; k < 3; ++k) {
    TubeIntegral ti{&s, opt.taus[k] * lam_scale, opt.max_depth};
    std::vector<double> partial(static_cast<size_t>(n) * n, 0.0);
    std::vector<size_t> cellcount(static_cast<size_t>(n) * n, 0);
    parallel_for(static_cast<size_t>(n) * n, opt.threads, [&](size_t idx) {
      const int i = static_cast<int>(idx % n), j = static_cast<int>(idx / n);
      const double u0 = s.u0 + (s.u1 - s.u0) * static_cast<double>(i) / n;
      const double u1 = s.u0 + (s.u1 - s.u0) * static_cast<double>(i + 1) / n;
      const double v0 = s.v0 + (s.v1 - s.v0) * static_cast<double>(j) / n;
      const double v1 = s.v0 + (s.v1 - s.v0) * static_cast<double>(j + 1) / n;
      size_t cells = 0;
      partial[idx] = ti.cell(u0, u1, v0, v1, 0, cells);
      cellcount[idx] = cells;
    });
    double acc = 0.0;
    size_t cells = 0;
    for (size_t idx = 0; idx < partial.size(); ++idx) {
      acc += partial[idx];
      cells += cellcount[idx];
    }
    res.tube_integrals[k] = acc;
    res.cells += cells;
  }

  // tau -> 0 extrapolation with the O(tau^{3/2}) tube-removal error model
  const double p = 1.5;
  const double t1 = std::pow(opt.taus[1], p), t2 = std::pow(opt.taus[2], p);
  const double I1 = res.tube_integrals[1], I2 = res.tube_integrals[2];
  res.integral = I2 - (I1 - I2) * t2 / (t1 - t2);
  res.residual = std::fabs(res.integral - res.expected);
  return res;
}

}  // namespace mts

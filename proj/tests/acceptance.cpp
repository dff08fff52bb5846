// End-to-end acceptance suite: one pass/fail line per criterion, nonzero exit
// if any criterion fails. Tolerances are fixed here, not tunable.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mts/analysis.hpp"
#include "mts/monge.hpp"

#ifndef MTS_DATA_DIR
#define MTS_DATA_DIR "."
#endif

using namespace mts;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what.c_str(),
              detail.c_str());
  if (!ok) ++g_failures;
}

std::string dpath(const char* name) { return std::string(MTS_DATA_DIR) + "/" + name; }

struct Fixture {
  SurfaceDef s;
  LocusCurve c;
  NullField nf;
  DeltaField df;
  std::vector<InvariantSample> table;
};

Fixture load(const char* file, std::array<double, 2> seed, double h = 0,
             size_t table_samples = 64) {
  Fixture f{parse_surface_file(dpath(file)), {}, {}, {}, {}};
  TraceOptions opt;
  opt.h = h;
  f.c = trace_locus(f.s, seed, opt);
  f.nf = null_field(f.s, f.c);
  f.df = delta_function(f.c, f.nf);
  f.table = invariant_table(f.s, f.c, f.nf, f.df, table_samples);
  return f;
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

bool close_mixed(double a, double b, double rel, double abs_at_zero) {
  const double d = std::fabs(a - b);
  return d <= rel * std::max(std::fabs(a), std::fabs(b)) || d <= abs_at_zero;
}

MongeCoeffs random_monge(std::mt19937& gen) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  MongeCoeffs c;
  auto poly = [&](int d) {
    std::vector<double> p(d + 1);
    for (auto& x : p) x = uni(gen);
    return p;
  };
  auto poly2 = [&](int d) {
    std::vector<std::vector<double>> p(d + 1, std::vector<double>(d + 1));
    for (auto& row : p)
      for (auto& x : row) x = uni(gen);
    return p;
  };
  c.a1 = poly(2);
  c.a2 = poly(2);
  c.a3 = poly(2);
  c.b1 = poly2(2);
  c.b2 = poly2(2);
  c.b2[0][0] = 0.25;
  return c;
}

// invariants at the exact locus parameter passing through the chart origin
struct OriginEval {
  Kappas k;
  double kB;
  double kL_intrinsic;
};

OriginEval monge_at_origin(const Fixture& f) {
  size_t best = 0;
  double dbest = 1e300;
  for (size_t i = 0; i < f.c.size(); ++i) {
    const double d = std::hypot(f.c.samples[i].u, f.c.samples[i].v);
    if (d < dbest) {
      dbest = d;
      best = i;
    }
  }
  double t = f.c.samples[best].t;
  const double slope = (f.c.samples[best + 1].u - f.c.samples[best].u) /
                       (f.c.samples[best + 1].t - f.c.samples[best].t);
  for (int it = 0; it < 40; ++it) {
    const Frame fr = frame_at(f.s, f.c, f.nf, t);
    t -= fr.point[0] / slope;
    if (std::fabs(fr.point[0]) < 1e-12) break;
  }
  OriginEval r;
  r.k = kappa_LNG(f.s, f.c, f.nf, t);
  const AdaptedChart chart = AdaptedChart::build(f.s, f.c, f.nf, t);
  r.kB = kappa_B(chart);
  r.kL_intrinsic = kappa_L_intrinsic(chart);
  return r;
}

const double kCbrt2 = std::cbrt(2.0);

// ---------------------------------------------------------------------------

void criterion_1_sphere(const Fixture& sphere) {
  double worst = 0;
  for (const auto& r : sphere.table) {
    worst = std::max(worst, std::fabs(r.kL - 1.0 / kCbrt2));
    worst = std::max(worst, std::fabs(r.kN - kCbrt2));
    worst = std::max(worst, std::fabs(r.kG));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |error| = %.2e over %zu samples, tol 1e-6", worst,
                sphere.table.size());
  report(1, "sphere invariants kL = 2^{-1/3}, kN = 2^{1/3}, kG = 0",
         sphere.table.size() == 64 && worst <= 1e-6, buf);
}

void criterion_2_pseudosphere(const Fixture& ps) {
  double worst = 0;
  for (const auto& r : ps.table) {
    worst = std::max(worst, std::fabs(r.kL + 1.0 / kCbrt2));
    worst = std::max(worst, std::fabs(r.kN + kCbrt2));
    worst = std::max(worst, std::fabs(r.kG));
    worst = std::max(worst, std::fabs(r.kB + 0.8 * kCbrt2));
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max |error| = %.2e over %zu samples, tol 1e-6", worst,
                ps.table.size());
  report(2, "pseudosphere invariants incl. kB = -(4/5) 2^{1/3}",
         !ps.table.empty() && worst <= 1e-6, buf);
}

void criterion_3_dual_route(const Fixture& sphere, const Fixture& ps, const Fixture& cyl) {
  double worst = 0;
  size_t n = 0;
  auto check_table = [&](const Fixture& f) {
    for (const auto& r : f.table) {
      const double d = std::fabs(r.kL - r.kL_intrinsic);
      const double rel = d / std::max({std::fabs(r.kL), std::fabs(r.kL_intrinsic), 1e-8});
      worst = std::max(worst, rel);
      ++n;
    }
  };
  check_table(sphere);
  check_table(ps);
  check_table(cyl);
  std::mt19937 gen(1003);
  bool ok = true;
  for (int i = 0; i < 10; ++i) {
    const MongeCoeffs mc = random_monge(gen);
    Fixture f{build_monge(mc), {}, {}, {}, {}};
    f.c = trace_locus(f.s, {0.05, 0.0});
    f.nf = null_field(f.s, f.c);
    f.df = delta_function(f.c, f.nf);
    const OriginEval oe = monge_at_origin(f);
    const double d = std::fabs(oe.k.kL - oe.kL_intrinsic);
    const double rel = d / std::max({std::fabs(oe.k.kL), std::fabs(oe.kL_intrinsic), 1e-8});
    worst = std::max(worst, rel);
    ++n;
    ok = ok && rel <= 1e-6;
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max relative gap %.2e over %zu points, tol 1e-6", worst, n);
  report(3, "extrinsic vs intrinsic kappa_L on fixtures + 10 Monge surfaces",
         ok && worst <= 1e-6, buf);
}

void criterion_4_theta(const std::vector<const Fixture*>& fixtures) {
  double worst = 0;
  size_t n = 0;
  for (const Fixture* f : fixtures) {
    for (const auto& r : f->table) {
      const double prod = 2.0 * r.kL * r.kN;
      const double rel =
          std::fabs(r.theta - prod) / std::max({std::fabs(r.theta), std::fabs(prod), 1e-30});
      worst = std::max(worst, rel);
      ++n;
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "max relative gap %.2e over %zu samples, tol 1e-8", worst, n);
  report(4, "theta = 2 kL kN at every first-kind sample of every fixture", worst <= 1e-8, buf);
}

void criterion_5_expansion(const Fixture& sphere, const Fixture& ps, const Fixture& cyl,
                           const Fixture& torus) {
  const ExpansionReport rs = khat_expansion_check(sphere.s, sphere.c, sphere.nf, sphere.df, 24);
  const ExpansionReport rp = khat_expansion_check(ps.s, ps.c, ps.nf, ps.df, 24);
  double res0 = std::max(rs.residual0, rp.residual0);

  double res1 = 0;
  const ExpansionReport rc = khat_expansion_check(cyl.s, cyl.c, cyl.nf, cyl.df, 24);
  const ExpansionReport rt = khat_expansion_check(torus.s, torus.c, torus.nf, torus.df, 24);
  res1 = std::max(res1, rc.residual1.value_or(1.0));
  res1 = std::max(res1, rt.residual1.value_or(1.0));
  {
    MongeCoeffs mc;  // a1 = 0 keeps kappa_L = 0 along the axis
    mc.a2 = {0.7, 0.2};
    mc.b2 = {{0.25, -0.3}, {0.4, 0.1}};
    Fixture f{build_monge(mc), {}, {}, {}, {}};
    f.c = trace_locus(f.s, {0.03, 0.0});
    f.nf = null_field(f.s, f.c);
    f.df = delta_function(f.c, f.nf);
    const ExpansionReport rm = khat_expansion_check(f.s, f.c, f.nf, f.df, 24);
    res1 = std::max(res1, rm.residual1.value_or(1.0));
    res0 = std::max(res0, rm.residual0);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "K^(u,0)+kL/2: %.2e (tol 1e-6); 2K^_v-(kN-kB) where kL=0: %.2e (tol 1e-5)",
                res0, res1);
  report(5, "specially-adapted K^ expansion identities", res0 <= 1e-6 && res1 <= 1e-5, buf);
}

void criterion_6_monge_oracle() {
  std::mt19937 gen(2024);
  double worst = 0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    const MongeCoeffs mc = random_monge(gen);
    const OriginInvariants want = monge_origin_invariants(mc);
    Fixture f{build_monge(mc), {}, {}, {}, {}};
    f.c = trace_locus(f.s, {0.05, 0.0});
    f.nf = null_field(f.s, f.c);
    f.df = delta_function(f.c, f.nf);
    const OriginEval got = monge_at_origin(f);
    const struct {
      double got, want;
    } rows[] = {{got.k.kL, want.kL}, {got.k.kN, want.kN}, {got.k.kG, want.kG}, {got.kB, want.kB}};
    for (const auto& r : rows) {
      ok = ok && close_mixed(r.got, r.want, 1e-6, 1e-8);
      const double gap = std::fabs(r.got - r.want) /
                         std::max({std::fabs(r.got), std::fabs(r.want), 1e-2});
      worst = std::max(worst, gap);
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "20 random coefficient sets, worst scaled gap %.2e", worst);
  report(6, "Monge origin invariants match the closed forms", ok, buf);
}

void criterion_7_verdicts(const Fixture& cyl, const Fixture& sphere, const Fixture& hel) {
  auto afk = [](const Fixture& f) {
    for (double d : f.df.delta)
      if (std::fabs(d) <= kClassifyTolRel * f.df.scale) return false;
    return true;
  };
  const BoundednessVerdict vc = boundedness_verdict(cyl.table, afk(cyl));
  const BoundednessVerdict vs = boundedness_verdict(sphere.table, afk(sphere));
  const BoundednessVerdict vh = boundedness_verdict(hel.table, afk(hel));
  const bool sphere_witness = !vs.bounded && vs.max_abs_kL > 0.5;  // kL = 2^{-1/3}
  const bool hel_witness = !vh.bounded && !vh.all_first_kind &&
                           classify_point(hel.c, hel.nf, hel.df,
                                          hel.c.samples[hel.c.size() / 2].t)
                                   .kind == PointKind::LInfinity;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "cylinder max|kL| = %.1e; sphere witness kL = %.4f; helicoid L_inf witness",
                vc.max_abs_kL, vs.max_abs_kL);
  report(7, "boundedness verdicts (cylinder / sphere / helicoid)",
         vc.bounded && sphere_witness && hel_witness, buf);
}

void criterion_8_classification(const Fixture& sphere, const Fixture& ps, const Fixture& cyl,
                                const Fixture& hel, const Fixture& l3, const Fixture& l4) {
  bool all_first = true;
  for (const Fixture* f : {&sphere, &ps, &cyl})
    for (size_t i = 0; i < f->c.size(); ++i)
      all_first = all_first &&
                  classify_point(f->c, f->nf, f->df, f->c.samples[i].t).kind ==
                      PointKind::FirstKind;

  const bool hel_linf =
      classify_point(hel.c, hel.nf, hel.df, hel.c.samples[2].t).kind == PointKind::LInfinity &&
      hel.df.max_abs <= 1e-10 * hel.df.scale;

  auto cands3 = second_kind_candidates(l3.c, l3.nf, l3.df);
  auto cands4 = second_kind_candidates(l4.c, l4.nf, l4.df);
  const bool l3_ok = cands3.size() == 1 && cands3[0].cls.kind == PointKind::Lk &&
                     cands3[0].cls.k == 3 && std::fabs(cands3[0].u) < 1e-4;
  const bool l4_ok = cands4.size() == 1 && cands4[0].cls.kind == PointKind::Lk &&
                     cands4[0].cls.k == 4 && std::fabs(cands4[0].u) < 1e-3;
  char buf[160];
  std::snprintf(buf, sizeof buf, "helicoid max|delta| = %.1e (tol 1e-10 scale); L3/L4 located",
                hel.df.max_abs);
  report(8, "taxonomy: first kind / L_infinity / L_3 / L_4",
         all_first && hel_linf && l3_ok && l4_ok, buf);
}

bool spiral_identities(const Fixture& f, const std::function<double(double)>& eps,
                       double* worst_out) {
  // characteristic-coordinate normal form along v = 0:
  // E = eps^2 G, F = -eps G, G = 1, E_v = -2, lambda_v = -2
  double worst = 0;
  for (int i = 0; i <= 40; ++i) {
    const double u = -0.7 + 1.4 * i / 40.0;
    MetricJet m = first_fundamental(f.s, u, 0.0, 1);
    const double e = eps(u);
    worst = std::max(worst, std::fabs(m.E.value() - e * e * m.G.value()));
    worst = std::max(worst, std::fabs(m.F.value() + e * m.G.value()));
    worst = std::max(worst, std::fabs(m.G.value() - 1.0));
    worst = std::max(worst, std::fabs(m.E.at(0, 1) + 2.0));
    worst = std::max(worst, std::fabs(m.lambda.at(0, 1) + 2.0));
  }
  *worst_out = worst;
  return worst <= 1e-9;
}

void criterion_9_asymptotics(const Fixture& l3, const Fixture& l4) {
  double id3 = 0, id4 = 0;
  const bool ids_ok = spiral_identities(l3, [](double u) { return u; }, &id3) &&
                      spiral_identities(l4, [](double u) { return u * u; }, &id4);

  auto cands4 = second_kind_candidates(l4.c, l4.nf, l4.df);
  auto cands3 = second_kind_candidates(l3.c, l3.nf, l3.df);
  if (!ids_ok || cands4.empty() || cands3.empty()) {
    report(9, "second-kind asymptotics on the spiral fixture", false,
           "fixture identities or candidates missing");
    return;
  }
  const AsymptoticFit fit = asymptotic_fit(l4.s, l4.c, l4.nf, l4.df, cands4[0].t);
  AsymptoticOptions wide;
  wide.eps_min = 1e-3;
  wide.eps_max = 0.2;
  const AsymptoticFit fit3 = asymptotic_fit(l3.s, l3.c, l3.nf, l3.df, cands3[0].t, wide);

  const bool slopes = near(fit.kL.slope, -4.0 / 3.0, 0.05) &&
                      near(fit.kN.slope, -8.0 / 3.0, 0.05) && near(fit.kG.slope, -2.0, 0.05) &&
                      near(fit.kB.slope, -8.0 / 3.0, 0.05) &&
                      near(fit3.kL.slope, -4.0 / 3.0, 0.05);
  auto within2pc = [](double got, double want) {
    return std::fabs(got - want) <= 0.02 * std::fabs(want);
  };
  const bool constants = within2pc(fit.kL.constant, -std::pow(2.0, -1.0 / 3.0)) &&
                         within2pc(fit.kN.constant, -std::pow(2.0, -2.0 / 3.0)) &&
                         within2pc(fit.kG.constant, -1.0) &&
                         within2pc(fit.kB.constant, -std::pow(2.0, 4.0 / 3.0) / 5.0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "identities %.1e; slopes %.3f %.3f %.3f %.3f; consts %.4f %.4f %.4f %.4f",
                std::max(id3, id4), fit.kL.slope, fit.kN.slope, fit.kG.slope, fit.kB.slope,
                fit.kL.constant, fit.kN.constant, fit.kG.constant, fit.kB.constant);
  report(9, "second-kind asymptotics on the spiral fixture", ids_ok && slopes && constants, buf);
}

void criterion_10_sign_law() {
  const SurfaceDef sphere = parse_surface_file(dpath("sphere.surf"));
  const SurfaceDef hel = parse_surface_file(dpath("helicoid.surf"));
  const double d = 1e-4;
  bool ok = true;
  double kmin = 0;
  for (double side : {1.0, -1.0}) {
    const auto c = curvatures(sphere, 0.3, M_PI / 4 + side * d);
    ok = ok && c.K.has_value() && *c.K < -1e6;
    kmin = std::min(kmin, c.K.value_or(0.0));
  }
  const auto ch = curvatures(hel, 0.3, 1.0 + d);
  ok = ok && ch.K.has_value() && *ch.K > 1e6;
  char buf[128];
  std::snprintf(buf, sizeof buf, "sphere K = %.3g at distance 1e-4; helicoid K = %.3g", kmin,
                ch.K.value_or(0.0));
  report(10, "K diverges with the predicted sign near the locus", ok, buf);
}

void criterion_11_gauss_bonnet() {
  const SurfaceDef torus = parse_surface_file(dpath("flat_torus.surf"));
  GaussBonnetOptions opt;
  opt.base_grid = 32;
  opt.threads = 2;
  const GaussBonnetResult a = gauss_bonnet(torus, opt);
  GaussBonnetOptions half = opt;
  half.base_grid = 16;
  const GaussBonnetResult b = gauss_bonnet(torus, half);
  const bool ok = std::fabs(a.integral - a.expected) <= 1e-6 &&
                  std::fabs(a.integral - b.integral) <= 1e-6;
  char buf[128];
  std::snprintf(buf, sizeof buf, "integral %.2e vs 2 pi chi = 0; halving shift %.2e",
                a.integral, std::fabs(a.integral - b.integral));
  report(11, "Gauss-Bonnet identity on the flat torus", ok, buf);
}

void criterion_12_jet_engine() {
  const char* files[] = {"sphere.surf",     "pseudosphere.surf", "cylinder.surf",
                         "flat_torus.surf", "helicoid.surf",     "plane.surf",
                         "spiral_l3.surf",  "spiral_l4.surf"};
  std::mt19937 gen(77);
  double worst = 0;
  size_t points = 0;
  bool ok = true;
  for (const char* fn : files) {
    const SurfaceDef s = parse_surface_file(dpath(fn));
    std::uniform_real_distribution<double> du(s.u0 + 0.05, s.u1 - 0.05);
    std::uniform_real_distribution<double> dv(s.v0 + 0.05, s.v1 - 0.05);
    for (int trial = 0; trial < 125; ++trial) {
      const double u = du(gen), v = dv(gen);
      const V3<Jet2> f = eval_jet(s, u, v, 3);
      ++points;
      for (int a = 0; a <= 3; ++a)
        for (int b = 0; a + b <= 3; ++b) {
          if (a + b == 0) continue;
          // Richardson-extrapolated nested central differences
          auto nested = [&](double h) {
            std::function<double(double, double, int, int)> rec =
                [&](double uu, double vv, int ka, int kb) -> double {
              if (ka > 0)
                return (rec(uu + h, vv, ka - 1, kb) - rec(uu - h, vv, ka - 1, kb)) / (2 * h);
              if (kb > 0)
                return (rec(uu, vv + h, ka, kb - 1) - rec(uu, vv - h, ka, kb - 1)) / (2 * h);
              return eval_point(s, uu, vv).x;
            };
            return rec(u, v, a, b);
          };
          const double fd = (4.0 * nested(1e-3) - nested(2e-3)) / 3.0;
          double fact = 1.0;
          for (int i = 2; i <= a; ++i) fact *= i;
          for (int i = 2; i <= b; ++i) fact *= i;
          const double jet = f.x.at(a, b) * fact;
          const double gap =
              std::fabs(jet - fd) / std::max({std::fabs(jet), std::fabs(fd), 1e-30});
          if (std::fabs(jet - fd) > 1e-6) {
            worst = std::max(worst, gap);
            ok = ok && gap <= 1e-5;
          }
        }
    }
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "%zu random points, worst relative gap %.2e, tol 1e-5", points,
                worst);
  report(12, "all partials to order 3 match Richardson finite differences", ok, buf);
}

void criterion_13_geodesic_limit(const Fixture& sphere, const Fixture& ps) {
  const double rs = geodesic_curvature_limit(sphere.s, sphere.c, sphere.nf, sphere.df, 12);
  const double rp = geodesic_curvature_limit(ps.s, ps.c, ps.nf, ps.df, 12);
  char buf[128];
  std::snprintf(buf, sizeof buf, "sphere residual %.2e, pseudosphere %.2e, tol 1e-4", rs, rp);
  report(13, "sqrt|lambda| kappa_g -> kappa_L as s -> 0", rs <= 1e-4 && rp <= 1e-4, buf);
}

}  // namespace

int main() {
  std::printf("mixed type surface analyzer: acceptance suite\n");

  const Fixture sphere = load("sphere.surf", {0.0, M_PI / 4});
  const Fixture ps = load("pseudosphere.surf", {0.0, std::log(std::sqrt(2.0) + 1.0)});
  const Fixture cyl = load("cylinder.surf", {0.0, M_PI / 4});
  const Fixture torus = load("flat_torus.surf", {0.0, M_PI / 4});
  const Fixture hel = load("helicoid.surf", {0.0, 1.0});
  const SurfaceDef l3s = parse_surface_file(dpath("spiral_l3.surf"));
  const Fixture l3 = load("spiral_l3.surf", {0.3, 0.0}, l3s.diag() / 4096);
  const Fixture l4 = load("spiral_l4.surf", {0.3, 0.0}, l3s.diag() / 4096);

  criterion_1_sphere(sphere);
  criterion_2_pseudosphere(ps);
  criterion_3_dual_route(sphere, ps, cyl);
  criterion_4_theta({&sphere, &ps, &cyl, &torus, &l3, &l4});
  criterion_5_expansion(sphere, ps, cyl, torus);
  criterion_6_monge_oracle();
  criterion_7_verdicts(cyl, sphere, hel);
  criterion_8_classification(sphere, ps, cyl, hel, l3, l4);
  criterion_9_asymptotics(l3, l4);
  criterion_10_sign_law();
  criterion_11_gauss_bonnet();
  criterion_12_jet_engine();
  criterion_13_geodesic_limit(sphere, ps);

  if (g_failures == 0) {
    std::printf("all 13 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}

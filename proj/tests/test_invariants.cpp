#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "mts/invariants.hpp"

using namespace mts;

namespace {

struct Pipeline {
  SurfaceDef s;
  LocusCurve c;
  NullField nf;
  DeltaField df;
};

Pipeline run(const std::string& file, std::array<double, 2> seed, double h = 0) {
  Pipeline p{parse_surface_file(data_path(file)), {}, {}, {}};
  TraceOptions opt;
  opt.h = h;
  p.c = trace_locus(p.s, seed, opt);
  p.nf = null_field(p.s, p.c);
  p.df = delta_function(p.c, p.nf);
  return p;
}

double frame_residual(const Frame& f) {
  double r = 0;
  r = std::max(r, std::fabs(minkowski_inner(f.e, f.e) - 1.0));
  const double l2 = f.L.x * f.L.x + f.L.y * f.L.y + f.L.z * f.L.z;
  r = std::max(r, std::fabs(minkowski_inner(f.L, f.L)) / std::max(l2, 1e-30));
  r = std::max(r, std::fabs(minkowski_inner(f.N, f.L) - 1.0));
  r = std::max(r, std::fabs(minkowski_inner(f.N, f.e)));
  r = std::max(r, std::fabs(minkowski_inner(f.N, f.N)));
  return r;
}

constexpr double kCbrt2 = 1.2599210498948732;  // 2^{1/3}

}  // namespace

TEST_CASE("sphere frame matches the closed form") {
  Pipeline p = run("sphere.surf", {0.0, M_PI / 4});
  for (size_t i = 10; i < p.c.size(); i += 37) {
    const double t = p.c.samples[i].t;
    Frame f = frame_at(p.s, p.c, p.nf, t);
    CHECK(frame_residual(f) < 1e-9);
    // with the canonical eta (+d/dv on the north parallel):
    // L = (-sin u, -cos u, 1)/sqrt2, N = -(sin u, cos u, 1)/sqrt2
    const double su = std::sin(f.point[0]), cu = std::cos(f.point[0]);
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(f.L.x == doctest::Approx(-su * r).epsilon(1e-8));
    CHECK(f.L.y == doctest::Approx(-cu * r).epsilon(1e-8));
    CHECK(f.L.z == doctest::Approx(r).epsilon(1e-8));
    CHECK(f.N.x == doctest::Approx(-su * r).epsilon(1e-8));
    CHECK(f.N.y == doctest::Approx(-cu * r).epsilon(1e-8));
    CHECK(f.N.z == doctest::Approx(-r).epsilon(1e-8));
    CHECK(f.beta == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("sphere invariants: kL = 2^{-1/3}, kN = 2^{1/3}, kG = 0") {
  Pipeline p = run("sphere.surf", {0.0, M_PI / 4});
  for (size_t i = 8; i < p.c.size(); i += 53) {
    const Kappas k = kappa_LNG(p.s, p.c, p.nf, p.c.samples[i].t);
    CHECK(k.kL == doctest::Approx(1.0 / kCbrt2).epsilon(1e-8));
    CHECK(k.kN == doctest::Approx(kCbrt2).epsilon(1e-8));
    CHECK(std::fabs(k.kG) < 1e-8);
  }
}

TEST_CASE("pseudosphere invariants including kappa_B") {
  Pipeline p = run("pseudosphere.surf", {0.0, std::log(std::sqrt(2.0) + 1.0)});
  for (size_t i = 8; i < p.c.size(); i += 53) {
    const double t = p.c.samples[i].t;
    const Kappas k = kappa_LNG(p.s, p.c, p.nf, t);
    CHECK(k.kL == doctest::Approx(-1.0 / kCbrt2).epsilon(1e-7));
    CHECK(k.kN == doctest::Approx(-kCbrt2).epsilon(1e-7));
    CHECK(std::fabs(k.kG) < 1e-7);
    const AdaptedChart chart = AdaptedChart::build(p.s, p.c, p.nf, t);
    CHECK(kappa_B(chart) == doctest::Approx(-0.8 * kCbrt2).epsilon(1e-7));
  }
}

TEST_CASE("cylinder: straight characteristic image, everything vanishes") {
  Pipeline p = run("cylinder.surf", {0.0, M_PI / 4});
  const double t = p.c.samples[p.c.size() / 2].t;
  const Kappas k = kappa_LNG(p.s, p.c, p.nf, t);
  CHECK(std::fabs(k.kL) < 1e-10);
  CHECK(std::fabs(k.kN) < 1e-10);
  CHECK(std::fabs(k.kG) < 1e-10);
  CHECK(std::fabs(causal_theta(p.s, p.c, p.nf, t)) < 1e-12);
  const AdaptedChart chart = AdaptedChart::build(p.s, p.c, p.nf, t);
  CHECK(std::fabs(kappa_B(chart)) < 1e-9);
  CHECK(std::fabs(kappa_L_intrinsic(chart)) < 1e-10);
  // unit-speed rulings: E(u,0) = 1 already
  CHECK(chart.E().value() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adapted chart residuals and first-kind criterion") {
  Pipeline p = run("sphere.surf", {0.0, M_PI / 4});
  const double t = p.c.samples[20].t;
  const AdaptedChart chart = AdaptedChart::build(p.s, p.c, p.nf, t);
  CHECK(chart.adapted_residual() < 1e-8);
  CHECK(std::fabs(chart.G().at(0, 1)) > 0.1);  // G_v(u,0) != 0 at first kind
  const AdaptedChart sa = AdaptedChart::build(p.s, p.c, p.nf, t, 11, true);
  CHECK(sa.special_residual() < 1e-9);
  CHECK(sa.adapted_residual() < 1e-8);
}

TEST_CASE("intrinsic kappa_L agrees with the frame route") {
  for (const char* file : {"sphere.surf", "pseudosphere.surf", "cylinder.surf"}) {
    std::array<double, 2> seed{0.0, M_PI / 4};
    if (std::string(file) == "pseudosphere.surf") seed = {0.0, std::log(std::sqrt(2.0) + 1.0)};
    Pipeline p = run(file, seed);
    for (size_t i = 8; i < p.c.size(); i += 61) {
      const double t = p.c.samples[i].t;
      const double ext = kappa_LNG(p.s, p.c, p.nf, t).kL;
      const double intr = kappa_L_intrinsic(AdaptedChart::build(p.s, p.c, p.nf, t));
      CHECK(close_rel(ext, intr, 1e-6, 1e-8));
    }
  }
}

TEST_CASE("theta equals 2 kL kN and is 2 on sphere and pseudosphere") {
  {
    Pipeline p = run("sphere.surf", {0.0, M_PI / 4});
    const double t = p.c.samples[30].t;
    const double th = causal_theta(p.s, p.c, p.nf, t);
    CHECK(th == doctest::Approx(2.0).epsilon(1e-9));
    const Kappas k = kappa_LNG(p.s, p.c, p.nf, t);
    CHECK(close_rel(th, 2 * k.kL * k.kN, 1e-8));
  }
  {
    Pipeline p = run("pseudosphere.surf", {0.0, std::log(std::sqrt(2.0) + 1.0)});
    const double t = p.c.samples[30].t;
    // image circle of radius 1/sqrt2 in a spacelike plane -> theta = 2
    CHECK(causal_theta(p.s, p.c, p.nf, t) == doctest::Approx(2.0).epsilon(1e-8));
  }
}

TEST_CASE("invariants stable under retracing at doubled density") {
  SurfaceDef s = parse_surface_file(data_path("sphere.surf"));
  Pipeline a = run("sphere.surf", {0.0, M_PI / 4});
  Pipeline b = run("sphere.surf", {0.0, M_PI / 4}, default_step(s) / 2);
  const double t = a.c.samples[a.c.size() / 2].t;
  const Kappas ka = kappa_LNG(a.s, a.c, a.nf, t);
  // match by parameter-plane point rather than t
  const auto& pa = a.c.samples[a.c.nearest(t)];
  size_t jbest = 0;
  double dbest = 1e300;
  for (size_t j = 0; j < b.c.size(); ++j) {
    const double d = std::hypot(b.c.samples[j].u - pa.u, b.c.samples[j].v - pa.v);
    if (d < dbest) {
      dbest = d;
      jbest = j;
    }
  }
  const Kappas kb = kappa_LNG(b.s, b.c, b.nf, b.c.samples[jbest].t);
  CHECK(close_rel(ka.kL, kb.kL, 1e-6));
  CHECK(close_rel(ka.kN, kb.kN, 1e-6));
  CHECK(std::fabs(ka.kG - kb.kG) < 1e-6);
}

TEST_CASE("canonical eta makes invariants independent of the input sign") {
  Pipeline p = run("pseudosphere.surf", {0.0, std::log(std::sqrt(2.0) + 1.0)});
  NullField flipped = p.nf;
  for (auto& e : flipped.eta) e = {-e[0], -e[1]};
  for (auto& b : flipped.beta) b = -b;
  const double t = p.c.samples[25].t;
  const Kappas k1 = kappa_LNG(p.s, p.c, p.nf, t);
  const Kappas k2 = kappa_LNG(p.s, p.c, flipped, t);
  CHECK(k1.kL == doctest::Approx(k2.kL).epsilon(1e-10));
  CHECK(k1.kN == doctest::Approx(k2.kN).epsilon(1e-10));
  CHECK(k1.kG == doctest::Approx(k2.kG).epsilon(1e-10));
}

TEST_CASE("invariant table and CSV") {
  Pipeline p = run("sphere.surf", {0.0, M_PI / 4});
  auto table = invariant_table(p.s, p.c, p.nf, p.df, 64);
  REQUIRE(table.size() == 64);
  for (const auto& r : table) {
    CHECK(r.kL == doctest::Approx(1.0 / kCbrt2).epsilon(1e-7));
    CHECK(close_rel(r.theta, 2 * r.kL * r.kN, 1e-8));
    // K^(u,0) = -kL/2 in specially adapted coordinates
    CHECK(r.khat == doctest::Approx(-0.5 / kCbrt2).epsilon(1e-7));
  }
  std::ostringstream os;
  write_invariants_csv(os, table);
  CHECK(os.str().rfind("t,s,kappa_L,kappa_N,kappa_G,kappa_B,theta,khat\n", 0) == 0);
}

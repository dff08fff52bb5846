// mts: analyze mixed type surfaces in Lorentz-Minkowski 3-space.
// Subcommands: analyze, field, gauss-bonnet, asymptotics, monge-gen.
#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mts/analysis.hpp"
#include "mts/monge.hpp"
#include "mts/parallel.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum ExitCode {
  kOk = 0,
  kError = 1,
  kParseError = 2,
  kNoLightlikePoints = 3,
  kDegeneracy = 4,
  kPrecondition = 5,
};

struct CommonOpts {
  std::string surface_path;
  int grid = 64;
  double step = 0.0;
  double tol = mts::kClassifyTolRel;
  std::string out_dir = ".";
  std::string format = "json";
  int threads = mts::hardware_threads();
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("surface", o.surface_path, "surface definition file")->required();
  cmd->add_option("--grid", o.grid, "scan/field grid resolution")->check(CLI::Range(8, 4096));
  cmd->add_option("--step", o.step, "trace step (default: domain diagonal / 512)");
  cmd->add_option("--tol", o.tol, "relative classification tolerance")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--threads", o.threads, "worker threads (thread count never changes output)")
      ->check(CLI::PositiveNumber);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

void flat_csv(std::ostream& os, const json& j, const std::string& prefix) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flat_csv(os, it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) flat_csv(os, j[i], prefix + "." + std::to_string(i));
  } else {
    os << prefix << "," << j.dump() << "\n";
  }
}

void write_report(const CommonOpts& o, const json& report) {
  fs::create_directories(o.out_dir);
  if (o.format == "json") {
    write_text(fs::path(o.out_dir) / "report.json", report.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "key,value\n";
    flat_csv(os, report, "");
    write_text(fs::path(o.out_dir) / "report.csv", os.str());
  }
}

struct CurveAnalysis {
  mts::LocusCurve curve;
  mts::NullField nf;
  mts::DeltaField df;
  std::vector<mts::InvariantSample> table;
  std::vector<mts::SecondKindCandidate> candidates;
  bool all_first_kind = true;
};

std::vector<CurveAnalysis> analyze_curves(const mts::SurfaceDef& s, const CommonOpts& o) {
  mts::TraceOptions topt;
  topt.h = o.step;
  auto curves = mts::trace_all(s, o.grid, o.grid, topt);
  std::vector<CurveAnalysis> out;
  for (auto& c : curves) {
    CurveAnalysis ca;
    ca.curve = std::move(c);
    ca.nf = mts::null_field(s, ca.curve);
    ca.df = mts::delta_function(ca.curve, ca.nf);
    for (double d : ca.df.delta)
      if (std::fabs(d) <= o.tol * ca.df.scale) ca.all_first_kind = false;
    ca.table = mts::invariant_table(s, ca.curve, ca.nf, ca.df, 256, o.tol);
    ca.candidates = mts::second_kind_candidates(ca.curve, ca.nf, ca.df, o.tol);
    out.push_back(std::move(ca));
  }
  return out;
}

json classes_histogram(const std::vector<CurveAnalysis>& cas, double tol) {
  std::map<std::string, size_t> hist;
  for (const auto& ca : cas) {
    for (size_t i = 0; i < ca.curve.size(); ++i) {
      const auto pc =
          mts::classify_point(ca.curve, ca.nf, ca.df, ca.curve.samples[i].t, tol);
      std::string key = mts::point_kind_name(pc.kind);
      if (pc.kind == mts::PointKind::Lk) key = "L_" + std::to_string(pc.k);
      ++hist[key];
    }
    for (const auto& cand : ca.candidates) {
      std::string key = mts::point_kind_name(cand.cls.kind);
      if (cand.cls.kind == mts::PointKind::Lk) key = "L_" + std::to_string(cand.cls.k);
      ++hist[key];
    }
  }
  json j = json::object();
  for (const auto& [k, v] : hist) j[k] = v;
  return j;
}

json report_skeleton(const mts::SurfaceDef& s) {
  json report;
  report["schema"] = 1;
  report["surface"] = s.name;
  report["bounded"] = nullptr;
  report["max_kappa_L"] = nullptr;
  report["max_kN_minus_kB"] = nullptr;
  report["classes"] = json::object();
  report["gauss_bonnet"] = nullptr;
  report["asymptotics"] = json::array();
  return report;
}

int cmd_analyze(const CommonOpts& o) {
  const mts::SurfaceDef s = mts::parse_surface_file(o.surface_path);
  auto cas = analyze_curves(s, o);
  if (cas.empty()) {
    std::cerr << "no lightlike points: the surface is not mixed type on its domain\n";
    return kNoLightlikePoints;
  }
  fs::create_directories(o.out_dir);
  bool any_degenerate = false;
  bool all_first = true;
  std::vector<mts::InvariantSample> merged;
  for (size_t i = 0; i < cas.size(); ++i) {
    const auto& ca = cas[i];
    any_degenerate = any_degenerate || !ca.curve.nondegenerate;
    all_first = all_first && ca.all_first_kind;
    merged.insert(merged.end(), ca.table.begin(), ca.table.end());
    const std::string suffix = std::to_string(i) + ".csv";
    {
      std::ofstream os(fs::path(o.out_dir) / ("locus_" + suffix), std::ios::binary);
      mts::write_locus_csv(os, ca.curve);
    }
    {
      std::ofstream os(fs::path(o.out_dir) / ("classification_" + suffix), std::ios::binary);
      mts::write_classification_csv(os, ca.curve, ca.nf, ca.df, o.tol);
    }
    {
      std::ofstream os(fs::path(o.out_dir) / ("invariants_" + suffix), std::ios::binary);
      mts::write_invariants_csv(os, ca.table);
    }
  }
  const mts::BoundednessVerdict v = mts::boundedness_verdict(merged, all_first, o.tol);
  json report = report_skeleton(s);
  report["bounded"] = v.bounded;
  report["max_kappa_L"] = v.max_abs_kL;
  report["max_kN_minus_kB"] = v.max_abs_kN_minus_kB;
  report["classes"] = classes_histogram(cas, o.tol);
  report["curves"] = json::array();
  for (const auto& ca : cas) {
    json jc;
    jc["samples"] = ca.curve.size();
    jc["closed"] = ca.curve.closed;
    jc["nondegenerate"] = ca.curve.nondegenerate;
    report["curves"].push_back(jc);
  }
  write_report(o, report);
  std::cout << "analyzed " << s.name << ": " << cas.size() << " locus component(s), bounded="
            << (v.bounded ? "true" : "false") << "\n";
  if (any_degenerate) {
    std::cerr << "degenerate lightlike points encountered\n";
    return kDegeneracy;
  }
  return kOk;
}

int cmd_field(const CommonOpts& o) {
  const mts::SurfaceDef s = mts::parse_surface_file(o.surface_path);
  fs::create_directories(o.out_dir);
  std::ofstream os(fs::path(o.out_dir) / "field.csv", std::ios::binary);
  mts::write_field_csv(os, s, o.grid, o.grid, mts::kLightlikeTol, o.threads);
  std::cout << "field sampled on a " << o.grid << "x" << o.grid << " grid\n";
  return kOk;
}

int cmd_gauss_bonnet(const CommonOpts& o) {
  const mts::SurfaceDef s = mts::parse_surface_file(o.surface_path);
  mts::GaussBonnetOptions gopt;
  gopt.base_grid = o.grid;
  gopt.threads = o.threads;
  gopt.scan_grid = o.grid;
  const mts::GaussBonnetResult r = mts::gauss_bonnet(s, gopt);
  json report = report_skeleton(s);
  report["bounded"] = true;
  json gb;
  gb["integral"] = r.integral;
  gb["expected"] = r.expected;
  gb["residual"] = r.residual;
  report["gauss_bonnet"] = gb;
  write_report(o, report);
  std::cout << "integral " << r.integral << " expected " << r.expected << " residual "
            << r.residual << "\n";
  return kOk;
}

int cmd_asymptotics(const CommonOpts& o, double at, int curve_index, double eps_min,
                    double eps_max) {
  const mts::SurfaceDef s = mts::parse_surface_file(o.surface_path);
  auto cas = analyze_curves(s, o);
  if (cas.empty()) {
    std::cerr << "no lightlike points\n";
    return kNoLightlikePoints;
  }
  if (curve_index < 0 || curve_index >= static_cast<int>(cas.size()))
    throw mts::PreconditionError("curve index out of range");
  const auto& ca = cas[curve_index];
  mts::AsymptoticOptions aopt;
  aopt.tol_rel = o.tol;
  if (eps_min > 0) aopt.eps_min = eps_min;
  if (eps_max > 0) aopt.eps_max = eps_max;
  const mts::AsymptoticFit fit = mts::asymptotic_fit(s, ca.curve, ca.nf, ca.df, at, aopt);
  json report = report_skeleton(s);
  report["classes"] = classes_histogram(cas, o.tol);
  auto entry = [](const mts::PowerLawFit& f) {
    json j;
    j["slope"] = f.slope;
    j["constant"] = f.constant;
    j["samples"] = f.n;
    j["log_rms"] = f.log_rms;
    return j;
  };
  json a;
  a["t_star"] = fit.t_star;
  a["kappa_L"] = entry(fit.kL);
  a["kappa_N"] = entry(fit.kN);
  a["kappa_G"] = entry(fit.kG);
  a["kappa_B"] = entry(fit.kB);
  report["asymptotics"].push_back(a);
  write_report(o, report);
  std::cout << "slopes: kL " << fit.kL.slope << ", kN " << fit.kN.slope << ", kG "
            << fit.kG.slope << ", kB " << fit.kB.slope << "\n";
  return kOk;
}

int cmd_monge_gen(const std::string& coeffs_path, const std::string& name,
                  const std::string& out_dir, double half_u, double half_v) {
  std::ifstream in(coeffs_path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open coefficients file: " + coeffs_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const mts::MongeCoeffs c = mts::parse_monge_coeffs(ss.str());
  const std::string text = mts::monge_surface_text(c, name, half_u, half_v);
  fs::create_directories(out_dir);
  const fs::path path = fs::path(out_dir) / (name + ".surf");
  write_text(path, text);
  std::cout << path.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mixed type surface analyzer for Lorentz-Minkowski 3-space"};
  app.require_subcommand(1);

  CommonOpts o;
  double at = 0.0;
  int curve_index = 0;
  double eps_min = 0.0, eps_max = 0.0;
  std::string coeffs_path, monge_name = "monge";
  double half_u = 0.15, half_v = 0.15;

  auto* analyze = app.add_subcommand("analyze", "trace, classify and compute invariants");
  add_common(analyze, o);
  auto* field = app.add_subcommand("field", "sample lambda, K^, K, H on a grid");
  add_common(field, o);
  auto* gb = app.add_subcommand("gauss-bonnet", "verify the Gauss-Bonnet identity");
  add_common(gb, o);
  auto* asym = app.add_subcommand("asymptotics", "power-law fits near a second-kind point");
  add_common(asym, o);
  asym->add_option("--at", at, "locus parameter of the second-kind point")->required();
  asym->add_option("--curve", curve_index, "locus component index");
  asym->add_option("--eps-min", eps_min, "lower edge of the tangency-scale window");
  asym->add_option("--eps-max", eps_max, "upper edge of the tangency-scale window");
  auto* mg = app.add_subcommand("monge-gen", "emit a Monge normal-form surface file");
  mg->add_option("coeffs", coeffs_path, "coefficients file")->required();
  mg->add_option("--name", monge_name, "surface name / output file stem");
  mg->add_option("--out", o.out_dir, "output directory");
  mg->add_option("--half-u", half_u, "half-width of the u range");
  mg->add_option("--half-v", half_v, "half-width of the v range");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) return cmd_analyze(o);
    if (field->parsed()) return cmd_field(o);
    if (gb->parsed()) return cmd_gauss_bonnet(o);
    if (asym->parsed()) return cmd_asymptotics(o, at, curve_index, eps_min, eps_max);
    if (mg->parsed()) return cmd_monge_gen(coeffs_path, monge_name, o.out_dir, half_u, half_v);
  } catch (const mts::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const mts::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return kPrecondition;
  } catch (const mts::TraceError& e) {
    std::cerr << "trace failed: " << e.what() << "\n";
    return kDegeneracy;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

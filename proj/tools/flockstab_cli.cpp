// flockstab command-line front end.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "flockstab/flockstab.hpp"

namespace fs = std::filesystem;
using namespace flockstab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUnstable = 2;

struct Options {
  std::string spec_path;
  std::string out_dir;
  int n = 60;
  int bc = 1;
  double dt = kDefaultDt;
  std::optional<double> t_max;
  double tol = 1e-9;
  std::string N_list = "30,60,90,120,150,180";
  double phi_min = 1e-6;
  double phi_max = 1e-1;
  int phi_count = 60;
  bool negative_phi = false;
  bool force = false;
  std::string figure;
};

/// Output directory that refuses to clobber files unless forced.
class OutputDir {
 public:
  OutputDir(std::string path, bool force) : path_(std::move(path)), force_(force) {}

  bool enabled() const { return !path_.empty(); }

  /// Checks every name up front so a run never stops half-written.
  void reserve(const std::vector<std::string>& names) const {
    if (!enabled()) return;
    fs::create_directories(path_);
    if (force_) return;
    for (const auto& name : names)
      if (fs::exists(fs::path(path_) / name))
        throw Error((fs::path(path_) / name).string() + " exists; pass --force to overwrite");
  }

  void write(const std::string& name, const std::string& content) const {
    if (!enabled()) return;
    const fs::path p = fs::path(path_) / name;
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error("cannot write " + p.string());
    f << content;
  }

 private:
  std::string path_;
  bool force_;
};

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

BoundaryType to_bc(int bc) {
  if (bc == 1) return BoundaryType::TypeI;
  if (bc == 2) return BoundaryType::TypeII;
  throw Error("--bc must be 1 or 2");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const int v = std::stoi(item, &used);
    if (used != item.size()) throw Error("bad integer '" + item + "' in --N-list");
    out.push_back(v);
  }
  if (out.empty()) throw Error("--N-list is empty");
  return out;
}

FlockSpec require_spec(const Options& o) {
  if (o.spec_path.empty()) throw Error("--spec is required");
  return load_spec(o.spec_path);
}

int cmd_check(const Options& o) {
  const FlockSpec spec = require_spec(o);
  const ConditionReport r = evaluate_conditions(spec, o.tol);
  OutputDir out(o.out_dir, o.force);
  out.reserve({"conditions.json"});
  const std::string text = dump(to_json(r));
  out.write("conditions.json", text);
  std::cout << text;
  return r.overall == Overall::InstabilityCertified ? kExitUnstable : kExitOk;
}

int cmd_spectrum(const Options& o) {
  const FlockSpec spec = require_spec(o);
  OutputDir out(o.out_dir, o.force);
  out.reserve({"spectrum.csv", "verdict.json"});
  const auto spectra = spectrum_periodic(spec, o.n);
  const StabilityVerdict v = analyze_stability(spec, o.n, o.tol);
  out.write("spectrum.csv", spectrum_csv(spectra));
  const std::string text = dump(to_json(v));
  out.write("verdict.json", text);
  std::cout << text;
  return kExitOk;
}

int cmd_simulate(const Options& o) {
  const FlockSpec spec = require_spec(o);
  OutputDir out(o.out_dir, o.force);
  out.reserve({"trajectory.csv", "transient.json", "deviations.svg"});
  const int N = o.n * spec.type_count();
  const double t_max = o.t_max.value_or(kDefaultWindowPerAgent * N);
  const Trajectory tr = simulate(spec, o.n, to_bc(o.bc), t_max, o.dt);
  const TransientReport rep = transient(tr);
  out.write("trajectory.csv", trajectory_csv(tr));
  out.write("deviations.svg",
            deviations_svg(tr, fmt::format("N={} boundary {}", N, to_string(to_bc(o.bc)))));
  const std::string text = dump(to_json(rep));
  out.write("transient.json", text);
  std::cout << text;
  return kExitOk;
}

int cmd_scan(const Options& o) {
  const FlockSpec spec = require_spec(o);
  OutputDir out(o.out_dir, o.force);
  out.reserve({"scan.csv", "scan.json", "scan.svg"});
  const std::vector<int> Ns = parse_int_list(o.N_list);
  ScanOptions so;
  so.dt = o.dt;
  so.t_max = o.t_max;
  const ScanResult s = scan_N(spec, to_bc(o.bc), Ns, so);
  out.write("scan.csv", scan_csv(s));
  out.write("scan.svg", scan_svg(s, "log |magnitude| against N"));
  const std::string text = dump(to_json(s));
  out.write("scan.json", text);
  std::cout << text;
  return kExitOk;
}

ojson rootcurve_summary(const BranchTracking& bt) {
  const TangencyProfile tp = tangency_profile(bt.plus, bt.c);
  const TangencyProfile tm = tangency_profile(bt.minus, bt.c);
  const AngleReport angle = orthogonality_angle(bt.plus, bt.minus);
  auto profile = [](const TangencyProfile& p) {
    return ojson{{"decade_sup", p.decade_sup},
                 {"finest", p.finest},
                 {"monotone", p.monotone},
                 {"passes", p.passes}};
  };
  return {{"c", {{"re", bt.c.real()}, {"im", bt.c.imag()}}},
          {"disk_radius", bt.disk_radius},
          {"two_root_count_holds", bt.two_root_count_holds()},
          {"plus", profile(tp)},
          {"minus", profile(tm)},
          {"angle_degrees", angle.degrees},
          {"angle_deviation_from_right_multiple", angle.deviation},
          {"plus_finest_root", {{"re", bt.plus.roots.back().real()}, {"im", bt.plus.roots.back().imag()}}},
          {"minus_finest_root",
           {{"re", bt.minus.roots.back().real()}, {"im", bt.minus.roots.back().imag()}}}};
}

int cmd_rootcurves(const Options& o) {
  const FlockSpec spec = require_spec(o);
  OutputDir out(o.out_dir, o.force);
  out.reserve({"rootcurves.csv", "rootcurves.json", "rootcurves.svg"});
  std::vector<double> grid = log_grid(o.phi_min, o.phi_max, o.phi_count);
  if (o.negative_phi)
    for (double& t : grid) t = -t;
  const BranchTracking bt = track_branches(spec, grid);
  out.write("rootcurves.csv", rootcurves_csv(bt));
  out.write("rootcurves.svg", rootcurves_svg(bt, "small roots against +-sqrt(c phi)"));
  const std::string text = dump(rootcurve_summary(bt));
  out.write("rootcurves.json", text);
  std::cout << text;
  return kExitOk;
}

ojson compare(const TransientReport& r, const fixtures::PublishedTransient& pub) {
  const double mag_err = std::abs(r.magnitude - pub.magnitude) / std::abs(pub.magnitude);
  const double time_err = std::abs(std::abs(r.time_at_extremum) - pub.time) / pub.time;
  return {{"published_magnitude", pub.magnitude},
          {"published_time", pub.time},
          {"magnitude", r.magnitude},
          {"time_at_extremum", r.time_at_extremum},
          {"magnitude_relative_error", mag_err},
          {"time_relative_error", time_err},
          {"within_2_percent", mag_err <= 0.02 && time_err <= 0.02}};
}

int cmd_reproduce(const Options& o) {
  if (o.out_dir.empty()) throw Error("reproduce needs --out");
  OutputDir out(o.out_dir, o.force);
  const std::string& id = o.figure;

  struct Run {
    FlockSpec spec;
    BoundaryType bc;
    int N;
    double t_max;
    std::optional<fixtures::PublishedTransient> published;
  };
  std::optional<Run> run;
  if (id == "fig1a" || id == "fig1b") {
    run = Run{fixtures::figure1(), id == "fig1a" ? BoundaryType::TypeI : BoundaryType::TypeII,
              fixtures::kFig1N, fixtures::kFig1TMax,
              id == "fig1a" ? fixtures::kFig1a : fixtures::kFig1b};
  } else if (id == "fig2a") {
    run = Run{fixtures::figure2(), BoundaryType::TypeI, fixtures::kFig1N,
              kDefaultWindowPerAgent * fixtures::kFig1N, std::nullopt};
  } else if (id == "fig3a" || id == "fig3b") {
    run = Run{fixtures::figure3(), id == "fig3a" ? BoundaryType::TypeI : BoundaryType::TypeII,
              fixtures::kFig3N, kDefaultWindowPerAgent * fixtures::kFig3N,
              id == "fig3a" ? fixtures::kFig3a : fixtures::kFig3b};
  } else if (id == "fig3c") {
    run = Run{fixtures::figure3c(), BoundaryType::TypeI, fixtures::kFig3N,
              kDefaultWindowPerAgent * fixtures::kFig3N, std::nullopt};
  } else if (id != "fig2b") {
    throw Error("unknown figure '" + id + "'; expected fig1a, fig1b, fig2a, fig2b, fig3a, fig3b or fig3c");
  }

  if (!run) {
    out.reserve({"scan.csv", "scan.svg", "comparison.json"});
    ScanOptions so;
    so.dt = o.dt;
    const ScanResult s = scan_N(fixtures::figure2(), BoundaryType::TypeI, fixtures::kFig2ScanN, so);
    out.write("scan.csv", scan_csv(s));
    out.write("scan.svg", scan_svg(s, "log |magnitude| against N"));
    ojson cmp = to_json(s);
    cmp["figure"] = id;
    cmp["exponential_growth"] = s.fit && s.fit->slope > 0.0 && s.fit->r_squared > 0.9;
    const std::string text = dump(cmp);
    out.write("comparison.json", text);
    std::cout << text;
    return kExitOk;
  }

  out.reserve({"deviations.svg", "comparison.json"});
  const int n = run->N / run->spec.type_count();
  ojson cmp;
  cmp["figure"] = id;
  cmp["N"] = run->N;
  cmp["boundary"] = std::string(to_string(run->bc));
  cmp["dt"] = o.dt;
  double t_max = run->t_max;
  auto integrate = [&] {
    try {
      return simulate(run->spec, n, run->bc, t_max, o.dt);
    } catch (const BlowUp& e) {
      // Keep the stretch before the overflow guard trips.
      cmp["blowup_time"] = e.time();
      t_max = 0.9 * e.time();
      return simulate(run->spec, n, run->bc, t_max, o.dt);
    }
  };
  const Trajectory tr = integrate();
  cmp["t_max"] = t_max;
  const TransientReport rep = transient(tr);
  cmp["transient"] = to_json(rep);
  if (run->published) cmp["comparison"] = compare(rep, *run->published);
  out.write("deviations.svg", deviations_svg(tr, fmt::format("{}: N={} boundary {}", id, run->N,
                                                             to_string(run->bc))));
  const std::string text = dump(cmp);
  out.write("comparison.json", text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis of periodic heterogeneous vehicle flocks"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", o.out_dir, "output directory (created if absent)");
    sub->add_flag("--force", o.force, "overwrite existing output files");
  };
  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("--spec", o.spec_path, "flock spec JSON file")->required();
  };

  CLI::App* check = app.add_subcommand("check", "evaluate the necessary stability conditions");
  add_spec(check);
  add_common(check);
  check->add_option("--tol", o.tol, "absolute tolerance on condition values");

  CLI::App* spectrum = app.add_subcommand("spectrum", "periodic spectrum and stability verdict");
  add_spec(spectrum);
  add_common(spectrum);
  spectrum->add_option("--n", o.n, "agents per type");
  spectrum->add_option("--tol", o.tol, "real-part tolerance for classification");

  CLI::App* sim = app.add_subcommand("simulate", "line simulation after a leader kick");
  add_spec(sim);
  add_common(sim);
  sim->add_option("--n", o.n, "agents per type");
  sim->add_option("--bc", o.bc, "boundary type (1 or 2)")->check(CLI::IsMember({1, 2}));
  sim->add_option("--dt", o.dt, "RK4 step");
  sim->add_option("--tmax", o.t_max, "integration window (default 3 N)");

  CLI::App* scan = app.add_subcommand("scan", "transient magnitude against flock size");
  add_spec(scan);
  add_common(scan);
  scan->add_option("--bc", o.bc, "boundary type (1 or 2)")->check(CLI::IsMember({1, 2}));
  scan->add_option("--dt", o.dt, "RK4 step");
  scan->add_option("--tmax", o.t_max, "integration window (default 3 N per run)");
  scan->add_option("--N-list", o.N_list, "comma-separated flock sizes");

  CLI::App* roots = app.add_subcommand("rootcurves", "track the two small roots near phi = 0");
  add_spec(roots);
  add_common(roots);
  roots->add_option("--phi-min", o.phi_min, "smallest grid angle");
  roots->add_option("--phi-max", o.phi_max, "largest grid angle");
  roots->add_option("--phi-count", o.phi_count, "grid points (logarithmic)");
  roots->add_flag("--negative", o.negative_phi, "track on the mirrored grid phi < 0");

  CLI::App* repro = app.add_subcommand("reproduce", "rerun a published figure");
  repro->add_option("figure", o.figure, "fig1a, fig1b, fig2a, fig2b, fig3a, fig3b or fig3c")
      ->required();
  add_common(repro);
  repro->add_option("--dt", o.dt, "RK4 step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (check->parsed()) return cmd_check(o);
    if (spectrum->parsed()) return cmd_spectrum(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (scan->parsed()) return cmd_scan(o);
    if (roots->parsed()) return cmd_rootcurves(o);
    if (repro->parsed()) return cmd_reproduce(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "h1sim/cascade.hpp"
#include "h1sim/errors.hpp"
#include "h1sim/farfield.hpp"
#include "h1sim/fdtd.hpp"
#include "h1sim/io.hpp"
#include "h1sim/mode_analysis.hpp"
#include "h1sim/pipeline.hpp"
#include "h1sim/units.hpp"

namespace fs = std::filesystem;
using namespace h1sim;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  std::string cache_dir;
  bool no_cache = false;
  int resolution = 0;  // 0 = take from config
  bool strict = false;
};

Config load_config(const CommonOpts& o) {
  if (o.config_path.empty()) throw config_error("missing --config");
  return Config::from_file(o.config_path);
}

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("-c,--config", o->config_path, "configuration file");
  cmd->add_option("-o,--out", o->out_dir, "output directory");
  cmd->add_option("--cache-dir", o->cache_dir, "result cache directory (default $H1SIM_CACHE)");
  cmd->add_flag("--no-cache", o->no_cache, "bypass the result cache");
  cmd->add_option("-r,--resolution", o->resolution, "cells per lattice constant");
  cmd->add_flag("--strict", o->strict, "escalate quality warnings to errors");
}

void write_mode_csv(const std::string& path, const CavityDesign& design,
                    const ModeCharacterization& m) {
  CsvWriter csv(path, {"d", "h_um", "pol_x1_y2", "lambda_um", "gamma_c", "q", "v_lam3", "fp",
                       "fit_residual", "u_ref", "p_ref", "poynting_flux"});
  csv.row({design.inner_hole_shift_d, design.membrane_thickness_h * 1e6,
           m.polarization == Polarization::X ? 1.0 : 2.0, m.lambda * 1e6, m.gamma_c,
           m.quality_factor, m.mode_volume, m.purcell_max, m.fit_residual, m.energy_ref,
           m.emitted_power, m.poynting_flux});
}

int cmd_simulate(const CommonOpts& o, const std::string& pol_arg, double beta_max_nm,
                 double beta_step_nm, bool dump_eps) {
  Config cfg = load_config(o);
  CavityDesign design = CavityDesign::from_config(cfg);
  RunParams params = RunParams::from_config(cfg);
  if (o.resolution > 0) params.resolution = o.resolution;
  params.strict = params.strict || o.strict;
  fs::create_directories(o.out_dir);

  if (dump_eps)
    save_dielectric_map(rasterize(design, params.resolution), o.out_dir + "/epsilon.bin");

  ResultCache cache(o.cache_dir.empty() ? ResultCache::default_dir() : o.cache_dir);
  const ResultCache* cptr = o.no_cache ? nullptr : &cache;

  std::vector<Polarization> pols;
  if (pol_arg == "X" || pol_arg == "both") pols.push_back(Polarization::X);
  if (pol_arg == "Y" || pol_arg == "both") pols.push_back(Polarization::Y);
  if (pols.empty()) throw config_error("polarization must be X, Y or both");

  std::vector<RingdownResult> runs;
  for (Polarization pol : pols) {
    RingdownResult r = cached_ringdown(design, params, pol, cptr);
    std::string tag = std::string(1, pol_char(pol));
    write_mode_csv(o.out_dir + "/mode_" + tag + ".csv", design, r.mode);
    write_time_series_csv(o.out_dir + "/probe_" + tag + ".csv", r.probe, "probe");
    write_time_series_csv(o.out_dir + "/energy_" + tag + ".csv", r.energy, "energy");
    save_ringdown(o.out_dir + "/run_" + tag + ".run", r);
    std::printf("%c: lambda=%.4f um  Q=%.0f  V=%.3f (lam/n)^3  Fp=%.1f\n", pol_char(pol),
                r.mode.lambda * 1e6, r.mode.quality_factor, r.mode.mode_volume,
                r.mode.purcell_max);
    runs.push_back(std::move(r));
  }

  if (beta_max_nm > 0 && runs.size() == 2) {
    std::vector<double> offsets;
    for (double nm = 0; nm <= beta_max_nm + 1e-9; nm += beta_step_nm)
      offsets.push_back(nm * 1e-9);
    auto betas = beta_scan(runs[0].midplane, runs[1].midplane, offsets);
    write_beta_csv(o.out_dir + "/beta_scan.csv", betas);
  }
  return 0;
}

int cmd_farfield(const CommonOpts& o, const std::string& run_x, const std::string& run_y,
                 std::vector<double> nas) {
  fs::create_directories(o.out_dir);
  if (nas.empty()) nas = {0.2, 0.5, 0.7};
  RingdownResult rx = load_ringdown(run_x);
  FarFieldMap ffx = near_to_far(rx.plane, rx.mode.lambda, 4, o.strict);
  auto img = radiation_pattern(ffx);
  write_pgm(o.out_dir + "/pattern_X.pgm", 201, 201, img);

  bool have_y = !run_y.empty();
  FarFieldMap ffy;
  RingdownResult ry;
  if (have_y) {
    ry = load_ringdown(run_y);
    ffy = near_to_far(ry.plane, ry.mode.lambda, 4, o.strict);
    ffy.polarization = Polarization::Y;
    write_pgm(o.out_dir + "/pattern_Y.pgm", 201, 201, radiation_pattern(ffy));
  }

  std::vector<std::string> cols = {"na", "eta_x"};
  if (have_y) {
    cols.push_back("eta_y");
    cols.push_back("k");
  }
  CsvWriter csv(o.out_dir + "/collection.csv", cols);
  for (double na : nas) {
    Aperture ap{na};
    std::vector<double> row = {na, collection_efficiency(ffx, ap, rx.mode.emitted_power)};
    if (have_y) {
      row.push_back(collection_efficiency(ffy, ap, ry.mode.emitted_power));
      row.push_back(overlap_K(ffx, ffy, ap));
    }
    csv.row(row);
  }
  std::printf("far field written to %s\n", o.out_dir.c_str());
  return 0;
}

int cmd_cascade(const CommonOpts& o, const std::string& beta_csv) {
  Config cfg = load_config(o);
  fs::create_directories(o.out_dir);

  CascadeRates rates = CascadeRates::from_config(cfg);
  auto coeff = ideal_coefficients(rates);
  {
    CsvWriter csv(o.out_dir + "/bell_vs_k.csv", {"k", "s_closed_form", "s_horodecki"});
    PairDensityMatrix rho = ideal_density_matrix(rates);
    for (int i = 0; i <= 100; ++i) {
      double K = i / 100.0;
      csv.row({K, bell_closed_form(coeff.alpha, coeff.d, coeff.c2, K),
               bell_horodecki(apply_overlap(rho, K))});
    }
  }

  if (!beta_csv.empty()) {
    double T1 = cfg.get_time("exciton_lifetime", 1e-9);
    double splitting = cfg.get_energy("splitting", micro_ev_to_joule(2.0));
    double fp = cfg.get_number("purcell_max", 10.0);
    auto betas = read_beta_csv(beta_csv);
    auto curve = bell_vs_mismatch(betas, T1, splitting, fp);
    write_mismatch_csv(o.out_dir + "/mismatch_curve.csv", curve);
    write_r_contours_csv(o.out_dir + "/r_contours.csv", betas, {2.0, 2.2, 2.4, 2.6, 2.8});
    std::printf("r = %.3f, S(centered) = %.3f, S=2 threshold at %.1f nm\n",
                figure_of_merit(T1, splitting, fp), curve.points.front().S_fixed,
                curve.threshold_offset * 1e9);
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, int workers) {
  Config cfg = load_config(o);
  SweepPlan plan = SweepPlan::from_config(cfg);
  if (o.resolution > 0) plan.run.resolution = o.resolution;
  plan.strict = plan.strict || o.strict;
  ResultCache cache(o.cache_dir.empty() ? ResultCache::default_dir() : o.cache_dir);
  auto results = run_sweep(plan, o.no_cache ? nullptr : &cache, workers, o.out_dir);
  int failed = 0;
  for (const auto& r : results)
    if (!r.ok) ++failed;
  std::printf("sweep: %zu points, %d failed; table at %s/sweep.csv\n", results.size(), failed,
              o.out_dir.c_str());
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"H1 photonic-crystal cavity simulation and entanglement analysis"};
  app.require_subcommand(1);

  CommonOpts sim_o, ff_o, cas_o, sweep_o, rep_o;
  std::string pol = "both";
  double beta_max = 0, beta_step = 5;
  bool dump_eps = false;
  auto* sim = app.add_subcommand("simulate", "ring-down of one design, X and/or Y");
  add_common(sim, &sim_o);
  sim->add_option("--polarization", pol, "X, Y or both");
  sim->add_option("--beta-scan", beta_max, "also scan beta factors out to this offset (nm)");
  sim->add_option("--beta-step", beta_step, "beta scan step (nm)");
  sim->add_flag("--dump-epsilon", dump_eps, "export the rasterized dielectric map");

  std::string run_x, run_y;
  std::vector<double> nas;
  auto* ff = app.add_subcommand("farfield", "far field, patterns, eta and K from saved runs");
  add_common(ff, &ff_o);
  ff->add_option("--run-x", run_x, "run file of the X mode")->required();
  ff->add_option("--run-y", run_y, "run file of the Y mode");
  ff->add_option("--na", nas, "numerical apertures");

  std::string beta_csv;
  auto* cas = app.add_subcommand("cascade", "density matrices, Bell curves, mismatch tables");
  add_common(cas, &cas_o);
  cas->add_option("--beta", beta_csv, "beta_scan csv for the mismatch analysis");

  int workers = 1;
  auto* sw = app.add_subcommand("sweep", "parameter sweep over (d, h)");
  add_common(sw, &sweep_o);
  sw->add_option("-w,--workers", workers, "worker pool size");

  std::string table;
  auto* rep = app.add_subcommand("report", "figure-data bundle from a sweep table");
  add_common(rep, &rep_o);
  rep->add_option("--table", table, "sweep csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_o, pol, beta_max, beta_step, dump_eps);
    if (ff->parsed()) return cmd_farfield(ff_o, run_x, run_y, nas);
    if (cas->parsed()) return cmd_cascade(cas_o, beta_csv);
    if (sw->parsed()) return cmd_sweep(sweep_o, workers);
    if (rep->parsed()) {
      int gaps = report(table, rep_o.out_dir, rep_o.strict);
      if (gaps > 0) std::fprintf(stderr, "report: %d gap markers\n", gaps);
      return 0;
    }
  } catch (const config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}

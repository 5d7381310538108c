#include "h1sim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "h1sim/errors.hpp"
#include "h1sim/io.hpp"
#include "h1sim/mode_analysis.hpp"
#include "h1sim/units.hpp"

namespace fs = std::filesystem;

namespace h1sim {

void SweepPlan::validate() const {
  if (d_values.empty()) throw config_error("sweep: empty d axis");
  if (h_values.empty()) throw config_error("sweep: empty h axis");
  if (na_values.empty()) throw config_error("sweep: empty NA axis");
  for (double d : d_values)
    if (d < 0 || d > 0.18) throw config_error("sweep: d outside [0, 0.18]");
  for (double h : h_values)
    if (h <= 0) throw config_error("sweep: membrane thickness must be > 0");
  for (double na : na_values) Aperture{na}.validate();
}

SweepPlan SweepPlan::from_config(const Config& cfg) {
  SweepPlan plan;
  plan.base = CavityDesign::from_config(cfg);
  plan.run = RunParams::from_config(cfg);
  if (cfg.has("d_values")) plan.d_values = cfg.get_number_list("d_values");
  if (cfg.has("h_values")) plan.h_values = cfg.get_length_list("h_values");
  else plan.h_values = {plan.base.membrane_thickness_h};
  if (cfg.has("na_values")) plan.na_values = cfg.get_number_list("na_values");
  plan.strict = cfg.get_int("strict", 0) != 0;
  plan.validate();
  return plan;
}

ResultCache::ResultCache(std::string dir) : dir_(std::move(dir)) {
  fs::create_directories(dir_);
}

std::string ResultCache::default_dir() {
  if (const char* env = std::getenv("H1SIM_CACHE")) return env;
  return ".h1sim-cache";
}

std::string ResultCache::path_for(const std::string& key) const {
  return dir_ + "/" + key + ".run";
}

std::optional<RingdownResult> ResultCache::load(const std::string& key) const {
  std::string path = path_for(key);
  if (!fs::exists(path)) return std::nullopt;
  return load_ringdown(path);
}

void ResultCache::store(const std::string& key, const RingdownResult& result) const {
  std::string tmp = path_for(key) + ".tmp";
  save_ringdown(tmp, result);
  fs::rename(tmp, path_for(key));
}

std::string run_key(const CavityDesign& design, const RunParams& params, Polarization pol) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "|res=%d|free=%.6g|max=%.6g|cs=%.6g|pml=%d,%d,%.3e,%.3e|pol=%c|%s",
                params.resolution, params.free_cycles, params.max_free_cycles,
                params.courant_safety, params.pml.thickness_cells, params.pml.grading_order,
                params.pml.target_reflection, params.pml.sigma_scale, pol_char(pol),
                engine_version);
  std::string text = design.canonical() + buf;
  std::uint64_t h = fnv1a64(text.data(), text.size());
  char hex[24];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

namespace {

void put_mode(BinaryWriter& w, const ModeCharacterization& m) {
  w.put(int(m.polarization));
  w.put(m.lambda);
  w.put(m.gamma_c);
  w.put(m.quality_factor);
  w.put(m.mode_volume);
  w.put(m.purcell_max);
  w.put(m.fit_residual);
  w.put(m.energy_ref);
  w.put(m.emitted_power);
  w.put(m.poynting_flux);
}

void get_mode(BinaryReader& r, ModeCharacterization* m) {
  int pol;
  r.get(&pol);
  m->polarization = Polarization(pol);
  r.get(&m->lambda);
  r.get(&m->gamma_c);
  r.get(&m->quality_factor);
  r.get(&m->mode_volume);
  r.get(&m->purcell_max);
  r.get(&m->fit_residual);
  r.get(&m->energy_ref);
  r.get(&m->emitted_power);
  r.get(&m->poynting_flux);
}

}  // namespace

void save_ringdown(const std::string& path, const RingdownResult& r) {
  BinaryWriter w(path);
  w.magic("h1sim runresult v1");
  put_mode(w, r.mode);
  w.put(r.free_cycles_used);
  write_plane_field(w, r.plane);
  write_plane_field(w, r.midplane);
  w.put_vec(r.probe.t);
  w.put_vec(r.probe.v);
  w.put_vec(r.probe_alt.t);
  w.put_vec(r.probe_alt.v);
  w.put_vec(r.energy.t);
  w.put_vec(r.energy.v);
  if (!w.good()) throw config_error("failed writing '" + path + "'");
}

RingdownResult load_ringdown(const std::string& path) {
  BinaryReader rd(path);
  rd.magic("h1sim runresult v1");
  RingdownResult r;
  get_mode(rd, &r.mode);
  rd.get(&r.free_cycles_used);
  read_plane_field(rd, &r.plane);
  read_plane_field(rd, &r.midplane);
  rd.get_vec(&r.probe.t);
  rd.get_vec(&r.probe.v);
  rd.get_vec(&r.probe_alt.t);
  rd.get_vec(&r.probe_alt.v);
  rd.get_vec(&r.energy.t);
  rd.get_vec(&r.energy.v);
  if (!rd.good()) throw config_error("truncated run result '" + path + "'");
  return r;
}

RingdownResult cached_ringdown(const CavityDesign& design, const RunParams& params,
                               Polarization pol, const ResultCache* cache) {
  std::string key = run_key(design, params, pol);
  if (cache) {
    if (auto hit = cache->load(key)) return std::move(*hit);
  }
  RingdownResult res = run_ringdown(design, params, pol);
  if (cache) cache->store(key, res);
  return res;
}

namespace {

DesignResult sweep_point(const SweepPlan& plan, double d, double h, const ResultCache* cache,
                         const std::string& out_dir) {
  DesignResult out;
  out.d = d;
  out.h = h;
  CavityDesign design = plan.base;
  design.inner_hole_shift_d = d;
  design.membrane_thickness_h = h;
  design.validate();

  RingdownResult rx = cached_ringdown(design, plan.run, Polarization::X, cache);
  RingdownResult ry = cached_ringdown(design, plan.run, Polarization::Y, cache);
  out.mode_x = rx.mode;
  out.mode_y = ry.mode;

  FarFieldMap ffx = near_to_far(rx.plane, rx.mode.lambda, 4, plan.strict);
  FarFieldMap ffy = near_to_far(ry.plane, ry.mode.lambda, 4, plan.strict);
  ffx.polarization = Polarization::X;
  ffy.polarization = Polarization::Y;

  for (double na : plan.na_values) {
    Aperture ap{na};
    out.eta_x[na] = collection_efficiency(ffx, ap, rx.mode.emitted_power);
    out.eta_y[na] = collection_efficiency(ffy, ap, ry.mode.emitted_power);
    out.K[na] = overlap_K(ffx, ffy, ap);
  }

  if (plan.emit_patterns && !out_dir.empty()) {
    char name[128];
    const int npix = 201;
    for (const FarFieldMap* m : {&ffx, &ffy}) {
      auto img = radiation_pattern(*m, npix);
      std::snprintf(name, sizeof name, "%s/pattern_d%.3f_h%.0fnm_%c.pgm", out_dir.c_str(), d,
                    h * 1e9, pol_char(m->polarization));
      write_pgm(name, npix, npix, img);
      std::snprintf(name, sizeof name, "%s/pattern_d%.3f_h%.0fnm_%c.csv", out_dir.c_str(), d,
                    h * 1e9, pol_char(m->polarization));
      CsvWriter csv(name, {"sin_theta_x", "sin_theta_y", "intensity"});
      for (int px = 0; px < npix; ++px)
        for (int py = 0; py < npix; ++py)
          csv.row({-1.0 + 2.0 * px / (npix - 1), -1.0 + 2.0 * py / (npix - 1),
                   img[std::size_t(px) * npix + py]});
    }
  }
  out.ok = true;
  return out;
}

}  // namespace

std::vector<DesignResult> run_sweep(const SweepPlan& plan, const ResultCache* cache,
                                    int workers, const std::string& out_dir) {
  plan.validate();
  if (!out_dir.empty()) fs::create_directories(out_dir);

  struct Task {
    double d, h;
  };
  std::vector<Task> tasks;
  for (double h : plan.h_values)
    for (double d : plan.d_values) tasks.push_back({d, h});

  std::vector<DesignResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    while (true) {
      std::size_t q = next.fetch_add(1);
      if (q >= tasks.size()) return;
      try {
        results[q] = sweep_point(plan, tasks[q].d, tasks[q].h, cache, out_dir);
      } catch (const std::exception& e) {
        results[q].d = tasks[q].d;
        results[q].h = tasks[q].h;
        results[q].ok = false;
        results[q].error = e.what();
      }
    }
  };
  workers = std::max(1, workers);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  // Deterministic merge order regardless of worker scheduling.
  std::stable_sort(results.begin(), results.end(), [](const DesignResult& a, const DesignResult& b) {
    return a.h != b.h ? a.h < b.h : a.d < b.d;
  });

  if (!out_dir.empty()) {
    write_sweep_csv(out_dir + "/sweep.csv", plan, results);
    int failures = 0;
    CsvWriter manifest(out_dir + "/failures.csv", {"d", "h_um", "ok"});
    for (const auto& r : results) {
      if (!r.ok) {
        ++failures;
        manifest.raw_row(std::to_string(r.d) + "," + std::to_string(r.h * 1e6) + ",\"" +
                         r.error + "\"");
      }
    }
    (void)failures;
  }
  return results;
}

std::vector<std::string> sweep_csv_columns(const std::vector<double>& na_values) {
  std::vector<std::string> cols = {"d",          "h_um",       "lambda_x_um", "q_x",
                                   "v_x_lam3",   "fp_x",       "lambda_y_um", "q_y",
                                   "v_y_lam3",   "fp_y"};
  char buf[32];
  for (double na : na_values) {
    std::snprintf(buf, sizeof buf, "eta_x_na%02d", int(std::lround(na * 100)));
    cols.push_back(buf);
    std::snprintf(buf, sizeof buf, "eta_y_na%02d", int(std::lround(na * 100)));
    cols.push_back(buf);
    std::snprintf(buf, sizeof buf, "k_na%02d", int(std::lround(na * 100)));
    cols.push_back(buf);
  }
  return cols;
}

void write_sweep_csv(const std::string& path, const SweepPlan& plan,
                     const std::vector<DesignResult>& results) {
  CsvWriter csv(path, sweep_csv_columns(plan.na_values));
  const double nan = std::nan("");
  for (const auto& r : results) {
    std::vector<double> row = {r.d, r.h * 1e6};
    if (r.ok) {
      row.insert(row.end(), {r.mode_x.lambda * 1e6, r.mode_x.quality_factor, r.mode_x.mode_volume,
                             r.mode_x.purcell_max, r.mode_y.lambda * 1e6, r.mode_y.quality_factor,
                             r.mode_y.mode_volume, r.mode_y.purcell_max});
      for (double na : plan.na_values) {
        row.push_back(r.eta_x.at(na));
        row.push_back(r.eta_y.at(na));
        row.push_back(r.K.at(na));
      }
    } else {
      row.insert(row.end(), 8 + 3 * plan.na_values.size(), nan);
    }
    csv.row(row);
  }
}

namespace {

struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<double>> rows;
  int col(const std::string& name) const {
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i] == name) return int(i);
    return -1;
  }
};

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read '" + path + "'");
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw config_error("empty csv '" + path + "'");
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) t.cols.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, cell, ','))
      row.push_back(cell == "nan" ? std::nan("") : std::atof(cell.c_str()));
    row.resize(t.cols.size(), std::nan(""));
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace

int report(const std::string& sweep_csv, const std::string& out_dir, bool strict) {
  Table t = read_csv(sweep_csv);
  fs::create_directories(out_dir);
  int gaps = 0;

  // Distinct h values in row order.
  int ch = t.col("h_um");
  if (ch < 0) throw config_error("report: sweep table lacks h_um");
  std::vector<double> hs;
  for (const auto& row : t.rows)
    if (std::find(hs.begin(), hs.end(), row[ch]) == hs.end()) hs.push_back(row[ch]);

  // Per-NA columns present in the table.
  std::vector<std::string> kcols, etax_cols;
  for (const auto& c : t.cols) {
    if (c.rfind("k_na", 0) == 0) kcols.push_back(c);
    if (c.rfind("eta_x_na", 0) == 0) etax_cols.push_back(c);
  }

  for (double h : hs) {
    char name[128];
    std::snprintf(name, sizeof name, "%s/cut_h%.0fnm.csv", out_dir.c_str(), h * 1e3);
    std::vector<std::string> cols = {"d", "fp_x", "fp_y", "lambda_x_um"};
    for (const auto& c : etax_cols) cols.push_back(c);
    for (const auto& c : kcols) cols.push_back(c);
    CsvWriter csv(name, cols);
    for (const auto& row : t.rows) {
      if (row[ch] != h) continue;
      std::vector<double> out = {row[t.col("d")], row[t.col("fp_x")], row[t.col("fp_y")],
                                 row[t.col("lambda_x_um")]};
      for (const auto& c : etax_cols) out.push_back(row[t.col(c)]);
      for (const auto& c : kcols) out.push_back(row[t.col(c)]);
      for (double v : out)
        if (std::isnan(v)) ++gaps;
      csv.row(out);
    }
  }

  // 2D map of the maximal Purcell factor over (d, h).
  {
    CsvWriter csv(out_dir + "/fp_map.csv", {"d", "h_um", "fp_x", "fp_y"});
    for (const auto& row : t.rows) {
      std::vector<double> out = {row[t.col("d")], row[ch], row[t.col("fp_x")],
                                 row[t.col("fp_y")]};
      for (double v : out)
        if (std::isnan(v)) ++gaps;
      csv.row(out);
    }
  }

  if (strict && gaps > 0)
    throw numerical_error("report: " + std::to_string(gaps) + " gap markers in the bundle");
  return gaps;
}

std::vector<BetaSample> beta_scan(const PlaneField& mode_x_mid, const PlaneField& mode_y_mid,
                                  const std::vector<double>& offsets) {
  std::vector<BetaSample> out;
  for (double off : offsets) {
    auto [bx, by] = beta_factors(mode_x_mid, mode_y_mid, off, 0.0);
    out.push_back({off, bx, by});
  }
  return out;
}

void write_beta_csv(const std::string& path, const std::vector<BetaSample>& betas) {
  CsvWriter csv(path, {"offset_nm", "beta_x", "beta_y"});
  for (const auto& b : betas) csv.row({b.offset * 1e9, b.beta_x, b.beta_y});
}

std::vector<BetaSample> read_beta_csv(const std::string& path) {
  Table t = read_csv(path);
  int co = t.col("offset_nm"), cx = t.col("beta_x"), cy = t.col("beta_y");
  if (co < 0 || cx < 0 || cy < 0) throw config_error("beta csv needs offset_nm,beta_x,beta_y");
  std::vector<BetaSample> out;
  for (const auto& row : t.rows) out.push_back({row[co] * 1e-9, row[cx], row[cy]});
  return out;
}

void write_mismatch_csv(const std::string& path, const MismatchCurve& curve) {
  CsvWriter csv(path, {"offset_nm", "beta_x", "beta_y", "delta_f", "g", "s_fixed", "s_horodecki"});
  for (const auto& p : curve.points)
    csv.row({p.offset * 1e9, p.beta_x, p.beta_y, p.delta_F, p.g, p.S_fixed, p.S_horodecki});
}

void write_r_contours_csv(const std::string& path, const std::vector<BetaSample>& betas,
                          const std::vector<double>& s_targets) {
  std::vector<std::string> cols = {"offset_nm"};
  char buf[32];
  for (double s : s_targets) {
    std::snprintf(buf, sizeof buf, "r_at_s%.1f", s);
    cols.push_back(buf);
  }
  CsvWriter csv(path, cols);
  for (const auto& b : betas) {
    std::vector<double> row = {b.offset * 1e9};
    double dF = (b.beta_x - b.beta_y) / (b.beta_x + b.beta_y);
    double factor = 2.0 * std::pow(1.0 - dF * dF, 2) / (2.0 + 6.0 * dF * dF);
    for (double s : s_targets) {
      double x_needed = s / std::sqrt(2.0) - 1.0;
      if (x_needed <= 0 || factor < x_needed) {
        row.push_back(x_needed <= 0 ? INFINITY : std::nan(""));
        continue;
      }
      double G = factor / x_needed;  // = sqrt(1+g^2) at the contour
      double g = std::sqrt(G * G - 1.0);
      row.push_back(g * (b.beta_x + b.beta_y) / 2.0);  // r = g*(bx+by)/2
    }
    csv.row(row);
  }
}

}  // namespace h1sim

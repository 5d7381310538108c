#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "h1sim/cascade.hpp"
#include "h1sim/farfield.hpp"
#include "h1sim/fdtd.hpp"
#include "h1sim/geometry.hpp"

namespace h1sim {

inline constexpr const char* engine_version = "h1sim-1";

struct SweepPlan {
  std::vector<double> d_values;
  std::vector<double> h_values;                  // m
  std::vector<double> na_values = {0.2, 0.5, 0.7};
  CavityDesign base;
  RunParams run;
  bool strict = false;
  bool emit_patterns = true;

  void validate() const;
  static SweepPlan from_config(const Config& cfg);
};

// Content-addressed store of finished ring-down runs, keyed by design,
// run parameters, polarization and engine version. A hit reproduces the
// serialized run byte for byte.
class ResultCache {
 public:
  explicit ResultCache(std::string dir);
  static std::string default_dir();  // $H1SIM_CACHE, else .h1sim-cache

  std::optional<RingdownResult> load(const std::string& key) const;
  void store(const std::string& key, const RingdownResult& result) const;
  std::string path_for(const std::string& key) const;

 private:
  std::string dir_;
};

std::string run_key(const CavityDesign& design, const RunParams& params, Polarization pol);

// Serialization used both for the cache and for plane-field dumps.
void save_ringdown(const std::string& path, const RingdownResult& r);
RingdownResult load_ringdown(const std::string& path);

// Ring-down through the cache (cache may be null for a forced fresh run).
RingdownResult cached_ringdown(const CavityDesign& design, const RunParams& params,
                               Polarization pol, const ResultCache* cache);

struct DesignResult {
  double d = 0, h = 0;
  bool ok = false;
  std::string error;
  ModeCharacterization mode_x, mode_y;
  std::map<double, double> eta_x, eta_y;  // NA -> eta
  std::map<double, double> K;             // NA -> overlap
};

// Full sweep over (d, h): ring-down for both polarizations, far fields,
// eta per NA, K per NA. Failures are isolated per point. Points run on a
// bounded worker pool; the merged output is ordered by (d, h) regardless of
// worker count.
std::vector<DesignResult> run_sweep(const SweepPlan& plan, const ResultCache* cache,
                                    int workers, const std::string& out_dir);

void write_sweep_csv(const std::string& path, const SweepPlan& plan,
                     const std::vector<DesignResult>& results);
std::vector<std::string> sweep_csv_columns(const std::vector<double>& na_values);

// Report: reads a sweep table and emits figure-ready bundles (1D cuts per h,
// 2D maps). Returns the number of gap markers (missing values).
int report(const std::string& sweep_csv, const std::string& out_dir, bool strict);

// Beta scan along +x from the midplane mode records of one design.
std::vector<BetaSample> beta_scan(const PlaneField& mode_x_mid, const PlaneField& mode_y_mid,
                                  const std::vector<double>& offsets);
void write_beta_csv(const std::string& path, const std::vector<BetaSample>& betas);
std::vector<BetaSample> read_beta_csv(const std::string& path);

void write_mismatch_csv(const std::string& path, const MismatchCurve& curve);

// r-contour table: for each offset and target S, the largest figure of merit
// r still reaching that S (nan when unreachable).
void write_r_contours_csv(const std::string& path, const std::vector<BetaSample>& betas,
                          const std::vector<double>& s_targets);

}  // namespace h1sim

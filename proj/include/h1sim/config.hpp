#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace h1sim {

// Plain-text configuration: one `key = value` per line, '#' comments.
// Scalar values may carry a unit suffix ("270 nm", "1 ns", "2 ueV", "5e9 /s");
// list values are comma separated and may use start:step:stop ranges.
// Everything is canonicalized to SI on read (lengths m, times s, energies J,
// rates rad/s).
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const;

  // Dimensionless number.
  double get_number(const std::string& key) const;
  double get_number(const std::string& key, double fallback) const;

  // Length in meters; accepts m, mm, um, nm suffixes (bare number = meters).
  double get_length(const std::string& key) const;
  double get_length(const std::string& key, double fallback) const;

  // Time in seconds; accepts s, ms, us, ns, ps, fs.
  double get_time(const std::string& key) const;
  double get_time(const std::string& key, double fallback) const;

  // Rate in rad/s; accepts /s, 1/s, or an energy tag (ueV, meV, eV) which is
  // converted through E/hbar.
  double get_rate(const std::string& key) const;
  double get_rate(const std::string& key, double fallback) const;

  // Energy in joules; accepts ueV, meV, eV, J.
  double get_energy(const std::string& key) const;
  double get_energy(const std::string& key, double fallback) const;

  int get_int(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  std::vector<double> get_number_list(const std::string& key) const;
  std::vector<double> get_length_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
  std::string raw(const std::string& key) const;
};

}  // namespace h1sim

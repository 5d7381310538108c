#include "h1sim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "h1sim/errors.hpp"
#include "h1sim/units.hpp"

namespace h1sim {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Splits "270 nm" / "270nm" / "3.46" into number and unit token.
bool split_value(const std::string& text, double* num, std::string* unit) {
  const char* p = text.c_str();
  char* end = nullptr;
  double v = std::strtod(p, &end);
  if (end == p) return false;
  *num = v;
  *unit = trim(std::string(end));
  return true;
}

double length_scale(const std::string& unit, const std::string& key) {
  if (unit.empty() || unit == "m") return 1.0;
  if (unit == "mm") return 1e-3;
  if (unit == "um" || unit == "µm" || unit == "μm") return 1e-6;
  if (unit == "nm") return 1e-9;
  throw config_error("config: unknown length unit '" + unit + "' for key '" + key + "'");
}

double time_scale(const std::string& unit, const std::string& key) {
  if (unit.empty() || unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  if (unit == "ns") return 1e-9;
  if (unit == "ps") return 1e-12;
  if (unit == "fs") return 1e-15;
  throw config_error("config: unknown time unit '" + unit + "' for key '" + key + "'");
}

double energy_joule(double v, const std::string& unit, const std::string& key) {
  if (unit == "J") return v;
  if (unit == "eV") return v * electron_volt;
  if (unit == "meV") return v * 1e-3 * electron_volt;
  if (unit == "ueV" || unit == "µeV" || unit == "μeV")
    return v * 1e-6 * electron_volt;
  throw config_error("config: unknown energy unit '" + unit + "' for key '" + key + "'");
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("config: line " + std::to_string(lineno) + " has no '='");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw config_error("config: empty key on line " + std::to_string(lineno));
    c.kv_[key] = val;
  }
  return c;
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::raw(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw config_error("config: missing key '" + key + "'");
  return it->second;
}

double Config::get_number(const std::string& key) const {
  double v;
  std::string unit;
  if (!split_value(raw(key), &v, &unit) || !unit.empty())
    throw config_error("config: key '" + key + "' is not a plain number");
  return v;
}

double Config::get_number(const std::string& key, double fallback) const {
  return has(key) ? get_number(key) : fallback;
}

double Config::get_length(const std::string& key) const {
  double v;
  std::string unit;
  if (!split_value(raw(key), &v, &unit))
    throw config_error("config: key '" + key + "' is not a length");
  return v * length_scale(unit, key);
}

double Config::get_length(const std::string& key, double fallback) const {
  return has(key) ? get_length(key) : fallback;
}

double Config::get_time(const std::string& key) const {
  double v;
  std::string unit;
  if (!split_value(raw(key), &v, &unit))
    throw config_error("config: key '" + key + "' is not a time");
  return v * time_scale(unit, key);
}

double Config::get_time(const std::string& key, double fallback) const {
  return has(key) ? get_time(key) : fallback;
}

double Config::get_rate(const std::string& key) const {
  double v;
  std::string unit;
  if (!split_value(raw(key), &v, &unit))
    throw config_error("config: key '" + key + "' is not a rate");
  if (unit.empty() || unit == "/s" || unit == "1/s") return v;
  // Energy-tagged rates convert through E/hbar.
  return energy_joule(v, unit, key) / hbar;
}

double Config::get_rate(const std::string& key, double fallback) const {
  return has(key) ? get_rate(key) : fallback;
}

double Config::get_energy(const std::string& key) const {
  double v;
  std::string unit;
  if (!split_value(raw(key), &v, &unit))
    throw config_error("config: key '" + key + "' is not an energy");
  if (unit.empty()) throw config_error("config: key '" + key + "' needs an energy unit");
  return energy_joule(v, unit, key);
}

double Config::get_energy(const std::string& key, double fallback) const {
  return has(key) ? get_energy(key) : fallback;
}

int Config::get_int(const std::string& key) const {
  double v = get_number(key);
  int i = static_cast<int>(std::lround(v));
  if (std::abs(v - i) > 1e-9)
    throw config_error("config: key '" + key + "' is not an integer");
  return i;
}

int Config::get_int(const std::string& key, int fallback) const {
  return has(key) ? get_int(key) : fallback;
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

// One list item: either a scalar or start:step:stop (inclusive stop).
void expand_item(const std::string& item, double unit_scale_hint, bool is_length,
                 const std::string& key, std::vector<double>* out) {
  size_t c1 = item.find(':');
  if (c1 == std::string::npos) {
    double v;
    std::string unit;
    if (!split_value(item, &v, &unit))
      throw config_error("config: bad list item '" + item + "' for key '" + key + "'");
    double scale = is_length ? length_scale(unit, key)
                             : (unit.empty() ? 1.0 : throw config_error(
                                   "config: unexpected unit in numeric list '" + key + "'"));
    (void)unit_scale_hint;
    out->push_back(v * scale);
    return;
  }
  size_t c2 = item.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw config_error("config: range needs start:step:stop in key '" + key + "'");
  std::string s0 = trim(item.substr(0, c1));
  std::string s1 = trim(item.substr(c1 + 1, c2 - c1 - 1));
  std::string s2 = trim(item.substr(c2 + 1));
  double a, b, c;
  std::string u0, u1, u2;
  if (!split_value(s0, &a, &u0) || !split_value(s1, &b, &u1) || !split_value(s2, &c, &u2))
    throw config_error("config: bad range '" + item + "' in key '" + key + "'");
  // Unit may be attached to the last element only ("0:10:100 nm").
  double scale = 1.0;
  if (is_length) scale = length_scale(!u2.empty() ? u2 : (!u1.empty() ? u1 : u0), key);
  if (b <= 0) throw config_error("config: range step must be positive in key '" + key + "'");
  for (double v = a; v <= c + 0.5 * b; v += b) out->push_back(v * scale);
}

}  // namespace

std::vector<double> Config::get_number_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) expand_item(item, 1.0, false, key, &out);
  return out;
}

std::vector<double> Config::get_length_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(raw(key))) expand_item(item, 1.0, true, key, &out);
  return out;
}

}  // namespace h1sim

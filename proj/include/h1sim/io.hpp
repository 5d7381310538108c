#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "h1sim/records.hpp"

namespace h1sim {

// CSV with a fixed header; values written with %.10g.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  std::ofstream out_;
  std::size_t ncols_;
};

void write_time_series_csv(const std::string& path, const TimeSeries& s,
                           const std::string& value_name);

// 8-bit grayscale PGM (P5) of values in [0, 1], row-major width x height.
void write_pgm(const std::string& path, int width, int height,
               const std::vector<double>& values);

// Little-endian binary archive with size-prefixed vectors; used by the
// result cache and the plane-field dumps.
class BinaryWriter {
 public:
  explicit BinaryWriter(const std::string& path);
  void magic(const std::string& tag);
  template <typename T>
  void put(const T& v) {
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  template <typename T>
  void put_vec(const std::vector<T>& v) {
    std::uint64_t n = v.size();
    put(n);
    out_.write(reinterpret_cast<const char*>(v.data()), n * sizeof(T));
  }
  bool good() const { return bool(out_); }

 private:
  std::ofstream out_;
};

class BinaryReader {
 public:
  explicit BinaryReader(const std::string& path);
  void magic(const std::string& tag);
  template <typename T>
  void get(T* v) {
    in_.read(reinterpret_cast<char*>(v), sizeof *v);
  }
  template <typename T>
  void get_vec(std::vector<T>* v) {
    std::uint64_t n = 0;
    get(&n);
    v->resize(n);
    in_.read(reinterpret_cast<char*>(v->data()), n * sizeof(T));
  }
  bool good() const { return bool(in_); }

 private:
  std::ifstream in_;
};

void write_plane_field(BinaryWriter& w, const PlaneField& p);
void read_plane_field(BinaryReader& r, PlaneField* p);

}  // namespace h1sim

#include "h1sim/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "h1sim/errors.hpp"

namespace h1sim {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw config_error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw config_error("csv row width mismatch");
  char buf[32];
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i]))
      out_ << "nan";
    else {
      std::snprintf(buf, sizeof buf, "%.10g", values[i]);
      out_ << buf;
    }
    out_ << (i + 1 < values.size() ? "," : "\n");
  }
}

void CsvWriter::raw_row(const std::string& line) { out_ << line << "\n"; }

void write_time_series_csv(const std::string& path, const TimeSeries& s,
                           const std::string& value_name) {
  CsvWriter csv(path, {"t_seconds", value_name});
  for (std::size_t i = 0; i < s.t.size(); ++i) csv.row({s.t[i], s.v[i]});
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<double>& values) {
  if (int(values.size()) != width * height) throw config_error("pgm size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write '" + path + "'");
  out << "P5\n" << width << " " << height << "\n255\n";
  std::vector<unsigned char> bytes(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    bytes[i] = static_cast<unsigned char>(std::clamp(values[i], 0.0, 1.0) * 255.0 + 0.5);
  out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

BinaryWriter::BinaryWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (!out_) throw config_error("cannot write '" + path + "'");
}

void BinaryWriter::magic(const std::string& tag) { out_ << tag << "\n"; }

BinaryReader::BinaryReader(const std::string& path) : in_(path, std::ios::binary) {
  if (!in_) throw config_error("cannot read '" + path + "'");
}

void BinaryReader::magic(const std::string& tag) {
  std::string line;
  std::getline(in_, line);
  if (line != tag) throw config_error("bad file magic, expected '" + tag + "'");
}

void write_plane_field(BinaryWriter& w, const PlaneField& p) {
  w.put(p.nx);
  w.put(p.ny);
  w.put(p.dx);
  w.put(p.x0);
  w.put(p.y0);
  w.put(p.z);
  w.put(p.omega);
  w.put_vec(p.ex);
  w.put_vec(p.ey);
  w.put_vec(p.hx);
  w.put_vec(p.hy);
}

void read_plane_field(BinaryReader& r, PlaneField* p) {
  r.get(&p->nx);
  r.get(&p->ny);
  r.get(&p->dx);
  r.get(&p->x0);
  r.get(&p->y0);
  r.get(&p->z);
  r.get(&p->omega);
  r.get_vec(&p->ex);
  r.get_vec(&p->ey);
  r.get_vec(&p->hx);
  r.get_vec(&p->hy);
}

}  // namespace h1sim

#include "mph/mphgrid_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mph {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void write_axis(std::ostream& os, const char* name, const std::vector<double>& vals) {
  os << name;
  for (double v : vals) os << ' ' << format_double(v);
  os << '\n';
}

void write_grid(std::ostream& os, const IntGrid& g) {
  for (int i = 0; i < g.rows; ++i) {
    for (int j = 0; j < g.cols; ++j) {
      if (j) os << ' ';
      os << g.at(i, j);
    }
    os << '\n';
  }
}

[[noreturn]] void bad(const std::string& msg) {
  throw std::runtime_error("MPHGRID parse error: " + msg);
}

std::vector<double> read_axis(std::istream& is, const std::string& name, int count) {
  std::string line;
  if (!std::getline(is, line)) bad("missing " + name + " line");
  std::istringstream ss(line);
  std::string tag;
  ss >> tag;
  if (tag != name) bad("expected " + name + " line");
  std::vector<double> vals(static_cast<std::size_t>(count));
  for (auto& v : vals)
    if (!(ss >> v)) bad(name + " has too few values");
  double extra;
  if (ss >> extra) bad(name + " has too many values");
  return vals;
}

IntGrid read_grid(std::istream& is, int rows, int cols) {
  IntGrid g(rows, cols);
  for (int i = 0; i < rows; ++i) {
    std::string line;
    if (!std::getline(is, line)) bad("missing grid row");
    std::istringstream ss(line);
    for (int j = 0; j < cols; ++j)
      if (!(ss >> g.at(i, j))) bad("grid row has too few values");
    int extra;
    if (ss >> extra) bad("grid row has too many values");
  }
  return g;
}

}  // namespace

void write_mphgrid(std::ostream& os, const BifiltrationInvariants& inv) {
  os << "MPHGRID v1 channels=4 rows=" << inv.hilb.rows << " cols=" << inv.hilb.cols << '\n';
  write_axis(os, "r_values", inv.scales.r_values);
  write_axis(os, "t_values", inv.scales.t_values);
  write_grid(os, inv.hilb);
  write_grid(os, inv.xi0);
  write_grid(os, inv.xi1);
  write_grid(os, inv.xi2);
}

void write_mphgrid_file(const std::string& path, const BifiltrationInvariants& inv) {
  std::ofstream os(path, std::ios::binary);  // binary: no newline translation
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_mphgrid(os, inv);
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

BifiltrationInvariants read_mphgrid(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) bad("empty stream");
  int rows = 0, cols = 0, channels = 0;
  if (std::sscanf(line.c_str(), "MPHGRID v1 channels=%d rows=%d cols=%d", &channels, &rows,
                  &cols) != 3)
    bad("bad header '" + line + "'");
  if (channels != 4) bad("unsupported channel count");
  if (rows < 1 || cols < 1) bad("bad grid dimensions");

  BifiltrationInvariants inv;
  inv.scales.r_values = read_axis(is, "r_values", rows);
  inv.scales.t_values = read_axis(is, "t_values", cols);
  inv.hilb = read_grid(is, rows, cols);
  inv.xi0 = read_grid(is, rows, cols);
  inv.xi1 = read_grid(is, rows, cols);
  inv.xi2 = read_grid(is, rows, cols);
  return inv;
}

BifiltrationInvariants read_mphgrid_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return read_mphgrid(is);
}

}  // namespace mph

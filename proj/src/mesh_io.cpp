#include "mph/mesh_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "mph/rng.hpp"

namespace mph {

namespace {

[[noreturn]] void fail_at(int line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

// Returns the next line that is neither blank nor a comment; false at EOF.
bool next_content_line(std::istream& in, std::string& line, int& line_no) {
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] == '#') continue;
    return true;
  }
  return false;
}

double parse_real(const std::string& tok, int line_no) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    fail_at(line_no, "non-numeric token '" + tok + "'");
  }
  if (pos != tok.size()) fail_at(line_no, "non-numeric token '" + tok + "'");
  if (!std::isfinite(v)) fail_at(line_no, "non-finite coordinate '" + tok + "'");
  return v;
}

long parse_int(const std::string& tok, int line_no) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(tok, &pos);
  } catch (const std::exception&) {
    fail_at(line_no, "non-numeric token '" + tok + "'");
  }
  if (pos != tok.size()) fail_at(line_no, "non-numeric token '" + tok + "'");
  return v;
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

}  // namespace

Mesh parse_off(std::istream& in) {
  int line_no = 0;
  std::string line;
  if (!next_content_line(in, line, line_no)) fail_at(line_no, "missing OFF header");
  {
    auto toks = tokens_of(line);
    if (toks.size() != 1 || toks[0] != "OFF")
      fail_at(line_no, "expected 'OFF' header, got '" + line + "'");
  }
  if (!next_content_line(in, line, line_no)) fail_at(line_no, "missing counts line");
  auto counts = tokens_of(line);
  if (counts.size() != 3) fail_at(line_no, "counts line must be 'V F E'");
  const long nv = parse_int(counts[0], line_no);
  const long nf = parse_int(counts[1], line_no);
  parse_int(counts[2], line_no);  // edge count is ignored but must be numeric
  if (nv < 0 || nf < 0) fail_at(line_no, "negative count");

  Mesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nv));
  for (long v = 0; v < nv; ++v) {
    if (!next_content_line(in, line, line_no))
      fail_at(line_no, "unexpected end of file: expected " + std::to_string(nv) +
                           " vertices, got " + std::to_string(v));
    auto toks = tokens_of(line);
    if (toks.size() != 3) fail_at(line_no, "vertex line must have 3 coordinates");
    mesh.vertices.push_back(
        {parse_real(toks[0], line_no), parse_real(toks[1], line_no), parse_real(toks[2], line_no)});
  }

  for (long f = 0; f < nf; ++f) {
    if (!next_content_line(in, line, line_no))
      fail_at(line_no, "unexpected end of file: expected " + std::to_string(nf) +
                           " faces, got " + std::to_string(f));
    auto toks = tokens_of(line);
    if (toks.empty()) fail_at(line_no, "empty face line");
    const long arity = parse_int(toks[0], line_no);
    if (arity < 3) fail_at(line_no, "face must have at least 3 vertices");
    if (static_cast<long>(toks.size()) != arity + 1)
      fail_at(line_no, "face vertex count does not match its indices");
    std::vector<int> idx(static_cast<std::size_t>(arity));
    for (long i = 0; i < arity; ++i) {
      const long v = parse_int(toks[static_cast<std::size_t>(i + 1)], line_no);
      if (v < 0 || v >= nv) fail_at(line_no, "face index out of range");
      idx[static_cast<std::size_t>(i)] = static_cast<int>(v);
    }
    for (long i = 1; i + 1 < arity; ++i)
      mesh.faces.push_back({idx[0], idx[static_cast<std::size_t>(i)],
                            idx[static_cast<std::size_t>(i + 1)]});
  }
  if (next_content_line(in, line, line_no))
    fail_at(line_no, "content after the declared vertices and faces (counts mismatch?)");
  return mesh;
}

Mesh parse_off_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_off(in);
}

namespace {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 u = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const Vec3 v = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const Vec3 w = {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
  return 0.5 * std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
}

}  // namespace

PointCloud sample_points(const Mesh& mesh, int count, SampleMode mode, std::uint64_t seed) {
  if (count <= 0) throw std::invalid_argument("sample_points: count must be positive");
  Rng rng(seed);
  PointCloud cloud;
  cloud.points.reserve(static_cast<std::size_t>(count));

  if (mode == SampleMode::vertices) {
    const int n = static_cast<int>(mesh.vertices.size());
    if (n < count)
      throw std::runtime_error("sample_points: mesh has " + std::to_string(n) +
                               " vertices, need " + std::to_string(count));
    // partial Fisher-Yates
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < count; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      cloud.points.push_back(mesh.vertices[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])]);
    }
    return cloud;
  }

  std::vector<double> cum_area(mesh.faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& tri = mesh.faces[f];
    total += triangle_area(mesh.vertices[static_cast<std::size_t>(tri[0])],
                           mesh.vertices[static_cast<std::size_t>(tri[1])],
                           mesh.vertices[static_cast<std::size_t>(tri[2])]);
    cum_area[f] = total;
  }
  if (mesh.faces.empty() || total <= 0.0)
    throw std::runtime_error("sample_points: mesh has no positive-area faces");

  for (int i = 0; i < count; ++i) {
    const double pick = rng.uniform(0.0, total);
    const auto it = std::upper_bound(cum_area.begin(), cum_area.end(), pick);
    const std::size_t f = std::min(static_cast<std::size_t>(it - cum_area.begin()),
                                   mesh.faces.size() - 1);
    const auto& tri = mesh.faces[f];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
    double u = rng.uniform();
    double v = rng.uniform();
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    cloud.points.push_back({a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]),
                            a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]),
                            a[2] + u * (b[2] - a[2]) + v * (c[2] - a[2])});
  }
  return cloud;
}

PointCloud parse_xyz(std::istream& in) {
  PointCloud cloud;
  int line_no = 0;
  std::string line;
  while (next_content_line(in, line, line_no)) {
    auto toks = tokens_of(line);
    if (toks.size() != 3) fail_at(line_no, "point line must have 3 coordinates");
    cloud.points.push_back(
        {parse_real(toks[0], line_no), parse_real(toks[1], line_no), parse_real(toks[2], line_no)});
  }
  if (cloud.points.empty()) throw std::runtime_error("point cloud file has no points");
  return cloud;
}

PointCloud parse_xyz_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_xyz(in);
}

PointCloud normalize_to_unit_box(const PointCloud& cloud) {
  Vec3 lo = cloud.points.at(0), hi = cloud.points.at(0);
  for (const auto& p : cloud.points) {
    for (int d = 0; d < 3; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }
  }
  double extent = std::max({hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]});
  if (extent <= 0.0) extent = 1.0;
  PointCloud out;
  out.points.reserve(cloud.points.size());
  for (const auto& p : cloud.points)
    out.points.push_back({(p[0] - lo[0]) / extent, (p[1] - lo[1]) / extent, (p[2] - lo[2]) / extent});
  return out;
}

}  // namespace mph

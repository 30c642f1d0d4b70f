#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

namespace mph {

using Vec3 = std::array<double, 3>;

// Triangulated polyhedral mesh; polygon faces are fan-triangulated on load.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

struct PointCloud {
  std::vector<Vec3> points;
};

enum class SampleMode { vertices, surface };

// ASCII OFF: "OFF" header line, "V F E" counts line, V vertex lines, F face
// lines. Comment lines (#...) and blank lines are skipped. Errors carry the
// offending line number.
Mesh parse_off(std::istream& in);
Mesh parse_off_file(const std::string& path);

// vertices mode: uniform sample without replacement; surface mode:
// area-weighted triangle choice then a uniform barycentric point.
// Deterministic given seed (mt19937_64 with the transforms in rng.hpp).
PointCloud sample_points(const Mesh& mesh, int count, SampleMode mode, std::uint64_t seed);

// Lines of "x y z"; comments (#...) and blank lines skipped.
PointCloud parse_xyz(std::istream& in);
PointCloud parse_xyz_file(const std::string& path);

// Translate the min corner to the origin and scale by the largest extent so
// the cloud fits in the unit box (aspect preserved).
PointCloud normalize_to_unit_box(const PointCloud& cloud);

}  // namespace mph

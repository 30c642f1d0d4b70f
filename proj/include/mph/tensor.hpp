#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mph {

// Dense row-major double tensor.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> s);

  static Tensor zeros(std::vector<int> s) { return Tensor(std::move(s)); }

  std::int64_t numel() const { return static_cast<std::int64_t>(data.size()); }

  double& operator[](std::int64_t i) { return data[static_cast<std::size_t>(i)]; }
  double operator[](std::int64_t i) const { return data[static_cast<std::size_t>(i)]; }

  // 2d/3d/4d accessors; shape is checked on construction, indices are not
  double& at(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  const double& at(int i, int j) const {
    return data[static_cast<std::size_t>(i) * shape[1] + j];
  }
  double& at(int i, int j, int k) {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  const double& at(int i, int j, int k) const {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  double& at(int i, int j, int k, int l) {
    return data[((static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }
  const double& at(int i, int j, int k, int l) const {
    return data[((static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k) * shape[3] + l];
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
  void fill(double v);
};

// Throws std::runtime_error naming `where` if any entry is NaN or infinite.
void check_finite(const Tensor& t, const std::string& where);

}  // namespace mph

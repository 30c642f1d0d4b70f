#include "mph/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mph {

Tensor::Tensor(std::vector<int> s) : shape(std::move(s)) {
  std::int64_t n = 1;
  for (int d : shape) {
    if (d < 0) throw std::invalid_argument("Tensor: negative dimension");
    n *= d;
  }
  data.assign(static_cast<std::size_t>(n), 0.0);
}

void Tensor::fill(double v) {
  std::fill(data.begin(), data.end(), v);
}

void check_finite(const Tensor& t, const std::string& where) {
  for (double v : t.data) {
    if (!std::isfinite(v)) throw std::runtime_error("non-finite value in " + where);
  }
}

}  // namespace mph

#include "mph/gf2.hpp"

namespace mph {

Gf2Matrix::Gf2Matrix(int rows, int cols)
    : rows_(rows), cols_(cols), words_((cols + 63) / 64), bits_(static_cast<std::size_t>(rows) * words_, 0) {}

void Gf2Matrix::set(int r, int c, bool v) {
  auto& w = bits_[static_cast<std::size_t>(r) * words_ + c / 64];
  std::uint64_t bit = std::uint64_t{1} << (c % 64);
  if (v)
    w |= bit;
  else
    w &= ~bit;
}

bool Gf2Matrix::get(int r, int c) const {
  return (bits_[static_cast<std::size_t>(r) * words_ + c / 64] >> (c % 64)) & 1;
}

int Gf2Matrix::rank() const {
  if (rows_ == 0 || cols_ == 0) return 0;
  std::vector<std::uint64_t> m = bits_;
  auto row = [&](int r) { return m.data() + static_cast<std::size_t>(r) * words_; };
  int rank = 0;
  for (int c = 0; c < cols_ && rank < rows_; ++c) {
    int word = c / 64;
    std::uint64_t bit = std::uint64_t{1} << (c % 64);
    int pivot = -1;
    for (int r = rank; r < rows_; ++r) {
      if (row(r)[word] & bit) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    if (pivot != rank) {
      for (int w = 0; w < words_; ++w) std::swap(row(pivot)[w], row(rank)[w]);
    }
    for (int r = rank + 1; r < rows_; ++r) {
      if (row(r)[word] & bit) {
        const std::uint64_t* src = row(rank);
        std::uint64_t* dst = row(r);
        for (int w = word; w < words_; ++w) dst[w] ^= src[w];
      }
    }
    ++rank;
  }
  return rank;
}

}  // namespace mph

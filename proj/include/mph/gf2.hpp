#pragma once

#include <cstdint>
#include <vector>

namespace mph {

// Dense matrix over GF(2), rows packed into 64-bit words.
class Gf2Matrix {
 public:
  Gf2Matrix() : rows_(0), cols_(0), words_(0) {}
  Gf2Matrix(int rows, int cols);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  void set(int r, int c, bool v = true);
  bool get(int r, int c) const;

  // rank by Gaussian elimination on a scratch copy
  int rank() const;

 private:
  int rows_, cols_, words_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace mph

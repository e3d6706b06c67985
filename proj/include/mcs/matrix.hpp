#ifndef MCS_MATRIX_HPP
#define MCS_MATRIX_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace mcs {

// Dense row-major matrix, just enough for the K x M / N x M grids used here.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// 0/1 participation and assignment matrices; uint8_t avoids vector<bool>.
using BinaryMatrix = Matrix<std::uint8_t>;

}  // namespace mcs

#endif  // MCS_MATRIX_HPP

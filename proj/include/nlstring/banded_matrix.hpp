#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nlstring {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Rectangular matrix stored by diagonals. Band `d` holds the entries (i, i + d).
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

  static BandedMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<long> offsets() const;

  /// Sets one band; values[i] is placed at (i, i + offset). Out-of-range
  /// positions are ignored.
  void set_band(long offset, const std::vector<double>& values);
  void set(std::size_t i, std::size_t j, double value);
  double operator()(std::size_t i, std::size_t j) const;

  /// y = M x. Throws std::invalid_argument on dimension mismatch.
  std::vector<double> apply(std::span<const double> x) const;
  void apply(std::span<const double> x, std::span<double> y) const;

  BandedMatrix operator*(const BandedMatrix& rhs) const;
  BandedMatrix operator+(const BandedMatrix& rhs) const;
  BandedMatrix operator-(const BandedMatrix& rhs) const;
  BandedMatrix scaled(double s) const;
  BandedMatrix transposed() const;

  Eigen::MatrixXd to_dense() const;
  SparseMatrix to_sparse() const;

 private:
  bool in_range(std::size_t i, long offset) const;

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::map<long, std::vector<double>> bands_;
};

}  // namespace nlstring

#include "nlstring/banded_matrix.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace nlstring {

BandedMatrix BandedMatrix::identity(std::size_t n) {
  BandedMatrix m(n, n);
  m.set_band(0, std::vector<double>(n, 1.0));
  return m;
}

std::vector<long> BandedMatrix::offsets() const {
  std::vector<long> out;
  out.reserve(bands_.size());
  for (const auto& [d, _] : bands_) out.push_back(d);
  return out;
}

bool BandedMatrix::in_range(std::size_t i, long offset) const {
  const long j = static_cast<long>(i) + offset;
  return i < rows_ && j >= 0 && j < static_cast<long>(cols_);
}

void BandedMatrix::set_band(long offset, const std::vector<double>& values) {
  auto& band = bands_[offset];
  band.assign(rows_, 0.0);
  for (std::size_t i = 0; i < rows_ && i < values.size(); ++i) {
    if (in_range(i, offset)) band[i] = values[i];
  }
}

void BandedMatrix::set(std::size_t i, std::size_t j, double value) {
  if (i >= rows_ || j >= cols_) throw std::out_of_range("banded matrix index out of range");
  const long d = static_cast<long>(j) - static_cast<long>(i);
  auto it = bands_.find(d);
  if (it == bands_.end()) it = bands_.emplace(d, std::vector<double>(rows_, 0.0)).first;
  it->second[i] = value;
}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const {
  const long d = static_cast<long>(j) - static_cast<long>(i);
  const auto it = bands_.find(d);
  return it == bands_.end() ? 0.0 : it->second[i];
}

void BandedMatrix::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) {
    throw std::invalid_argument(fmt::format("dimension mismatch: {}x{} matrix, x[{}], y[{}]",
                                            rows_, cols_, x.size(), y.size()));
  }
  std::fill(y.begin(), y.end(), 0.0);
  for (const auto& [d, band] : bands_) {
    const long lo = std::max<long>(0, -d);
    const long hi = std::min<long>(static_cast<long>(rows_), static_cast<long>(cols_) - d);
    for (long i = lo; i < hi; ++i) y[i] += band[i] * x[i + d];
  }
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
  std::vector<double> y(rows_);
  apply(x, y);
  return y;
}

BandedMatrix BandedMatrix::operator*(const BandedMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw std::invalid_argument("dimension mismatch in banded product");
  BandedMatrix out(rows_, rhs.cols_);
  for (const auto& [d1, b1] : bands_) {
    for (const auto& [d2, b2] : rhs.bands_) {
      const long d = d1 + d2;
      auto it = out.bands_.find(d);
      if (it == out.bands_.end()) it = out.bands_.emplace(d, std::vector<double>(rows_, 0.0)).first;
      for (std::size_t i = 0; i < rows_; ++i) {
        const long mid = static_cast<long>(i) + d1;
        if (mid < 0 || mid >= static_cast<long>(cols_)) continue;
        if (!rhs.in_range(static_cast<std::size_t>(mid), d2)) continue;
        it->second[i] += b1[i] * b2[mid];
      }
    }
  }
  return out;
}

BandedMatrix BandedMatrix::operator+(const BandedMatrix& rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw std::invalid_argument("dimension mismatch in banded sum");
  BandedMatrix out = *this;
  for (const auto& [d, band] : rhs.bands_) {
    auto it = out.bands_.find(d);
    if (it == out.bands_.end()) it = out.bands_.emplace(d, std::vector<double>(rows_, 0.0)).first;
    for (std::size_t i = 0; i < rows_; ++i) it->second[i] += band[i];
  }
  return out;
}

BandedMatrix BandedMatrix::operator-(const BandedMatrix& rhs) const {
  return *this + rhs.scaled(-1.0);
}

BandedMatrix BandedMatrix::scaled(double s) const {
  BandedMatrix out = *this;
  for (auto& [_, band] : out.bands_)
    for (double& v : band) v *= s;
  return out;
}

BandedMatrix BandedMatrix::transposed() const {
  BandedMatrix out(cols_, rows_);
  for (const auto& [d, band] : bands_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (in_range(i, d)) out.set(static_cast<std::size_t>(static_cast<long>(i) + d), i, band[i]);
    }
  }
  return out;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows_),
                                            static_cast<Eigen::Index>(cols_));
  for (const auto& [d, band] : bands_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (in_range(i, d)) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i) + d) = band[i];
    }
  }
  return m;
}

SparseMatrix BandedMatrix::to_sparse() const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (const auto& [d, band] : bands_) {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (in_range(i, d) && band[i] != 0.0) {
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(static_cast<long>(i) + d), band[i]);
      }
    }
  }
  SparseMatrix m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace nlstring

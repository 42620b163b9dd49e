#include "nlstring/linear_solver.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/SparseLU>
#include <fmt/format.h>
#include <lapacke.h>

namespace nlstring {

double one_norm(const SparseMatrix& a) {
  Eigen::VectorXd col_sums = Eigen::VectorXd::Zero(a.cols());
  for (Eigen::Index r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) col_sums[it.col()] += std::abs(it.value());
  return a.cols() > 0 ? col_sums.maxCoeff() : 0.0;
}

namespace {

class BandedLuSolver final : public LinearSolver {
 public:
  explicit BandedLuSolver(const std::vector<double>& positions) {
    const auto n = positions.size();
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](int a, int b) { return positions[a] < positions[b]; });
    rank_.resize(n);
    for (std::size_t r = 0; r < n; ++r) rank_[order_[r]] = static_cast<int>(r);
    rhs_.resize(n);
    ipiv_.resize(n);
  }

  void factorize(const SparseMatrix& a) override {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || static_cast<std::size_t>(n) != rank_.size()) {
      throw std::invalid_argument("banded solver: matrix size does not match unknown count");
    }
    int kl = 0;
    int ku = 0;
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
        const int d = rank_[it.col()] - rank_[it.row()];
        ku = std::max(ku, d);
        kl = std::max(kl, -d);
      }
    }
    kl_ = kl;
    ku_ = ku;
    ldab_ = 2 * kl + ku + 1;
    ab_.assign(static_cast<std::size_t>(ldab_) * n, 0.0);
    for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
        const int i = rank_[it.row()];
        const int j = rank_[it.col()];
        ab_[static_cast<std::size_t>(kl + ku + i - j) + static_cast<std::size_t>(j) * ldab_] = it.value();
      }
    }
    const lapack_int info =
        LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku, ab_.data(), ldab_, ipiv_.data());
    if (info != 0) {
      throw SingularMatrixError(
          fmt::format("banded LU failed (info={}, ||A||_1={:.3e})", info, one_norm(a)),
          one_norm(a), info);
    }
  }

  void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const override {
    const auto n = static_cast<int>(rank_.size());
    for (int i = 0; i < n; ++i) rhs_[rank_[i]] = rhs[i];
    LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, kl_, ku_, 1, ab_.data(), ldab_, ipiv_.data(),
                   rhs_.data(), n);
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = rhs_[rank_[i]];
  }

  std::string name() const override { return "direct-banded"; }

 private:
  std::vector<int> order_;
  std::vector<int> rank_;
  int kl_ = 0;
  int ku_ = 0;
  int ldab_ = 1;
  std::vector<double> ab_;
  std::vector<lapack_int> ipiv_;
  mutable std::vector<double> rhs_;
};

class SparseLuSolver final : public LinearSolver {
 public:
  void factorize(const SparseMatrix& a) override {
    matrix_ = a;
    matrix_.makeCompressed();
    const bool same_pattern =
        analyzed_ && outer_.size() == static_cast<std::size_t>(matrix_.outerSize() + 1) &&
        std::equal(outer_.begin(), outer_.end(), matrix_.outerIndexPtr()) &&
        inner_.size() == static_cast<std::size_t>(matrix_.nonZeros()) &&
        std::equal(inner_.begin(), inner_.end(), matrix_.innerIndexPtr());
    if (!same_pattern) {
      lu_.analyzePattern(matrix_);
      outer_.assign(matrix_.outerIndexPtr(), matrix_.outerIndexPtr() + matrix_.outerSize() + 1);
      inner_.assign(matrix_.innerIndexPtr(), matrix_.innerIndexPtr() + matrix_.nonZeros());
      analyzed_ = true;
    }
    lu_.factorize(matrix_);
    if (lu_.info() != Eigen::Success) {
      throw SingularMatrixError(
          fmt::format("sparse LU failed: {} (||A||_1={:.3e})", lu_.lastErrorMessage(), one_norm(a)),
          one_norm(a), -1);
    }
  }

  void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const override { x = lu_.solve(rhs); }

  std::string name() const override { return "direct-sparse"; }

 private:
  using ColMajor = Eigen::SparseMatrix<double, Eigen::ColMajor>;
  ColMajor matrix_;
  Eigen::SparseLU<ColMajor, Eigen::COLAMDOrdering<int>> lu_;
  bool analyzed_ = false;
  std::vector<int> outer_;
  std::vector<int> inner_;
};

}  // namespace

std::unique_ptr<LinearSolver> make_linear_solver(LinearSolverKind kind,
                                                 const std::vector<double>& positions) {
  if (kind == LinearSolverKind::direct_sparse) return std::make_unique<SparseLuSolver>();
  return std::make_unique<BandedLuSolver>(positions);
}

}  // namespace nlstring

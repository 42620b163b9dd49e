#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlstring/banded_matrix.hpp"
#include "nlstring/params.hpp"

namespace nlstring {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double one_norm, long pivot)
      : std::runtime_error(what), one_norm_(one_norm), pivot_(pivot) {}
  double one_norm() const { return one_norm_; }
  long pivot() const { return pivot_; }

 private:
  double one_norm_;
  long pivot_;
};

/// Direct solver for the per-step system A w = r. factorize() may be called
/// once and reused for many solves while A is unchanged.
class LinearSolver {
 public:
  virtual ~LinearSolver() = default;
  virtual void factorize(const SparseMatrix& a) = 0;
  virtual void solve(const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const = 0;
  virtual std::string name() const = 0;
};

/// `positions` holds the spatial coordinate of every unknown; the banded
/// solver orders unknowns by position, which interleaves the transverse and
/// longitudinal grids and keeps the coupling blocks inside a narrow band.
std::unique_ptr<LinearSolver> make_linear_solver(LinearSolverKind kind,
                                                 const std::vector<double>& positions);

double one_norm(const SparseMatrix& a);

}  // namespace nlstring

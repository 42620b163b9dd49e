#pragma once

#include <vector>

#include "nlstring/params.hpp"

namespace nlstring {

/// Pointwise loop implementation of the linear (alpha = 1) scheme, written
/// independently of the matrix engine and used as its test oracle.
/// Arrays hold every node 0..n including the fixed ends.
class ReferenceStencil {
 public:
  ReferenceStencil(const StringParams& params, double k, int n_t, int n_l,
                   BoundaryCondition boundary = BoundaryCondition::clamped);

  /// Interior values, nodes 1..n-1.
  void set_transverse(const std::vector<double>& prev, const std::vector<double>& curr);
  void set_longitudinal(const std::vector<double>& prev, const std::vector<double>& curr);

  void step();

  std::vector<double> transverse() const;    // interior nodes of u^n
  std::vector<double> longitudinal() const;  // interior nodes of zeta^n
  long steps_taken() const { return steps_; }

 private:
  double ghost(const std::vector<double>& u, int i) const;
  double biharmonic(const std::vector<double>& u, int l) const;
  static void thomas(double diag, double off, std::vector<double>& rhs);

  StringParams p_;
  double k_;
  int nt_, nl_;
  double ht_, hl_;
  BoundaryCondition bc_;
  std::vector<double> u_prev_, u_, z_prev_, z_;
  long steps_ = 0;
};

}  // namespace nlstring

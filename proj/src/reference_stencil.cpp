#include "nlstring/reference_stencil.hpp"

#include <stdexcept>

namespace nlstring {

ReferenceStencil::ReferenceStencil(const StringParams& params, double k, int n_t, int n_l,
                                   BoundaryCondition boundary)
    : p_(params),
      k_(k),
      nt_(n_t),
      nl_(n_l),
      ht_(1.0 / n_t),
      hl_(1.0 / n_l),
      bc_(boundary),
      u_prev_(n_t + 1, 0.0),
      u_(n_t + 1, 0.0),
      z_prev_(n_l + 1, 0.0),
      z_(n_l + 1, 0.0) {
  if (params.alpha != 1.0) throw std::invalid_argument("reference stencil covers alpha = 1 only");
}

void ReferenceStencil::set_transverse(const std::vector<double>& prev,
                                      const std::vector<double>& curr) {
  if (prev.size() != static_cast<std::size_t>(nt_ - 1) || curr.size() != prev.size()) {
    throw std::invalid_argument("transverse data must hold n_t - 1 values");
  }
  for (int l = 1; l < nt_; ++l) {
    u_prev_[l] = prev[l - 1];
    u_[l] = curr[l - 1];
  }
}

void ReferenceStencil::set_longitudinal(const std::vector<double>& prev,
                                        const std::vector<double>& curr) {
  if (prev.size() != static_cast<std::size_t>(nl_ - 1) || curr.size() != prev.size()) {
    throw std::invalid_argument("longitudinal data must hold n_l - 1 values");
  }
  for (int l = 1; l < nl_; ++l) {
    z_prev_[l] = prev[l - 1];
    z_[l] = curr[l - 1];
  }
}

double ReferenceStencil::ghost(const std::vector<double>& u, int i) const {
  if (i >= 0 && i <= nt_) return u[i];
  const double mirror = i < 0 ? u[-i] : u[2 * nt_ - i];
  return bc_ == BoundaryCondition::clamped ? mirror : -mirror;
}

double ReferenceStencil::biharmonic(const std::vector<double>& u, int l) const {
  const double h4 = ht_ * ht_ * ht_ * ht_;
  return (ghost(u, l + 2) - 4.0 * ghost(u, l + 1) + 6.0 * u[l] - 4.0 * ghost(u, l - 1) +
          ghost(u, l - 2)) / h4;
}

void ReferenceStencil::thomas(double diag, double off, std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  std::vector<double> c(n, 0.0);
  double denom = diag;
  c[0] = off / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag - off * c[i - 1];
    c[i] = off / denom;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

void ReferenceStencil::step() {
  const double k2 = k_ * k_;
  const double g2 = p_.gamma * p_.gamma;
  const double th = p_.theta;

  // transverse
  {
    const double h2 = ht_ * ht_;
    const double s0 = 2.0 * p_.sigma0_t * k_;
    const double s1 = 2.0 * p_.sigma1_t * k_ / h2;
    std::vector<double> rhs(nt_ - 1);
    for (int l = 1; l < nt_; ++l) {
      const double avg = 0.5 * (u_[l + 1] + u_[l - 1]);
      const double avg_prev = 0.5 * (u_prev_[l + 1] + u_prev_[l - 1]);
      const double lap = (u_[l + 1] - 2.0 * u_[l] + u_[l - 1]) / h2;
      const double lap_prev = u_prev_[l + 1] - 2.0 * u_prev_[l] + u_prev_[l - 1];
      rhs[l - 1] = 2.0 * (th * u_[l] + (1.0 - th) * avg) - (th * u_prev_[l] + (1.0 - th) * avg_prev) +
                   s0 * u_prev_[l] - s1 * lap_prev + g2 * k2 * lap -
                   p_.kappa * p_.kappa * k2 * biharmonic(u_, l);
    }
    thomas(th + s0 + 2.0 * s1, 0.5 * (1.0 - th) - s1, rhs);
    u_prev_.swap(u_);
    for (int l = 1; l < nt_; ++l) u_[l] = rhs[l - 1];
  }

  // longitudinal
  {
    const double h2 = hl_ * hl_;
    const double s0 = 2.0 * p_.sigma0_l * k_;
    const double s1 = 2.0 * p_.sigma1_l * k_ / h2;
    const double a2 = p_.alpha * p_.alpha;
    std::vector<double> rhs(nl_ - 1);
    for (int l = 1; l < nl_; ++l) {
      const double lap = (z_[l + 1] - 2.0 * z_[l] + z_[l - 1]) / h2;
      const double lap_prev = z_prev_[l + 1] - 2.0 * z_prev_[l] + z_prev_[l - 1];
      rhs[l - 1] = 2.0 * z_[l] + a2 * g2 * k2 * lap - (1.0 - s0) * z_prev_[l] - s1 * lap_prev;
    }
    thomas(1.0 + s0 + 2.0 * s1, -s1, rhs);
    z_prev_.swap(z_);
    for (int l = 1; l < nl_; ++l) z_[l] = rhs[l - 1];
  }
  ++steps_;
}

std::vector<double> ReferenceStencil::transverse() const {
  return {u_.begin() + 1, u_.end() - 1};
}

std::vector<double> ReferenceStencil::longitudinal() const {
  return {z_.begin() + 1, z_.end() - 1};
}

}  // namespace nlstring

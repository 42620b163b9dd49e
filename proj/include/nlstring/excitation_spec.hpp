#pragma once

#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace nlstring {

/// Piecewise-linear control signal given as (time, value) breakpoints.
/// Held constant before the first and after the last breakpoint.
class Envelope {
 public:
  Envelope() = default;
  explicit Envelope(std::vector<std::pair<double, double>> points);
  static Envelope constant(double value);

  double at(double t) const;
  double min_value() const;
  double max_value() const;
  bool empty() const { return points_.empty(); }
  const std::vector<std::pair<double, double>>& points() const { return points_; }

  bool operator==(const Envelope&) const = default;

 private:
  std::vector<std::pair<double, double>> points_;
};

// Pluck: raised-cosine initial displacement centred on the grid node nearest `position`.
struct PluckSpec {
  double amplitude = 0.0078;  // c0, spatial units
  double position = 0.14;     // fraction of the string length
  double width = 0.2;         // support of the raised cosine, fraction of length

  bool operator==(const PluckSpec&) const = default;
};

// Bow: friction contact active on [start, end).
struct BowSpec {
  double start = 0.0;
  double end = std::numeric_limits<double>::infinity();
  Envelope position = Envelope::constant(0.2);
  Envelope velocity = Envelope::constant(0.2);
  Envelope force = Envelope::constant(300.0);
  double sharpness = 100.0;  // a in the friction characteristic
  double offset = 0.2;       // sliding-friction offset epsilon in [0, 1]

  bool operator==(const BowSpec&) const = default;
};

// Hammer: lumped mass launched at `start` from `displacement` with `velocity`.
struct HammerSpec {
  double start = 0.0;
  double end = std::numeric_limits<double>::infinity();
  double position = 0.12;
  double displacement = -1e-3;  // initial hammer displacement u_H
  double velocity = 2.0;        // initial hammer velocity v_H
  double mass_ratio = 1.0;      // hammer-string mass ratio
  double stiffness = 1000.0;    // omega_H
  double exponent = 2.5;        // alpha_H >= 1

  bool operator==(const HammerSpec&) const = default;
};

using ExcitationSpec = std::variant<PluckSpec, BowSpec, HammerSpec>;

std::string excitation_kind(const ExcitationSpec& spec);

}  // namespace nlstring

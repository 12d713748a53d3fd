#pragma once

#include <string>
#include <utility>

namespace ktone {

/// Open interval (lo, hi) with either end possibly infinite.
///
/// `margin` shrinks finite ends when spectra are sampled; `cap` bounds the
/// sampling window on an infinite side, measured from the opposite end (or
/// from 0 when both ends are infinite).
struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double margin = 0.05;
  double cap = 10.0;

  static Interval open(double lo, double hi, double margin = 0.05, double cap = 10.0);
  static Interval real_line(double cap = 10.0);
  static Interval positive(double margin = 0.05, double cap = 10.0);
  static Interval symmetric_unit(double margin = 0.05);

  void validate() const;
  bool contains(double x) const { return x > lo && x < hi; }
  bool lo_finite() const;
  bool hi_finite() const;
  /// Distance from x to the nearest finite end; +inf when none.
  double boundary_distance(double x) const;
  /// Closed sampling window [w_lo, w_hi] inside the interval.
  std::pair<double, double> window() const;
  /// Width used for relative thresholds: hi - lo, or the window width when unbounded.
  double scale_width() const;
  bool contains_interval(const Interval& inner) const;
  std::string to_string() const;
};

/// Parses "lo,hi" with optional surrounding parentheses; "inf", "-inf", "+inf" allowed.
Interval parse_interval(const std::string& text, double margin = 0.05, double cap = 10.0);

std::string format_bound(double v);

}  // namespace ktone

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

namespace fmm2d {

using Complex = std::complex<double>;

enum class Axis { X, Y };

/// Axis-aligned rectangle. Center and half extents drive the expansions;
/// the corners are kept exactly as cut so that containment has no roundoff.
struct BoxGeometry {
  Complex center{0.0, 0.0};
  double half_width = 0.0;
  double half_height = 0.0;

  BoxGeometry() = default;
  BoxGeometry(Complex c, double hw, double hh)
      : center(c), half_width(hw), half_height(hh),
        x0_(c.real() - hw), y0_(c.imag() - hh), x1_(c.real() + hw), y1_(c.imag() + hh) {}

  /// Half-diagonal, i.e. the radius of the smallest disc enclosing the box.
  double radius() const { return std::hypot(half_width, half_height); }

  double x0() const { return x0_; }
  double x1() const { return x1_; }
  double y0() const { return y0_; }
  double y1() const { return y1_; }

  bool contains(Complex z) const {
    return z.real() >= x0_ && z.real() <= x1_ && z.imag() >= y0_ && z.imag() <= y1_;
  }

  static BoxGeometry from_corners(double x0, double y0, double x1, double y1) {
    BoxGeometry b({0.5 * (x0 + x1), 0.5 * (y0 + y1)}, 0.5 * (x1 - x0), 0.5 * (y1 - y0));
    b.x0_ = x0;
    b.y0_ = y0;
    b.x1_ = x1;
    b.y1_ = y1;
    return b;
  }

 private:
  double x0_ = 0.0, y0_ = 0.0, x1_ = 0.0, y1_ = 0.0;
};

struct ThetaConfig {
  double theta = 0.5;
};

inline double center_distance(const BoxGeometry& a, const BoxGeometry& b) {
  return std::abs(a.center - b.center);
}

// R + theta*r <= theta*d, with R and r the larger and smaller radius.
inline bool well_separated(const BoxGeometry& a, const BoxGeometry& b, ThetaConfig cfg = {}) {
  const double ra = a.radius();
  const double rb = b.radius();
  return std::max(ra, rb) + cfg.theta * std::min(ra, rb) <= cfg.theta * center_distance(a, b);
}

// Same test with the roles of the two radii interchanged.
inline bool well_separated_swapped(const BoxGeometry& a, const BoxGeometry& b,
                                   ThetaConfig cfg = {}) {
  const double ra = a.radius();
  const double rb = b.radius();
  return std::min(ra, rb) + cfg.theta * std::max(ra, rb) <= cfg.theta * center_distance(a, b);
}

/// Cut across the longer side; square boxes are cut along x.
inline Axis split_direction(const BoxGeometry& b) {
  return b.half_height > b.half_width ? Axis::Y : Axis::X;
}

inline double coordinate(Complex z, Axis axis) { return axis == Axis::X ? z.real() : z.imag(); }

}  // namespace fmm2d

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fmm2d/geometry.hpp"

namespace fmm2d {

// Expansion algebra for the harmonic kernel G(y; z, gamma) = gamma / (z - y).
//
// Multipole:  M(y) = a_0 log(y - z0) + sum_{j=1..p} a_j / (y - z0)^j
// Local:      L(y) = sum_{j=0..p} b_j (y - z0)^j
//
// Sign convention: expanding gamma / (z - y) about z0 gives
//   a_j = -sum gamma (z - z0)^(j-1)        (particle to multipole)
//   b_k = +sum gamma / (z - z0)^(k+1)      (particle to local)
// so every evaluation reproduces the kernel without a further sign flip.
// a_0 (a logarithmic charge) is carried through all shifts but is always
// zero for this kernel. Branch consistency of the log is only guaranteed
// for a_0 = 0.
//
// The span-based `*_accumulate` kernels add into existing coefficients and
// are what the engine uses; the value-returning wrappers are for callers
// that want a standalone expansion.

class SingularShiftError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class ShiftVariant { Scaled, Unscaled };

struct MultipoleExpansion {
  Complex center{};
  std::vector<Complex> coeffs;  // a_0..a_p

  MultipoleExpansion() = default;
  MultipoleExpansion(Complex c, int p) : center(c), coeffs(static_cast<std::size_t>(p) + 1) {}
  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct LocalExpansion {
  Complex center{};
  std::vector<Complex> coeffs;  // b_0..b_p

  LocalExpansion() = default;
  LocalExpansion(Complex c, int p) : center(c), coeffs(static_cast<std::size_t>(p) + 1) {}
  int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline Complex harmonic_kernel(Complex y, Complex source, double strength) {
  return strength / (source - y);
}

void p2m_accumulate(std::span<const Complex> positions, std::span<const double> strengths,
                    Complex center, std::span<Complex> coeffs);

/// Throws SingularShiftError if a source coincides with the center.
void p2l_accumulate(std::span<const Complex> positions, std::span<const double> strengths,
                    Complex center, std::span<Complex> coeffs);

/// Adds the child expansion (about child_center) re-centered at parent_center.
/// The scaled variant falls back to the unscaled one for a vanishing shift.
void m2m_accumulate(std::span<const Complex> child, Complex child_center, Complex parent_center,
                    std::span<Complex> parent, ShiftVariant variant = ShiftVariant::Scaled);

void l2l_accumulate(std::span<const Complex> parent, Complex parent_center, Complex child_center,
                    std::span<Complex> child);

/// Throws SingularShiftError when the centers coincide.
void m2l_accumulate(std::span<const Complex> multipole, Complex source_center,
                    Complex target_center, std::span<Complex> local);

Complex l2p(std::span<const Complex> local, Complex center, Complex y);

/// Throws SingularShiftError at y == center.
Complex m2p(std::span<const Complex> multipole, Complex center, Complex y);

/// Adds the potential of the sources at every target, skipping exact
/// position coincidences. With `same_points` the targets are the sources
/// themselves and index i never interacts with itself; other coincident
/// pairs are skipped too. Returns the number of coincident pairs skipped
/// beyond the self pairs.
std::size_t p2p_accumulate(std::span<const Complex> targets, std::span<const Complex> sources,
                           std::span<const double> strengths, std::span<Complex> potentials,
                           bool same_points = false);

/// Pairwise-symmetric variant for a target set that equals the source set
/// of both boxes. Both potential ranges are updated; with `self_pair` the two
/// boxes are the same box and only i < j pairs are visited.
std::size_t p2p_symmetric_accumulate(std::span<const Complex> pos_a, std::span<const double> str_a,
                                     std::span<Complex> pot_a, std::span<const Complex> pos_b,
                                     std::span<const double> str_b, std::span<Complex> pot_b);
std::size_t p2p_symmetric_self_accumulate(std::span<const Complex> pos,
                                          std::span<const double> str, std::span<Complex> pot);

MultipoleExpansion p2m(std::span<const Complex> positions, std::span<const double> strengths,
                       Complex center, int p);
LocalExpansion p2l(std::span<const Complex> positions, std::span<const double> strengths,
                   Complex center, int p);
MultipoleExpansion m2m(const MultipoleExpansion& child, Complex parent_center,
                       ShiftVariant variant = ShiftVariant::Scaled);
LocalExpansion l2l(const LocalExpansion& parent, Complex child_center);
LocalExpansion m2l(const MultipoleExpansion& source, Complex target_center);
inline Complex l2p(const LocalExpansion& local, Complex y) { return l2p(local.coeffs, local.center, y); }
inline Complex m2p(const MultipoleExpansion& mult, Complex y) { return m2p(mult.coeffs, mult.center, y); }

}  // namespace fmm2d

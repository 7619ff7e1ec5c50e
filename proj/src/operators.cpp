#include "fmm2d/operators.hpp"

#include <cmath>

namespace fmm2d {

namespace {

constexpr double kTinyShift = 1e-300;

std::span<Complex> scratch(std::size_t n) {
  thread_local std::vector<Complex> buffer;
  if (buffer.size() < n) buffer.resize(n);
  return {buffer.data(), n};
}

void check_same_order(std::size_t a, std::size_t b) {
  if (a != b || a < 2) throw std::invalid_argument("expansions must share an order p >= 1");
}

// 1/d without std::complex division, which is slow and checks for overflow.
inline Complex reciprocal(double dx, double dy) {
  const double inv = 1.0 / (dx * dx + dy * dy);
  return {dx * inv, -dy * inv};
}

}  // namespace

void p2m_accumulate(std::span<const Complex> positions, std::span<const double> strengths,
                    Complex center, std::span<Complex> coeffs) {
  const std::size_t p = coeffs.size() - 1;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Complex offset = positions[i] - center;
    Complex term = -strengths[i];
    for (std::size_t j = 1; j <= p; ++j) {
      coeffs[j] += term;
      term *= offset;
    }
  }
}

void p2l_accumulate(std::span<const Complex> positions, std::span<const double> strengths,
                    Complex center, std::span<Complex> coeffs) {
  const std::size_t p = coeffs.size() - 1;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const Complex offset = positions[i] - center;
    if (offset == Complex{}) throw SingularShiftError("p2l: source coincides with the local center");
    const Complex inv = reciprocal(offset.real(), offset.imag());
    Complex term = strengths[i] * inv;
    for (std::size_t k = 0; k <= p; ++k) {
      coeffs[k] += term;
      term *= inv;
    }
  }
}

void m2m_accumulate(std::span<const Complex> child, Complex child_center, Complex parent_center,
                    std::span<Complex> parent, ShiftVariant variant) {
  check_same_order(child.size(), parent.size());
  const std::size_t p = child.size() - 1;
  const Complex r = child_center - parent_center;
  auto a = scratch(p + 1);
  std::copy(child.begin(), child.end(), a.begin());

  if (variant == ShiftVariant::Scaled && std::abs(r) >= kTinyShift) {
    const Complex inv = 1.0 / r;
    Complex pw = inv;
    for (std::size_t j = 1; j <= p; ++j, pw *= inv) a[j] *= pw;
    for (std::size_t k = p; k >= 2; --k) {
      for (std::size_t j = k; j <= p; ++j) a[j] += a[j - 1];
    }
    pw = r;
    for (std::size_t j = 1; j <= p; ++j, pw *= r) a[j] = (a[j] - a[0] / double(j)) * pw;
  } else {
    for (std::size_t k = p; k >= 2; --k) {
      for (std::size_t j = k; j <= p; ++j) a[j] += r * a[j - 1];
    }
    if (a[0] != Complex{}) {
      Complex pw = r;
      for (std::size_t j = 1; j <= p; ++j, pw *= r) a[j] -= pw * a[0] / double(j);
    }
  }
  for (std::size_t j = 0; j <= p; ++j) parent[j] += a[j];
}

void l2l_accumulate(std::span<const Complex> parent, Complex parent_center, Complex child_center,
                    std::span<Complex> child) {
  check_same_order(parent.size(), child.size());
  const std::size_t p = parent.size() - 1;
  const Complex r = parent_center - child_center;
  if (std::abs(r) < kTinyShift) {
    for (std::size_t j = 0; j <= p; ++j) child[j] += parent[j];
    return;
  }
  auto b = scratch(p + 1);
  std::copy(parent.begin(), parent.end(), b.begin());
  Complex pw = r;
  for (std::size_t j = 1; j <= p; ++j, pw *= r) b[j] *= pw;
  for (std::size_t k = 1; k <= p; ++k) {
    for (std::size_t j = p - k; j < p; ++j) b[j] -= b[j + 1];
  }
  const Complex inv = 1.0 / r;
  pw = inv;
  for (std::size_t j = 1; j <= p; ++j, pw *= inv) b[j] *= pw;
  for (std::size_t j = 0; j <= p; ++j) child[j] += b[j];
}

void m2l_accumulate(std::span<const Complex> multipole, Complex source_center,
                    Complex target_center, std::span<Complex> local) {
  check_same_order(multipole.size(), local.size());
  const std::size_t p = multipole.size() - 1;
  // Shift vector points from the target to the source.
  const Complex r = source_center - target_center;
  if (r == Complex{}) throw SingularShiftError("m2l: source and target centers coincide");
  const Complex inv = 1.0 / r;
  const Complex a0 = multipole[0];

  auto b = scratch(p + 1);
  Complex pw = inv;
  for (std::size_t j = 1; j <= p; ++j, pw *= inv) {
    b[j - 1] = (j % 2 == 0 ? 1.0 : -1.0) * multipole[j] * pw;
  }
  b[p] = 0.0;
  for (std::size_t k = 2; k <= p; ++k) {
    for (std::size_t j = p - k; j < p; ++j) b[j] += b[j + 1];
  }
  for (std::size_t k = p; k >= 1; --k) {
    for (std::size_t j = k; j <= p; ++j) b[j] += b[j - 1];
  }
  if (a0 != Complex{}) b[0] += a0 * std::log(-r);
  pw = inv;
  for (std::size_t j = 1; j <= p; ++j, pw *= inv) b[j] = (b[j] - a0 / double(j)) * pw;
  for (std::size_t j = 0; j <= p; ++j) local[j] += b[j];
}

Complex l2p(std::span<const Complex> local, Complex center, Complex y) {
  const Complex w = y - center;
  Complex sum = 0.0;
  for (std::size_t j = local.size(); j-- > 0;) sum = sum * w + local[j];
  return sum;
}

Complex m2p(std::span<const Complex> multipole, Complex center, Complex y) {
  const Complex w = y - center;
  if (w == Complex{}) throw SingularShiftError("m2p: evaluation at the expansion center");
  const Complex inv = reciprocal(w.real(), w.imag());
  Complex sum = 0.0;
  for (std::size_t j = multipole.size() - 1; j >= 1; --j) sum = (sum + multipole[j]) * inv;
  if (multipole[0] != Complex{}) sum += multipole[0] * std::log(w);
  return sum;
}

std::size_t p2p_accumulate(std::span<const Complex> targets, std::span<const Complex> sources,
                           std::span<const double> strengths, std::span<Complex> potentials,
                           bool same_points) {
  std::size_t coincident = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double yx = targets[i].real();
    const double yy = targets[i].imag();
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      const double dx = sources[j].real() - yx;
      const double dy = sources[j].imag() - yy;
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        if (!(same_points && i == j)) ++coincident;
        continue;
      }
      const double s = strengths[j] / r2;
      re += s * dx;
      im -= s * dy;
    }
    potentials[i] += Complex{re, im};
  }
  return coincident;
}

std::size_t p2p_symmetric_accumulate(std::span<const Complex> pos_a, std::span<const double> str_a,
                                     std::span<Complex> pot_a, std::span<const Complex> pos_b,
                                     std::span<const double> str_b, std::span<Complex> pot_b) {
  std::size_t coincident = 0;
  for (std::size_t i = 0; i < pos_a.size(); ++i) {
    for (std::size_t j = 0; j < pos_b.size(); ++j) {
      const double dx = pos_b[j].real() - pos_a[i].real();
      const double dy = pos_b[j].imag() - pos_a[i].imag();
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        ++coincident;
        continue;
      }
      const Complex inv{dx / r2, -dy / r2};
      pot_a[i] += str_b[j] * inv;
      pot_b[j] -= str_a[i] * inv;
    }
  }
  return coincident;
}

std::size_t p2p_symmetric_self_accumulate(std::span<const Complex> pos,
                                          std::span<const double> str, std::span<Complex> pot) {
  std::size_t coincident = 0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    for (std::size_t j = i + 1; j < pos.size(); ++j) {
      const double dx = pos[j].real() - pos[i].real();
      const double dy = pos[j].imag() - pos[i].imag();
      const double r2 = dx * dx + dy * dy;
      if (r2 == 0.0) {
        coincident += 2;
        continue;
      }
      const Complex inv{dx / r2, -dy / r2};
      pot[i] += str[j] * inv;
      pot[j] -= str[i] * inv;
    }
  }
  return coincident;
}

MultipoleExpansion p2m(std::span<const Complex> positions, std::span<const double> strengths,
                       Complex center, int p) {
  MultipoleExpansion m(center, p);
  p2m_accumulate(positions, strengths, center, m.coeffs);
  return m;
}

LocalExpansion p2l(std::span<const Complex> positions, std::span<const double> strengths,
                   Complex center, int p) {
  LocalExpansion l(center, p);
  p2l_accumulate(positions, strengths, center, l.coeffs);
  return l;
}

MultipoleExpansion m2m(const MultipoleExpansion& child, Complex parent_center,
                       ShiftVariant variant) {
  MultipoleExpansion out(parent_center, child.order());
  m2m_accumulate(child.coeffs, child.center, parent_center, out.coeffs, variant);
  return out;
}

LocalExpansion l2l(const LocalExpansion& parent, Complex child_center) {
  LocalExpansion out(child_center, parent.order());
  l2l_accumulate(parent.coeffs, parent.center, child_center, out.coeffs);
  return out;
}

LocalExpansion m2l(const MultipoleExpansion& source, Complex target_center) {
  LocalExpansion out(target_center, source.order());
  m2l_accumulate(source.coeffs, source.center, target_center, out.coeffs);
  return out;
}

}  // namespace fmm2d

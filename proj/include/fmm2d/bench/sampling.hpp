#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "fmm2d/tree.hpp"

namespace fmm2d::bench {

enum class DistributionKind { Uniform, Normal, Layer };

std::string_view to_string(DistributionKind kind);
/// Throws std::invalid_argument for unknown names.
DistributionKind parse_distribution(std::string_view name);

struct DistributionSpec {
  DistributionKind kind = DistributionKind::Uniform;
  double sigma2 = 0.01;
  std::uint64_t seed = 1;
};

// Random streams. Every stream is a std::mt19937_64 seeded with
// splitmix64(seed + stream * 0x9E3779B97F4A7C15); mt19937_64 output is fixed
// by the C++ standard and the real-valued transforms below are our own, so a
// seed reproduces the same points on any conforming platform.
enum class Stream : std::uint64_t { Positions = 1, Strengths = 2, Experiment = 3 };

std::uint64_t splitmix64(std::uint64_t x);

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, Stream stream);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal by the Box-Muller transform (pairs are cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// n sources in the unit square with strengths uniform on [-1, 1].
/// Normal: N((0.5, 0.5), sigma2*I) with points outside the square redrawn.
/// Layer: x uniform, y normal about 0.5 with variance sigma2, redrawn outside [0, 1].
ParticleSet sample_points(const DistributionSpec& spec, std::size_t n);

}  // namespace fmm2d::bench

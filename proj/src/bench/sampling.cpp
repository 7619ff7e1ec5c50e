#include "fmm2d/bench/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fmm2d::bench {

std::string_view to_string(DistributionKind kind) {
  switch (kind) {
    case DistributionKind::Uniform: return "uniform";
    case DistributionKind::Normal: return "normal";
    case DistributionKind::Layer: return "layer";
  }
  return "unknown";
}

DistributionKind parse_distribution(std::string_view name) {
  if (name == "uniform") return DistributionKind::Uniform;
  if (name == "normal") return DistributionKind::Normal;
  if (name == "layer") return DistributionKind::Layer;
  throw std::invalid_argument("unknown distribution '" + std::string(name) + "'");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

StreamRng::StreamRng(std::uint64_t seed, Stream stream)
    : engine_(splitmix64(seed + static_cast<std::uint64_t>(stream) * 0x9E3779B97F4A7C15ULL)) {}

double StreamRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double StreamRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ParticleSet sample_points(const DistributionSpec& spec, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_points needs n >= 1");
  if (spec.kind != DistributionKind::Uniform && !(spec.sigma2 > 0.0)) {
    throw std::invalid_argument("sigma2 must be positive");
  }
  StreamRng pos(spec.seed, Stream::Positions);
  StreamRng str(spec.seed, Stream::Strengths);
  const double sigma = std::sqrt(spec.sigma2);
  auto inside = [](double v) { return v >= 0.0 && v <= 1.0; };

  ParticleSet set;
  set.positions.reserve(n);
  set.strengths.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 0.0, y = 0.0;
    switch (spec.kind) {
      case DistributionKind::Uniform:
        x = pos.uniform();
        y = pos.uniform();
        break;
      case DistributionKind::Normal:
        do {
          x = 0.5 + sigma * pos.normal();
          y = 0.5 + sigma * pos.normal();
        } while (!inside(x) || !inside(y));
        break;
      case DistributionKind::Layer:
        x = pos.uniform();
        do {
          y = 0.5 + sigma * pos.normal();
        } while (!inside(y));
        break;
    }
    set.positions.emplace_back(x, y);
    set.strengths.push_back(2.0 * str.uniform() - 1.0);
  }
  return set;
}

}  // namespace fmm2d::bench

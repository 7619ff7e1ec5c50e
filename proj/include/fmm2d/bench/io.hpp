#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fmm2d/engine.hpp"
#include "fmm2d/tree.hpp"

namespace fmm2d::bench {

/// Unreadable files or malformed content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text points: one `x y gamma` per line, `#` starts a comment line.
ParticleSet read_points(std::istream& in);
ParticleSet read_points_file(const std::string& path);
void write_points(std::ostream& out, const ParticleSet& points);

/// CSV `index,re,im` in input order.
void write_potential_csv(std::ostream& out, const PotentialField& field);
PotentialField read_potential_csv(std::istream& in);

struct BenchmarkRow {
  std::string experiment;
  std::size_t n = 0;
  std::size_t m = 0;
  int p = 0;
  int nd = 0;
  double theta = 0.0;
  int levels = 0;
  std::string phase;
  double seconds = 0.0;
  std::optional<double> tol;

  bool operator==(const BenchmarkRow&) const = default;
};

inline constexpr const char* kBenchmarkHeader = "experiment,n,m,p,nd,theta,levels,phase,seconds,tol";

/// Doubles are written with 17 significant digits so rows parse back exactly.
void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);
std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in);

}  // namespace fmm2d::bench

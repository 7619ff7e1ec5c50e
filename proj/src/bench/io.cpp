#include "fmm2d/bench/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace fmm2d::bench {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

template <class T>
T parse_number(const std::string& text, const char* what) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw IoError(std::string("cannot parse ") + what + " from '" + text + "'");
  }
  return value;
}

}  // namespace

ParticleSet read_points(std::istream& in) {
  ParticleSet set;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ss(line);
    double x, y, gamma;
    if (!(ss >> x >> y >> gamma)) {
      throw IoError("malformed point on line " + std::to_string(line_no));
    }
    std::string rest;
    if (ss >> rest) throw IoError("trailing data on line " + std::to_string(line_no));
    set.positions.emplace_back(x, y);
    set.strengths.push_back(gamma);
  }
  if (in.bad()) throw IoError("read error");
  if (set.positions.empty()) throw IoError("point file contains no points");
  return set;
}

ParticleSet read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_points(in);
}

void write_points(std::ostream& out, const ParticleSet& points) {
  out << "# x y gamma\n";
  for (std::size_t i = 0; i < points.positions.size(); ++i) {
    out << format_double(points.positions[i].real()) << ' '
        << format_double(points.positions[i].imag()) << ' ' << format_double(points.strengths[i])
        << '\n';
  }
}

void write_potential_csv(std::ostream& out, const PotentialField& field) {
  out << "index,re,im\n";
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    out << i << ',' << format_double(field.values[i].real()) << ','
        << format_double(field.values[i].imag()) << '\n';
  }
}

PotentialField read_potential_csv(std::istream& in) {
  PotentialField field;
  std::string line;
  if (!std::getline(in, line) || line != "index,re,im") throw IoError("missing result header");
  while (std::getline(in, line)) {
    const auto f = split_csv(line);
    if (f.size() != 3) throw IoError("malformed result row '" + line + "'");
    if (parse_number<std::size_t>(f[0], "index") != field.values.size()) {
      throw IoError("result rows out of order");
    }
    field.values.emplace_back(parse_number<double>(f[1], "re"), parse_number<double>(f[2], "im"));
  }
  return field;
}

void write_benchmark_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << kBenchmarkHeader << '\n';
  for (const auto& r : rows) {
    out << r.experiment << ',' << r.n << ',' << r.m << ',' << r.p << ',' << r.nd << ','
        << format_double(r.theta) << ',' << r.levels << ',' << r.phase << ','
        << format_double(r.seconds) << ',' << (r.tol ? format_double(*r.tol) : std::string())
        << '\n';
  }
}

std::vector<BenchmarkRow> read_benchmark_csv(std::istream& in) {
  std::vector<BenchmarkRow> rows;
  std::string line;
  if (!std::getline(in, line) || line != kBenchmarkHeader) {
    throw IoError("missing benchmark header");
  }
  while (std::getline(in, line)) {
    const auto f = split_csv(line);
    if (f.size() != 10) throw IoError("malformed benchmark row '" + line + "'");
    BenchmarkRow r;
    r.experiment = f[0];
    r.n = parse_number<std::size_t>(f[1], "n");
    r.m = parse_number<std::size_t>(f[2], "m");
    r.p = parse_number<int>(f[3], "p");
    r.nd = parse_number<int>(f[4], "nd");
    r.theta = parse_number<double>(f[5], "theta");
    r.levels = parse_number<int>(f[6], "levels");
    r.phase = f[7];
    r.seconds = parse_number<double>(f[8], "seconds");
    if (!f[9].empty()) r.tol = parse_number<double>(f[9], "tol");
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace fmm2d::bench

#pragma once

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "relaxed/error.hpp"
#include "relaxed/metric_cover.hpp"

namespace relaxed {

struct LabeledPoint {
  Point x;
  int y = 1;
};

struct Sequence {
  Domain domain;
  std::vector<LabeledPoint> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
};

/// Shortest decimal that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(ErrorKind::usage, "not a number: '" + s + "'");
  return v;
}

inline void validate(const Sequence& seq) {
  for (const auto& it : seq.items) {
    if (it.y != 1 && it.y != -1) throw Error(ErrorKind::invalid_parameter, "labels must be +-1");
    if (!seq.domain.contains(it.x))
      throw Error(ErrorKind::out_of_domain, "sequence point outside " + describe(seq.domain));
  }
}

/// CSV with columns t, x0..x{d-1}, y.
inline void write_csv(std::ostream& os, const Sequence& seq) {
  os << "t";
  for (int k = 0; k < seq.domain.dim; ++k) os << ",x" << k;
  os << ",y\n";
  for (std::size_t t = 0; t < seq.items.size(); ++t) {
    os << t + 1;
    for (double v : seq.items[t].x) os << ',' << format_double(v);
    os << ',' << seq.items[t].y << '\n';
  }
}

inline Sequence read_csv(std::istream& is, const Domain& domain) {
  Sequence seq{domain, {}};
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorKind::usage, "empty sequence CSV");
  std::size_t cols = 1;
  for (char c : line) cols += c == ',';
  if (cols != static_cast<std::size_t>(domain.dim) + 2)
    throw Error(ErrorKind::shape, "CSV column count does not match the domain dimension");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != cols) throw Error(ErrorKind::shape, "ragged CSV row");
    LabeledPoint p;
    for (std::size_t k = 1; k + 1 < cells.size(); ++k) p.x.push_back(parse_double(cells[k]));
    p.y = static_cast<int>(parse_double(cells.back()));
    seq.items.push_back(std::move(p));
  }
  validate(seq);
  return seq;
}

}  // namespace relaxed

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "finsler/metric.hpp"
#include "finsler/report.hpp"

namespace testing_support {

inline double rel(double a, double b) { return std::abs(a - b) / (1.0 + std::max(std::abs(a), std::abs(b))); }
inline double rel(long double a, long double b) { return static_cast<double>(std::abs(a - b) / (1.0L + std::max(std::abs(a), std::abs(b)))); }
inline double rel(double a, long double b) { return rel(static_cast<long double>(a), b); }

/// (name, dimension) for every built-in fixture exercised by the tests.
inline std::vector<std::pair<std::string, int>> builtins() {
  return {{"euclidean", 3},      {"conformal", 3},       {"sphere", 3},   {"randers", 2},
          {"randers", 3},        {"randers-closed", 3},  {"randers-twisted", 4},
          {"funk", 2},           {"funk", 3},            {"berwald-product", 3}};
}

inline std::vector<finsler::EvalPoint> points(const finsler::Metric& m, int count, unsigned long long seed) {
  return finsler::sample_points(m, count, seed);
}

} // namespace testing_support

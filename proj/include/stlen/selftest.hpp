#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stlen/surface.hpp"

namespace stlen {

struct SelfTestRow {
  std::string name;
  std::string expected;
  std::string computed;
  bool pass = false;
};

struct SelfTestResult {
  std::vector<SelfTestRow> rows;
  bool all_pass = true;
};

/// Desk-scale checks of the closed-form families, the table-group embedding,
/// the certificate stats, the Cayley verification gate, and a seeded sample
/// of the rewrite-calculus laws. quick restricts the grids to orders <= 3.
SelfTestResult run_selftest(bool quick, std::uint64_t seed = 1);

/// Deterministic pool of randomized surfaces: certificates, covers, strips,
/// tree approximations, deep chains and paths, realized feasible points over
/// plain and enlarged collections, unions, and random rewirings. Surfaces in
/// the pool have positive degree and aggregate chi(Gamma) >= 0.
std::vector<SimpleSurface> random_surface_pool(std::uint64_t seed, int count);

}  // namespace stlen

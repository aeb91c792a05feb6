#pragma once

#include <string>
#include <vector>

#include "conslab/dynamics.hpp"

namespace conslab {

struct GridSpec {
  double l1 = 6.283185307179586, l2 = 6.283185307179586;
  int n1 = 16, n2 = 16, nz = 96;
  double zmax = 10.0, stretch = 3.0;
  GridPtr build() const;
};

struct InitSpec {
  InitKind kind = InitKind::perturbed_shear;
  double amplitude = 1.0;
  unsigned long long seed = 1;
};

/// Everything a config file can hold. sim.grid is built from `grid`.
struct Config {
  GridSpec grid;
  SimConfig sim;
  InitSpec init;
  std::vector<double> eps_list{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
};

/// Parses flat `key = value` text with '#' comments. Unknown keys, bad
/// values and violated invariants raise InvalidArgument naming the line.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);

/// Reverse of parse_config (every key, canonical order).
std::string format_config(const Config& c);

}  // namespace conslab

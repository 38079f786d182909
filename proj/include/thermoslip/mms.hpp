#pragma once

#include <string>
#include <vector>

#include "thermoslip/types.hpp"

namespace thermoslip {

struct MmsLevel {
  int n = 0;          ///< subdivisions per axis
  double h = 0.0;     ///< 1/n
  double l2 = 0.0;
  double h1 = 0.0;
  double l2_rate = 0.0;  ///< against the previous level, 0 on the first
  double h1_rate = 0.0;
  double aux = 0.0;      ///< case specific: pressure L2 error (flow), velocity L2 error (coupled)
};

struct MmsTable {
  std::string name;
  std::vector<MmsLevel> levels;
  bool monotone = true;  ///< errors decrease from level to level
  double min_l2_rate = 0.0;
  double max_l2_rate = 0.0;
  double min_h1_rate = 0.0;
};

/// theta* = sin(pi x) y (1 - y) on the unit square, K = 1, v = 0, r = 0.
MmsTable run_heat_mms(int levels);
/// Poiseuille v* = (U (1 - y^2), 0), pi* = -2 mu U (x - 1/2), constant mu, k = 0.
MmsTable run_flow_mms(int levels);
/// Coupled: v* as above, theta* as in the heat case, temperature-dependent
/// Carreau viscosity; body force and heat source induced from the exact fields.
MmsTable run_coupled_mms(int levels);

MmsTable run_mms(const std::string& name, int levels);

}  // namespace thermoslip

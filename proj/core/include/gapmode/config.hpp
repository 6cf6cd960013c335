#ifndef GAPMODE_CONFIG_HPP
#define GAPMODE_CONFIG_HPP

#include <string>
#include <vector>

#include "gapmode/birman.hpp"
#include "gapmode/bulk.hpp"
#include "gapmode/geometry.hpp"

namespace gapmode {

/// Parsed run configuration. The JSON schema is documented in the README;
/// CLI flags override individual fields after parsing.
struct RunConfig {
  int resolution = 32;
  std::vector<Shape> background;
  std::vector<Shape> defect;
  int defect_rows = 0;

  double kx0 = 0.0;
  bool kx0_set = false;
  int n_cells = 11;
  int half_order = 5;

  int grid_a = 17, grid_b = 17;
  int n_bands = 6;
  int gap_index = -1;

  EdgeOptions edge;
  double tau = 1e-10;
  CrossingOptions crossing;
  double tol_couple = 1e-12;
  double tol_ess_rel = 1e-6;

  std::string config_hash;  // FNV-1a of the raw config bytes

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);

  DielectricMap build_map() const;
};

/// Map with the defect delta scaled by `t`: eps1(t) = eps0 + t*(eps1 - eps0).
DielectricMap scale_defect(const DielectricMap& map, double t);

}  // namespace gapmode

#endif

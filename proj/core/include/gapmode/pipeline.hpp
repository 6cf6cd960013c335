#ifndef GAPMODE_PIPELINE_HPP
#define GAPMODE_PIPELINE_HPP

#include <optional>

#include "gapmode/birman.hpp"
#include "gapmode/bulk.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/greens.hpp"
#include "gapmode/strip.hpp"

namespace gapmode {

struct PipelineOptions {
  int k_grid_a = 17, k_grid_b = 17;
  int n_bands = 6;
  int gap_index = -1;  // -1: widest gap
  EdgeOptions edge;
  double tau = 1e-10;
  CrossingOptions crossing;
  double tol_couple = 1e-12;
};

struct PipelineResult {
  AssumptionReport assumptions;
  NormBundle norms;
  Gap gap;
  GapEdge edge;
  ConditionReport condition;
  int subspace_rank = 0;
  EdgeInteraction edge_interaction;
  KappaCurve curve;
};

/// Bulk gap + edge + strip + Birman-Schwinger crossing, end to end on one
/// dielectric map. Throws the structured module errors (DegenerateEdge,
/// EmptySubspace, ...) unchanged.
PipelineResult run_defect_pipeline(const DielectricMap& map, double kx0,
                                   int n_cells, int half_order,
                                   const PipelineOptions& opt = {});

/// The bulk-only front end (bands -> gaps -> edge) shared by the CLI.
std::pair<Gap, GapEdge> locate_fixture_gap(const DielectricMap& map,
                                           double kx0,
                                           const PipelineOptions& opt,
                                           const PlaneWaveBasis& basis);

}  // namespace gapmode

#endif

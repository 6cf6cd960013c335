#include "gapmode/pipeline.hpp"

#include <algorithm>

#include "gapmode/errors.hpp"

namespace gapmode {

std::pair<Gap, GapEdge> locate_fixture_gap(const DielectricMap& map,
                                           double kx0,
                                           const PipelineOptions& opt,
                                           const PlaneWaveBasis& basis) {
  BandStructure bands = compute_bands(
      map, make_k_grid(opt.k_grid_a, opt.k_grid_b), opt.n_bands, basis);
  std::vector<Gap> gaps = find_gaps(bands);
  if (gaps.empty())
    throw NoGap("background medium has no spectral gap on the grid");
  int pick = opt.gap_index;
  if (pick < 0) {
    pick = 0;
    for (size_t i = 1; i < gaps.size(); ++i)
      if (gaps[i].width() > gaps[pick].width()) pick = static_cast<int>(i);
  }
  if (pick >= static_cast<int>(gaps.size()))
    throw std::invalid_argument("gap index out of range");
  GapEdge edge = locate_gap_edge(map, gaps[pick], kx0, basis, opt.edge);
  return {gaps[pick], edge};
}

PipelineResult run_defect_pipeline(const DielectricMap& map, double kx0,
                                   int n_cells, int half_order,
                                   const PipelineOptions& opt) {
  PipelineResult res;
  res.assumptions = map.validate_assumptions();
  res.norms = map.compute_norms();

  PlaneWaveBasis basis(half_order);
  auto [gap, edge] = locate_fixture_gap(map, kx0, opt, basis);
  res.gap = gap;
  res.edge = edge;
  res.condition = check_condition(res.norms, edge, res.assumptions.strict_witness_ok);

  auto [space, forms] = build_strip(map, kx0, n_cells, half_order);
  BlochDecomposition decomp = diagonalize_background(space, forms);

  // Folded bulk bands must respect the gap before any resolvent work.
  for (int node = 0; node < space.node_count(); ++node)
    for (Eigen::Index s = 0; s < decomp.lambda[node].size(); ++s) {
      double l = decomp.lambda[node](s);
      if (l > edge.lambda0 + 1e-9 && l < edge.lambda1 - 1e-9)
        throw MuOnSpectrum("folded bulk eigenvalue " + std::to_string(l) +
                           " inside the gap; discretizations inconsistent");
    }

  DefectSubspace subspace = build_defect_subspace(space, forms, decomp, opt.tau);
  res.subspace_rank = subspace.rank();
  res.edge_interaction = verify_edge_interaction(space, forms, decomp, subspace,
                                                 edge, opt.tol_couple);
  res.curve =
      find_crossing(space, forms, decomp, subspace, edge, opt.crossing);
  return res;
}

}  // namespace gapmode

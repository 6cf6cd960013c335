#ifndef GAPMODE_ORACLE_HPP
#define GAPMODE_ORACLE_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gapmode/bulk.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/strip.hpp"

namespace gapmode {

struct DecayFit {
  double gamma = 0.0;  // 1/cell-length
  double r2 = 0.0;
  bool poor_fit = false;
};

/// Per-unit-cell-row L2 mass profile of a strip eigenvector, integrated
/// analytically in the plane-wave representation.
std::vector<double> row_masses(const StripSpace& space,
                               const Eigen::VectorXcd& u);

/// Exponential decay rate from the row-mass profile: fit of log m_r against
/// row distance from the supercell center, excluding the defect rows and the
/// two outermost rows. gamma = -slope/2.
DecayFit decay_rate(const StripSpace& space, const DielectricMap& map,
                    const Eigen::VectorXcd& u, double r2_threshold = 0.9);

struct OracleResult {
  std::vector<double> gap_eigenvalues;
  Eigen::MatrixXcd eigenvectors;            // dim x n_gap
  std::vector<DecayFit> decay;              // per gap eigenvector
  std::vector<double> folded_bulk_spectrum; // unperturbed pencil, ascending
  double min_dist_to_folded = 0.0;          // over gap eigenvalues
};

/// Direct dense eigensolve of the perturbed and unperturbed strip pencils;
/// classifies perturbed eigenvalues strictly inside the gap window and pairs
/// them with eigenvectors and decay fits.
OracleResult supercell_eigensolve(const StripSpace& space,
                                  const FormMatrices& forms,
                                  const DielectricMap& map, const GapEdge& gap,
                                  int n_seek = 8, double tol_ess_rel = 1e-6);

struct ConvergenceRow {
  std::string axis;  // "cells" or "order"
  int value = 0;
  bool crossed = false;
  double crossing_lambda = 0.0;
  double oracle_lambda = 0.0;
  double gap_lower = 0.0, gap_upper = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  std::vector<double> cauchy_cells;   // |delta lambda*| between successive N_c
  std::vector<double> cauchy_orders;  // between successive G
};

struct ConvergenceOptions {
  int base_cells = 11;
  int base_order = 5;
  int k_grid = 13;
  int fine_grid = 192;
  int n_bands = 6;
};

/// Tabulates the Birman-Schwinger crossing and the oracle gap eigenvalue
/// against supercell size and plane-wave order.
ConvergenceTable convergence_study(const DielectricMap& map, double kx0,
                                   const std::vector<int>& cell_counts,
                                   const std::vector<int>& orders,
                                   const ConvergenceOptions& opt = {});

}  // namespace gapmode

#endif

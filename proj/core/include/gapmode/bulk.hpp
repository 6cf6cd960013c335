#ifndef GAPMODE_BULK_HPP
#define GAPMODE_BULK_HPP

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "gapmode/geometry.hpp"
#include "gapmode/planewave.hpp"

namespace gapmode {

/// Galerkin matrix of the doubly periodic operator at quasimomentum k in the
/// plane-wave basis:  H[m,n] = (k+2pi*m).(k+2pi*n) * etahat(m-n),
/// etahat = discrete Fourier coefficients of 1/eps0. Hermitian by
/// construction. Requires resolution >= 4*G+2 so trial-mode products are
/// alias-free for the sampled coefficient.
class BulkAssembler {
 public:
  BulkAssembler(const DielectricMap& map, const PlaneWaveBasis& basis);
  Eigen::MatrixXcd at(double kx, double ky) const;
  const PlaneWaveBasis& basis() const { return basis_; }

 private:
  PlaneWaveBasis basis_;
  FourierTable table_;
};

Eigen::MatrixXcd assemble_bulk_operator(const DielectricMap& map, double kx,
                                        double ky, const PlaneWaveBasis& basis);

struct BandStructure {
  PlaneWaveBasis basis{0};
  std::vector<std::array<double, 2>> k_grid;
  Eigen::MatrixXd bands;                 // n_k x n_bands, ascending per row
  std::vector<Eigen::MatrixXcd> bloch;   // per k: dim x n_bands, L2-normalized
};

/// Inclusive uniform grid of [-pi,pi]^2 with na x nb points.
std::vector<std::array<double, 2>> make_k_grid(int na, int nb);

BandStructure compute_bands(const DielectricMap& map,
                            const std::vector<std::array<double, 2>>& k_grid,
                            int n_bands, const PlaneWaveBasis& basis);

struct Gap {
  double lower = 0.0;   // max_k lambda_s
  double upper = 0.0;   // min_k lambda_{s+1}
  int band_below = 0;   // s   (1-based)
  int band_above = 0;   // s+1 (1-based), the band bounding the gap above
  double width() const { return upper - lower; }
};

std::vector<Gap> find_gaps(const BandStructure& bands);

struct GapEdge {
  double lambda0 = 0.0;      // gap bottom
  double lambda1 = 0.0;      // gap top, refined along the fiber
  int edge_band = 0;         // M, 1-based
  double k0x = 0.0, k0y = 0.0;
  double alpha = 0.0;        // one-sided quadratic bound coefficient
  bool simple_edge = true;
};

struct EdgeOptions {
  int fine_grid = 512;
  double tol_edge_rel = 1e-6;  // * gap width
};

/// Scans lambda_M(kx0, .) on a fine periodic k_y grid, locates and refines the
/// minimizer, and fits the one-sided quadratic bound. Throws DegenerateEdge if
/// a second separated local minimum attains the edge value within tolerance.
GapEdge locate_gap_edge(const DielectricMap& map, const Gap& gap, double kx0,
                        const PlaneWaveBasis& basis, const EdgeOptions& opt = {});

}  // namespace gapmode

#endif

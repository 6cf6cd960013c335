#ifndef GAPMODE_STRIP_HPP
#define GAPMODE_STRIP_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <vector>

#include "gapmode/geometry.hpp"
#include "gapmode/planewave.hpp"

namespace gapmode {

/// Discrete quasiperiodic space on a Born-von-Karman supercell of n_cells
/// unit cells stacked in y. Basis: tensor plane waves
///   (1/sqrt(n_cells)) * exp(i*(kx0+2pi*mx)*x) * exp(i*(2pi*my/n_cells)*y),
/// |mx| <= G, |my| <= my_max with my_max = n_cells*G + (n_cells-1)/2, so each
/// Floquet node j carries exactly the (2G+1)^2 cell modes (mx, (my-j)/n_cells).
/// The basis is L2-orthonormal on the supercell; the mass Gram is the
/// identity.
class StripSpace {
 public:
  StripSpace() = default;
  StripSpace(double kx0, int n_cells, int half_order);

  double kx0() const { return kx0_; }
  int n_cells() const { return n_cells_; }
  int half_order() const { return half_order_; }
  int my_max() const { return my_max_; }
  int dim() const { return (2 * half_order_ + 1) * (2 * my_max_ + 1); }
  int block_dim() const {
    return (2 * half_order_ + 1) * (2 * half_order_ + 1);
  }
  int node_count() const { return n_cells_; }

  /// Node quasimomenta 2*pi*jc/n_cells, ascending in (-pi, pi); index
  /// j in [0, n_cells) maps to centered jc = j - (n_cells-1)/2.
  double ky_node(int j) const;
  const std::vector<double>& ky_nodes() const { return ky_nodes_; }
  int node_nearest(double ky) const;

  int index(int mx, int my) const {
    return (mx + half_order_) * (2 * my_max_ + 1) + (my + my_max_);
  }
  std::pair<int, int> mode(int idx) const {
    int w = 2 * my_max_ + 1;
    return {idx / w - half_order_, idx % w - my_max_};
  }

  /// Strip dof carrying cell mode `cell_idx` (PlaneWaveBasis(G) enumeration)
  /// of Floquet node j.
  int strip_index(int node, int cell_idx) const;

  /// Floquet transform: exact coefficient regrouping onto node j.
  Eigen::VectorXcd floquet(const Eigen::VectorXcd& f, int node) const;
  Eigen::VectorXcd inverse_floquet(
      const std::vector<Eigen::VectorXcd>& per_node) const;

 private:
  double kx0_ = 0.0;
  int n_cells_ = 0, half_order_ = 0, my_max_ = 0;
  std::vector<double> ky_nodes_;
};

/// Assembled quadratic forms on the strip. The background stiffness is block
/// diagonal over Floquet nodes and is stored per block; the perturbed
/// stiffness couples nodes and is stored dense. mass = identity (orthonormal
/// basis), so B_i = stiffness_i + I. Immutable after build_strip.
class FormMatrices {
 public:
  const std::vector<Eigen::MatrixXcd>& s0_blocks() const { return s0_blocks_; }
  const Eigen::MatrixXcd& s1() const { return s1_; }

  Eigen::MatrixXcd stiffness0_dense() const;
  Eigen::MatrixXcd b0_dense() const;
  Eigen::MatrixXcd b1_dense() const;

  Eigen::VectorXcd apply_s0(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_b0(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_s1(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_b1(const Eigen::VectorXcd& v) const;
  /// (stiffness0 - stiffness1) v: the nonnegative defect difference.
  Eigen::VectorXcd apply_diff(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd apply_diff(const Eigen::MatrixXcd& v) const;

  /// Direct solves with the positive definite forms (block LDLT for b0,
  /// dense LDLT for b1). Matrix overloads solve columnwise in one pass.
  Eigen::VectorXcd solve_b0(const Eigen::VectorXcd& f) const;
  Eigen::VectorXcd solve_b1(const Eigen::VectorXcd& f) const;
  Eigen::MatrixXcd solve_b0(const Eigen::MatrixXcd& f) const;
  Eigen::MatrixXcd solve_b1(const Eigen::MatrixXcd& f) const;

  const StripSpace& space() const { return space_; }

 private:
  friend std::pair<StripSpace, FormMatrices> build_strip(
      const DielectricMap& map, double kx0, int n_cells, int half_order);

  StripSpace space_;  // owned copy; cheap and keeps the forms self-contained
  std::vector<Eigen::MatrixXcd> s0_blocks_;
  std::vector<Eigen::LDLT<Eigen::MatrixXcd>> b0_block_ldlt_;
  Eigen::MatrixXcd s1_;
  Eigen::LDLT<Eigen::MatrixXcd> b1_ldlt_;
};

std::pair<StripSpace, FormMatrices> build_strip(const DielectricMap& map,
                                                double kx0, int n_cells,
                                                int half_order);

/// Discrete H^-1 inner product of two functionals (dual vectors):
/// <u,v> = v^H * b0^{-1} * u; linear in u, conjugate-linear in v. L2 vectors
/// embed as functionals through the (identity) mass Gram.
Complex h_minus1_inner(const FormMatrices& forms, const Eigen::VectorXcd& u,
                       const Eigen::VectorXcd& v);

double h_minus1_norm(const FormMatrices& forms, const Eigen::VectorXcd& u);

/// H^1 norm induced by B0: sqrt(u^H b0 u) on function coefficients.
double h1_norm(const FormMatrices& forms, const Eigen::VectorXcd& u);

}  // namespace gapmode

#endif

#ifndef GAPMODE_GREENS_HPP
#define GAPMODE_GREENS_HPP

#include <Eigen/Dense>
#include <vector>

#include "gapmode/strip.hpp"

namespace gapmode {

/// Full spectral data of the background form per Floquet node: ascending
/// eigenvalues lambda_s(k_j) of the stiffness block and unitary eigenvector
/// matrices (mass = identity). The complete per-block spectrum realizes the
/// band sums of the Bloch representation exactly at the discrete level.
struct BlochDecomposition {
  std::vector<Eigen::VectorXd> lambda;  // per node, ascending
  std::vector<Eigen::MatrixXcd> psi;    // per node, unitary columns

  double lambda_min() const;
  /// Smallest |1 - mu*(lambda+1)| over all node eigenvalues.
  double resolvent_margin(double mu) const;
};

BlochDecomposition diagonalize_background(const StripSpace& space,
                                          const FormMatrices& forms);

/// u = G0 f via the spectral sums: per node, u = Psi diag(1/(lambda+1)) Psi^H f.
/// Input is a functional (dual vector), output function coefficients; both in
/// the strip enumeration. Identical to forms.solve_b0 up to eigensolver
/// accuracy.
Eigen::VectorXcd apply_G0(const StripSpace& space,
                          const BlochDecomposition& decomp,
                          const Eigen::VectorXcd& f);

/// u = (I - mu*(L0+1))^{-1} f with per-node weights 1/(1 - mu*(lambda+1)).
/// Throws MuOnSpectrum when some node eigenvalue violates
/// |1 - mu*(lambda+1)| < mu * exclusion.
Eigen::VectorXcd apply_shifted_resolvent(const StripSpace& space,
                                         const BlochDecomposition& decomp,
                                         double mu, const Eigen::VectorXcd& f,
                                         double exclusion = 0.0);

/// u = G1 f: the positive definite solve b1 u = f.
Eigen::VectorXcd apply_G1(const FormMatrices& forms, const Eigen::VectorXcd& f);

}  // namespace gapmode

#endif

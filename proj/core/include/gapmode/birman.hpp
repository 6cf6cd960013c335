#ifndef GAPMODE_BIRMAN_HPP
#define GAPMODE_BIRMAN_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "gapmode/bulk.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/greens.hpp"
#include "gapmode/strip.hpp"

namespace gapmode {

/// K u = (stiffness0 - stiffness1) * G1 u on functionals (dual vectors).
/// Symmetric and nonnegative in the H^-1 inner product; vanishes when the
/// defect overlay is trivial.
Eigen::VectorXcd apply_K(const FormMatrices& forms, const Eigen::VectorXcd& u);

/// Numerical realization of the closure of Ran K with the K-inner product.
/// `basis` columns are H^-1-orthonormal dual vectors; `gram_k` is the
/// K-inner-product Gram on them (diagonal by construction after the final
/// rotation, positive definite on the retained span).
struct DefectSubspace {
  Eigen::MatrixXcd basis;    // dim x r
  Eigen::MatrixXcd k_basis;  // dim x r, K applied columnwise
  Eigen::MatrixXcd gram_k;   // r x r
  std::vector<Eigen::MatrixXcd> bloch_proj;  // per node: block_dim x r
  int rank() const { return static_cast<int>(basis.cols()); }

  /// H^-1-orthogonal projection coefficients of a dual vector onto the span.
  Eigen::VectorXcd project(const FormMatrices& forms,
                           const Eigen::VectorXcd& u) const;
};

/// Spans Ran K by pushing the range of (stiffness0 - stiffness1) through K,
/// orthogonalizes in H^-1, then discards K-Gram directions below
/// tau * (max eigenvalue). Throws EmptySubspace when the perturbation is
/// numerically zero.
DefectSubspace build_defect_subspace(const StripSpace& space,
                                     const FormMatrices& forms,
                                     const BlochDecomposition& decomp,
                                     double tau = 1e-10);

/// Matrices of the generalized eigenproblem for A_mu on the subspace:
/// N[i,j] = <(I-mu*G0^-1)^-1 K b_j, K b_i>_{H^-1} via the Bloch sums with
/// weight 1/((1-mu*(lambda+1))*(lambda+1)); M = gram_k.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> assemble_A_mu(
    const StripSpace& space, const BlochDecomposition& decomp,
    const DefectSubspace& subspace, double mu, double exclusion = 0.0);

/// kappa(mu): the most negative eigenvalue of A_mu (generalized problem
/// N x = kappa M x).
double kappa(const StripSpace& space, const BlochDecomposition& decomp,
             const DefectSubspace& subspace, double mu, double exclusion = 0.0);

struct KappaCurve {
  std::vector<double> mu_samples;
  std::vector<double> kappa_values;
  std::vector<int> n_below_minus_one;  // eigenvalue count <= -1 per sample
  std::optional<double> crossing_mu;
  std::optional<double> crossing_lambda;
  double crossing_kappa = 0.0;
  double crossing_residual = 0.0;         // relative (G1 - mu*)u residual
  Eigen::VectorXcd crossing_vector;       // reconstructed u, strip coefficients
};

struct CrossingOptions {
  int n_samples = 32;
  double eta_min_rel = 1e-8;   // * gap image width
  double tol_cross = 1e-8;
  int max_bisect = 200;
  double exclusion_rel = 1e-8;  // * gap width, resolvent guard
};

/// Samples kappa on a log-spaced mu grid accumulating at (Lambda1+1)^-1 and
/// bisects the first kappa = -1 crossing. No-crossing is a valid outcome.
KappaCurve find_crossing(const StripSpace& space, const FormMatrices& forms,
                         const BlochDecomposition& decomp,
                         const DefectSubspace& subspace, const GapEdge& edge,
                         const CrossingOptions& opt = {});

/// Both flavors of the localization condition are evaluated: the plain-delta
/// form (inv_diff_sup, as usually quoted) and the weighted form
/// (inv_diff_weighted) that the B0-norm operator bounds certify.
struct ConditionReport {
  double lhs_cond = 0.0;           // ratio_sup * inv_diff_sup
  double lhs_cond1 = 0.0;          // g1_norm_bound * inv_diff_sup
  double lhs_cond_weighted = 0.0;  // ratio_sup * inv_diff_weighted
  double lhs_cond1_weighted = 0.0; // g1_norm_bound * inv_diff_weighted
  double rhs = 0.0;                // gap width / (Lambda0 + 1)
  bool cond_satisfied = false;
  bool cond1_satisfied = false;
  bool cond_weighted_satisfied = false;
  bool cond1_weighted_satisfied = false;
  bool assumptions_hold = true;  // false => criterion inapplicable (no witness)
};

ConditionReport check_condition(const NormBundle& norms, const GapEdge& edge,
                                bool assumption_witness_ok = true);

struct BoundReport {
  double k_norm_estimate = 0.0;    // power-iteration estimate of ||K||
  double k_norm_bound = 0.0;       // g1_norm_bound * inv_diff_weighted
  double g1_norm_estimate = 0.0;   // measured ||G1||_{H^-1 -> H^1}
  double g1_norm_bound = 0.0;      // ||G0||/(1 - delta*||G0||) when delta < 1
  bool bound_iv_applicable = false;
  double worst_slack_i = 1e300;    // min over samples of (rhs - lhs)
  double worst_slack_iii = 1e300;
  int samples = 0;
};

/// Checks the four operator bounds on a random batch; throws BoundViolation
/// (with the witness index) if any fails beyond roundoff.
BoundReport verify_lem12_bounds(const StripSpace& space,
                                const FormMatrices& forms,
                                const NormBundle& norms, int n_random,
                                unsigned seed = 12345, int power_iters = 30);

struct EdgeInteraction {
  double value = 0.0;        // max_i |[(L0-L1) psi_M][G1 b_i]|
  int node = 0;              // nearest node to k_y0
  double node_offset = 0.0;  // |ky_node - k_y0|, periodic
  bool below_tolerance = false;
};

/// Couples the edge Bloch wave (band M at the node nearest k_y0) to the
/// defect subspace; a numerically nonzero value certifies the coupling that
/// a unique-continuation argument would otherwise provide.
EdgeInteraction verify_edge_interaction(const StripSpace& space,
                                        const FormMatrices& forms,
                                        const BlochDecomposition& decomp,
                                        const DefectSubspace& subspace,
                                        const GapEdge& edge,
                                        double tol_couple = 1e-12);

}  // namespace gapmode

#endif

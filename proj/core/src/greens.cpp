#include "gapmode/greens.hpp"

#include <cmath>
#include <exception>
#include <string>

#include "gapmode/errors.hpp"
#include "gapmode/parallel.hpp"

namespace gapmode {

double BlochDecomposition::lambda_min() const {
  double v = 1e300;
  for (const auto& l : lambda) v = std::min(v, l.minCoeff());
  return v;
}

double BlochDecomposition::resolvent_margin(double mu) const {
  double margin = 1e300;
  for (const auto& l : lambda)
    for (Eigen::Index s = 0; s < l.size(); ++s)
      margin = std::min(margin, std::abs(1.0 - mu * (l(s) + 1.0)));
  return margin;
}

BlochDecomposition diagonalize_background(const StripSpace& space,
                                          const FormMatrices& forms) {
  BlochDecomposition d;
  d.lambda.resize(space.node_count());
  d.psi.resize(space.node_count());
  std::vector<std::exception_ptr> errors(space.node_count());
  parallel_for(space.node_count(), [&](int node) {
    try {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          forms.s0_blocks()[node]);
      if (es.info() != Eigen::Success)
        throw EigensolverFailure("background block at node " +
                                 std::to_string(node));
      d.lambda[node] = es.eigenvalues();
      d.psi[node] = es.eigenvectors();
    } catch (...) {
      errors[node] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return d;
}

namespace {

// Shared per-node kernel: u_block = Psi diag(w(lambda)) Psi^H f_block.
template <typename WeightFn>
Eigen::VectorXcd apply_spectral(const StripSpace& space,
                                const BlochDecomposition& decomp,
                                const Eigen::VectorXcd& f, WeightFn&& weight) {
  Eigen::VectorXcd out(f.size());
  for (int node = 0; node < space.node_count(); ++node) {
    Eigen::VectorXcd blk = space.floquet(f, node);
    Eigen::VectorXcd proj = decomp.psi[node].adjoint() * blk;
    for (Eigen::Index s = 0; s < proj.size(); ++s)
      proj(s) *= weight(decomp.lambda[node](s));
    Eigen::VectorXcd ub = decomp.psi[node] * proj;
    for (int c = 0; c < space.block_dim(); ++c)
      out(space.strip_index(node, c)) = ub(c);
  }
  return out;
}

}  // namespace

Eigen::VectorXcd apply_G0(const StripSpace& space,
                          const BlochDecomposition& decomp,
                          const Eigen::VectorXcd& f) {
  return apply_spectral(space, decomp, f,
                        [](double l) { return 1.0 / (l + 1.0); });
}

Eigen::VectorXcd apply_shifted_resolvent(const StripSpace& space,
                                         const BlochDecomposition& decomp,
                                         double mu, const Eigen::VectorXcd& f,
                                         double exclusion) {
  double margin = decomp.resolvent_margin(mu);
  if (margin < mu * exclusion)
    throw MuOnSpectrum("mu = " + std::to_string(mu) +
                       " too close to a node eigenvalue (margin " +
                       std::to_string(margin) + ")");
  return apply_spectral(space, decomp, f, [mu](double l) {
    return 1.0 / (1.0 - mu * (l + 1.0));
  });
}

Eigen::VectorXcd apply_G1(const FormMatrices& forms,
                          const Eigen::VectorXcd& f) {
  return forms.solve_b1(f);
}

}  // namespace gapmode

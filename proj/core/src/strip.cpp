#include "gapmode/strip.hpp"

#include <cmath>
#include <string>

#include "gapmode/errors.hpp"

namespace gapmode {

StripSpace::StripSpace(double kx0, int n_cells, int half_order)
    : kx0_(kx0), n_cells_(n_cells), half_order_(half_order) {
  if (n_cells < 1 || n_cells % 2 == 0)
    throw std::invalid_argument("n_cells must be odd and positive");
  if (std::abs(kx0) > kPi + 1e-12)
    throw std::invalid_argument("kx0 outside [-pi,pi]");
  my_max_ = n_cells_ * half_order_ + (n_cells_ - 1) / 2;
  ky_nodes_.resize(n_cells_);
  for (int j = 0; j < n_cells_; ++j)
    ky_nodes_[j] = kTwoPi * (j - (n_cells_ - 1) / 2) / n_cells_;
}

double StripSpace::ky_node(int j) const {
  if (j < 0 || j >= n_cells_) throw IndexOutOfRange("node index " + std::to_string(j));
  return ky_nodes_[j];
}

int StripSpace::node_nearest(double ky) const {
  int best = 0;
  double bd = 1e300;
  for (int j = 0; j < n_cells_; ++j) {
    double d = std::abs(ky_nodes_[j] - ky);
    d = std::min(d, kTwoPi - d);  // periodic distance
    if (d < bd) {
      bd = d;
      best = j;
    }
  }
  return best;
}

int StripSpace::strip_index(int node, int cell_idx) const {
  if (node < 0 || node >= n_cells_) throw IndexOutOfRange("node " + std::to_string(node));
  PlaneWaveBasis cell(half_order_);
  auto [mx, myc] = cell.mode(cell_idx);
  int jc = node - (n_cells_ - 1) / 2;
  return index(mx, jc + n_cells_ * myc);
}

Eigen::VectorXcd StripSpace::floquet(const Eigen::VectorXcd& f, int node) const {
  if (f.size() != dim()) throw IndexOutOfRange("coefficient vector size");
  if (node < 0 || node >= n_cells_) throw IndexOutOfRange("node " + std::to_string(node));
  Eigen::VectorXcd out(block_dim());
  for (int c = 0; c < block_dim(); ++c) out(c) = f(strip_index(node, c));
  return out;
}

Eigen::VectorXcd StripSpace::inverse_floquet(
    const std::vector<Eigen::VectorXcd>& per_node) const {
  if (static_cast<int>(per_node.size()) != n_cells_)
    throw IndexOutOfRange("need one block per node");
  Eigen::VectorXcd f(dim());
  for (int node = 0; node < n_cells_; ++node) {
    if (per_node[node].size() != block_dim())
      throw IndexOutOfRange("block size mismatch at node " + std::to_string(node));
    for (int c = 0; c < block_dim(); ++c)
      f(strip_index(node, c)) = per_node[node](c);
  }
  return f;
}

namespace {

std::vector<double> strip_eta_samples(const DielectricMap& map, int n_cells,
                                      bool perturbed) {
  int n = map.resolution(), ny = n * n_cells;
  std::vector<double> eta(static_cast<size_t>(n) * ny);
  for (int ix = 0; ix < n; ++ix)
    for (int row = 0; row < n_cells; ++row) {
      bool use_defect = perturbed && map.row_perturbed(row, n_cells);
      for (int iy = 0; iy < n; ++iy) {
        double e = use_defect ? map.eps1(ix, iy) : map.eps0(ix, iy);
        eta[static_cast<size_t>(ix) * ny + row * n + iy] = 1.0 / e;
      }
    }
  return eta;
}

}  // namespace

std::pair<StripSpace, FormMatrices> build_strip(const DielectricMap& map,
                                                double kx0, int n_cells,
                                                int half_order) {
  if (map.defect_rows() > 0 && n_cells < 2 * map.defect_rows() + 5)
    throw TooNarrowSupercell("n_cells=" + std::to_string(n_cells) +
                             " < 2*defect_rows+5 = " +
                             std::to_string(2 * map.defect_rows() + 5));
  if (map.resolution() < 4 * half_order + 2)
    throw ResolutionMismatch("need resolution >= 4*G+2, got N=" +
                             std::to_string(map.resolution()) +
                             " G=" + std::to_string(half_order));

  StripSpace space(kx0, n_cells, half_order);
  FormMatrices forms;
  forms.space_ = space;

  int g = half_order, nc = n_cells, n = map.resolution();
  PlaneWaveBasis cell(g);

  // Background blocks from the unit-cell table: the strip coefficient at
  // y-frequency nc*d equals the cell coefficient at d exactly (tiled samples).
  FourierTable table0(
      [&] {
        std::vector<double> eta(static_cast<size_t>(n) * n);
        for (int ix = 0; ix < n; ++ix)
          for (int iy = 0; iy < n; ++iy)
            eta[static_cast<size_t>(ix) * n + iy] = 1.0 / map.eps0(ix, iy);
        return eta;
      }(),
      n, n, 1.0, 2 * g, 2 * g);

  forms.s0_blocks_.resize(nc);
  forms.b0_block_ldlt_.resize(nc);
  for (int node = 0; node < nc; ++node) {
    double kj = space.ky_node(node);
    Eigen::MatrixXcd blk(space.block_dim(), space.block_dim());
    for (int i = 0; i < space.block_dim(); ++i) {
      auto [mx, my] = cell.mode(i);
      double ax = kx0 + kTwoPi * mx, ay = kj + kTwoPi * my;
      for (int jdx = 0; jdx < space.block_dim(); ++jdx) {
        auto [nx, nyc] = cell.mode(jdx);
        double dot = ax * (kx0 + kTwoPi * nx) + ay * (kj + kTwoPi * nyc);
        blk(i, jdx) = dot * table0.coeff(mx - nx, my - nyc);
      }
    }
    blk = 0.5 * (blk + blk.adjoint().eval());
    forms.s0_blocks_[node] = blk;
    Eigen::MatrixXcd b0 = blk;
    b0.diagonal().array() += 1.0;
    forms.b0_block_ldlt_[node].compute(b0);
    if (forms.b0_block_ldlt_[node].info() != Eigen::Success ||
        forms.b0_block_ldlt_[node].vectorD().real().minCoeff() <= 0)
      throw NotPositiveDefinite("b0 block at node " + std::to_string(node));
  }

  // Perturbed stiffness, dense over the whole strip.
  FourierTable table1(strip_eta_samples(map, nc, true), n, n * nc,
                      static_cast<double>(nc), 2 * g, 2 * space.my_max());
  int dim = space.dim();
  forms.s1_.resize(dim, dim);
  for (int i = 0; i < dim; ++i) {
    auto [mx, my] = space.mode(i);
    double ax = kx0 + kTwoPi * mx, ay = kTwoPi * my / nc;
    for (int jdx = 0; jdx < dim; ++jdx) {
      auto [nx, nyv] = space.mode(jdx);
      double dot = ax * (kx0 + kTwoPi * nx) + ay * (kTwoPi * nyv / nc);
      forms.s1_(i, jdx) = dot * table1.coeff(mx - nx, my - nyv);
    }
  }
  forms.s1_ = 0.5 * (forms.s1_ + forms.s1_.adjoint().eval());

  Eigen::MatrixXcd b1 = forms.s1_;
  b1.diagonal().array() += 1.0;
  forms.b1_ldlt_.compute(b1);
  if (forms.b1_ldlt_.info() != Eigen::Success ||
      forms.b1_ldlt_.vectorD().real().minCoeff() <= 0)
    throw NotPositiveDefinite("b1 on the strip");

  return {std::move(space), std::move(forms)};
}

Eigen::MatrixXcd FormMatrices::stiffness0_dense() const {
  int dim = space_.dim();
  Eigen::MatrixXcd s0 = Eigen::MatrixXcd::Zero(dim, dim);
  for (int node = 0; node < space_.node_count(); ++node) {
    const auto& blk = s0_blocks_[node];
    for (int a = 0; a < space_.block_dim(); ++a)
      for (int b = 0; b < space_.block_dim(); ++b)
        s0(space_.strip_index(node, a), space_.strip_index(node, b)) = blk(a, b);
  }
  return s0;
}

Eigen::MatrixXcd FormMatrices::b0_dense() const {
  Eigen::MatrixXcd m = stiffness0_dense();
  m.diagonal().array() += 1.0;
  return m;
}

Eigen::MatrixXcd FormMatrices::b1_dense() const {
  Eigen::MatrixXcd m = s1_;
  m.diagonal().array() += 1.0;
  return m;
}

Eigen::VectorXcd FormMatrices::apply_s0(const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int node = 0; node < space_.node_count(); ++node) {
    Eigen::VectorXcd blk = space_.floquet(v, node);
    Eigen::VectorXcd w = s0_blocks_[node] * blk;
    for (int c = 0; c < space_.block_dim(); ++c)
      out(space_.strip_index(node, c)) = w(c);
  }
  return out;
}

Eigen::VectorXcd FormMatrices::apply_b0(const Eigen::VectorXcd& v) const {
  return apply_s0(v) + v;
}

Eigen::VectorXcd FormMatrices::apply_s1(const Eigen::VectorXcd& v) const {
  return s1_ * v;
}

Eigen::VectorXcd FormMatrices::apply_b1(const Eigen::VectorXcd& v) const {
  return s1_ * v + v;
}

Eigen::VectorXcd FormMatrices::apply_diff(const Eigen::VectorXcd& v) const {
  return apply_s0(v) - s1_ * v;
}

Eigen::MatrixXcd FormMatrices::apply_diff(const Eigen::MatrixXcd& v) const {
  Eigen::MatrixXcd out = -(s1_ * v);
  for (int node = 0; node < space_.node_count(); ++node) {
    Eigen::MatrixXcd blk(space_.block_dim(), v.cols());
    for (int c = 0; c < space_.block_dim(); ++c)
      blk.row(c) = v.row(space_.strip_index(node, c));
    Eigen::MatrixXcd w = s0_blocks_[node] * blk;
    for (int c = 0; c < space_.block_dim(); ++c)
      out.row(space_.strip_index(node, c)) += w.row(c);
  }
  return out;
}

Eigen::VectorXcd FormMatrices::solve_b0(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd out(f.size());
  for (int node = 0; node < space_.node_count(); ++node) {
    Eigen::VectorXcd blk = space_.floquet(f, node);
    Eigen::VectorXcd w = b0_block_ldlt_[node].solve(blk);
    for (int c = 0; c < space_.block_dim(); ++c)
      out(space_.strip_index(node, c)) = w(c);
  }
  return out;
}

Eigen::VectorXcd FormMatrices::solve_b1(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd u = b1_ldlt_.solve(f);
  if (!u.allFinite()) throw SolveFailure("b1 solve produced non-finite values");
  return u;
}

Eigen::MatrixXcd FormMatrices::solve_b0(const Eigen::MatrixXcd& f) const {
  Eigen::MatrixXcd out(f.rows(), f.cols());
  for (int node = 0; node < space_.node_count(); ++node) {
    Eigen::MatrixXcd blk(space_.block_dim(), f.cols());
    for (int c = 0; c < space_.block_dim(); ++c)
      blk.row(c) = f.row(space_.strip_index(node, c));
    Eigen::MatrixXcd w = b0_block_ldlt_[node].solve(blk);
    for (int c = 0; c < space_.block_dim(); ++c)
      out.row(space_.strip_index(node, c)) = w.row(c);
  }
  return out;
}

Eigen::MatrixXcd FormMatrices::solve_b1(const Eigen::MatrixXcd& f) const {
  Eigen::MatrixXcd u = b1_ldlt_.solve(f);
  if (!u.allFinite()) throw SolveFailure("b1 solve produced non-finite values");
  return u;
}

Complex h_minus1_inner(const FormMatrices& forms, const Eigen::VectorXcd& u,
                       const Eigen::VectorXcd& v) {
  return v.dot(forms.solve_b0(u));
}

double h_minus1_norm(const FormMatrices& forms, const Eigen::VectorXcd& u) {
  return std::sqrt(std::max(0.0, h_minus1_inner(forms, u, u).real()));
}

double h1_norm(const FormMatrices& forms, const Eigen::VectorXcd& u) {
  return std::sqrt(std::max(0.0, u.dot(forms.apply_b0(u)).real()));
}

}  // namespace gapmode

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "gapmode/birman.hpp"
#include "gapmode/bulk.hpp"
#include "gapmode/errors.hpp"
#include "gapmode/geometry.hpp"
#include "gapmode/greens.hpp"
#include "gapmode/oracle.hpp"
#include "gapmode/strip.hpp"

using namespace gapmode;

namespace {

DielectricMap small_vein_map(double t, int n = 16) {
  std::vector<Shape> bg = {Shape::fill(9.0), Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  std::vector<Shape> defect = {Shape::fill(9.0 + t),
                               Shape::rect(1.0, 0.5, 0.5, 0.75, 0.75)};
  return DielectricMap::build(bg, defect, 1, n);
}

GapEdge locate_small_edge(const DielectricMap& map) {
  PlaneWaveBasis basis(3);
  BandStructure bs = compute_bands(map, make_k_grid(9, 9), 4, basis);
  auto gaps = find_gaps(bs);
  REQUIRE(!gaps.empty());
  auto widest = *std::max_element(
      gaps.begin(), gaps.end(),
      [](const Gap& a, const Gap& b) { return a.width() < b.width(); });
  EdgeOptions opt;
  opt.fine_grid = 128;
  return locate_gap_edge(map, widest, kPi, basis, opt);
}

}  // namespace

TEST_CASE("trivial overlay: no gap eigenvalues") {
  DielectricMap map = small_vein_map(0.0);
  GapEdge edge = locate_small_edge(map);
  auto [space, forms] = build_strip(map, kPi, 7, 3);
  OracleResult orc = supercell_eigensolve(space, forms, map, edge);
  CHECK(orc.gap_eigenvalues.empty());
  CHECK(orc.folded_bulk_spectrum.size() == static_cast<size_t>(space.dim()));
}

TEST_CASE("row masses sum to the squared norm") {
  DielectricMap map = small_vein_map(1.0);
  auto [space, forms] = build_strip(map, 0.4, 9, 3);
  Eigen::VectorXcd u = Eigen::VectorXcd::Random(space.dim());
  std::vector<double> mass = row_masses(space, u);
  double total = 0;
  for (double m : mass) {
    CHECK(m >= -1e-12 * u.squaredNorm());
    total += m;
  }
  CHECK(total == doctest::Approx(u.squaredNorm()).epsilon(1e-10));
}

TEST_CASE("synthetic exponential profile recovers gamma = 1") {
  DielectricMap map = small_vein_map(1.0);
  auto [space, forms] = build_strip(map, 0.0, 11, 3);
  int nc = space.n_cells(), rc = (nc - 1) / 2;

  // Row-wise constant profile e^{-dist(row)} sampled and band-limited onto
  // the strip basis (x-independent: only m_x = 0 modes).
  int ny = 8 * (2 * space.my_max() + 1);
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(space.dim());
  for (int my = -space.my_max(); my <= space.my_max(); ++my) {
    Complex acc(0, 0);
    for (int j = 0; j < ny; ++j) {
      double y = (j + 0.5) * nc / double(ny);
      int row = static_cast<int>(y);
      double dist = std::abs(row - rc);
      acc += std::exp(-dist) * std::polar(1.0, -kTwoPi * my * y / nc);
    }
    u(space.index(0, my)) = acc * (nc / double(ny)) / std::sqrt(double(nc));
  }
  DecayFit fit = decay_rate(space, map, u);
  CHECK(fit.gamma == doctest::Approx(1.0).epsilon(0.05));
  CHECK(fit.r2 >= 0.9);
  CHECK_FALSE(fit.poor_fit);
}

TEST_CASE("decay fit flags irregular profiles as poor") {
  DielectricMap map = small_vein_map(1.0);
  auto [space, forms] = build_strip(map, 0.0, 9, 3);
  std::mt19937 rng(99);
  std::normal_distribution<double> g(0, 1);
  Eigen::VectorXcd u(space.dim());
  for (int i = 0; i < space.dim(); ++i) u(i) = Complex(g(rng), g(rng));
  DecayFit fit = decay_rate(space, map, u);
  CHECK(fit.poor_fit);
  CHECK(fit.r2 < 0.9);
}

TEST_CASE("supercell oracle on the defect fixture") {
  DielectricMap map = small_vein_map(2.0);
  GapEdge edge = locate_small_edge(map);
  auto [space, forms] = build_strip(map, kPi, 9, 3);
  OracleResult orc = supercell_eigensolve(space, forms, map, edge);
  REQUIRE(orc.gap_eigenvalues.size() >= 1);

  SUBCASE("gap mode decays; extended control state does not") {
    CHECK(orc.decay[0].gamma > 0.0);
    CHECK(orc.decay[0].r2 > 0.5);

    // control: a folded bulk-band eigenvector (node-pure Bloch state has
    // exactly periodic row masses)
    BlochDecomposition decomp = diagonalize_background(space, forms);
    int node = 1, s = 0;
    REQUIRE(decomp.lambda[node](s) < edge.lambda0);
    Eigen::VectorXcd bulk = Eigen::VectorXcd::Zero(space.dim());
    for (int c = 0; c < space.block_dim(); ++c)
      bulk(space.strip_index(node, c)) = decomp.psi[node](c, s);
    DecayFit control = decay_rate(space, map, bulk);
    CHECK(std::abs(control.gamma) < 0.05);
  }

  SUBCASE("gap eigenvalues keep their distance from the folded spectrum") {
    double tol_ess = 1e-6 * (edge.lambda1 - edge.lambda0);
    CHECK(orc.min_dist_to_folded > 10 * tol_ess);
  }

  SUBCASE("eigenvector residual is small") {
    for (size_t i = 0; i < orc.gap_eigenvalues.size(); ++i) {
      Eigen::VectorXcd v = orc.eigenvectors.col(i);
      double resid = (forms.s1() * v - orc.gap_eigenvalues[i] * v).norm();
      CHECK(resid <= 1e-8 * forms.s1().cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("folded spectrum equals the union of bulk bands over nodes") {
  DielectricMap map = small_vein_map(1.0);
  GapEdge edge = locate_small_edge(map);
  auto [space, forms] = build_strip(map, kPi, 7, 3);
  OracleResult orc = supercell_eigensolve(space, forms, map, edge);

  PlaneWaveBasis basis(3);
  std::vector<double> expect;
  for (int node = 0; node < space.node_count(); ++node) {
    BandStructure bs = compute_bands(map, {{kPi, space.ky_node(node)}},
                                     space.block_dim(), basis);
    for (int s = 0; s < space.block_dim(); ++s) expect.push_back(bs.bands(0, s));
  }
  std::sort(expect.begin(), expect.end());
  REQUIRE(orc.folded_bulk_spectrum.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i)
    CHECK(std::abs(orc.folded_bulk_spectrum[i] - expect[i]) /
              std::max(1.0, std::abs(expect[i])) <
          1e-9);
}

TEST_CASE("rank-rho perturbation interlacing of the two pencils") {
  DielectricMap map = small_vein_map(1.5);
  auto [space, forms] = build_strip(map, kPi, 7, 3);
  Eigen::MatrixXcd d = forms.stiffness0_dense() - forms.s1();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ed(d, Eigen::EigenvaluesOnly);
  double dmax = ed.eigenvalues().maxCoeff();
  int rho = 0;
  for (int i = 0; i < ed.eigenvalues().size(); ++i)
    if (ed.eigenvalues()(i) > 1e-10 * dmax) ++rho;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e0(forms.stiffness0_dense(),
                                                     Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> e1(forms.s1(),
                                                     Eigen::EigenvaluesOnly);
  int n = space.dim();
  double scale = std::abs(e0.eigenvalues()(n - 1));
  for (int i = 0; i < n; ++i) {
    CHECK(e1.eigenvalues()(i) <= e0.eigenvalues()(i) + 1e-10 * scale);
    if (i + rho < n)
      CHECK(e0.eigenvalues()(i) <= e1.eigenvalues()(i + rho) + 1e-10 * scale);
  }
}

TEST_CASE("convergence study structure on a coarse fixture") {
  DielectricMap map = small_vein_map(1.0, 32);
  ConvergenceOptions opt;
  opt.base_cells = 7;
  opt.base_order = 3;
  opt.k_grid = 9;
  opt.fine_grid = 64;
  opt.n_bands = 4;
  ConvergenceTable table =
      convergence_study(map, kPi, {7, 9, 11}, {3, 4, 5}, opt);
  REQUIRE(table.rows.size() == 6);
  for (const auto& row : table.rows) {
    CHECK(row.crossed);
    CHECK(row.crossing_lambda > row.gap_lower);
    CHECK(row.crossing_lambda < row.gap_upper);
    CHECK(std::abs(row.crossing_lambda - row.oracle_lambda) /
              row.crossing_lambda <
          1e-3);
  }
  CHECK(table.cauchy_cells.size() == 2);
  CHECK(table.cauchy_orders.size() == 2);

  CHECK_THROWS_AS(convergence_study(map, kPi, {7, 9}, {3, 4, 5}, opt),
                  std::invalid_argument);
}

#include "gapmode/bulk.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "gapmode/errors.hpp"
#include "gapmode/parallel.hpp"

namespace gapmode {

BulkAssembler::BulkAssembler(const DielectricMap& map,
                             const PlaneWaveBasis& basis)
    : basis_(basis),
      table_(
          [&] {
            int n = map.resolution();
            std::vector<double> eta(static_cast<size_t>(n) * n);
            for (int ix = 0; ix < n; ++ix)
              for (int iy = 0; iy < n; ++iy)
                eta[static_cast<size_t>(ix) * n + iy] = 1.0 / map.eps0(ix, iy);
            return eta;
          }(),
          map.resolution(), map.resolution(), 1.0, 2 * basis.half_order,
          2 * basis.half_order) {
  if (map.resolution() < 4 * basis.half_order + 2)
    throw ResolutionMismatch("need resolution >= 4*G+2, got N=" +
                             std::to_string(map.resolution()) +
                             " G=" + std::to_string(basis.half_order));
}

Eigen::MatrixXcd BulkAssembler::at(double kx, double ky) const {
  if (std::abs(kx) > kPi + 1e-12 || std::abs(ky) > kPi + 1e-12)
    throw std::invalid_argument("quasimomentum outside [-pi,pi]^2");
  int G = basis_.half_order, dim = basis_.dim();
  Eigen::MatrixXcd h(dim, dim);
  for (int mx = -G; mx <= G; ++mx)
    for (int my = -G; my <= G; ++my) {
      int i = basis_.index(mx, my);
      double ax = kx + kTwoPi * mx, ay = ky + kTwoPi * my;
      for (int nx = -G; nx <= G; ++nx)
        for (int ny = -G; ny <= G; ++ny) {
          int j = basis_.index(nx, ny);
          double dot = ax * (kx + kTwoPi * nx) + ay * (ky + kTwoPi * ny);
          h(i, j) = dot * table_.coeff(mx - nx, my - ny);
        }
    }
  // eta real => etahat(-g) = conj(etahat(g)); symmetrize away roundoff so the
  // Hermiticity invariant is exact.
  return 0.5 * (h + h.adjoint().eval());
}

Eigen::MatrixXcd assemble_bulk_operator(const DielectricMap& map, double kx,
                                        double ky,
                                        const PlaneWaveBasis& basis) {
  return BulkAssembler(map, basis).at(kx, ky);
}

std::vector<std::array<double, 2>> make_k_grid(int na, int nb) {
  if (na < 2 || nb < 2) throw std::invalid_argument("k grid needs >= 2 points per side");
  std::vector<std::array<double, 2>> grid;
  grid.reserve(static_cast<size_t>(na) * nb);
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < nb; ++b)
      grid.push_back({-kPi + kTwoPi * a / (na - 1), -kPi + kTwoPi * b / (nb - 1)});
  return grid;
}

BandStructure compute_bands(const DielectricMap& map,
                            const std::vector<std::array<double, 2>>& k_grid,
                            int n_bands, const PlaneWaveBasis& basis) {
  if (n_bands < 1 || n_bands > basis.dim())
    throw std::invalid_argument("n_bands must be in [1, basis.dim()]");
  BulkAssembler assembler(map, basis);

  BandStructure bs;
  bs.basis = basis;
  bs.k_grid = k_grid;
  bs.bands.resize(static_cast<Eigen::Index>(k_grid.size()), n_bands);
  bs.bloch.resize(k_grid.size());

  std::vector<std::exception_ptr> errors(k_grid.size());
  parallel_for(static_cast<int>(k_grid.size()), [&](int i) {
    try {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          assembler.at(k_grid[i][0], k_grid[i][1]));
      if (es.info() != Eigen::Success)
        throw EigensolverFailure("at k = (" + std::to_string(k_grid[i][0]) +
                                 ", " + std::to_string(k_grid[i][1]) + ")");
      bs.bands.row(i) = es.eigenvalues().head(n_bands).transpose();
      bs.bloch[i] = es.eigenvectors().leftCols(n_bands);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return bs;
}

std::vector<Gap> find_gaps(const BandStructure& bands) {
  std::vector<Gap> gaps;
  int nb = static_cast<int>(bands.bands.cols());
  for (int s = 0; s + 1 < nb; ++s) {
    double lo = bands.bands.col(s).maxCoeff();
    double hi = bands.bands.col(s + 1).minCoeff();
    if (hi > lo) gaps.push_back({lo, hi, s + 1, s + 2});
  }
  return gaps;
}

namespace {

// Least-squares fit of c0 + c1*d + c2*d^2.
std::array<double, 3> quadratic_fit(const std::vector<double>& d,
                                    const std::vector<double>& f) {
  Eigen::MatrixXd a(d.size(), 3);
  Eigen::VectorXd b(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = d[i];
    a(i, 2) = d[i] * d[i];
    b(i) = f[i];
  }
  Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  return {c(0), c(1), c(2)};
}

double wrap_to_pi(double k) {
  while (k > kPi) k -= kTwoPi;
  while (k <= -kPi) k += kTwoPi;
  return k;
}

}  // namespace

GapEdge locate_gap_edge(const DielectricMap& map, const Gap& gap, double kx0,
                        const PlaneWaveBasis& basis, const EdgeOptions& opt) {
  if (std::abs(kx0) > kPi + 1e-12)
    throw std::invalid_argument("kx0 outside [-pi,pi]");
  if (opt.fine_grid < 16) throw std::invalid_argument("fine_grid too small");

  BulkAssembler assembler(map, basis);
  int m = gap.band_above;  // 1-based
  int nf = opt.fine_grid;
  double h = kTwoPi / nf;
  double tol_edge = opt.tol_edge_rel * gap.width();

  // lambda_M along the fiber, periodic grid over (-pi, pi].
  std::vector<double> ky(nf), lam(nf);
  std::vector<std::exception_ptr> errors(nf);
  parallel_for(nf, [&](int i) {
    try {
      ky[i] = -kPi + h * (i + 1);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          assembler.at(kx0, ky[i]));
      if (es.info() != Eigen::Success)
        throw EigensolverFailure("edge scan at ky index " + std::to_string(i));
      lam[i] = es.eigenvalues()(m - 1);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  int i0 = static_cast<int>(std::min_element(lam.begin(), lam.end()) - lam.begin());
  auto at = [&](int i) { return lam[((i % nf) + nf) % nf]; };

  // Parabolic refinement through the three samples around the grid minimum.
  double fm = at(i0 - 1), f0 = at(i0), fp = at(i0 + 1);
  double denom = fm - 2 * f0 + fp;
  double shift = denom > 0 ? 0.5 * h * (fm - fp) / denom : 0.0;
  shift = std::clamp(shift, -h, h);
  double ky0 = wrap_to_pi(ky[i0] + shift);
  double lambda1 = denom > 0 ? f0 - 0.125 * (fm - fp) * (fm - fp) / denom : f0;

  if (lambda1 <= gap.lower || lambda1 > gap.upper + 0.5 * gap.width())
    throw std::invalid_argument(
        "fiber kx0 does not attain the gap edge: refined min " +
        std::to_string(lambda1) + " vs gap top " + std::to_string(gap.upper));

  // Secondary separated local minima near the edge value => degenerate edge.
  // Each candidate is refined by its own parabola before comparing.
  for (int i = 0; i < nf; ++i) {
    int sep = std::min(std::abs(i - i0), nf - std::abs(i - i0));
    if (sep <= 2) continue;
    double gm = at(i - 1), g0 = at(i), gp = at(i + 1);
    if (!(g0 <= gm && g0 <= gp)) continue;
    double d2 = gm - 2 * g0 + gp;
    double vertex = d2 > 0 ? g0 - 0.125 * (gm - gp) * (gm - gp) / d2 : g0;
    if (vertex <= lambda1 + tol_edge)
      throw DegenerateEdge("second minimizer at ky = " + std::to_string(ky[i]) +
                           " attains the edge within tolerance");
  }

  // One-sided quadratic bound from a +-5 point window.
  std::vector<double> dd, ff;
  for (int i = i0 - 5; i <= i0 + 5; ++i) {
    double kyi = ky[i0] + h * (i - i0);  // unwrapped local coordinate
    dd.push_back(kyi - (ky[i0] + shift));
    ff.push_back(at(i));
  }
  auto c = quadratic_fit(dd, ff);
  if (!(c[2] > 0))
    throw DegenerateEdge("edge not quadratic along the fiber (fit curvature " +
                         std::to_string(c[2]) + ")");
  double alpha = 1.1 * c[2];
  for (size_t i = 0; i < dd.size(); ++i) {
    if (std::abs(dd[i]) < 1e-3 * h) continue;
    alpha = std::max(alpha, (ff[i] - lambda1) / (dd[i] * dd[i]));
  }

  GapEdge edge;
  edge.lambda0 = gap.lower;
  edge.lambda1 = lambda1;
  edge.edge_band = m;
  edge.k0x = kx0;
  edge.k0y = ky0;
  edge.alpha = alpha;
  edge.simple_edge = true;
  return edge;
}

}  // namespace gapmode

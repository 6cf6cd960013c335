#include "gapmode/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gapmode/errors.hpp"
#include "gapmode/pipeline.hpp"

namespace gapmode {

std::vector<double> row_masses(const StripSpace& space,
                               const Eigen::VectorXcd& u) {
  int nc = space.n_cells(), g = space.half_order(), my_max = space.my_max();
  // Autocorrelation of the coefficients over the y index: modes with equal
  // m_x pair through the exact one-row overlap
  //   I(d, r) = (1/nc) * int_r^{r+1} exp(i*2pi*d*y/nc) dy.
  std::vector<Complex> auto_d(4 * my_max + 1, Complex(0, 0));
  for (int mx = -g; mx <= g; ++mx)
    for (int my = -my_max; my <= my_max; ++my) {
      Complex cm = u(space.index(mx, my));
      if (cm == Complex(0, 0)) continue;
      for (int ny = -my_max; ny <= my_max; ++ny)
        auto_d[my - ny + 2 * my_max] += cm * std::conj(u(space.index(mx, ny)));
    }
  std::vector<double> mass(nc, 0.0);
  for (int r = 0; r < nc; ++r) {
    double acc = 0.0;
    for (int d = -2 * my_max; d <= 2 * my_max; ++d) {
      Complex overlap;
      if (d == 0) {
        overlap = Complex(1.0 / nc, 0.0);
      } else {
        double a = kTwoPi * d / nc;
        overlap = (std::polar(1.0, a * (r + 1)) - std::polar(1.0, a * r)) /
                  Complex(0.0, kTwoPi * d);
      }
      acc += (auto_d[d + 2 * my_max] * overlap).real();
    }
    mass[r] = acc;
  }
  return mass;
}

DecayFit decay_rate(const StripSpace& space, const DielectricMap& map,
                    const Eigen::VectorXcd& u, double r2_threshold) {
  int nc = space.n_cells(), rc = (nc - 1) / 2;
  std::vector<double> mass = row_masses(space, u);

  std::vector<double> xs, ys;
  for (int r = 0; r < nc; ++r) {
    if (map.row_perturbed(r, nc)) continue;
    if (r == 0 || r == nc - 1) continue;  // wrap-around guard
    double m = std::max(mass[r], 1e-300);
    xs.push_back(std::abs(r - rc));
    ys.push_back(std::log(m));
  }
  DecayFit fit;
  if (xs.size() < 3) {
    fit.poor_fit = true;
    return fit;
  }
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  fit.gamma = -0.5 * slope;
  double ss_tot = syy - sy * sy / n;
  double intercept = (sy - slope * sx) / n;
  double ss_res = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (intercept + slope * xs[i]);
    ss_res += e * e;
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.poor_fit = fit.r2 < r2_threshold;
  return fit;
}

OracleResult supercell_eigensolve(const StripSpace& space,
                                  const FormMatrices& forms,
                                  const DielectricMap& map, const GapEdge& gap,
                                  int n_seek, double tol_ess_rel) {
  OracleResult out;
  double tol = tol_ess_rel * (gap.lambda1 - gap.lambda0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es1(
      forms.s1(), Eigen::EigenvaluesOnly);
  if (es1.info() != Eigen::Success)
    throw EigensolverFailure("perturbed supercell pencil");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es0(
      forms.stiffness0_dense(), Eigen::EigenvaluesOnly);
  if (es0.info() != Eigen::Success)
    throw EigensolverFailure("unperturbed supercell pencil");
  out.folded_bulk_spectrum.assign(es0.eigenvalues().data(),
                                  es0.eigenvalues().data() + es0.eigenvalues().size());

  std::vector<int> gap_idx;
  for (Eigen::Index i = 0; i < es1.eigenvalues().size(); ++i) {
    double l = es1.eigenvalues()(i);
    if (l > gap.lambda0 + tol && l < gap.lambda1 - tol) {
      gap_idx.push_back(static_cast<int>(i));
      out.gap_eigenvalues.push_back(l);
      if (static_cast<int>(gap_idx.size()) >= n_seek) break;
    }
  }

  // Eigenvectors by shift-inverted iteration against the already computed
  // eigenvalues (cheaper than a full with-vectors solve at large dims).
  out.eigenvectors.resize(space.dim(), gap_idx.size());
  double scale = forms.s1().cwiseAbs().maxCoeff();
  for (size_t gidx = 0; gidx < gap_idx.size(); ++gidx) {
    double lam = out.gap_eigenvalues[gidx];
    Eigen::MatrixXcd shifted = forms.s1();
    double shift = lam + 1e-9 * scale;
    shifted.diagonal().array() -= shift;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(space.dim());
    v.normalize();
    for (int it = 0; it < 4; ++it) {
      v = lu.solve(v);
      v.normalize();
    }
    double resid = (forms.s1() * v - lam * v).norm() / scale;
    if (resid > 1e-8) {
      // Robust fallback: full solve with vectors.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> esv(forms.s1());
      if (esv.info() != Eigen::Success)
        throw EigensolverFailure("supercell eigenvector fallback");
      v = esv.eigenvectors().col(gap_idx[gidx]);
    }
    out.eigenvectors.col(gidx) = v;
    out.decay.push_back(decay_rate(space, map, v));
  }

  out.min_dist_to_folded = 1e300;
  for (double l : out.gap_eigenvalues)
    for (double f : out.folded_bulk_spectrum)
      out.min_dist_to_folded = std::min(out.min_dist_to_folded, std::abs(l - f));
  if (out.gap_eigenvalues.empty()) out.min_dist_to_folded = 0.0;
  return out;
}

ConvergenceTable convergence_study(const DielectricMap& map, double kx0,
                                   const std::vector<int>& cell_counts,
                                   const std::vector<int>& orders,
                                   const ConvergenceOptions& opt) {
  if (cell_counts.size() < 3 || orders.size() < 3)
    throw std::invalid_argument("convergence study needs >= 3 values per axis");

  ConvergenceTable table;
  PipelineOptions popt;
  popt.k_grid_a = popt.k_grid_b = opt.k_grid;
  popt.n_bands = opt.n_bands;
  popt.edge.fine_grid = opt.fine_grid;

  auto run_one = [&](const char* axis, int n_cells, int order) {
    PipelineResult pr = run_defect_pipeline(map, kx0, n_cells, order, popt);
    auto [space, forms] = build_strip(map, kx0, n_cells, order);
    OracleResult orc = supercell_eigensolve(space, forms, map, pr.edge, 4);
    ConvergenceRow row;
    row.axis = axis;
    row.value = axis == std::string("cells") ? n_cells : order;
    row.crossed = pr.curve.crossing_lambda.has_value();
    row.crossing_lambda = pr.curve.crossing_lambda.value_or(
        std::numeric_limits<double>::quiet_NaN());
    if (orc.gap_eigenvalues.empty()) {
      row.oracle_lambda = std::numeric_limits<double>::quiet_NaN();
    } else if (row.crossed) {
      // pair with the closest oracle eigenvalue
      row.oracle_lambda = orc.gap_eigenvalues.front();
      for (double l : orc.gap_eigenvalues)
        if (std::abs(l - row.crossing_lambda) <
            std::abs(row.oracle_lambda - row.crossing_lambda))
          row.oracle_lambda = l;
    } else {
      row.oracle_lambda = orc.gap_eigenvalues.front();
    }
    row.gap_lower = pr.edge.lambda0;
    row.gap_upper = pr.edge.lambda1;
    table.rows.push_back(row);
    return row;
  };

  std::vector<double> lam_cells, lam_orders;
  for (int nc : cell_counts)
    lam_cells.push_back(run_one("cells", nc, opt.base_order).crossing_lambda);
  for (int g : orders)
    lam_orders.push_back(run_one("order", opt.base_cells, g).crossing_lambda);

  for (size_t i = 0; i + 1 < lam_cells.size(); ++i)
    table.cauchy_cells.push_back(std::abs(lam_cells[i + 1] - lam_cells[i]));
  for (size_t i = 0; i + 1 < lam_orders.size(); ++i)
    table.cauchy_orders.push_back(std::abs(lam_orders[i + 1] - lam_orders[i]));
  return table;
}

}  // namespace gapmode

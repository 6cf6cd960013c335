#ifndef GAPMODE_GEOMETRY_HPP
#define GAPMODE_GEOMETRY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gapmode {

/// Geometry primitive painted onto the unit cell [0,1]^2 by cell-center
/// membership. Later shapes in a list overwrite earlier ones.
struct Shape {
  enum class Kind { Fill, Rect, Disc };
  Kind kind = Kind::Fill;
  double eps = 1.0;
  double cx = 0.5, cy = 0.5;  // center (rect, disc)
  double w = 1.0, h = 1.0;    // rect extents
  double r = 0.25;            // disc radius

  static Shape fill(double eps);
  static Shape rect(double eps, double cx, double cy, double w, double h);
  static Shape disc(double eps, double cx, double cy, double r);
};

struct AssumptionReport {
  bool lower_bound_ok = false;   // (i)  eps_i >= c0 > 0
  bool sign_ok = false;          // (ii) eps1 - eps0 >= 0 everywhere
  bool strict_witness_ok = false;// (iii) some cell with eps1 - eps0 > 0
  double min_eps = 0.0;          // witness for (i)
  int min_cell_ix = -1, min_cell_iy = -1;
  int witness_ix = -1, witness_iy = -1;  // witness for (iii)
  bool all_ok() const { return lower_bound_ok && sign_ok && strict_witness_ok; }
};

/// Sup-norm data entering the localization conditions.
/// inv_diff_sup is the plain sup norm of 1/eps0 - 1/eps1; inv_diff_weighted
/// carries the eps0 weight (sup of 1 - eps0/eps1), which is the constant the
/// operator bounds need in the B0-induced norms (the two coincide when
/// eps0 <= 1). g1_norm_bound bounds the H^-1 -> H^1 norm of the perturbed
/// solution operator; the background one has norm exactly 1 in these norms,
/// recorded as a constant.
struct NormBundle {
  double ratio_sup = 1.0;         // sup eps1/eps0
  double inv_diff_sup = 0.0;      // sup (1/eps0 - 1/eps1)
  double inv_diff_weighted = 0.0; // sup (1 - eps0/eps1), always < 1
  double g1_norm_bound = 1.0;
};

inline constexpr double kG0NormBound = 1.0;

/// Piecewise-constant dielectric data on the unit cell, sampled cell-centered
/// on an N x N grid, plus a defect overlay that replaces the map on a band of
/// supercell rows. Immutable after construction; safe to share across threads.
class DielectricMap {
 public:
  static DielectricMap build(std::span<const Shape> background,
                             std::span<const Shape> defect,
                             int defect_rows, int resolution);

  /// Direct construction from sample arrays (row-major ix*N+iy); applies the
  /// same invariant checks as build().
  static DielectricMap from_samples(std::vector<double> eps0,
                                    std::vector<double> eps1, int defect_rows,
                                    int resolution);

  int resolution() const { return n_; }
  int defect_rows() const { return defect_rows_; }
  double c0() const { return c0_; }

  double eps0(int ix, int iy) const { return eps0_[idx(ix, iy)]; }
  double eps1(int ix, int iy) const { return eps1_[idx(ix, iy)]; }
  const std::vector<double>& eps0_samples() const { return eps0_; }
  const std::vector<double>& eps1_samples() const { return eps1_; }

  bool cell_perturbed(int ix, int iy) const {
    return eps1_[idx(ix, iy)] != eps0_[idx(ix, iy)];
  }
  int perturbed_cell_count() const;

  /// Rows of an n_cells supercell carrying the overlay, centered on the
  /// middle row. Empty when defect_rows == 0.
  bool row_perturbed(int row, int n_cells) const;

  AssumptionReport validate_assumptions() const;
  NormBundle compute_norms() const;

 private:
  DielectricMap() = default;
  int idx(int ix, int iy) const { return ix * n_ + iy; }

  int n_ = 0;
  int defect_rows_ = 0;
  double c0_ = 0.0;
  std::vector<double> eps0_, eps1_;
};

}  // namespace gapmode

#endif

#include "gapmode/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gapmode/errors.hpp"

namespace gapmode {

Shape Shape::fill(double eps) {
  Shape s;
  s.kind = Kind::Fill;
  s.eps = eps;
  return s;
}

Shape Shape::rect(double eps, double cx, double cy, double w, double h) {
  Shape s;
  s.kind = Kind::Rect;
  s.eps = eps;
  s.cx = cx;
  s.cy = cy;
  s.w = w;
  s.h = h;
  return s;
}

Shape Shape::disc(double eps, double cx, double cy, double r) {
  Shape s;
  s.kind = Kind::Disc;
  s.eps = eps;
  s.cx = cx;
  s.cy = cy;
  s.r = r;
  return s;
}

namespace {

// Cell-center membership; rect edges are half-open [lo, hi) so rasterization
// is deterministic when an edge lands exactly on a center.
bool contains(const Shape& s, double x, double y) {
  switch (s.kind) {
    case Shape::Kind::Fill:
      return true;
    case Shape::Kind::Rect:
      return x >= s.cx - s.w / 2 && x < s.cx + s.w / 2 &&
             y >= s.cy - s.h / 2 && y < s.cy + s.h / 2;
    case Shape::Kind::Disc: {
      double dx = x - s.cx, dy = y - s.cy;
      return dx * dx + dy * dy < s.r * s.r;
    }
  }
  return false;
}

std::vector<double> rasterize(std::span<const Shape> shapes, int n,
                              const std::vector<double>* base) {
  std::vector<double> out;
  if (base) {
    out = *base;
  } else {
    out.assign(static_cast<size_t>(n) * n,
               -std::numeric_limits<double>::infinity());
  }
  for (const Shape& s : shapes) {
    if (!(s.eps > 0.0))
      throw NonPositiveEpsilon("shape has eps = " + std::to_string(s.eps));
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy) {
        double x = (ix + 0.5) / n, y = (iy + 0.5) / n;
        if (contains(s, x, y)) out[static_cast<size_t>(ix) * n + iy] = s.eps;
      }
  }
  return out;
}

}  // namespace

DielectricMap DielectricMap::build(std::span<const Shape> background,
                                   std::span<const Shape> defect,
                                   int defect_rows, int resolution) {
  if (resolution < 4)
    throw ConfigError("lattice_resolution must be >= 4, got " +
                      std::to_string(resolution));
  if (defect_rows < 0) throw ConfigError("defect rows must be >= 0");

  DielectricMap m;
  m.n_ = resolution;
  m.defect_rows_ = defect_rows;
  m.eps0_ = rasterize(background, resolution, nullptr);
  for (double v : m.eps0_)
    if (!(v > 0.0))
      throw NonPositiveEpsilon(
          "background shapes leave cells uncovered or non-positive; start "
          "the list with a \"fill\" shape");

  if (defect_rows > 0 && !defect.empty()) {
    m.eps1_ = rasterize(defect, resolution, &m.eps0_);
  } else {
    m.eps1_ = m.eps0_;
  }
  for (size_t i = 0; i < m.eps1_.size(); ++i) {
    if (!(m.eps1_[i] > 0.0))
      throw NonPositiveEpsilon("defect overlay produced non-positive eps");
    if (m.eps1_[i] < m.eps0_[i])
      throw DefectSignViolation(
          "eps1 < eps0 at cell " + std::to_string(i) +
          " (perturbation must be nonnegative)");
  }
  m.c0_ = *std::min_element(m.eps0_.begin(), m.eps0_.end());
  m.c0_ = std::min(m.c0_, *std::min_element(m.eps1_.begin(), m.eps1_.end()));
  return m;
}

DielectricMap DielectricMap::from_samples(std::vector<double> eps0,
                                          std::vector<double> eps1,
                                          int defect_rows, int resolution) {
  if (resolution < 4) throw ConfigError("resolution must be >= 4");
  if (eps0.size() != static_cast<size_t>(resolution) * resolution ||
      eps1.size() != eps0.size())
    throw ConfigError("sample arrays do not match resolution");
  DielectricMap m;
  m.n_ = resolution;
  m.defect_rows_ = defect_rows;
  m.eps0_ = std::move(eps0);
  m.eps1_ = std::move(eps1);
  for (size_t i = 0; i < m.eps0_.size(); ++i) {
    if (!(m.eps0_[i] > 0.0) || !(m.eps1_[i] > 0.0))
      throw NonPositiveEpsilon("sample " + std::to_string(i));
    if (m.eps1_[i] < m.eps0_[i])
      throw DefectSignViolation("eps1 < eps0 at sample " + std::to_string(i));
  }
  m.c0_ = *std::min_element(m.eps0_.begin(), m.eps0_.end());
  m.c0_ = std::min(m.c0_, *std::min_element(m.eps1_.begin(), m.eps1_.end()));
  return m;
}

int DielectricMap::perturbed_cell_count() const {
  int count = 0;
  for (size_t i = 0; i < eps0_.size(); ++i)
    if (eps1_[i] != eps0_[i]) ++count;
  return count;
}

bool DielectricMap::row_perturbed(int row, int n_cells) const {
  if (defect_rows_ == 0) return false;
  int rc = (n_cells - 1) / 2;
  int lo = rc - (defect_rows_ - 1) / 2;
  return row >= lo && row <= lo + defect_rows_ - 1;
}

AssumptionReport DielectricMap::validate_assumptions() const {
  AssumptionReport r;
  r.min_eps = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < n_; ++ix)
    for (int iy = 0; iy < n_; ++iy) {
      double v = std::min(eps0(ix, iy), eps1(ix, iy));
      if (v < r.min_eps) {
        r.min_eps = v;
        r.min_cell_ix = ix;
        r.min_cell_iy = iy;
      }
      if (eps1(ix, iy) > eps0(ix, iy) && r.witness_ix < 0) {
        r.witness_ix = ix;
        r.witness_iy = iy;
      }
    }
  r.lower_bound_ok = r.min_eps > 0.0;
  r.sign_ok = true;  // enforced at build
  r.strict_witness_ok = r.witness_ix >= 0;
  return r;
}

NormBundle DielectricMap::compute_norms() const {
  NormBundle nb;
  nb.ratio_sup = 1.0;
  nb.inv_diff_sup = 0.0;
  nb.inv_diff_weighted = 0.0;
  for (size_t i = 0; i < eps0_.size(); ++i) {
    nb.ratio_sup = std::max(nb.ratio_sup, eps1_[i] / eps0_[i]);
    nb.inv_diff_sup = std::max(nb.inv_diff_sup, 1.0 / eps0_[i] - 1.0 / eps1_[i]);
    nb.inv_diff_weighted =
        std::max(nb.inv_diff_weighted, 1.0 - eps0_[i] / eps1_[i]);
  }
  double delta = nb.inv_diff_weighted;
  nb.g1_norm_bound = nb.ratio_sup;
  if (delta * kG0NormBound < 1.0)
    nb.g1_norm_bound =
        std::min(nb.ratio_sup, kG0NormBound / (1.0 - delta * kG0NormBound));
  return nb;
}

}  // namespace gapmode

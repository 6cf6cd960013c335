#ifndef GAPMODE_PLANEWAVE_HPP
#define GAPMODE_PLANEWAVE_HPP

#include <complex>
#include <utility>
#include <vector>

namespace gapmode {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Fourier index set m in {-G..G}^2, enumerated row-major over (m_x, m_y).
struct PlaneWaveBasis {
  int half_order = 0;

  explicit PlaneWaveBasis(int G) : half_order(G) {}
  int side() const { return 2 * half_order + 1; }
  int dim() const { return side() * side(); }
  int index(int mx, int my) const {
    return (mx + half_order) * side() + (my + half_order);
  }
  std::pair<int, int> mode(int idx) const {
    return {idx / side() - half_order, idx % side() - half_order};
  }
};

/// Discrete Fourier coefficients of a real sample field on an nx x ny
/// cell-centered grid with periods (1, period_y):
///   coeff(g) = (1/(nx*ny)) * sum_s f(x_s) exp(-i*(2*pi*gx*x + (2*pi*gy/period_y)*y)).
/// Exact (alias-free) for |gx| <= nx/2 - 1, |gy| <= ny/2 - 1 in the sense of
/// the trigonometric interpolant of the samples.
class FourierTable {
 public:
  FourierTable(const std::vector<double>& samples, int nx, int ny,
               double period_y, int max_gx, int max_gy);

  Complex coeff(int gx, int gy) const;
  int max_gx() const { return max_gx_; }
  int max_gy() const { return max_gy_; }

 private:
  int max_gx_ = 0, max_gy_ = 0;
  std::vector<Complex> c_;
};

}  // namespace gapmode

#endif

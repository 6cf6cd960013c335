#include "gapmode/planewave.hpp"

#include <cmath>
#include <string>

#include "gapmode/errors.hpp"

namespace gapmode {

FourierTable::FourierTable(const std::vector<double>& samples, int nx, int ny,
                           double period_y, int max_gx, int max_gy)
    : max_gx_(max_gx), max_gy_(max_gy) {
  if (static_cast<size_t>(nx) * ny != samples.size())
    throw IndexOutOfRange("sample count does not match grid");
  if (2 * max_gx >= nx || 2 * max_gy >= ny)
    throw ResolutionMismatch(
        "sample grid too coarse for requested Fourier content (aliasing "
        "guard): nx=" + std::to_string(nx) + " ny=" + std::to_string(ny) +
        " gx=" + std::to_string(max_gx) + " gy=" + std::to_string(max_gy));

  // Separable DFT: contract x first, then y. Samples are row-major (ix*ny+iy).
  int sx = 2 * max_gx + 1, sy = 2 * max_gy + 1;
  std::vector<Complex> partial(static_cast<size_t>(sx) * ny);
  for (int gx = -max_gx; gx <= max_gx; ++gx) {
    for (int iy = 0; iy < ny; ++iy) {
      Complex acc(0, 0);
      for (int ix = 0; ix < nx; ++ix) {
        double x = (ix + 0.5) / nx;
        acc += samples[static_cast<size_t>(ix) * ny + iy] *
               std::polar(1.0, -kTwoPi * gx * x);
      }
      partial[static_cast<size_t>(gx + max_gx) * ny + iy] = acc;
    }
  }
  c_.assign(static_cast<size_t>(sx) * sy, Complex(0, 0));
  for (int gx = -max_gx; gx <= max_gx; ++gx)
    for (int gy = -max_gy; gy <= max_gy; ++gy) {
      Complex acc(0, 0);
      for (int iy = 0; iy < ny; ++iy) {
        double y = (iy + 0.5) * period_y / ny;
        acc += partial[static_cast<size_t>(gx + max_gx) * ny + iy] *
               std::polar(1.0, -kTwoPi * gy * y / period_y);
      }
      c_[static_cast<size_t>(gx + max_gx) * sy + (gy + max_gy)] =
          acc / double(static_cast<size_t>(nx) * ny);
    }
}

Complex FourierTable::coeff(int gx, int gy) const {
  if (std::abs(gx) > max_gx_ || std::abs(gy) > max_gy_)
    throw IndexOutOfRange("Fourier index (" + std::to_string(gx) + "," +
                          std::to_string(gy) + ") outside table");
  return c_[static_cast<size_t>(gx + max_gx_) * (2 * max_gy_ + 1) +
            (gy + max_gy_)];
}

}  // namespace gapmode

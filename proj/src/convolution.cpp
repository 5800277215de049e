#include "fourier_ns/convolution.hpp"

#include <cmath>
#include <stdexcept>

namespace fourier_ns {

int fft_grid_size(double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("fft_grid_size: negative radius");
  int n = 4 * int(std::ceil(radius)) + 1;
  for (;; ++n) {
    int m = n;
    for (int f : {2, 3, 5})
      while (m % f == 0) m /= f;
    if (m == 1) return n;
  }
}

}  // namespace fourier_ns

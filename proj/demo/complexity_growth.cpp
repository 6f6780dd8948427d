// Complexity of a pure-state and a mixed-state geodesic with matched angular data.
#include <cmath>
#include <cstdio>

#include "qgeo/complexity.hpp"

int main() {
  using namespace qgeo;
  const ComplexityParams p{0.0, 0.5, 0.6, 0.0};
  std::printf("tau,C_FS,C_Sj,ratio_over_tau\n");
  for (double tau = 10.0; tau <= 1e4; tau *= std::sqrt(10.0)) {
    const double c_fs = igc_fs_closed(p.c_fs, tau);
    const double c_sj = igc_sjoqvist_closed(p.c_fs, p.omega(), tau);
    std::printf("%.6g,%.12g,%.12g,%.12g\n", tau, c_fs, c_sj,
                igc_sjoqvist_asymptotic(p.c_fs, p.omega(), tau) / c_fs / tau);
  }
  std::printf("# limit omega/2 = %.12g\n", 0.5 * p.omega());
}

// Spin-1/2 precession under H = hbar omega0 sigma_z, printed as Bloch angles.
#include <cstdio>

#include "qgeo/states.hpp"

int main() {
  using namespace qgeo;
  const double omega0 = 1.0;
  std::printf("t,theta,phi\n");
  for (int i = 0; i <= 16; ++i) {
    const double t = i * pi / 16.0;
    const BlochPoint b = precession_demo(pi / 2.0, 0.0, omega0, t);
    std::printf("%.6f,%.12f,%.12f\n", t, b.theta(), b.phi());
  }
}

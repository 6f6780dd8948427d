#pragma once

#include <array>
#include <cmath>

#include "qgeo/common.hpp"

namespace qgeo {

template <int D>
using Vec = std::array<double, D>;
template <int D>
using Mat = std::array<Vec<D>, D>;
/// Index order [k][i][j], e.g. Gamma^k_ij.
template <int D>
using Rank3 = std::array<Mat<D>, D>;
template <int D>
using Rank4 = std::array<Rank3<D>, D>;

template <int D>
Mat<D> zero_mat() {
  Mat<D> m{};
  return m;
}

template <int D>
double determinant(const Mat<D>& m) {
  static_assert(D == 2 || D == 3);
  if constexpr (D == 2) {
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  } else {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  }
}

template <int D>
Mat<D> inverse(const Mat<D>& m) {
  static_assert(D == 2 || D == 3);
  const double det = determinant<D>(m);
  if (det == 0.0) throw DomainError("singular metric: coordinate singularity");
  Mat<D> inv{};
  if constexpr (D == 2) {
    inv[0][0] = m[1][1] / det;
    inv[0][1] = -m[0][1] / det;
    inv[1][0] = -m[1][0] / det;
    inv[1][1] = m[0][0] / det;
  } else {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3;
        const int j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        inv[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / det;
      }
    }
  }
  return inv;
}

template <int D>
double quadratic_form(const Mat<D>& g, const Vec<D>& a, const Vec<D>& b) {
  double s = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) s += g[i][j] * a[i] * b[j];
  return s;
}

}  // namespace qgeo

#pragma once

#include <initializer_list>

#include "e0/model_io.hpp"

namespace th {

using e0::Matrix;
using e0::cplx;

inline Matrix diag(std::initializer_list<double> d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

inline Matrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) { return e0::matrix_unit(n, i, j); }

inline e0::Projection proj(const Matrix& m) { return e0::Projection::from_matrix(m, {}); }

// Random Hermitian and general matrices from a fixed sampler.
inline Matrix random_matrix(e0::Sampler& rng, Eigen::Index n) {
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  return m;
}

inline Matrix random_hermitian(e0::Sampler& rng, Eigen::Index n) {
  const Matrix m = random_matrix(rng, n);
  return 0.5 * (m + m.adjoint());
}

// Random element of the algebra: Gaussian combination of basis elements.
inline Matrix random_element(e0::Sampler& rng, const e0::StarAlgebra& s) {
  e0::Vector c(s.dim());
  for (Eigen::Index k = 0; k < s.dim(); ++k) c(k) = rng.complex_normal();
  return s.from_coordinates(c);
}

}  // namespace th

#include "freespec/random.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace freespec {

CMatrix random_complex_matrix(Rng& rng, int rows, int cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = n(rng);
      const double im = n(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

HermitianMatrix random_hermitian(Rng& rng, int n) {
  return HermitianMatrix::from_symmetrized(random_complex_matrix(rng, n, n));
}

HermitianMatrix random_psd(Rng& rng, int n, int rank) {
  const CMatrix g = random_complex_matrix(rng, n, rank < 0 ? n : rank);
  return HermitianMatrix::from_symmetrized(g * g.adjoint() / n);
}

CMatrix random_unitary(Rng& rng, int n) {
  const CMatrix g = random_complex_matrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    if (std::abs(d) > 0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

CVector random_unit_vector(Rng& rng, int n) {
  return random_complex_matrix(rng, n, 1).col(0).normalized();
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

PolyhedralCone random_simplex_cone(Rng& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  while (true) {
    RMatrix g = RMatrix::Identity(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) g(i, j) += 0.4 * n(rng);
    Eigen::JacobiSVD<RMatrix> svd(g);
    const auto& s = svd.singularValues();
    if (s(d - 1) < 0.2 * s(0)) continue;
    RVector lambda(d);
    for (int k = 0; k < d; ++k) lambda(k) = uniform(rng, 0.5, 1.5);
    std::vector<RVector> gens;
    for (int k = 0; k < d; ++k) gens.push_back(g.col(k));
    return PolyhedralCone::from_generators(gens, g * lambda);
  }
}

}  // namespace freespec

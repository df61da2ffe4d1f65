// Dense complex Hermitian linear algebra shared by every other module.
#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace freespec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction checks the Hermitian property to a relative tolerance and
/// then symmetrizes exactly, so every stored value satisfies
/// `m(i,j) == conj(m(j,i))` bit for bit.
class HermitianMatrix {
 public:
  static constexpr double kConstructionTol = 1e-12;

  HermitianMatrix() = default;
  explicit HermitianMatrix(const CMatrix& m, double tol = kConstructionTol);
  explicit HermitianMatrix(const RMatrix& m, double tol = kConstructionTol);

  static HermitianMatrix zero(int n);
  static HermitianMatrix identity(int n);
  static HermitianMatrix diagonal(const RVector& d);
  /// Skips validation; the caller guarantees the input is Hermitian up to
  /// rounding. The result is still symmetrized.
  static HermitianMatrix from_symmetrized(const CMatrix& m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

  double frobenius_norm() const { return m_.norm(); }
  double trace() const { return m_.trace().real(); }
  bool is_zero(double tol = 0.0) const;

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator-() const;
  HermitianMatrix operator*(double s) const;
  HermitianMatrix& operator+=(const HermitianMatrix& o);

  /// V* A V for a rectangular V (rows = dim()).
  HermitianMatrix congruence(const CMatrix& v) const;
  /// Entrywise complex conjugate, equal to the transpose.
  HermitianMatrix conjugate() const;

  friend bool operator==(const HermitianMatrix& a, const HermitianMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  CMatrix m_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& a) { return a * s; }

struct EigenDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // unitary, columns match eigenvalues
};

EigenDecomposition eigh(const HermitianMatrix& a);
double min_eigenvalue(const HermitianMatrix& a);
double max_eigenvalue(const HermitianMatrix& a);
RVector eigenvalues(const HermitianMatrix& a);

/// min_eigenvalue(a) >= -tol * (1 + ||a||_F).
bool is_psd(const HermitianMatrix& a, double tol);

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b);
CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Real inner product <A,B> = Re tr(B* A).
double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b);

/// Functions of a positive semidefinite matrix via its spectrum.
HermitianMatrix psd_sqrt(const HermitianMatrix& a);
/// Throws InvalidArgument unless min eigenvalue exceeds `floor`.
HermitianMatrix pd_inverse_sqrt(const HermitianMatrix& a, double floor = 0.0);

double commutator_norm(const HermitianMatrix& a, const HermitianMatrix& b);

/// Partial transpose on the second tensor factor of a (da*db)-dimensional matrix.
HermitianMatrix partial_transpose_second(const HermitianMatrix& x, int da, int db);

/// Orthonormal basis of Her_n(C) under trace_inner: n real diagonal units,
/// then (E_ij + E_ji)/sqrt2 and i(E_ji - E_ij)/sqrt2 for i<j. n*n elements.
std::vector<HermitianMatrix> hermitian_basis(int n);

/// Coordinates of a in hermitian_basis(a.dim()).
RVector hermitian_coordinates(const HermitianMatrix& a);
HermitianMatrix from_hermitian_coordinates(const RVector& c, int n);

namespace pauli {
HermitianMatrix identity();
HermitianMatrix x();
HermitianMatrix y();
HermitianMatrix z();
}  // namespace pauli

}  // namespace freespec

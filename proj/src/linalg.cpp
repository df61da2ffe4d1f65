#include "freespec/linalg.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace freespec {

namespace {

void require_square(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("matrix is " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()) + ", expected square");
  }
}

CMatrix symmetrize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  require_square(m);
  const double skew = (m - m.adjoint()).norm();
  if (skew > tol * (1.0 + m.norm())) {
    throw InvalidArgument("not Hermitian: ||A - A*||_F = " + std::to_string(skew));
  }
  m_ = symmetrize(m);
}

HermitianMatrix::HermitianMatrix(const RMatrix& m, double tol)
    : HermitianMatrix(CMatrix(m.cast<Complex>()), tol) {}

HermitianMatrix HermitianMatrix::zero(int n) {
  HermitianMatrix h;
  h.m_ = CMatrix::Zero(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::identity(int n) {
  HermitianMatrix h;
  h.m_ = CMatrix::Identity(n, n);
  return h;
}

HermitianMatrix HermitianMatrix::diagonal(const RVector& d) {
  HermitianMatrix h;
  h.m_ = d.cast<Complex>().asDiagonal();
  return h;
}

HermitianMatrix HermitianMatrix::from_symmetrized(const CMatrix& m) {
  require_square(m);
  HermitianMatrix h;
  h.m_ = symmetrize(m);
  return h;
}

bool HermitianMatrix::is_zero(double tol) const {
  return m_.size() == 0 || m_.cwiseAbs().maxCoeff() <= tol;
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("sum of Hermitian matrices of different size");
  HermitianMatrix h;
  h.m_ = m_ + o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("difference of Hermitian matrices of different size");
  HermitianMatrix h;
  h.m_ = m_ - o.m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator-() const {
  HermitianMatrix h;
  h.m_ = -m_;
  return h;
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  HermitianMatrix h;
  h.m_ = s * m_;
  return h;
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  if (dim() != o.dim()) throw DimensionMismatch("sum of Hermitian matrices of different size");
  m_ += o.m_;
  return *this;
}

HermitianMatrix HermitianMatrix::congruence(const CMatrix& v) const {
  if (v.rows() != m_.rows()) throw DimensionMismatch("congruence: V has wrong row count");
  return from_symmetrized(v.adjoint() * m_ * v);
}

HermitianMatrix HermitianMatrix::conjugate() const {
  HermitianMatrix h;
  h.m_ = m_.conjugate();
  return h;
}

EigenDecomposition eigh(const HermitianMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix());
  EigenDecomposition out{es.eigenvalues(), es.eigenvectors()};
  // Phase convention: first component of non-negligible modulus is real positive.
  for (int k = 0; k < out.eigenvectors.cols(); ++k) {
    auto col = out.eigenvectors.col(k);
    for (int i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) > 1e-12) {
        col *= std::conj(col(i)) / std::abs(col(i));
        col(i) = std::abs(col(i));
        break;
      }
    }
  }
  return out;
}

RVector eigenvalues(const HermitianMatrix& a) {
  if (a.dim() == 0) return RVector();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a.matrix(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const HermitianMatrix& a) {
  if (a.dim() == 1) return a(0, 0).real();
  return eigenvalues(a).minCoeff();
}

double max_eigenvalue(const HermitianMatrix& a) {
  if (a.dim() == 1) return a(0, 0).real();
  return eigenvalues(a).maxCoeff();
}

bool is_psd(const HermitianMatrix& a, double tol) {
  if (a.dim() == 0) return true;
  return min_eigenvalue(a) >= -tol * (1.0 + a.frobenius_norm());
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix::from_symmetrized(kron(a.matrix(), b.matrix()));
}

double trace_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("trace_inner: " + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  // Re tr(B* A) = sum_ij Re(conj(B_ij) A_ij)
  return (b.matrix().conjugate().cwiseProduct(a.matrix())).sum().real();
}

HermitianMatrix psd_sqrt(const HermitianMatrix& a) {
  const auto ed = eigh(a);
  const RVector s = ed.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix::from_symmetrized(ed.eigenvectors * s.cast<Complex>().asDiagonal() *
                                           ed.eigenvectors.adjoint());
}

HermitianMatrix pd_inverse_sqrt(const HermitianMatrix& a, double floor) {
  const auto ed = eigh(a);
  if (ed.eigenvalues.size() > 0 && ed.eigenvalues.minCoeff() <= floor) {
    throw InvalidArgument("matrix is not positive definite (min eigenvalue " +
                          std::to_string(ed.eigenvalues.minCoeff()) + ")");
  }
  const RVector s = ed.eigenvalues.cwiseSqrt().cwiseInverse();
  return HermitianMatrix::from_symmetrized(ed.eigenvectors * s.cast<Complex>().asDiagonal() *
                                           ed.eigenvectors.adjoint());
}

double commutator_norm(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("commutator of different sizes");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

HermitianMatrix partial_transpose_second(const HermitianMatrix& x, int da, int db) {
  if (x.dim() != da * db) throw DimensionMismatch("partial transpose: dimension is not da*db");
  CMatrix out(x.dim(), x.dim());
  for (int i = 0; i < da; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k)
        for (int l = 0; l < db; ++l) out(i * db + j, k * db + l) = x(i * db + l, k * db + j);
  return HermitianMatrix::from_symmetrized(out);
}

std::vector<HermitianMatrix> hermitian_basis(int n) {
  std::vector<HermitianMatrix> basis;
  basis.reserve(static_cast<size_t>(n) * n);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, i) = 1.0;
    basis.push_back(HermitianMatrix::from_symmetrized(e));
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      CMatrix e = CMatrix::Zero(n, n);
      e(i, j) = r;
      e(j, i) = r;
      basis.push_back(HermitianMatrix::from_symmetrized(e));
      CMatrix f = CMatrix::Zero(n, n);
      f(i, j) = Complex(0.0, -r);
      f(j, i) = Complex(0.0, r);
      basis.push_back(HermitianMatrix::from_symmetrized(f));
    }
  }
  return basis;
}

RVector hermitian_coordinates(const HermitianMatrix& a) {
  const int n = a.dim();
  RVector c(n * n);
  const double s = std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) c(k++) = a(i, i).real();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      c(k++) = s * a(i, j).real();
      // <f, A> with f(i,j) = -i/sqrt2: Re(-i/sqrt2 * A_ji + i/sqrt2 * A_ij)
      c(k++) = -s * a(i, j).imag();
    }
  }
  return c;
}

HermitianMatrix from_hermitian_coordinates(const RVector& c, int n) {
  if (c.size() != n * n) throw DimensionMismatch("hermitian coordinate vector has wrong length");
  CMatrix m = CMatrix::Zero(n, n);
  const double r = 1.0 / std::sqrt(2.0);
  int k = 0;
  for (int i = 0; i < n; ++i) m(i, i) = c(k++);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double re = r * c(k++);
      const double im = -r * c(k++);
      m(i, j) = Complex(re, im);
      m(j, i) = Complex(re, -im);
    }
  }
  return HermitianMatrix::from_symmetrized(m);
}

namespace pauli {

HermitianMatrix identity() { return HermitianMatrix::identity(2); }

HermitianMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianMatrix(m);
}

HermitianMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianMatrix(m);
}

HermitianMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianMatrix(m);
}

}  // namespace pauli

}  // namespace freespec

#include "freespec/pencil.hpp"

#include <cmath>

#include <Eigen/LU>

#include "log.hpp"

namespace freespec {

MatrixTuple::MatrixTuple(std::vector<HermitianMatrix> entries) : entries_(std::move(entries)) {
  for (const auto& e : entries_)
    if (e.dim() != entries_[0].dim()) throw DimensionMismatch("tuple entries must share one size");
}

MatrixTuple MatrixTuple::scalar(const RVector& x) {
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < x.size(); ++i) e.push_back(HermitianMatrix::identity(1) * x(i));
  return MatrixTuple(std::move(e));
}

MatrixTuple MatrixTuple::unit(const RVector& u, int s) {
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < u.size(); ++i) e.push_back(HermitianMatrix::identity(s) * u(i));
  return MatrixTuple(std::move(e));
}

MatrixTuple MatrixTuple::congruence(const CMatrix& v) const {
  std::vector<HermitianMatrix> e;
  for (const auto& a : entries_) e.push_back(a.congruence(v));
  return MatrixTuple(std::move(e));
}

MatrixTuple MatrixTuple::transform(const RMatrix& t) const {
  if (t.cols() != d()) throw DimensionMismatch("transform has wrong column count");
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < t.rows(); ++i) {
    HermitianMatrix acc = HermitianMatrix::zero(s());
    for (int j = 0; j < d(); ++j)
      if (t(i, j) != 0.0) acc += t(i, j) * entries_[j];
    e.push_back(acc);
  }
  return MatrixTuple(std::move(e));
}

MatrixTuple MatrixTuple::direct_sum(const MatrixTuple& o) const {
  if (o.d() != d()) throw DimensionMismatch("direct sum of tuples of different length");
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < d(); ++i) {
    CMatrix m = CMatrix::Zero(s() + o.s(), s() + o.s());
    m.topLeftCorner(s(), s()) = entries_[i].matrix();
    m.bottomRightCorner(o.s(), o.s()) = o[i].matrix();
    e.push_back(HermitianMatrix::from_symmetrized(m));
  }
  return MatrixTuple(std::move(e));
}

MatrixTuple MatrixTuple::scaled(double c) const {
  std::vector<HermitianMatrix> e;
  for (const auto& a : entries_) e.push_back(a * c);
  return MatrixTuple(std::move(e));
}

LinearPencil::LinearPencil(std::vector<HermitianMatrix> matrices, RVector unit)
    : matrices_(std::move(matrices)), unit_(std::move(unit)) {
  if (matrices_.empty()) throw InvalidArgument("pencil needs at least one matrix");
  if (unit_.size() != d())
    throw DimensionMismatch("unit has length " + std::to_string(unit_.size()) + " but pencil has " +
                            std::to_string(d()) + " matrices");
  const int n = matrices_[0].dim();
  for (const auto& m : matrices_)
    if (m.dim() != n) throw DimensionMismatch("pencil matrices must share one size");
  HermitianMatrix s = HermitianMatrix::zero(n);
  for (int i = 0; i < d(); ++i) s += unit_(i) * matrices_[i];
  const double drift = (s - HermitianMatrix::identity(n)).frobenius_norm();
  if (drift > kUnitTol)
    throw InvalidArgument("order unit violated: ||sum u_i M_i - I||_F = " + std::to_string(drift));
  if (drift > 0.0) {
    const CMatrix w = pd_inverse_sqrt(s).matrix();
    for (auto& m : matrices_) m = m.congruence(w);
  }
  RMatrix coords(n * n, d());
  for (int i = 0; i < d(); ++i) coords.col(i) = hermitian_coordinates(matrices_[i]);
  Eigen::FullPivLU<RMatrix> lu(coords);
  lu.setThreshold(1e-10);
  independent_ = lu.rank() == d();
  if (!independent_) detail::logger().debug("pencil matrices are linearly dependent");
}

HermitianMatrix evaluate(const LinearPencil& p, const MatrixTuple& a) {
  if (p.d() != a.d())
    throw DimensionMismatch("pencil has " + std::to_string(p.d()) + " variables, tuple has " +
                            std::to_string(a.d()));
  CMatrix out = CMatrix::Zero(p.r() * a.s(), p.r() * a.s());
  for (int i = 0; i < p.d(); ++i) out += kron(p[i].matrix(), a[i].matrix());
  return HermitianMatrix::from_symmetrized(out);
}

const char* to_string(Membership m) {
  switch (m) {
    case Membership::Inside: return "Inside";
    case Membership::Boundary: return "Boundary";
    case Membership::Outside: return "Outside";
  }
  return "?";
}

MembershipResult classify(double min_eig, double tol) {
  MembershipResult r;
  r.margin = min_eig;
  if (min_eig >= tol) {
    r.kind = Membership::Inside;
  } else if (min_eig <= -tol) {
    r.kind = Membership::Outside;
  } else {
    r.kind = Membership::Boundary;
  }
  return r;
}

MembershipResult membership(const LinearPencil& p, const MatrixTuple& a, double tol) {
  return classify(min_eigenvalue(evaluate(p, a)), tol);
}

LinearPencil diagonal_pencil(const PolyhedralCone& c) {
  const int k = static_cast<int>(c.facets().size());
  std::vector<HermitianMatrix> ms;
  for (int i = 0; i < c.dim(); ++i) {
    RVector diag(k);
    for (int f = 0; f < k; ++f) diag(f) = c.facets()[f](i);
    ms.push_back(HermitianMatrix::diagonal(diag));
  }
  return LinearPencil(std::move(ms), c.unit());
}

LinearPencil calpha_pencil(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.5707963267948966))
    throw InvalidArgument("alpha must lie in (0, pi/2)");
  RVector u(3);
  u << 0, 0, 1;
  return LinearPencil({std::sin(alpha) * pauli::z(), std::cos(alpha) * pauli::x(), pauli::identity()}, u);
}

LinearPencil circular_pencil() {
  RVector u(3);
  u << 0, 0, 1;
  return LinearPencil({pauli::z(), pauli::x(), pauli::identity()}, u);
}

}  // namespace freespec

// Linear matrix pencils, matrix tuples, and level-s membership.
#pragma once

#include <vector>

#include "freespec/cones.hpp"
#include "freespec/linalg.hpp"

namespace freespec {

/// A = (A_1, ..., A_d), all entries of a common size s.
class MatrixTuple {
 public:
  explicit MatrixTuple(std::vector<HermitianMatrix> entries);

  /// Level-1 tuple of a point of R^d.
  static MatrixTuple scalar(const RVector& x);
  /// u ⊗ I_s.
  static MatrixTuple unit(const RVector& u, int s);

  int d() const { return static_cast<int>(entries_.size()); }
  int s() const { return entries_.empty() ? 0 : entries_[0].dim(); }
  const HermitianMatrix& operator[](int i) const { return entries_[i]; }
  const std::vector<HermitianMatrix>& entries() const { return entries_; }

  /// (V* A_1 V, ..., V* A_d V) for V with s rows.
  MatrixTuple congruence(const CMatrix& v) const;
  /// (T ⊗ id)(A): entry i becomes sum_j T_ij A_j.
  MatrixTuple transform(const RMatrix& t) const;
  /// Block-diagonal sum, level s + t.
  MatrixTuple direct_sum(const MatrixTuple& o) const;
  MatrixTuple scaled(double c) const;

  friend bool operator==(const MatrixTuple& a, const MatrixTuple& b) { return a.entries_ == b.entries_; }

 private:
  std::vector<HermitianMatrix> entries_;
};

/// M_1, ..., M_d of size r with sum_i u_i M_i = I_r.
class LinearPencil {
 public:
  static constexpr double kUnitTol = 1e-8;

  /// Rejects ||sum u_i M_i - I||_F > kUnitTol ("order unit violated");
  /// smaller drift is removed by congruence with (sum u_i M_i)^{-1/2}.
  LinearPencil(std::vector<HermitianMatrix> matrices, RVector unit);

  int d() const { return static_cast<int>(matrices_.size()); }
  int r() const { return matrices_.empty() ? 0 : matrices_[0].dim(); }
  const std::vector<HermitianMatrix>& matrices() const { return matrices_; }
  const HermitianMatrix& operator[](int i) const { return matrices_[i]; }
  const RVector& unit() const { return unit_; }
  /// False when the M_i are linearly dependent (the cut-out cone is not salient).
  bool linearly_independent() const { return independent_; }

 private:
  std::vector<HermitianMatrix> matrices_;
  RVector unit_;
  bool independent_ = true;
};

/// sum_i M_i ⊗ A_i, size r*s.
HermitianMatrix evaluate(const LinearPencil& p, const MatrixTuple& a);

enum class Membership { Inside, Boundary, Outside };
const char* to_string(Membership m);

/// Absolute band on the minimum eigenvalue used for Boundary.
inline constexpr double kBoundaryTol = 1e-8;

struct MembershipResult {
  Membership kind = Membership::Outside;
  double margin = 0.0;
};

/// Classify by the minimum eigenvalue of a Hermitian matrix.
MembershipResult classify(double min_eig, double tol);

MembershipResult membership(const LinearPencil& p, const MatrixTuple& a, double tol = kBoundaryTol);

/// M_i = diag(l_1(e_i), ..., l_k(e_i)) over the facets of c.
LinearPencil diagonal_pencil(const PolyhedralCone& c);
/// (sin(a) σ_z, cos(a) σ_x, I_2) with unit (0,0,1), 0 < a < π/2.
LinearPencil calpha_pencil(double alpha);
/// (σ_z, σ_x, I_2) with unit (0,0,1): the circular cone.
LinearPencil circular_pencil();

}  // namespace freespec

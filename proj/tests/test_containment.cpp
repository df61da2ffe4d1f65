#include "cmin_samples.hpp"
#include "helpers.hpp"

#include "freespec/containment.hpp"

using namespace testing_helpers;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(v.size());
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

MatrixTuple pauli_tuple() { return MatrixTuple({sz(), sx(), id2()}); }

// Kraus map applied to the first tensor factor of an (r s) x (r s) matrix.
HermitianMatrix apply_kraus_first(const std::vector<CMatrix>& kraus, const HermitianMatrix& x, int s) {
  const CMatrix is = CMatrix::Identity(s, s);
  const int t = static_cast<int>(kraus[0].cols());
  CMatrix out = CMatrix::Zero(t * s, t * s);
  for (const auto& v : kraus) {
    const CMatrix w = kron(v, is);
    out += w.adjoint() * x.matrix() * w;
  }
  return HermitianMatrix(out, 1e-9);
}

}  // namespace

TEST(ScalarInclusion, SquareInCalphaHolds) {
  for (double a : {0.3, kPi / 4, 1.2}) {
    const ScalarInclusion r = scalar_inclusion(square_cone(), calpha_pencil(a));
    EXPECT_TRUE(r.holds);
    ASSERT_EQ(r.margins.size(), 4u);
    for (double m : r.margins) EXPECT_NEAR(m, 0.0, 1e-12);
    EXPECT_FALSE(r.witness.has_value());
  }
}

TEST(ScalarInclusion, SquareInCircularFails) {
  const ScalarInclusion r = scalar_inclusion(square_cone(), circular_pencil());
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_NEAR(std::abs((*r.witness)(0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs((*r.witness)(1)), 1.0, 1e-15);
  EXPECT_NEAR(r.margins[r.worst], 1.0 - std::sqrt(2.0), 1e-12);
}

TEST(Kraus, RoundTripThroughChoi) {
  Rng rng(131);
  for (int t = 0; t < 20; ++t) {
    const int r = 2 + t % 2, c = 2 + (t / 2) % 2;
    const HermitianMatrix j = random_psd(rng, r * c, 1 + t % (r * c));
    const auto k = kraus_from_choi(j, r, c);
    EXPECT_LE(max_abs(choi_from_kraus(k).matrix() - j.matrix()), 1e-9 * (1 + j.trace()));
    // The Choi matrix reproduces the map on every E_kl.
    const HermitianMatrix x = random_hermitian(rng, r);
    const HermitianMatrix y = apply_kraus(k, x);
    for (int p = 0; p < c; ++p)
      for (int q = 0; q < c; ++q) {
        Complex v = 0;
        for (int a = 0; a < r; ++a)
          for (int b = 0; b < r; ++b) v += x(a, b) * j(a * c + p, b * c + q);
        EXPECT_LT(std::abs(v - y(p, q)), 1e-9);
      }
  }
}

TEST(Relaxation, IdentityMapIsFeasible) {
  const LinearPencil p = calpha_pencil(0.6);
  const RelaxationResult r = relaxation(p, p);
  ASSERT_EQ(r.status, RelaxationStatus::Feasible) << r.message;
  EXPECT_LT(r.certificate->residual, 1e-6);
  EXPECT_LT(kraus_residual(p, p, r.certificate->kraus), 1e-6);
}

TEST(Relaxation, SimplexSourceIsFeasible) {
  const PolyhedralCone tri = polygon_cone(3);
  ASSERT_TRUE(scalar_inclusion(tri, circular_pencil()).holds);
  const RelaxationResult r = relaxation(diagonal_pencil(tri), circular_pencil());
  ASSERT_EQ(r.status, RelaxationStatus::Feasible) << r.message;
  EXPECT_LT(r.certificate->residual, 1e-6);
  EXPECT_TRUE(is_psd(r.certificate->choi, 1e-9));
}

TEST(Relaxation, SquareInCalphaIsInfeasible) {
  const LinearPencil src = diagonal_pencil(square_cone());
  const LinearPencil tgt = calpha_pencil(kPi / 4);
  const sdp::SdpProblem prob = relaxation_problem(src, tgt);
  const RelaxationResult r = relaxation(src, tgt);
  ASSERT_EQ(r.status, RelaxationStatus::Infeasible) << r.message;
  ASSERT_TRUE(r.farkas.has_value());
  EXPECT_TRUE(sdp::farkas_valid(prob, r.farkas->y));
}

TEST(Relaxation, FeasibilityImpliesInclusion) {
  const PolyhedralCone tri = polygon_cone(3);
  const LinearPencil src = diagonal_pencil(tri), tgt = circular_pencil();
  const RelaxationResult r = relaxation(src, tgt);
  ASSERT_EQ(r.status, RelaxationStatus::Feasible) << r.message;
  const auto& k = r.certificate->kraus;
  Rng rng(137);
  for (int t = 0; t < 100; ++t) {
    const MatrixTuple a = cmin_samples::random_member(rng, tri, 2);
    const HermitianMatrix ls = evaluate(src, a);
    ASSERT_GE(min_eigenvalue(ls), -1e-9);
    const HermitianMatrix mapped = apply_kraus_first(k, ls, 2);
    EXPECT_LE(max_abs(mapped.matrix() - evaluate(tgt, a).matrix()), 1e-5);
    EXPECT_GE(membership(tgt, a).margin, -1e-6);
  }
}

TEST(FreeWitness, SquareMarginFormula) {
  for (double a : {0.2, kPi / 4, kPi / 3, 1.4}) {
    const FreeWitness w = free_witness_square(a);
    EXPECT_NEAR(w.margin, 1 - std::sin(a) - std::cos(a), 1e-12);
    EXPECT_NEAR(membership(calpha_pencil(a), w.tuple).margin, w.margin, 1e-12);
    EXPECT_EQ(max_membership(square_cone(), w.tuple).kind, Membership::Boundary);
  }
}

TEST(FreeWitness, FoundForTransformedSquare) {
  RMatrix t(3, 3);
  t << 1.2, 0.3, 0.1, -0.2, 0.9, 0.0, 0.0, 0.0, 1.0;
  std::vector<RVector> g;
  const PolyhedralCone sq = square_cone();
  for (const auto& v : sq.generators()) g.push_back(t * v);
  const PolyhedralCone src = PolyhedralCone::from_generators(g, t * square_cone().unit());
  // Target: C(pi/4) pulled back through t.
  const LinearPencil c = calpha_pencil(kPi / 4);
  const RMatrix ti = t.inverse();
  std::vector<HermitianMatrix> m(3, HermitianMatrix::zero(2));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i] += ti(j, i) * c[j];
  const LinearPencil tgt(m, t * c.unit());
  ASSERT_TRUE(scalar_inclusion(src, tgt).holds);
  const auto w = find_free_witness(src, tgt);
  ASSERT_TRUE(w.has_value());
  EXPECT_LT(w->margin, -1e-7);
  EXPECT_NE(max_membership(src, w->tuple).kind, Membership::Outside);
  EXPECT_FALSE(find_free_witness(square_cone(), diagonal_pencil(square_cone())).has_value());
}

TEST(CheckInclusion, SquareInCalphaPiOverThree) {
  const InclusionVerdict v = check_inclusion(square_cone(), calpha_pencil(kPi / 3));
  EXPECT_TRUE(v.scalar.holds);
  EXPECT_EQ(v.relaxation.status, RelaxationStatus::Infeasible) << v.relaxation.message;
  ASSERT_TRUE(v.free_witness.has_value());
  EXPECT_NEAR(v.free_witness->margin, 1 - std::sin(kPi / 3) - std::cos(kPi / 3), 1e-12);
}

TEST(CheckInclusion, SquareInItself) {
  const InclusionVerdict v = check_inclusion(square_cone(), diagonal_pencil(square_cone()));
  EXPECT_TRUE(v.scalar.holds);
  EXPECT_EQ(v.relaxation.status, RelaxationStatus::Feasible) << v.relaxation.message;
  EXPECT_FALSE(v.free_witness.has_value());
}

TEST(Commuting, OctagonTargetIsTight) {
  const CommutingReport r = commuting_target_tightness(square_cone(), diagonal_pencil(polygon_cone(8, 2.0)));
  EXPECT_TRUE(r.scalar.holds);
  EXPECT_EQ(r.relaxation.status, RelaxationStatus::Feasible) << r.relaxation.message;
  EXPECT_TRUE(r.tight);
  EXPECT_LT(r.diagonalization_residual, 1e-9);
  const int n = static_cast<int>(r.joint_basis.rows());
  EXPECT_LE(max_abs(r.joint_basis.adjoint() * r.joint_basis - CMatrix::Identity(n, n)), 1e-9);
}

TEST(Commuting, RotatedDiagonalTarget) {
  Rng rng(139);
  const CMatrix u = random_unitary(rng, 4);
  const LinearPencil d = diagonal_pencil(square_cone());
  std::vector<HermitianMatrix> m;
  for (const auto& x : d.matrices()) m.push_back(x.congruence(u.adjoint()));
  const CommutingReport r = commuting_target_tightness(square_cone(), LinearPencil(m, d.unit()));
  EXPECT_TRUE(r.tight);
  EXPECT_EQ(r.relaxation.status, RelaxationStatus::Feasible);
  EXPECT_LT(r.diagonalization_residual, 1e-9);
}

TEST(Commuting, FailingScalarIsVacuouslyTight) {
  const CommutingReport r = commuting_target_tightness(square_cone(), diagonal_pencil(polygon_cone(8, 1.0)));
  EXPECT_FALSE(r.scalar.holds);
  EXPECT_TRUE(r.tight);
}

TEST(Commuting, RejectsNoncommutingTarget) {
  EXPECT_THROW(commuting_target_tightness(square_cone(), calpha_pencil(0.5)), InvalidArgument);
}

TEST(ScalingBound, Square) {
  const ScalingBound b = scaling_bound(square_cone(), square_cone().unit());
  EXPECT_NEAR(b.nu_general, 0.25, 1e-12);
  ASSERT_TRUE(b.nu_symmetric.has_value());
  EXPECT_NEAR(*b.nu_symmetric, 0.5, 1e-12);
  EXPECT_GE(b.certified_nu, 1.0 / 3 - 1e-9);
  EXPECT_LT(b.certified_nu, 0.5);
  ASSERT_TRUE(b.certificate.has_value());
  EXPECT_TRUE(is_simplex(*b.certificate));
  EXPECT_TRUE(sandwich_holds(square_cone(), b.certified_nu, square_cone().unit(), *b.certificate));
}

TEST(ScalingBound, SimplexIsOne) {
  Rng rng(149);
  const PolyhedralCone s = random_simplex_cone(rng, 3);
  const ScalingBound b = scaling_bound(s, s.unit());
  EXPECT_NEAR(b.nu_general, 0.25, 1e-12);
  EXPECT_NEAR(b.certified_nu, 1.0, 1e-9);
  EXPECT_FALSE(b.nu_symmetric.has_value());
}

TEST(ScaledMaxInMin, HalfScalesPauliIntoMin) {
  const PolyhedralCone sq = square_cone();
  const ScaledMaxInMin r = scaled_max_in_min(sq, 0.5, pauli_tuple(), sq.unit());
  EXPECT_TRUE(r.member) << r.detail.message;
  EXPECT_LE(max_abs(r.scaled[0].matrix() - (0.5 * sz()).matrix()), 1e-15);
  EXPECT_LE(max_abs(r.scaled[1].matrix() - (0.5 * sx()).matrix()), 1e-15);
  EXPECT_LE(max_abs(r.scaled[2].matrix() - id2().matrix()), 1e-15);
  // Closed-form weights on the generators (1,-1,1), (-1,1,1), (1,1,1), (-1,-1,1).
  const HermitianMatrix q = 0.25 * id2();
  const HermitianMatrix dm = 0.125 * (sz() - sx()), dp = 0.125 * (sz() + sx());
  std::vector<HermitianMatrix> w(4);
  const auto& g = sq.generators();
  for (int k = 0; k < 4; ++k) {
    const double x = g[k](0), y = g[k](1);
    if (x > 0 && y < 0) w[k] = q + dm;
    if (x < 0 && y > 0) w[k] = q - dm;
    if (x > 0 && y > 0) w[k] = q + dp;
    if (x < 0 && y < 0) w[k] = q - dp;
  }
  double res = 1;
  EXPECT_TRUE(check_min_certificate(sq, r.scaled, {w, 0.0}, &res));
  EXPECT_LT(res, 1e-15);
}

TEST(ScaledMaxInMin, FullScaleFails) {
  const PolyhedralCone sq = square_cone();
  EXPECT_FALSE(scaled_max_in_min(sq, 1.0, pauli_tuple(), sq.unit()).member);
}

TEST(ScaledMaxInMin, UnitAlwaysMember) {
  const PolyhedralCone sq = square_cone();
  for (double nu : {0.1, 0.3, 1.0})
    EXPECT_TRUE(scaled_max_in_min(sq, nu, MatrixTuple::unit(sq.unit(), 2), sq.unit()).member);
}

TEST(ScaledMaxInMin, MonotoneInNu) {
  Rng rng(151);
  const PolyhedralCone sq = square_cone();
  for (int t = 0; t < 10; ++t) {
    std::vector<HermitianMatrix> e;
    for (int i = 0; i < 3; ++i) e.push_back(sq.unit()(i) * id2() + 0.4 * random_hermitian(rng, 2));
    MatrixTuple a(std::move(e));
    const double m = max_membership(sq, a).margin;
    if (m < 0) continue;
    bool prev = true;
    for (double nu : {0.2, 0.4, 0.5, 0.7, 0.9, 1.0}) {
      const bool now = scaled_max_in_min(sq, nu, a, sq.unit()).member;
      if (!prev) EXPECT_FALSE(now) << "nu " << nu;
      if (nu <= 0.5) EXPECT_TRUE(now);
      prev = now;
    }
  }
}

TEST(ScaledMaxInMin, RejectsTupleOutsideMax) {
  const PolyhedralCone sq = square_cone();
  EXPECT_THROW(scaled_max_in_min(sq, 0.5, MatrixTuple({2.0 * sz(), sx(), id2()}), sq.unit()), InvalidArgument);
}

TEST(Entangled, Report) {
  const EntangledReport r = entangled_example();
  EXPECT_EQ(r.x.dim(), 4);
  EXPECT_LT(r.identity_residual, 1e-12);
  EXPECT_NEAR(r.pt_min_eigenvalue, -1.0, 1e-12);
  EXPECT_NEAR(r.pt_min_eigenvalue_projection, -0.5, 1e-12);
  EXPECT_LT(r.projection_residual, 1e-12);
  EXPECT_TRUE(r.entangled);
  EXPECT_FALSE(r.minimal_realization);
  EXPECT_EQ(r.pencil.d(), 4);
  EXPECT_FALSE(r.conclusion.empty());
  EXPECT_NEAR(r.x.trace(), 2.0, 1e-12);
}

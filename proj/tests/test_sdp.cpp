#include <sstream>

#include "helpers.hpp"
#include "sdp_instances.hpp"

#include "freespec/sdp.hpp"

using namespace testing_helpers;
using namespace freespec::sdp;

namespace {

// X >= 0 (2x2), tr X = 1, <sz, X> = value.
SdpProblem trace_one(double value) {
  SdpProblem p;
  p.block_dims = {2};
  p.add_constraint(1.0).blocks[0] = id2();
  p.add_constraint(value).blocks[0] = sz();
  return p;
}

// minimize t subject to X = t I - sx, X >= 0, t >= 0.
SdpProblem dominate_sx() {
  SdpProblem p;
  p.block_dims = {2, 1};
  for (const auto& h : hermitian_basis(2)) {
    auto& r = p.add_constraint(-trace_inner(h, sx()));
    r.blocks[0] = h;
    r.blocks[1] = HermitianMatrix::identity(1) * (-h.trace());
  }
  p.objective = std::vector<HermitianMatrix>{HermitianMatrix::zero(2), HermitianMatrix::identity(1)};
  return p;
}

}  // namespace

TEST(Solve, OptimalDominatingScalar) {
  const SdpProblem p = dominate_sx();
  const SdpOutcome o = solve(p);
  ASSERT_EQ(o.status, Status::Optimal) << o.message;
  EXPECT_NEAR(*o.objective_value, 1.0, 1e-6);
  ASSERT_TRUE(o.dual_objective_value.has_value());
  EXPECT_LT(std::abs(*o.objective_value - *o.dual_objective_value), 1e-6 * (1 + std::abs(*o.objective_value)));
  EXPECT_TRUE(verify(o, p).ok);
}

TEST(Solve, InfeasibleTraceBound) {
  const SdpProblem p = trace_one(2.0);
  const SdpOutcome o = solve(p);
  ASSERT_EQ(o.status, Status::Infeasible) << o.message;
  ASSERT_TRUE(o.dual_certificate.has_value());
  EXPECT_NEAR(o.dual_certificate->rhs_value, 1.0, 1e-12);
  EXPECT_TRUE(farkas_valid(p, o.dual_certificate->y));
  const VerifyReport r = verify(o, p);
  EXPECT_TRUE(r.ok) << r.detail;
  // Oracle: the certificate must make sum y_i A_i negative semidefinite
  // while b.y > 0, which excludes |<sz,X>| <= tr X = 1 < 2.
  const auto& y = o.dual_certificate->y;
  const HermitianMatrix s = y[0] * id2() + y[1] * sz();
  EXPECT_LE(max_eigenvalue(s), 1e-9);
  EXPECT_GT(y[0] * 1.0 + y[1] * 2.0, 0.0);
}

TEST(Solve, FeasibleMaximallyMixed) {
  const SdpProblem p = trace_one(0.0);
  const SdpOutcome o = solve(p);
  ASSERT_EQ(o.status, Status::Feasible) << o.message;
  const HermitianMatrix& x = (*o.primal)[0];
  EXPECT_NEAR(x.trace(), 1.0, 1e-6);
  EXPECT_NEAR(trace_inner(sz(), x), 0.0, 1e-6);
  EXPECT_TRUE(is_psd(x, 1e-7));
  EXPECT_TRUE(verify(o, p).ok);
}

TEST(Solve, ComplexDataUnderBothEmbeddings) {
  for (auto emb : {Embedding::RealSymmetric, Embedding::ComplexNative}) {
    SolveOptions opts;
    opts.embedding = emb;
    SdpProblem p;
    p.block_dims = {2};
    p.add_constraint(1.0).blocks[0] = id2();
    p.add_constraint(0.8).blocks[0] = sy();
    const SdpOutcome o = solve(p, opts);
    ASSERT_EQ(o.status, Status::Feasible) << o.message;
    EXPECT_NEAR(trace_inner(sy(), (*o.primal)[0]), 0.8, 1e-6);
    p.constraints[1].rhs = 1.5;
    const SdpOutcome q = solve(p, opts);
    EXPECT_EQ(q.status, Status::Infeasible) << q.message;
    EXPECT_TRUE(verify(q, p).ok);
  }
}

TEST(Solve, NoConstraints) {
  SdpProblem p;
  p.block_dims = {3};
  const SdpOutcome o = solve(p);
  EXPECT_EQ(o.status, Status::Feasible);
  EXPECT_TRUE(verify(o, p).ok);
}

TEST(Solve, DependentConsistentRowsAreDropped) {
  SdpProblem p = trace_one(0.0);
  p.add_constraint(2.0).blocks[0] = 2.0 * id2();
  p.add_constraint(1.0).blocks[0] = id2() + sz();
  const SdpOutcome o = solve(p);
  ASSERT_EQ(o.status, Status::Feasible) << o.message;
  EXPECT_TRUE(verify(o, p).ok);
}

TEST(Solve, InconsistentRowsThrowWithCombination) {
  SdpProblem p = trace_one(0.0);
  p.add_constraint(3.0).blocks[0] = 2.0 * id2();
  try {
    (void)solve(p);
    FAIL() << "expected InconsistentConstraints";
  } catch (const InconsistentConstraints& e) {
    ASSERT_EQ(e.combination.size(), 3u);
    const auto s = adjoint_map(p, e.combination);
    EXPECT_LE(s[0].frobenius_norm(), 1e-9);
    double by = 0.0;
    for (int i = 0; i < 3; ++i) by += e.combination[i] * p.constraints[i].rhs;
    EXPECT_NEAR(by, 1.0, 1e-9);
  }
}

TEST(Solve, RejectsMalformedBlocks) {
  SdpProblem p;
  p.block_dims = {2};
  p.add_constraint(1.0).blocks[0] = HermitianMatrix::identity(3);
  EXPECT_THROW(solve(p), DimensionMismatch);
}

TEST(Verify, ExactPrimalHasZeroResidual) {
  const SdpProblem p = trace_one(0.0);
  SdpOutcome o;
  o.status = Status::Feasible;
  o.primal = std::vector<HermitianMatrix>{0.5 * id2()};
  const VerifyReport r = verify(o, p);
  EXPECT_TRUE(r.ok);
  EXPECT_EQ(r.max_residual, 0.0);
}

TEST(Verify, FlagsTamperedPrimal) {
  const SdpProblem p = trace_one(0.0);
  RVector d(2);
  d << 1.1, -0.1;
  SdpOutcome o;
  o.status = Status::Feasible;
  o.primal = std::vector<HermitianMatrix>{HermitianMatrix::diagonal(d)};
  const VerifyReport r = verify(o, p);
  EXPECT_FALSE(r.ok);
  EXPECT_NEAR(r.min_eigenvalue, -0.1, 1e-12);
  EXPECT_NE(r.detail.find("PSD"), std::string::npos);
}

TEST(Verify, RejectsBogusFarkas) {
  const SdpProblem p = trace_one(0.0);
  SdpOutcome o;
  o.status = Status::Infeasible;
  o.dual_certificate = FarkasCertificate{{1.0, 0.0}, 1.0, 1.0};
  EXPECT_FALSE(verify(o, p).ok);
  SdpOutcome failed;
  EXPECT_FALSE(verify(failed, p).ok);
}

TEST(Solve, EmbeddingsAgreeOnRandomObjectives) {
  Rng rng(41);
  for (int t = 0; t < 10; ++t) {
    auto in = sdp_instances::feasible(rng, {3, 2}, 5, true, false);
    SolveOptions real, cplx;
    cplx.embedding = Embedding::ComplexNative;
    const SdpOutcome a = solve(in.problem, real), b = solve(in.problem, cplx);
    ASSERT_EQ(a.status, Status::Optimal) << a.message;
    ASSERT_EQ(b.status, Status::Optimal) << b.message;
    EXPECT_NEAR(*a.objective_value, *b.objective_value, 1e-6);
    EXPECT_LT(std::abs(*a.objective_value - *a.dual_objective_value), 1e-6 * (1 + std::abs(*a.objective_value)));
  }
}

TEST(Solve, RandomInstancesVerify) {
  Rng rng(43);
  for (int t = 0; t < 400; ++t) {
    const auto in = sdp_instances::random_instance(rng, t);
    const SdpOutcome o = solve(in.problem);
    const VerifyReport r = verify(o, in.problem);
    EXPECT_TRUE(r.ok) << "instance " << t << ": " << to_string(o.status) << " " << o.message << " / " << r.detail;
    switch (in.kind) {
      case sdp_instances::Kind::Feasible: EXPECT_EQ(o.status, Status::Feasible); break;
      case sdp_instances::Kind::Optimal: EXPECT_EQ(o.status, Status::Optimal); break;
      case sdp_instances::Kind::Infeasible: EXPECT_EQ(o.status, Status::Infeasible); break;
    }
  }
}

TEST(SdpaFormat, RoundTrip) {
  Rng rng(47);
  auto in = sdp_instances::feasible(rng, {2, 3}, 4, true, false);
  std::ostringstream os;
  write_sdpa(os, in.problem);
  std::istringstream is(os.str());
  const SdpProblem q = read_sdpa(is);
  ASSERT_EQ(q.block_dims, in.problem.block_dims);
  ASSERT_EQ(q.num_constraints(), in.problem.num_constraints());
  ASSERT_TRUE(q.objective.has_value());
  for (int i = 0; i < q.num_constraints(); ++i) {
    EXPECT_EQ(q.constraints[i].rhs, in.problem.constraints[i].rhs);
    for (int k = 0; k < q.num_blocks(); ++k)
      EXPECT_EQ(q.constraints[i].blocks[k], in.problem.constraints[i].blocks[k]);
  }
  for (int k = 0; k < q.num_blocks(); ++k) EXPECT_EQ((*q.objective)[k], (*in.problem.objective)[k]);
}

TEST(SdpaFormat, ReportsLineOfBadInput) {
  std::istringstream is("* freespec-sdpa-complex v1\n* objective: none\n1\n1\n2\n1.0\n1 1 1 1 1.0 0.5\n");
  try {
    (void)read_sdpa(is);
    FAIL() << "accepted a complex diagonal entry";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 7"), std::string::npos) << e.what();
  }
}

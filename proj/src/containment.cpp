#include "freespec/containment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>

#include "log.hpp"

namespace freespec {

namespace {

void require_same_d(int a, int b) {
  if (a != b)
    throw DimensionMismatch("source has " + std::to_string(a) + " variables, target has " + std::to_string(b));
}

HermitianMatrix combine(const RVector& coef, const std::vector<HermitianMatrix>& ms) {
  HermitianMatrix acc = HermitianMatrix::zero(ms[0].dim());
  for (int i = 0; i < coef.size(); ++i)
    if (coef(i) != 0.0) acc += coef(i) * ms[i];
  return acc;
}

MatrixTuple square_tuple(bool swapped) {
  if (swapped) return MatrixTuple({pauli::x(), pauli::z(), pauli::identity()});
  return MatrixTuple({pauli::z(), pauli::x(), pauli::identity()});
}

}  // namespace

ScalarInclusion scalar_inclusion(const PolyhedralCone& src, const LinearPencil& tgt, double tol) {
  require_same_d(src.dim(), tgt.d());
  ScalarInclusion out;
  out.holds = true;
  double worst = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < src.generators().size(); ++k) {
    const double m = min_eigenvalue(combine(src.generators()[k], tgt.matrices()));
    out.margins.push_back(m);
    if (m < worst) {
      worst = m;
      out.worst = static_cast<int>(k);
    }
  }
  if (worst <= -tol) {
    out.holds = false;
    out.witness = src.generators()[out.worst];
  }
  return out;
}

const char* to_string(RelaxationStatus s) {
  switch (s) {
    case RelaxationStatus::Feasible: return "Feasible";
    case RelaxationStatus::Infeasible: return "Infeasible";
    case RelaxationStatus::Unknown: return "Unknown";
  }
  return "?";
}

sdp::SdpProblem relaxation_problem(const LinearPencil& src, const LinearPencil& tgt) {
  require_same_d(src.d(), tgt.d());
  const int t = tgt.r();
  const auto basis = hermitian_basis(t);
  sdp::SdpProblem p;
  p.block_dims = {src.r() * t};
  for (int i = 0; i < src.d(); ++i) {
    const HermitianMatrix mt = src[i].conjugate();
    for (const auto& h : basis) p.add_constraint(trace_inner(h, tgt[i])).blocks[0] = kron(mt, h);
  }
  return p;
}

std::vector<CMatrix> kraus_from_choi(const HermitianMatrix& choi, int r, int t) {
  if (choi.dim() != r * t) throw DimensionMismatch("Choi matrix size is not r*t");
  const auto ed = eigh(choi);
  const double cut = 1e-9 * std::max(choi.trace(), 0.0);
  std::vector<CMatrix> out;
  for (int j = static_cast<int>(ed.eigenvalues.size()) - 1; j >= 0; --j) {
    const double lam = ed.eigenvalues(j);
    if (lam <= cut) continue;
    CMatrix v(r, t);
    for (int k = 0; k < r; ++k)
      for (int p = 0; p < t; ++p) v(k, p) = std::conj(ed.eigenvectors(k * t + p, j)) * std::sqrt(lam);
    out.push_back(std::move(v));
  }
  return out;
}

HermitianMatrix choi_from_kraus(const std::vector<CMatrix>& kraus) {
  if (kraus.empty()) throw InvalidArgument("need at least one Kraus operator");
  const int r = static_cast<int>(kraus[0].rows()), t = static_cast<int>(kraus[0].cols());
  CMatrix j = CMatrix::Zero(r * t, r * t);
  for (const auto& v : kraus) {
    CVector w(r * t);
    for (int k = 0; k < r; ++k)
      for (int p = 0; p < t; ++p) w(k * t + p) = std::conj(v(k, p));
    j += w * w.adjoint();
  }
  return HermitianMatrix::from_symmetrized(j);
}

HermitianMatrix apply_kraus(const std::vector<CMatrix>& kraus, const HermitianMatrix& x) {
  if (kraus.empty()) throw InvalidArgument("need at least one Kraus operator");
  CMatrix acc = CMatrix::Zero(kraus[0].cols(), kraus[0].cols());
  for (const auto& v : kraus) {
    if (v.rows() != x.dim()) throw DimensionMismatch("Kraus operator and input sizes differ");
    acc += v.adjoint() * x.matrix() * v;
  }
  return HermitianMatrix::from_symmetrized(acc);
}

double kraus_residual(const LinearPencil& src, const LinearPencil& tgt, const std::vector<CMatrix>& kraus) {
  double res = 0.0;
  for (int i = 0; i < src.d(); ++i) {
    const CMatrix diff =
        kraus.empty() ? CMatrix(-tgt[i].matrix()) : CMatrix(apply_kraus(kraus, src[i]).matrix() - tgt[i].matrix());
    res = std::max(res, diff.cwiseAbs().maxCoeff());
  }
  return res;
}

RelaxationResult relaxation(const LinearPencil& src, const LinearPencil& tgt, const sdp::SolveOptions& opts) {
  const sdp::SdpProblem p = relaxation_problem(src, tgt);
  RelaxationResult out;
  sdp::SdpOutcome res;
  try {
    res = sdp::solve(p, opts);
  } catch (const sdp::InconsistentConstraints& e) {
    double by = 0.0, lmax = 0.0;
    if (sdp::farkas_valid(p, e.combination, &by, &lmax)) {
      out.status = RelaxationStatus::Infeasible;
      out.farkas = sdp::FarkasCertificate{e.combination, by, lmax};
      out.message = std::string("linear constraints inconsistent: ") + e.what();
    } else {
      out.message = e.what();
    }
    return out;
  }
  switch (res.status) {
    case sdp::Status::Feasible: {
      RelaxationCertificate cert{(*res.primal)[0], {}, 0.0};
      cert.kraus = kraus_from_choi(cert.choi, src.r(), tgt.r());
      cert.residual = kraus_residual(src, tgt, cert.kraus);
      if (cert.residual <= 1e-6 && is_psd(cert.choi, 1e-7)) {
        out.status = RelaxationStatus::Feasible;
        out.message = "completely positive map found";
      } else {
        out.message = "Kraus residual " + std::to_string(cert.residual) + " exceeds tolerance";
      }
      out.certificate = std::move(cert);
      break;
    }
    case sdp::Status::Infeasible:
      out.status = RelaxationStatus::Infeasible;
      out.farkas = res.dual_certificate;
      out.message = "Farkas certificate verified";
      break;
    default:
      out.message = "solver: " + res.message;
  }
  return out;
}

FreeWitness free_witness_square(double alpha) {
  const LinearPencil p = calpha_pencil(alpha);
  MatrixTuple a = square_tuple(false);
  const double m = min_eigenvalue(evaluate(p, a));
  return FreeWitness{2, std::move(a), m};
}

std::optional<FreeWitness> find_free_witness(const PolyhedralCone& src, const LinearPencil& tgt, double tol) {
  require_same_d(src.dim(), tgt.d());
  if (src.dim() != 3 || src.generators().size() != 4) return std::nullopt;
  // Cyclic order of the source section around the unit.
  RVector w = RVector::Zero(3);
  for (const auto& f : src.facets()) w += f;
  const Section sec = section(src, w);
  Eigen::FullPivLU<RMatrix> lu(RMatrix(w.transpose()));
  const RMatrix plane = lu.kernel();
  std::vector<int> order(4);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> angle(4);
  for (int k = 0; k < 4; ++k) {
    const RVector q = plane.transpose() * (sec.points[k] - sec.center);
    angle[k] = std::atan2(q(1), q(0));
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) { return angle[a] < angle[b]; });
  const PolyhedralCone sq = square_cone();
  const int sq_cycle[4] = {0, 2, 1, 3};
  std::optional<FreeWitness> best;
  for (int dir : {1, -1}) {
    for (int shift = 0; shift < 4; ++shift) {
      RMatrix v(3, 3), g(3, 3);
      int img[4];
      for (int j = 0; j < 4; ++j) img[sq_cycle[j]] = order[((dir * j + shift) % 4 + 4) % 4];
      for (int j = 0; j < 3; ++j) {
        v.col(j) = sq.generators()[j];
        g.col(j) = src.generators()[img[j]];
      }
      const RVector alpha = v.fullPivLu().solve(sq.generators()[3]);
      const RVector beta = g.fullPivLu().solve(src.generators()[img[3]]);
      RVector lambda(3);
      bool ok = true;
      for (int j = 0; j < 3; ++j) {
        if (std::abs(alpha(j)) < 1e-12) ok = false;
        lambda(j) = ok ? beta(j) / alpha(j) : 0.0;
        ok = ok && lambda(j) > 0;
      }
      if (!ok) continue;
      const RMatrix t = g * lambda.asDiagonal() * v.inverse();
      for (bool swapped : {false, true}) {
        MatrixTuple a = square_tuple(swapped).transform(t);
        if (max_membership(src, a, tol).kind == Membership::Outside) continue;
        const MembershipResult mr = membership(tgt, a, tol);
        if (mr.kind != Membership::Outside) continue;
        if (!best || mr.margin < best->margin) best = FreeWitness{2, std::move(a), mr.margin};
      }
    }
  }
  return best;
}

InclusionVerdict check_inclusion(const PolyhedralCone& src, const LinearPencil& tgt, const sdp::SolveOptions& opts) {
  InclusionVerdict v{scalar_inclusion(src, tgt), relaxation(diagonal_pencil(src), tgt, opts), std::nullopt};
  if (!is_simplex(src)) v.free_witness = find_free_witness(src, tgt);
  if (v.free_witness && v.relaxation.status == RelaxationStatus::Feasible) {
    detail::logger().error("relaxation feasible although a level-2 witness lies outside the target");
    v.relaxation.status = RelaxationStatus::Unknown;
    v.relaxation.message = "contradiction between relaxation and witness";
  }
  return v;
}

CommutingReport commuting_target_tightness(const PolyhedralCone& src, const LinearPencil& tgt,
                                           const sdp::SolveOptions& opts) {
  require_same_d(src.dim(), tgt.d());
  for (int i = 0; i < tgt.d(); ++i)
    for (int j = i + 1; j < tgt.d(); ++j)
      if (commutator_norm(tgt[i], tgt[j]) >= 1e-9)
        throw InvalidArgument("target matrices " + std::to_string(i) + " and " + std::to_string(j) +
                              " do not commute");
  HermitianMatrix generic = HermitianMatrix::zero(tgt.r());
  for (int i = 0; i < tgt.d(); ++i) generic += (1.0 / (i + std::sqrt(2.0))) * tgt[i];
  CommutingReport rep{scalar_inclusion(src, tgt), {}, eigh(generic).eigenvectors, 0.0, false};
  for (int i = 0; i < tgt.d(); ++i) {
    CMatrix dg = rep.joint_basis.adjoint() * tgt[i].matrix() * rep.joint_basis;
    dg.diagonal().setZero();
    rep.diagonalization_residual = std::max(rep.diagonalization_residual, dg.cwiseAbs().maxCoeff());
  }
  rep.relaxation = relaxation(diagonal_pencil(src), tgt, opts);
  rep.tight = !rep.scalar.holds || rep.relaxation.status == RelaxationStatus::Feasible;
  return rep;
}

ScalingBound scaling_bound(const PolyhedralCone& c, const RVector& h) {
  const int d = c.dim();
  ScalingBound out;
  out.nu_general = 1.0 / (d + 1);
  if (d >= 2 && is_centrally_symmetric(c, h)) out.nu_symmetric = 1.0 / (d - 1);
  const SandwichBest best = best_sandwich_simplex(c, h);
  out.certified_nu = best.nu;
  out.certificate = best.simplex;
  return out;
}

ScaledMaxInMin scaled_max_in_min(const PolyhedralCone& c, double nu, const MatrixTuple& a, const RVector& h,
                                 double tol, const sdp::SolveOptions& opts) {
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("scaling factor must lie in (0, 1]");
  if (max_membership(c, a, tol).kind == Membership::Outside)
    throw InvalidArgument("tuple is not in the largest operator system of the cone");
  const Section sec = section(c, h);
  HermitianMatrix ha = HermitianMatrix::zero(a.s());
  for (int j = 0; j < a.d(); ++j) ha += sec.normal(j) * a[j];
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < a.d(); ++i) e.push_back(nu * a[i] + ((1.0 - nu) * c.unit()(i)) * ha);
  MatrixTuple scaled(std::move(e));
  MinMembershipResult mm = min_membership(c, scaled, opts);
  const bool member = mm.verdict == MinVerdict::Member;
  return ScaledMaxInMin{member, std::move(scaled), std::move(mm)};
}

EntangledReport entangled_example() {
  RMatrix xr = RMatrix::Zero(4, 4);
  xr(0, 0) = xr(0, 3) = xr(3, 0) = xr(3, 3) = 1.0;
  const HermitianMatrix x(xr);
  const CMatrix a = x.matrix().topLeftCorner(2, 2);
  const CMatrix b = x.matrix().topRightCorner(2, 2);
  const CMatrix c = x.matrix().bottomRightCorner(2, 2);
  const Complex i(0.0, 1.0);
  CMatrix w(2, 2);
  w << 0, i, -i, 0;
  RVector u = RVector::Zero(4);
  u(3) = 1.0;
  LinearPencil l({pauli::z(), pauli::x(), HermitianMatrix(w), pauli::identity()}, u);
  EntangledReport rep{x,
                      HermitianMatrix(CMatrix(a - c)),
                      HermitianMatrix(CMatrix(b + b.adjoint())),
                      HermitianMatrix(CMatrix((b - b.adjoint()) / i)),
                      HermitianMatrix(CMatrix(a + c)),
                      l, 0.0, 0.0, 0.0, 0.0, false, true, {}};
  const HermitianMatrix lx = evaluate(l, MatrixTuple({rep.a, rep.b_plus, rep.b_minus, rep.c}));
  rep.identity_residual = (2.0 * x.matrix() - lx.matrix()).cwiseAbs().maxCoeff();
  rep.pt_min_eigenvalue = min_eigenvalue(partial_transpose_second(x, 2, 2));
  const HermitianMatrix proj = 0.5 * x;
  rep.pt_min_eigenvalue_projection = min_eigenvalue(partial_transpose_second(proj, 2, 2));
  rep.projection_residual = (proj.matrix() * proj.matrix() - proj.matrix()).norm();
  rep.entangled = is_psd(x, 1e-12) && rep.pt_min_eigenvalue < -1e-12;
  rep.minimal_realization = !rep.entangled;
  rep.conclusion = rep.entangled
                       ? "X is positive semidefinite and entangled, so the four-variable ball pencil does not "
                         "realize the smallest operator system of the ball cone"
                       : "no obstruction found";
  return rep;
}

}  // namespace freespec

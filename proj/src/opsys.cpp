#include "freespec/opsys.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "freespec/random.hpp"
#include "log.hpp"

namespace freespec {

namespace {

constexpr double kHalfPi = 1.5707963267948966;

void require_dims(const PolyhedralCone& c, const MatrixTuple& a) {
  if (c.dim() != a.d())
    throw DimensionMismatch("cone has dimension " + std::to_string(c.dim()) + ", tuple has " +
                            std::to_string(a.d()) + " entries");
}

HermitianMatrix combine(const RVector& coef, const std::vector<HermitianMatrix>& ms) {
  HermitianMatrix acc = HermitianMatrix::zero(ms[0].dim());
  for (int i = 0; i < coef.size(); ++i)
    if (coef(i) != 0.0) acc += coef(i) * ms[i];
  return acc;
}

RVector mean_facet(const PolyhedralCone& c) {
  RVector w = RVector::Zero(c.dim());
  for (const auto& f : c.facets()) w += f;
  return w / static_cast<double>(c.facets().size());
}

}  // namespace

MaxMembershipResult max_membership(const PolyhedralCone& c, const MatrixTuple& a, double tol) {
  require_dims(c, a);
  MaxMembershipResult r;
  r.margin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < c.facets().size(); ++k) {
    const double e = min_eigenvalue(combine(c.facets()[k], a.entries()));
    if (e < r.margin) {
      r.margin = e;
      r.worst_facet = static_cast<int>(k);
    }
  }
  r.kind = classify(r.margin, tol).kind;
  return r;
}

double SeparationFunctional::evaluate(const MatrixTuple& b) const {
  if (static_cast<int>(n.size()) != b.d()) throw DimensionMismatch("functional and tuple lengths differ");
  double s = 0.0;
  for (size_t i = 0; i < n.size(); ++i) s += trace_inner(b[static_cast<int>(i)], n[i].conjugate());
  return s;
}

double min_positivity(const SeparationFunctional& phi, const PolyhedralCone& c) {
  std::vector<HermitianMatrix> cn;
  for (const auto& m : phi.n) cn.push_back(m.conjugate());
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& g : c.generators()) worst = std::min(worst, min_eigenvalue(combine(g, cn)));
  return worst;
}

const char* to_string(MinVerdict v) {
  switch (v) {
    case MinVerdict::Member: return "Member";
    case MinVerdict::NotMember: return "NotMember";
    case MinVerdict::Unknown: return "Unknown";
  }
  return "?";
}

sdp::SdpProblem min_membership_problem(const PolyhedralCone& c, const MatrixTuple& a) {
  require_dims(c, a);
  const int s = a.s();
  const int m = static_cast<int>(c.generators().size());
  const auto basis = hermitian_basis(s);
  sdp::SdpProblem p;
  p.block_dims.assign(m, s);
  for (int i = 0; i < c.dim(); ++i) {
    for (const auto& h : basis) {
      auto& row = p.add_constraint(trace_inner(h, a[i]));
      for (int k = 0; k < m; ++k) {
        const double ck = c.generators()[k](i);
        if (ck != 0.0) row.blocks[k] = ck * h;
      }
    }
  }
  return p;
}

bool check_min_certificate(const PolyhedralCone& c, const MatrixTuple& a,
                           const MinMembershipCertificate& cert, double* residual) {
  require_dims(c, a);
  if (cert.weights.size() != c.generators().size()) return false;
  double res = 0.0;
  bool psd = true;
  for (const auto& w : cert.weights) {
    if (w.dim() != a.s()) return false;
    psd = psd && is_psd(w, 1e-7);
  }
  for (int i = 0; i < a.d(); ++i) {
    CMatrix acc = -a[i].matrix();
    for (size_t k = 0; k < cert.weights.size(); ++k)
      acc += c.generators()[k](i) * cert.weights[k].matrix();
    res = std::max(res, acc.cwiseAbs().maxCoeff());
  }
  if (residual) *residual = res;
  return psd && res <= 1e-6;
}

MinMembershipResult min_membership(const PolyhedralCone& c, const MatrixTuple& a,
                                   const sdp::SolveOptions& opts) {
  const sdp::SdpProblem p = min_membership_problem(c, a);
  MinMembershipResult out;
  sdp::SdpOutcome res;
  try {
    res = sdp::solve(p, opts);
  } catch (const sdp::InconsistentConstraints& e) {
    out.message = e.what();
    return out;
  }
  const int s = a.s();
  if (res.status == sdp::Status::Feasible) {
    MinMembershipCertificate cert{*res.primal, 0.0};
    if (check_min_certificate(c, a, cert, &cert.residual)) {
      out.verdict = MinVerdict::Member;
      out.message = "decomposition found";
    } else {
      out.message = "solver point failed the decomposition check";
    }
    out.certificate = std::move(cert);
    return out;
  }
  if (res.status != sdp::Status::Infeasible) {
    out.message = "solver: " + res.message;
    return out;
  }
  // K_i = -sum_alpha y_(i,alpha) H_alpha satisfies sum_i c_k[i] K_i >= 0 and sum_i <K_i, A_i> < 0.
  const auto& y = res.dual_certificate->y;
  std::vector<HermitianMatrix> k;
  double scale = 0.0;
  for (int i = 0; i < c.dim(); ++i) {
    RVector seg(s * s);
    for (int al = 0; al < s * s; ++al) seg(al) = -y[i * s * s + al];
    k.push_back(from_hermitian_coordinates(seg, s));
    scale = std::max(scale, k.back().frobenius_norm());
  }
  for (auto& ki : k) ki = ki * (1.0 / scale);
  double phi0 = 0.0;
  for (int i = 0; i < c.dim(); ++i) phi0 += trace_inner(k[i], a[i]);

  // Shift by t * w ⊗ I with w the mean facet (w(u) = 1, w >= 0 on C): repairs
  // rounding on the generators and makes the functional strictly positive at u.
  const RVector w = mean_facet(c);
  double need = 0.0;
  for (const auto& g : c.generators()) {
    const double lam = min_eigenvalue(combine(g, k));
    need = std::max(need, -lam / w.dot(g));
  }
  double tr_a = 0.0;
  for (int i = 0; i < c.dim(); ++i) tr_a += w(i) * a[i].trace();
  const double room = tr_a > 0 ? 0.5 * -phi0 / tr_a : 0.1;
  const double t = std::max(need + 1e-8, std::min(room, 0.1));
  SeparationFunctional phi;
  for (int i = 0; i < c.dim(); ++i) phi.n.push_back((k[i] + (t * w(i)) * HermitianMatrix::identity(s)).conjugate());
  phi.margin = min_eigenvalue(combine(c.unit(), phi.n));
  out.query_value = phi.evaluate(a);
  const double pos = min_positivity(phi, c);
  detail::logger().debug("separator: phi(A)={} shift={} positivity={} margin={}", out.query_value, t, pos,
                         phi.margin);
  if (out.query_value < -1e-7 && pos >= -1e-12) {
    out.verdict = MinVerdict::NotMember;
    out.message = "separating functional verified";
  } else {
    out.message = "Farkas certificate did not yield a verified separator";
  }
  out.separator = std::move(phi);
  return out;
}

PauliWitness pauli_witness(double alpha) {
  if (!(alpha > 0.0 && alpha < kHalfPi)) throw InvalidArgument("alpha must lie in (0, pi/2)");
  const auto i2 = pauli::identity();
  const auto cz = std::cos(alpha) * pauli::z();
  const auto sx = std::sin(alpha) * pauli::x();
  std::array<HermitianMatrix, 4> comp = {0.5 * (i2 - cz + sx), 0.5 * (i2 + cz - sx), 0.5 * (i2 + cz + sx),
                                         0.5 * (i2 - cz - sx)};
  const PolyhedralCone sq = square_cone();
  std::vector<HermitianMatrix> e;
  for (int i = 0; i < 3; ++i) {
    HermitianMatrix acc = HermitianMatrix::zero(2);
    for (int k = 0; k < 4; ++k) acc += sq.generators()[k](i) * comp[k];
    e.push_back(acc);
  }
  return PauliWitness{MatrixTuple(std::move(e)), comp};
}

const char* to_string(EssentialVerdict v) {
  switch (v) {
    case EssentialVerdict::InEssentialBoundary: return "InEssentialBoundary";
    case EssentialVerdict::No: return "No";
    case EssentialVerdict::Unknown: return "Unknown";
  }
  return "?";
}

bool check_essential_certificate(const std::array<HermitianMatrix, 4>& a, const HermitianMatrix& m3,
                                 const HermitianMatrix& d, const HermitianMatrix& s, double eps,
                                 double tol, std::string* why) {
  auto fail = [&](const std::string& w) {
    if (why) *why = w;
    return false;
  };
  if (min_eigenvalue(m3) < eps - tol) return fail("M3 is not strictly positive");
  if (std::abs(m3.trace() - 1.0) > tol) return fail("tr M3 != 1");
  const std::array<HermitianMatrix, 4> x = {m3 + d, m3 - d, m3 + s, m3 - s};
  for (int k = 0; k < 4; ++k) {
    if (min_eigenvalue(x[k]) < -tol) return fail("positivity condition " + std::to_string(k + 1) + " fails");
    if (std::abs(trace_inner(a[k], x[k])) > tol)
      return fail("orthogonality condition " + std::to_string(k + 1) + " fails");
  }
  return true;
}

EssentialBoundaryResult essential_boundary_square(const std::array<HermitianMatrix, 4>& a, double eps,
                                                  const sdp::SolveOptions& opts) {
  const int s = a[0].dim();
  bool all_zero = true;
  for (const auto& ak : a) {
    if (ak.dim() != s) throw DimensionMismatch("components must share one size");
    if (!is_psd(ak, 1e-9)) throw InvalidArgument("components must be positive semidefinite");
    all_zero = all_zero && ak.is_zero(1e-14);
  }
  if (all_zero) throw InvalidArgument("all components are zero");
  if (!(eps > 0.0) || eps * s >= 1.0) throw InvalidArgument("eps must lie in (0, 1/s)");

  // Blocks X1 = M3+D, X2 = M3-D, X3 = M3+S, X4 = M3-S, X5 = M3 - eps I.
  sdp::SdpProblem p;
  p.block_dims.assign(5, s);
  const auto basis = hermitian_basis(s);
  const auto id = HermitianMatrix::identity(s);
  for (const auto& h : basis) {
    auto& r = p.add_constraint(0.0);
    r.blocks[0] = h;
    r.blocks[1] = h;
    r.blocks[2] = -h;
    r.blocks[3] = -h;
  }
  for (const auto& h : basis) {
    auto& r = p.add_constraint(-eps * h.trace());
    r.blocks[4] = h;
    r.blocks[0] = -0.5 * h;
    r.blocks[1] = -0.5 * h;
  }
  {
    auto& r = p.add_constraint(1.0);
    r.blocks[0] = 0.5 * id;
    r.blocks[1] = 0.5 * id;
  }
  for (int k = 0; k < 4; ++k) p.add_constraint(0.0).blocks[k] = a[k];

  EssentialBoundaryResult out;
  sdp::SdpOutcome res;
  try {
    res = sdp::solve(p, opts);
  } catch (const sdp::InconsistentConstraints& e) {
    if (sdp::farkas_valid(p, e.combination)) {
      out.verdict = EssentialVerdict::No;
      out.message = std::string("linear constraints inconsistent: ") + e.what();
    } else {
      out.message = e.what();
    }
    return out;
  }
  if (res.status == sdp::Status::Infeasible) {
    out.verdict = EssentialVerdict::No;
    out.message = "no functional exists (Farkas certificate verified)";
    return out;
  }
  if (res.status != sdp::Status::Feasible) {
    out.message = "solver: " + res.message;
    return out;
  }
  const auto& x = *res.primal;
  const HermitianMatrix m3 = 0.5 * (x[0] + x[1]);
  const HermitianMatrix d = 0.5 * (x[0] - x[1]);
  const HermitianMatrix sm = 0.5 * (x[2] - x[3]);
  out.m3 = m3;
  out.d = d;
  out.s = sm;
  out.margin = min_eigenvalue(m3);
  for (int k = 0; k < 4; ++k) out.orthogonality = std::max(out.orthogonality, std::abs(trace_inner(a[k], x[k])));
  out.u = psd_sqrt(m3).matrix();
  SeparationFunctional phi;
  phi.n = {(0.5 * (sm + d)).conjugate(), (0.5 * (sm - d)).conjugate(), m3.conjugate()};
  phi.margin = out.margin;
  out.functional = std::move(phi);
  std::string why;
  if (check_essential_certificate(a, m3, d, sm, eps, 1e-6, &why)) {
    out.verdict = EssentialVerdict::InEssentialBoundary;
    out.message = "functional found";
  } else {
    out.message = "solver point failed the check: " + why;
  }
  return out;
}

CompressionReport compression_obstruction_demo(const std::vector<double>& angles, int trials,
                                               std::uint64_t seed, double threshold) {
  CompressionReport rep;
  rep.r = static_cast<int>(angles.size());
  if (rep.r < 1) throw InvalidArgument("need at least one angle");
  for (size_t i = 0; i < angles.size(); ++i) {
    if (!(angles[i] > 0.0 && angles[i] < kHalfPi)) throw InvalidArgument("angles must lie in (0, pi/2)");
    if (i > 0 && !(angles[i] > angles[i - 1])) throw InvalidArgument("angles must be strictly increasing");
  }
  rep.angles = angles;
  rep.required_orthogonal_columns = 2 * rep.r;
  rep.ambient_dimension = rep.r;
  rep.obstruction = rep.required_orthogonal_columns > rep.ambient_dimension;
  rep.threshold = threshold;
  rep.best_residual = std::numeric_limits<double>::infinity();
  std::vector<PauliWitness> w;
  for (double al : angles) w.push_back(pauli_witness(al));
  const int r = rep.r;
  Rng rng(seed);
  auto residual = [&](const std::vector<CMatrix>& v) {
    std::array<CMatrix, 4> p;
    for (int k = 0; k < 4; ++k) {
      p[k] = CMatrix::Zero(r, r);
      for (int i = 0; i < r; ++i) p[k] += v[i] * w[i].components[k].matrix() * v[i].adjoint();
    }
    const double r12 = (p[0] * p[1]).norm() / (p[0].norm() * p[1].norm());
    const double r34 = (p[2] * p[3]).norm() / (p[2].norm() * p[3].norm());
    return std::max(r12, r34);
  };
  auto record = [&](const std::vector<CMatrix>& v) {
    const double res = residual(v);
    ++rep.trials;
    rep.best_residual = std::min(rep.best_residual, res);
    if (res < threshold) ++rep.trials_below_threshold;
  };
  // Structured attempts: columns of one unitary, cycled over the V_i.
  for (int shift = 0; shift < std::max(1, r); ++shift) {
    const CMatrix q = random_unitary(rng, std::max(r, 2)).topRows(r);
    std::vector<CMatrix> v;
    for (int i = 0; i < r; ++i) {
      CMatrix vi(r, 2);
      vi.col(0) = q.col((2 * i + shift) % q.cols());
      vi.col(1) = q.col((2 * i + 1 + shift) % q.cols());
      v.push_back(vi);
    }
    record(v);
  }
  for (int t = 0; t < trials; ++t) {
    std::vector<CMatrix> v;
    for (int i = 0; i < r; ++i) v.push_back(random_complex_matrix(rng, r, 2));
    record(v);
  }
  return rep;
}

LinearPencil effros_winkler_separate(const SeparationFunctional& phi, const RVector& u, double tol) {
  if (static_cast<int>(phi.n.size()) != u.size()) throw DimensionMismatch("unit and functional lengths differ");
  const HermitianMatrix nhat = combine(u, phi.n);
  const double lmin = min_eigenvalue(nhat);
  if (lmin <= tol)
    throw InvalidArgument("sum u_i N_i is not positive definite (min eigenvalue " + std::to_string(lmin) + ")");
  const CMatrix w = pd_inverse_sqrt(nhat).matrix();
  std::vector<HermitianMatrix> m;
  for (const auto& ni : phi.n) m.push_back(ni.congruence(w));
  return LinearPencil(std::move(m), u);
}

}  // namespace freespec

#include "freespec/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/QR>

#include "log.hpp"
#include "sdp_ipm.hpp"

namespace freespec::sdp {

namespace {

using detail::CoreOptions;
using detail::CoreProblem;
using Cplx = std::complex<double>;

// Hermitian-data problem after preprocessing: only nonzero terms are kept.
struct Lifted {
  std::vector<int> dims;
  std::vector<std::vector<std::pair<int, CMatrix>>> rows;
  RVector b;
  std::vector<CMatrix> c;
};

struct LiftedResult {
  bool converged = false;
  std::vector<CMatrix> x;
  RVector y;
  int iterations = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::string message;
};

RMatrix embed(const CMatrix& a) {
  const int n = static_cast<int>(a.rows());
  RMatrix e(2 * n, 2 * n);
  e.topLeftCorner(n, n) = a.real();
  e.topRightCorner(n, n) = -a.imag();
  e.bottomLeftCorner(n, n) = a.imag();
  e.bottomRightCorner(n, n) = a.real();
  return 0.5 * e;
}

CMatrix decode(const RMatrix& y) {
  const int n = static_cast<int>(y.rows()) / 2;
  CMatrix x(n, n);
  x.real() = 0.5 * (y.topLeftCorner(n, n) + y.bottomRightCorner(n, n));
  x.imag() = 0.5 * (y.bottomLeftCorner(n, n) - y.topRightCorner(n, n));
  return x;
}

bool is_real(const CMatrix& a) { return a.imag().cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + a.norm()); }

template <class Core>
void copy_stats(const Core& r, LiftedResult* out) {
  out->converged = r.converged;
  out->y = r.y;
  out->iterations = r.iterations;
  out->primal_objective = r.primal_objective;
  out->dual_objective = r.dual_objective;
  out->message = r.message;
}

LiftedResult run_lifted(const Lifted& p, Embedding embedding, const CoreOptions& co) {
  const int nb = static_cast<int>(p.dims.size());
  LiftedResult out;
  if (embedding == Embedding::ComplexNative) {
    CoreProblem<Cplx> q;
    q.dims = p.dims;
    q.b = p.b;
    q.c = p.c;
    q.rows.resize(p.rows.size());
    for (size_t i = 0; i < p.rows.size(); ++i)
      for (const auto& [blk, a] : p.rows[i]) q.rows[i].push_back({blk, a});
    auto r = detail::solve_core(q, co);
    copy_stats(r, &out);
    out.x = r.x;
    return out;
  }
  // Blocks whose data are all real stay real; others are doubled.
  std::vector<bool> real_block(nb, true);
  for (int k = 0; k < nb; ++k) real_block[k] = is_real(p.c[k]);
  for (const auto& row : p.rows)
    for (const auto& [blk, a] : row)
      if (real_block[blk] && !is_real(a)) real_block[blk] = false;
  auto lift = [&](int blk, const CMatrix& a) -> RMatrix {
    return real_block[blk] ? RMatrix(a.real()) : embed(a);
  };
  CoreProblem<double> q;
  q.b = p.b;
  for (int k = 0; k < nb; ++k) {
    q.dims.push_back(real_block[k] ? p.dims[k] : 2 * p.dims[k]);
    q.c.push_back(lift(k, p.c[k]));
  }
  q.rows.resize(p.rows.size());
  for (size_t i = 0; i < p.rows.size(); ++i)
    for (const auto& [blk, a] : p.rows[i]) q.rows[i].push_back({blk, lift(blk, a)});
  auto r = detail::solve_core(q, co);
  copy_stats(r, &out);
  out.x.resize(nb);
  for (int k = 0; k < nb; ++k)
    out.x[k] = real_block[k] ? CMatrix(r.x[k].cast<Cplx>()) : decode(r.x[k]);
  return out;
}

// Independent, unit-norm rows of the original problem.
struct Reduced {
  std::vector<int> kept;       // original row index per reduced row
  std::vector<double> scale;   // reduced row = original row / scale
  Lifted lifted;
};

Reduced reduce(const SdpProblem& p) {
  const int m = p.num_constraints();
  const int nb = p.num_blocks();
  int ncoord = 0;
  for (int d : p.block_dims) ncoord += d * d;
  RMatrix coords(ncoord, m);
  for (int i = 0; i < m; ++i) {
    int off = 0;
    for (int k = 0; k < nb; ++k) {
      const int n = p.block_dims[k];
      coords.col(i).segment(off, n * n) = hermitian_coordinates(p.constraints[i].blocks[k]);
      off += n * n;
    }
  }
  RVector b(m);
  for (int i = 0; i < m; ++i) b(i) = p.constraints[i].rhs;

  Reduced red;
  if (m > 0) {
    Eigen::ColPivHouseholderQR<RMatrix> qr(coords);
    const double cmax = coords.cwiseAbs().maxCoeff();
    qr.setThreshold(1e-10);
    const int rank = cmax == 0.0 ? 0 : static_cast<int>(qr.rank());
    for (int j = 0; j < rank; ++j) red.kept.push_back(qr.colsPermutation().indices()(j));
    std::sort(red.kept.begin(), red.kept.end());
    if (rank < m) {
      // Express every row through the kept ones and compare right-hand sides.
      RMatrix basis(ncoord, rank);
      RVector bk(rank);
      for (int j = 0; j < rank; ++j) {
        basis.col(j) = coords.col(red.kept[j]);
        bk(j) = b(red.kept[j]);
      }
      Eigen::ColPivHouseholderQR<RMatrix> bq(basis);
      for (int i = 0; i < m; ++i) {
        if (std::find(red.kept.begin(), red.kept.end(), i) != red.kept.end()) continue;
        RVector c = rank > 0 ? RVector(bq.solve(coords.col(i))) : RVector();
        const double fit = rank > 0 ? bk.dot(c) : 0.0;
        const double gap = b(i) - fit;
        if (std::abs(gap) > 1e-9 * (1.0 + std::abs(b(i)) + (rank > 0 ? c.cwiseAbs().dot(bk.cwiseAbs()) : 0.0))) {
          std::vector<double> y(m, 0.0);
          y[i] = 1.0 / gap;
          for (int j = 0; j < rank; ++j) y[red.kept[j]] = -c(j) / gap;
          std::ostringstream msg;
          msg << "constraint " << i << " is a combination of others with conflicting rhs (gap "
              << gap << ")";
          throw InconsistentConstraints(msg.str(), std::move(y));
        }
      }
    }
  }
  Lifted& L = red.lifted;
  L.dims = p.block_dims;
  L.b.resize(static_cast<int>(red.kept.size()));
  for (size_t j = 0; j < red.kept.size(); ++j) {
    const auto& con = p.constraints[red.kept[j]];
    const double s = coords.col(red.kept[j]).norm();
    red.scale.push_back(s);
    std::vector<std::pair<int, CMatrix>> row;
    for (int k = 0; k < nb; ++k)
      if (!con.blocks[k].is_zero()) row.emplace_back(k, con.blocks[k].matrix() / s);
    L.rows.push_back(std::move(row));
    L.b(static_cast<int>(j)) = con.rhs / s;
  }
  for (int k = 0; k < nb; ++k) {
    const int n = p.block_dims[k];
    L.c.push_back(p.objective ? (*p.objective)[k].matrix() : CMatrix(CMatrix::Zero(n, n)));
  }
  return red;
}

std::vector<double> expand_y(const Reduced& red, const RVector& y, int m) {
  std::vector<double> out(m, 0.0);
  for (size_t j = 0; j < red.kept.size(); ++j) out[red.kept[j]] = y(static_cast<int>(j)) / red.scale[j];
  return out;
}

std::vector<HermitianMatrix> to_hermitian(const std::vector<CMatrix>& xs) {
  std::vector<HermitianMatrix> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(HermitianMatrix::from_symmetrized(x));
  return out;
}

struct PhaseOne {
  bool converged = false;
  double t = 0.0;
  std::vector<CMatrix> x;
  RVector y;            // multipliers of the reduced rows
  bool trace_active = false;
  int iterations = 0;
  std::string message;
};

// minimize tau  s.t.  <A_i,W> - a_i tau = b_i - a_i,  sum tr W + sigma = R,
// W, tau, sigma >= 0, and X = W - (tau - 1) I.
PhaseOne phase_one(const Lifted& p, double R, Embedding emb, const CoreOptions& co) {
  const int nb = static_cast<int>(p.dims.size());
  const int m = static_cast<int>(p.rows.size());
  Lifted q;
  q.dims = p.dims;
  q.dims.push_back(1);
  q.dims.push_back(1);
  const int tau = nb, sig = nb + 1;
  q.b.resize(m + 1);
  for (int i = 0; i < m; ++i) {
    double a = 0.0;
    auto row = p.rows[i];
    for (const auto& [blk, mat] : p.rows[i]) a += mat.trace().real();
    if (a != 0.0) row.emplace_back(tau, CMatrix::Constant(1, 1, -a));
    q.rows.push_back(std::move(row));
    q.b(i) = p.b(i) - a;
  }
  std::vector<std::pair<int, CMatrix>> trace_row;
  for (int k = 0; k < nb; ++k) trace_row.emplace_back(k, CMatrix::Identity(p.dims[k], p.dims[k]));
  trace_row.emplace_back(sig, CMatrix::Constant(1, 1, 1.0));
  q.rows.push_back(std::move(trace_row));
  q.b(m) = R;
  for (int k = 0; k < nb; ++k) q.c.push_back(CMatrix::Zero(p.dims[k], p.dims[k]));
  q.c.push_back(CMatrix::Constant(1, 1, 1.0));
  q.c.push_back(CMatrix::Zero(1, 1));

  LiftedResult r = run_lifted(q, emb, co);
  PhaseOne out;
  out.converged = r.converged;
  out.iterations = r.iterations;
  out.message = r.message;
  const double tau_v = r.x[tau](0, 0).real();
  out.t = tau_v - 1.0;
  for (int k = 0; k < nb; ++k)
    out.x.push_back(r.x[k] - out.t * CMatrix::Identity(p.dims[k], p.dims[k]));
  out.y = r.y.head(m);
  out.trace_active = r.x[sig](0, 0).real() < 1e-6 * R;
  return out;
}

// Trace budget large enough to contain a shifted least-norm solution.
double initial_trace_bound(const Lifted& p) {
  const int nb = static_cast<int>(p.dims.size());
  const int m = static_cast<int>(p.rows.size());
  int ntot = 0;
  for (int d : p.dims) ntot += d;
  RMatrix gram = RMatrix::Zero(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (const auto& [bi, ai] : p.rows[i])
        for (const auto& [bj, aj] : p.rows[j])
          if (bi == bj) gram(i, j) += std::real((ai.conjugate().cwiseProduct(aj)).sum());
  RVector w = m > 0 ? RVector(gram.ldlt().solve(p.b)) : RVector();
  double trace = 0.0, shift = 0.0;
  for (int k = 0; k < nb; ++k) {
    CMatrix x0 = CMatrix::Zero(p.dims[k], p.dims[k]);
    for (int i = 0; i < m; ++i)
      for (const auto& [blk, a] : p.rows[i])
        if (blk == k) x0 += w(i) * a;
    HermitianMatrix h = HermitianMatrix::from_symmetrized(x0);
    trace += h.trace();
    shift = std::max(shift, -min_eigenvalue(h));
  }
  const double t0 = shift + 1.0;
  return 10.0 * (trace + t0 * ntot + ntot);
}

// Least-squares correction onto {A(X) = b}; removes residual left by an ill-conditioned Schur complement.
std::vector<HermitianMatrix> polish(const SdpProblem& p, std::vector<HermitianMatrix> x) {
  const int m = p.num_constraints();
  if (m == 0) return x;
  RMatrix gram(m, m);
  RVector r(m);
  for (int i = 0; i < m; ++i) {
    r(i) = p.constraints[i].rhs - evaluate_row(p.constraints[i].blocks, x);
    for (int j = 0; j <= i; ++j) gram(i, j) = gram(j, i) = evaluate_row(p.constraints[i].blocks, p.constraints[j].blocks);
  }
  const RVector w = gram.completeOrthogonalDecomposition().solve(r);
  const auto dx = adjoint_map(p, std::vector<double>(w.data(), w.data() + m));
  for (int k = 0; k < p.num_blocks(); ++k) x[k] += dx[k];
  return x;
}

// Keeps the primal only if it verifies, possibly after polishing.
bool attach_primal(SdpOutcome& out, const SdpProblem& p, std::vector<HermitianMatrix> x) {
  out.primal = std::move(x);
  VerifyReport v = verify(out, p);
  freespec::detail::logger().debug("primal check: residual {}, min eigenvalue {}", v.max_residual, v.min_eigenvalue);
  if (v.ok) return true;
  out.primal = polish(p, *out.primal);
  v = verify(out, p);
  freespec::detail::logger().debug("after polish: residual {}, min eigenvalue {}", v.max_residual, v.min_eigenvalue);
  if (v.ok) return true;
  out.primal.reset();
  return false;
}

SdpOutcome feasibility(const SdpProblem& p, const Reduced& red, const SolveOptions& opts,
                       int prior_iterations) {
  SdpOutcome out;
  out.iterations = prior_iterations;
  CoreOptions co;
  co.max_iter = opts.max_iter;
  co.tol = opts.ipm_tol;
  double R = initial_trace_bound(red.lifted);
  for (int attempt = 0; attempt < 4; ++attempt, R *= 100.0) {
    PhaseOne ph = phase_one(red.lifted, R, opts.embedding, co);
    out.iterations += ph.iterations;
    out.phase1_value = ph.t;
    freespec::detail::logger().debug("phase-I attempt {}: R={} t={} ({} iterations, {})", attempt, R, ph.t,
                           ph.iterations, ph.message);
    if (!ph.converged) {
      // A stalled run still counts when its iterate or multipliers check out.
      SdpOutcome stalled = out;
      stalled.status = Status::Feasible;
      if (ph.t < opts.tol && attach_primal(stalled, p, to_hermitian(ph.x))) {
        stalled.message = "phase-I stalled at t = " + std::to_string(ph.t) + "; point verified";
        return stalled;
      }
      std::vector<double> y = expand_y(red, ph.y, p.num_constraints());
      double by = 0.0, lmax = 0.0;
      if (farkas_valid(p, y, &by, &lmax)) {
        for (double& v : y) v /= by;
        out.status = Status::Infeasible;
        out.dual_certificate = FarkasCertificate{y, 1.0, lmax / by};
        out.message = "Farkas certificate verified";
        return out;
      }
      out.status = Status::NumericalFailure;
      out.message = "phase-I did not converge: " + ph.message;
      return out;
    }
    if (ph.t < opts.tol) {
      out.status = Status::Feasible;
      if (attach_primal(out, p, to_hermitian(ph.x))) {
        out.message = "phase-I optimum below threshold";
        return out;
      }
      out.status = Status::NumericalFailure;
      out.message = "phase-I optimum below threshold but the point failed verification";
      return out;
    }
    std::vector<double> y = expand_y(red, ph.y, p.num_constraints());
    double by = 0.0, lmax = 0.0;
    const bool ok = farkas_valid(p, y, &by, &lmax);
    if (by > 0) {
      for (double& v : y) v /= by;
      lmax /= by;
      by = 1.0;
    }
    if (ok) {
      out.status = Status::Infeasible;
      out.dual_certificate = FarkasCertificate{y, by, lmax};
      out.message = "Farkas certificate verified";
      return out;
    }
    if (!ph.trace_active) {
      out.status = Status::NumericalFailure;
      out.message = "phase-I optimum positive but certificate failed the eigenvalue check";
      return out;
    }
  }
  out.status = Status::NumericalFailure;
  out.message = "trace bound remained active";
  return out;
}

}  // namespace

Constraint& SdpProblem::add_constraint(double rhs) {
  Constraint c;
  c.rhs = rhs;
  for (int d : block_dims) c.blocks.push_back(HermitianMatrix::zero(d));
  constraints.push_back(std::move(c));
  return constraints.back();
}

void SdpProblem::validate() const {
  for (int d : block_dims)
    if (d <= 0) throw DimensionMismatch("block dimensions must be positive");
  auto check = [&](const std::vector<HermitianMatrix>& row, const std::string& what) {
    if (static_cast<int>(row.size()) != num_blocks())
      throw DimensionMismatch(what + " has " + std::to_string(row.size()) + " blocks, expected " +
                              std::to_string(num_blocks()));
    for (int k = 0; k < num_blocks(); ++k)
      if (row[k].dim() != block_dims[k])
        throw DimensionMismatch(what + " block " + std::to_string(k) + " has size " +
                                std::to_string(row[k].dim()) + ", expected " +
                                std::to_string(block_dims[k]));
  };
  for (int i = 0; i < num_constraints(); ++i)
    check(constraints[i].blocks, "constraint " + std::to_string(i));
  if (objective) check(*objective, "objective");
}

double evaluate_row(const std::vector<HermitianMatrix>& row, const std::vector<HermitianMatrix>& x) {
  if (row.size() != x.size()) throw DimensionMismatch("block count mismatch");
  double s = 0.0;
  for (size_t k = 0; k < row.size(); ++k) s += trace_inner(row[k], x[k]);
  return s;
}

std::vector<HermitianMatrix> adjoint_map(const SdpProblem& p, const std::vector<double>& y) {
  if (static_cast<int>(y.size()) != p.num_constraints())
    throw DimensionMismatch("multiplier count does not match constraint count");
  std::vector<HermitianMatrix> out;
  for (int d : p.block_dims) out.push_back(HermitianMatrix::zero(d));
  for (int i = 0; i < p.num_constraints(); ++i) {
    if (y[i] == 0.0) continue;
    for (int k = 0; k < p.num_blocks(); ++k) out[k] += y[i] * p.constraints[i].blocks[k];
  }
  return out;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "Feasible";
    case Status::Infeasible: return "Infeasible";
    case Status::Optimal: return "Optimal";
    case Status::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

bool farkas_valid(const SdpProblem& p, const std::vector<double>& y, double* rhs_value,
                  double* max_eig) {
  double by = 0.0;
  for (int i = 0; i < p.num_constraints(); ++i) by += y[i] * p.constraints[i].rhs;
  double lmax = -std::numeric_limits<double>::infinity();
  for (const auto& q : adjoint_map(p, y)) lmax = std::max(lmax, max_eigenvalue(q));
  if (rhs_value) *rhs_value = by;
  if (max_eig) *max_eig = lmax;
  return by > 0.0 && lmax <= kFarkasTol * by;
}

SdpOutcome solve(const SdpProblem& p, const SolveOptions& opts) {
  p.validate();
  const int m = p.num_constraints();
  if (!p.objective && m == 0) {
    SdpOutcome out;
    out.status = Status::Feasible;
    std::vector<HermitianMatrix> x;
    for (int d : p.block_dims) x.push_back(HermitianMatrix::zero(d));
    out.primal = std::move(x);
    out.message = "no constraints";
    return out;
  }
  Reduced red = reduce(p);
  if (!p.objective) {
    SdpOutcome out = feasibility(p, red, opts, 0);
    if (out.status != Status::NumericalFailure) return out;
    // The two embeddings round differently; a stalled run often succeeds in the other.
    SolveOptions alt = opts;
    alt.embedding = opts.embedding == Embedding::RealSymmetric ? Embedding::ComplexNative : Embedding::RealSymmetric;
    SdpOutcome retry = feasibility(p, red, alt, out.iterations);
    return retry.status != Status::NumericalFailure ? retry : out;
  }

  CoreOptions co;
  co.max_iter = opts.max_iter;
  co.tol = opts.ipm_tol;
  LiftedResult r = run_lifted(red.lifted, opts.embedding, co);
  SdpOutcome opt;
  opt.status = Status::Optimal;
  if (r.converged && attach_primal(opt, p, to_hermitian(r.x))) {
    SdpOutcome out = std::move(opt);
    out.dual = expand_y(red, r.y, m);
    out.objective_value = r.primal_objective;
    out.dual_objective_value = r.dual_objective;
    out.iterations = r.iterations;
    out.message = "optimal";
    return out;
  }
  freespec::detail::logger().debug("optimization stopped ({}); running phase-I", r.message);
  SdpOutcome out = feasibility(p, red, opts, r.iterations);
  if (out.status == Status::Feasible) {
    out.status = Status::NumericalFailure;
    out.primal.reset();
    out.message = "feasible but the objective did not converge (" + r.message + ")";
  }
  return out;
}

VerifyReport verify(const SdpOutcome& outcome, const SdpProblem& p) {
  VerifyReport rep;
  std::ostringstream detail;
  switch (outcome.status) {
    case Status::Feasible:
    case Status::Optimal: {
      if (!outcome.primal || static_cast<int>(outcome.primal->size()) != p.num_blocks()) {
        rep.detail = "primal point missing or of wrong shape";
        return rep;
      }
      const auto& x = *outcome.primal;
      bool psd = true;
      rep.min_eigenvalue = std::numeric_limits<double>::infinity();
      for (int k = 0; k < p.num_blocks(); ++k) {
        if (x[k].dim() != p.block_dims[k]) {
          rep.detail = "primal block " + std::to_string(k) + " has wrong size";
          return rep;
        }
        const double e = min_eigenvalue(x[k]);
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, e);
        if (!is_psd(x[k], 1e-7)) {
          psd = false;
          detail << "block " << k << " min eigenvalue " << e << "; ";
        }
      }
      for (const auto& c : p.constraints)
        rep.max_residual = std::max(rep.max_residual, std::abs(evaluate_row(c.blocks, x) - c.rhs));
      rep.ok = psd && rep.max_residual <= 1e-6;
      if (!psd) detail << "PSD violation";
      if (rep.max_residual > 1e-6) detail << "constraint residual " << rep.max_residual;
      if (rep.ok) detail << "primal point verified";
      break;
    }
    case Status::Infeasible: {
      if (!outcome.dual_certificate ||
          static_cast<int>(outcome.dual_certificate->y.size()) != p.num_constraints()) {
        rep.detail = "Farkas certificate missing or of wrong length";
        return rep;
      }
      double by = 0.0, lmax = 0.0;
      rep.ok = farkas_valid(p, outcome.dual_certificate->y, &by, &lmax);
      rep.max_residual = std::max(0.0, lmax);
      if (rep.ok) {
        detail << "Farkas certificate verified: b.y = " << by << ", max eigenvalue " << lmax;
      } else {
        detail << "Farkas certificate rejected: b.y = " << by << ", max eigenvalue " << lmax;
      }
      break;
    }
    case Status::NumericalFailure:
      detail << "no verdict to verify";
      break;
  }
  rep.detail = detail.str();
  return rep;
}

}  // namespace freespec::sdp

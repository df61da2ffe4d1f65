#include "sdp_ipm.hpp"

#include "log.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace freespec::sdp::detail {

namespace {

template <class Mat>
double inner(const Mat& a, const Mat& b) {
  // Re tr(A B) for self-adjoint A.
  return std::real((a.conjugate().cwiseProduct(b)).sum());
}

template <class Mat>
Mat herm(const Mat& m) {
  return 0.5 * (m + m.adjoint());
}

// Largest alpha with x + alpha*dx >= 0, given x > 0. Infinity if unbounded.
template <class Mat>
double max_step(const Mat& x, const Mat& dx, bool* ok) {
  const int n = static_cast<int>(x.rows());
  if (n == 1) {
    const double xv = std::real(x(0, 0));
    const double dv = std::real(dx(0, 0));
    if (xv <= 0) *ok = false;
    return dv < 0 ? -xv / dv : std::numeric_limits<double>::infinity();
  }
  Eigen::LLT<Mat> llt(x);
  if (llt.info() != Eigen::Success) {
    *ok = false;
    return 0.0;
  }
  const auto l = llt.matrixL();
  Mat t = l.solve(dx);
  Mat s = l.solve(t.adjoint()).adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(herm(s), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

template <class Mat>
bool inverse_pd(const Mat& z, Mat* out) {
  const int n = static_cast<int>(z.rows());
  if (n == 1) {
    if (std::real(z(0, 0)) <= 0) return false;
    *out = Mat::Constant(1, 1, 1.0 / std::real(z(0, 0)));
    return true;
  }
  Eigen::LLT<Mat> llt(z);
  if (llt.info() != Eigen::Success) return false;
  *out = herm(Mat(llt.solve(Mat::Identity(n, n))));
  return true;
}

}  // namespace

template <class Scalar>
CoreResult<Scalar> solve_core(const CoreProblem<Scalar>& p, const CoreOptions& opts) {
  using Mat = typename CoreProblem<Scalar>::Mat;
  const int nb = static_cast<int>(p.dims.size());
  const int m = static_cast<int>(p.rows.size());
  int ntot = 0;
  for (int d : p.dims) ntot += d;

  CoreResult<Scalar> res;

  auto apply_a = [&](const std::vector<Mat>& x) {
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (const auto& t : p.rows[i]) s += inner(t.a, x[t.block]);
      v(i) = s;
    }
    return v;
  };
  auto apply_at = [&](const Eigen::VectorXd& y) {
    std::vector<Mat> out(nb);
    for (int b = 0; b < nb; ++b) out[b] = Mat::Zero(p.dims[b], p.dims[b]);
    for (int i = 0; i < m; ++i)
      for (const auto& t : p.rows[i]) out[t.block] += y(i) * t.a;
    return out;
  };
  auto block_inner = [&](const std::vector<Mat>& a, const std::vector<Mat>& b) {
    double s = 0.0;
    for (int k = 0; k < nb; ++k) s += inner(a[k], b[k]);
    return s;
  };
  auto block_norm = [&](const std::vector<Mat>& a) {
    double s = 0.0;
    for (const auto& x : a) s += x.squaredNorm();
    return std::sqrt(s);
  };

  const double norm_b = 1.0 + p.b.norm();
  const double norm_c = 1.0 + block_norm(p.c);

  // Starting point in the spirit of SDPT3's default.
  res.x.resize(nb);
  res.z.resize(nb);
  for (int b = 0; b < nb; ++b) {
    const int n = p.dims[b];
    double xi = std::max(10.0, std::sqrt(static_cast<double>(n)));
    double eta = std::max(10.0, std::sqrt(static_cast<double>(n)));
    for (int i = 0; i < m; ++i) {
      for (const auto& t : p.rows[i]) {
        if (t.block != b) continue;
        const double an = t.a.norm();
        xi = std::max(xi, n * (1.0 + std::abs(p.b(i))) / (1.0 + an));
        eta = std::max(eta, an);
      }
    }
    eta = std::max(eta, p.c[b].norm());
    res.x[b] = xi * Mat::Identity(n, n);
    res.z[b] = eta * Mat::Identity(n, n);
  }
  res.y = Eigen::VectorXd::Zero(m);

  std::vector<Mat> zinv(nb), h(nb), dx(nb), dz(nb), dxa(nb), dza(nb), rd(nb);
  // Per constraint, per term: G = X A Z^{-1}.
  std::vector<std::vector<Mat>> g(m);

  Eigen::MatrixXd gram_m(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = 0.0;
      for (const auto& ti : p.rows[i])
        for (const auto& tj : p.rows[j])
          if (ti.block == tj.block) v += inner(ti.a, tj.a);
      gram_m(i, j) = gram_m(j, i) = v;
    }
  const Eigen::LDLT<Eigen::MatrixXd> gram(gram_m);

  // Rounding eventually stops progress; the best iterate seen may still be good enough.
  CoreResult<Scalar> best;
  double best_score = std::numeric_limits<double>::infinity();
  int best_it = 0;
  auto give_up = [&](const char* why) {
    if (best_score <= opts.accept_tol) {
      best.converged = true;
      best.iterations = res.iterations;
      best.message = std::string("converged to reduced accuracy (") + why + ")";
      return best;
    }
    res.message = why;
    return res;
  };

  int stall = 0;
  for (int it = 0; it <= opts.max_iter; ++it) {
    res.iterations = it;
    const Eigen::VectorXd ax = apply_a(res.x);
    const Eigen::VectorXd rp = p.b - ax;
    const auto aty = apply_at(res.y);
    for (int b = 0; b < nb; ++b) rd[b] = p.c[b] - aty[b] - res.z[b];
    const double pobj = block_inner(p.c, res.x);
    const double dobj = p.b.dot(res.y);
    const double xz = block_inner(res.x, res.z);
    const double mu = xz / std::max(ntot, 1);

    res.primal_infeasibility = rp.norm() / norm_b;
    res.dual_infeasibility = block_norm(rd) / norm_c;
    res.relative_gap = std::max(std::abs(pobj - dobj), std::abs(xz)) /
                       (1.0 + std::abs(pobj) + std::abs(dobj));
    res.primal_objective = pobj;
    res.dual_objective = dobj;

    if (res.primal_infeasibility < opts.tol && res.dual_infeasibility < opts.tol &&
        res.relative_gap < opts.tol) {
      res.converged = true;
      res.message = "converged";
      return res;
    }
    const double score = std::max({res.primal_infeasibility, res.dual_infeasibility, res.relative_gap});
    if (score < best_score) {
      best = res;
      best_score = score;
      best_it = it;
    } else if (best_score <= opts.accept_tol && it - best_it >= 5) {
      return give_up("no progress");
    }
    freespec::detail::logger().trace("ipm {}: pinf {:.2e} dinf {:.2e} gap {:.2e} mu {:.2e}", it,
                                     res.primal_infeasibility, res.dual_infeasibility, res.relative_gap, mu);
    if (it == opts.max_iter) break;

    for (int b = 0; b < nb; ++b) {
      if (!inverse_pd(res.z[b], &zinv[b])) {
        return give_up("dual slack lost definiteness");
      }
      h[b] = res.x[b] * rd[b] * zinv[b];
    }

    // Schur complement M_ij = <A_i, X A_j Z^{-1}>.
    Eigen::MatrixXd schur = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      g[j].resize(p.rows[j].size());
      for (size_t k = 0; k < p.rows[j].size(); ++k) {
        const auto& t = p.rows[j][k];
        g[j][k] = res.x[t.block] * t.a * zinv[t.block];
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        double s = 0.0;
        for (const auto& ti : p.rows[i]) {
          for (size_t k = 0; k < p.rows[j].size(); ++k) {
            if (p.rows[j][k].block == ti.block) s += inner(ti.a, g[j][k]);
          }
        }
        schur(i, j) = s;
        schur(j, i) = s;
      }
    }
    Eigen::LLT<Eigen::MatrixXd> chol(schur);
    if (chol.info() != Eigen::Success) {
      const double reg = 1e-13 * (1.0 + schur.diagonal().cwiseAbs().maxCoeff());
      chol.compute(schur + reg * Eigen::MatrixXd::Identity(m, m));
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt;
    const bool use_ldlt = chol.info() != Eigen::Success;
    if (use_ldlt) ldlt.compute(schur);
    auto solve_schur = [&](const Eigen::VectorXd& r) -> Eigen::VectorXd {
      return use_ldlt ? Eigen::VectorXd(ldlt.solve(r)) : Eigen::VectorXd(chol.solve(r));
    };

    const Eigen::VectorXd a_zinv = apply_a(zinv);
    const Eigen::VectorXd a_h = apply_a(h);

    auto direction = [&](double sigma, const std::vector<Mat>* corr, std::vector<Mat>& ddx,
                         Eigen::VectorXd& ddy, std::vector<Mat>& ddz) {
      Eigen::VectorXd rhs = p.b - sigma * mu * a_zinv + a_h;
      std::vector<Mat> cz;
      if (corr) {
        cz.resize(nb);
        for (int b = 0; b < nb; ++b) cz[b] = dxa[b] * dza[b] * zinv[b];
        rhs += apply_a(cz);
      }
      ddy = solve_schur(rhs);
      const auto atdy = apply_at(ddy);
      for (int b = 0; b < nb; ++b) {
        ddz[b] = rd[b] - atdy[b];
        Mat t = sigma * mu * zinv[b] - res.x[b] - res.x[b] * ddz[b] * zinv[b];
        if (corr) t -= cz[b];
        ddx[b] = herm(t);
      }
      // Restore A(dX) = b - A(X), which the Schur solve loses once X Z^{-1} is ill-conditioned.
      const Eigen::VectorXd defect = rp - apply_a(ddx);
      const auto fix = apply_at(gram.solve(defect));
      for (int b = 0; b < nb; ++b) ddx[b] += fix[b];
    };

    auto step_lengths = [&](const std::vector<Mat>& ddx, const std::vector<Mat>& ddz, double* ap,
                            double* ad) {
      bool ok = true;
      double sp = std::numeric_limits<double>::infinity();
      double sd = sp;
      for (int b = 0; b < nb; ++b) {
        sp = std::min(sp, max_step(res.x[b], ddx[b], &ok));
        sd = std::min(sd, max_step(res.z[b], ddz[b], &ok));
      }
      *ap = std::min(1.0, opts.step_fraction * sp);
      *ad = std::min(1.0, opts.step_fraction * sd);
      return ok;
    };

    Eigen::VectorXd dya;
    direction(0.0, nullptr, dxa, dya, dza);
    double apa = 0, ada = 0;
    if (!step_lengths(dxa, dza, &apa, &ada)) {
      return give_up("iterate lost definiteness");
    }
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b)
      mu_aff += inner(Mat(res.x[b] + apa * dxa[b]), Mat(res.z[b] + ada * dza[b]));
    mu_aff /= std::max(ntot, 1);
    const double ratio = std::max(0.0, mu_aff / mu);
    const double sigma = std::min(1.0, ratio * ratio * ratio);

    Eigen::VectorXd dy;
    direction(sigma, &dxa, dx, dy, dz);
    double ap = 0, ad = 0;
    if (!step_lengths(dx, dz, &ap, &ad)) {
      return give_up("iterate lost definiteness");
    }
    for (int b = 0; b < nb; ++b) {
      res.x[b] += ap * dx[b];
      res.z[b] += ad * dz[b];
    }
    res.y += ad * dy;
    freespec::detail::logger().trace("ipm {}: steps {:.3e} {:.3e}", it, ap, ad);

    stall = (ap < 1e-8 && ad < 1e-8) ? stall + 1 : 0;
    if (stall >= 5) {
      return give_up("step lengths collapsed");
    }
  }
  return give_up("iteration limit reached");
}

template CoreResult<double> solve_core(const CoreProblem<double>&, const CoreOptions&);
template CoreResult<std::complex<double>> solve_core(const CoreProblem<std::complex<double>>&,
                                                     const CoreOptions&);

}  // namespace freespec::sdp::detail

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "freespec/opsys.hpp"
#include "freespec/random.hpp"

namespace freespec {

namespace {

constexpr double kPi = 3.14159265358979323846;

using Vec3 = std::array<double, 3>;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// A = a0 I + a.sigma for a 2x2 Hermitian A.
struct Bloch {
  double a0;
  Vec3 a;
  explicit Bloch(const HermitianMatrix& h)
      : a0(0.5 * (h(0, 0).real() + h(1, 1).real())),
        a{h(0, 1).real(), -h(0, 1).imag(), 0.5 * (h(0, 0).real() - h(1, 1).real())} {}
  double at(const Vec3& r) const { return a0 + dot3(a, r); }
};

CVector from_bloch(const Vec3& r) {
  const double theta = 0.5 * std::acos(std::clamp(r[2], -1.0, 1.0));
  const double phi = std::atan2(r[1], r[0]);
  CVector v(2);
  v(0) = std::cos(theta);
  v(1) = std::polar(std::sin(theta), phi);
  return v;
}

double quartic(const CMatrix& m, const CMatrix& n, const CVector& v) {
  const double nv = v.dot(n * v).real();
  return nv * nv - v.dot(m * v).real();
}

// Projected gradient ascent on the unit sphere of C^s with backtracking.
CVector ascend(const CMatrix& m, const CMatrix& n, CVector v, int iters = 2000) {
  double f = quartic(m, n, v);
  double step = 0.5;
  for (int it = 0; it < iters; ++it) {
    const double nv = v.dot(n * v).real();
    CVector g = 2.0 * (2.0 * nv * (n * v) - m * v);
    g -= v.dot(g).real() * v;
    if (g.norm() < 1e-13) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      CVector w = (v + step * g).normalized();
      const double fw = quartic(m, n, w);
      if (fw > f) {
        v = w;
        f = fw;
        step *= 1.5;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return v;
}

}  // namespace

double comei_lambda1(const HermitianMatrix& m, const HermitianMatrix& n) {
  if (m.dim() != n.dim()) throw DimensionMismatch("M and N must have the same size");
  return max_eigenvalue(HermitianMatrix::from_symmetrized(n.matrix() * n.matrix()) - m);
}

double eigen_residual(const HermitianMatrix& a, const CVector& v) {
  const CVector av = a.matrix() * v;
  return (av - v.dot(av) * v).norm();
}

Lambda2Result comei_lambda2(const HermitianMatrix& m, const HermitianMatrix& n, const Lambda2Options& opts) {
  if (m.dim() != n.dim()) throw DimensionMismatch("M and N must have the same size");
  const int s = n.dim();
  Lambda2Result out;
  if (s == 1) {
    out.argmax = CVector::Ones(1);
    out.value = n(0, 0).real() * n(0, 0).real() - m(0, 0).real();
    return out;
  }
  const CMatrix& mm = m.matrix();
  const CMatrix& nm = n.matrix();
  if (s == 2) {
    const Bloch bm(m), bn(n);
    auto f = [&](const Vec3& r) {
      const double x = bn.at(r);
      return x * x - bm.at(r);
    };
    const int g = std::max(opts.grid, 4);
    const double h = kPi / g;
    std::vector<double> cp(2 * g), sp(2 * g);
    for (int k = 0; k < 2 * g; ++k) {
      cp[k] = std::cos(k * h);
      sp[k] = std::sin(k * h);
    }
    double best = -std::numeric_limits<double>::infinity();
    Vec3 arg{0, 0, 1};
    for (int j = 0; j <= g / 2; ++j) {
      const double th = j * h;
      const double s2 = std::sin(2 * th), c2 = std::cos(2 * th);
      for (int k = 0; k < 2 * g; ++k) {
        const Vec3 r{s2 * cp[k], s2 * sp[k], c2};
        const double val = f(r);
        if (val > best) {
          best = val;
          arg = r;
        }
      }
    }
    // Local refinement from the grid maximiser.
    CVector v = ascend(mm, nm, from_bloch(arg));
    out.argmax = v;
    out.value = std::max(best, quartic(mm, nm, v));
    if (out.value > quartic(mm, nm, v)) out.argmax = from_bloch(arg);
    return out;
  }
  Rng rng(opts.seed);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<CVector> starts;
  const auto en = eigh(n);
  const auto el = eigh(HermitianMatrix::from_symmetrized(nm * nm) - m);
  for (int k = 0; k < s; ++k) {
    starts.push_back(en.eigenvectors.col(k));
    starts.push_back(el.eigenvectors.col(k));
  }
  for (int k = 0; k < opts.restarts; ++k) starts.push_back(random_unit_vector(rng, s));
  for (const auto& v0 : starts) {
    CVector v = ascend(mm, nm, v0);
    const double val = quartic(mm, nm, v);
    if (val > best) {
      best = val;
      out.argmax = v;
    }
  }
  out.value = best;
  out.lower_bound_only = true;
  return out;
}

}  // namespace freespec

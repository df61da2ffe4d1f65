#include "freespec/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace freespec {

namespace {

constexpr double kPi = 3.14159265358979323846;

int rank_of(const std::vector<RVector>& vs, int d) {
  if (vs.empty()) return 0;
  RMatrix m(d, static_cast<int>(vs.size()));
  for (size_t k = 0; k < vs.size(); ++k) m.col(static_cast<int>(k)) = vs[k];
  Eigen::FullPivLU<RMatrix> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

// Calls f on every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& f) {
  if (k > n) return;
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    f(idx);
    int i = k - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

bool tight(const RVector& f, const RVector& g) {
  return std::abs(f.dot(g)) <= PolyhedralCone::kTol * (1.0 + f.norm() * g.norm());
}

// Facet normals (unit length, unknown scale w.r.t. u) of cone(gens).
std::vector<RVector> enumerate_facets(const std::vector<RVector>& gens, int d) {
  std::vector<RVector> out;
  if (d == 1) {
    out.push_back(RVector::Constant(1, gens[0](0) > 0 ? 1.0 : -1.0));
    return out;
  }
  const int n = static_cast<int>(gens.size());
  for_each_subset(n, d - 1, [&](const std::vector<int>& idx) {
    RMatrix a(d - 1, d);
    for (int r = 0; r < d - 1; ++r) a.row(r) = gens[idx[r]].transpose().normalized();
    Eigen::FullPivLU<RMatrix> lu(a);
    lu.setThreshold(1e-9);
    if (lu.rank() != d - 1) return;
    RVector nrm = lu.kernel().col(0).normalized();
    bool pos = true, neg = true;
    for (const auto& g : gens) {
      const double v = nrm.dot(g) / g.norm();
      if (v < -PolyhedralCone::kTol) pos = false;
      if (v > PolyhedralCone::kTol) neg = false;
    }
    if (!pos && !neg) return;
    if (!pos) nrm = -nrm;
    for (const auto& f : out)
      if ((f - nrm).norm() < 1e-7) return;
    out.push_back(nrm);
  });
  return out;
}

RVector section_point(const RVector& g, const RVector& h) { return g / h.dot(g); }

// Simplex facets F = V^{-1} (rows), so F.row(k) . v_j = delta_kj.
struct SimplexData {
  std::vector<RVector> vertices;
  double volume = 0.0;
};

double simplex_nu(const RMatrix& f, const RVector& u, const std::vector<RVector>& pts) {
  const RVector fu = f * u;
  if (fu.minCoeff() <= 1e-12) return 0.0;
  double nu = 1.0;
  for (const auto& p : pts) {
    const RVector fp = f * p;
    for (int k = 0; k < fu.size(); ++k)
      if (fp(k) < fu(k)) nu = std::min(nu, fu(k) / (fu(k) - fp(k)));
  }
  return nu;
}

double section_volume(const std::vector<RVector>& verts, const RVector& h) {
  const int d = static_cast<int>(h.size());
  RMatrix v(d, d);
  for (int k = 0; k < d; ++k) v.col(k) = verts[k];
  double fact = 1.0;
  for (int k = 2; k < d; ++k) fact *= k;
  return std::abs(v.determinant()) * h.norm() / fact;
}

// Candidate simplices for the sandwich search, largest section volume first.
std::vector<SimplexData> sandwich_candidates(const PolyhedralCone& c, const Section& sec) {
  const int d = c.dim();
  const auto& pts = sec.points;
  const int n = static_cast<int>(pts.size());
  std::vector<RVector> pool = pts;
  if (d >= 2) {
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        std::vector<RVector> common;
        for (const auto& f : c.facets())
          if (tight(f, pts[a]) && tight(f, pts[b])) common.push_back(f);
        if (rank_of(common, d) < d - 2) continue;
        for (int j = 1; j <= 3; ++j) pool.push_back(pts[a] + (j / 4.0) * (pts[b] - pts[a]));
      }
    }
  }
  std::vector<SimplexData> out;
  for_each_subset(static_cast<int>(pool.size()), d, [&](const std::vector<int>& idx) {
    SimplexData s;
    for (int k : idx) s.vertices.push_back(pool[k]);
    s.volume = section_volume(s.vertices, sec.normal);
    if (s.volume > 1e-12) out.push_back(std::move(s));
  });
  // Maximum-volume vertex simplex moved to u, shrunk until it fits, and its reflection.
  if (n >= d) {
    MaxVolumeSimplex mv = max_volume_inscribed_simplex(c, sec.normal);
    for (double sign : {1.0, -1.0}) {
      double lambda = std::numeric_limits<double>::infinity();
      std::vector<RVector> dirs;
      for (int k : mv.vertices) dirs.push_back(sign * (pts[k] - mv.barycenter));
      for (const auto& w : dirs)
        for (const auto& f : c.facets()) {
          const double fw = f.dot(w);
          if (fw < 0) lambda = std::min(lambda, f.dot(sec.center) / -fw);
        }
      if (!std::isfinite(lambda)) continue;
      SimplexData s;
      for (const auto& w : dirs) s.vertices.push_back(sec.center + lambda * w);
      s.volume = section_volume(s.vertices, sec.normal);
      if (s.volume > 1e-12) out.push_back(std::move(s));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SimplexData& a, const SimplexData& b) { return a.volume > b.volume; });
  return out;
}

RMatrix simplex_facets(const std::vector<RVector>& verts) {
  const int d = static_cast<int>(verts.size());
  RMatrix v(d, d);
  for (int k = 0; k < d; ++k) v.col(k) = verts[k];
  return v.inverse();
}

}  // namespace

void PolyhedralCone::check_generators() const {
  const int d = dim();
  if (d < 1) throw InvalidArgument("cone dimension must be positive");
  if (generators_.empty()) throw InvalidArgument("cone needs at least one generator");
  for (size_t k = 0; k < generators_.size(); ++k) {
    if (generators_[k].size() != d)
      throw DimensionMismatch("generator " + std::to_string(k) + " has length " +
                              std::to_string(generators_[k].size()) + ", expected " +
                              std::to_string(d));
    if (generators_[k].norm() == 0.0) throw InvalidArgument("generator " + std::to_string(k) + " is zero");
  }
  for (size_t a = 0; a < generators_.size(); ++a)
    for (size_t b = a + 1; b < generators_.size(); ++b)
      if ((generators_[a].normalized() - generators_[b].normalized()).norm() < 1e-9)
        throw InvalidArgument("repeated generator: " + std::to_string(a) + " and " + std::to_string(b));
  if (rank_of(generators_, d) < d) throw InvalidArgument("generators do not span R^" + std::to_string(d));
}

PolyhedralCone PolyhedralCone::from_generators(std::vector<RVector> generators, RVector unit) {
  PolyhedralCone c;
  c.generators_ = std::move(generators);
  c.unit_ = std::move(unit);
  c.check_generators();
  const int d = c.dim();
  if (d == 1 && c.generators_.size() > 1) throw InvalidArgument("repeated generator in dimension 1");
  for (auto f : enumerate_facets(c.generators_, d)) {
    const double fu = f.dot(c.unit_);
    if (fu <= kTol * c.unit_.norm()) throw InvalidArgument("unit lies on the boundary of the cone or outside it");
    c.facets_.push_back(f / fu);
  }
  if (rank_of(c.facets_, d) < d) throw InvalidArgument("cone is not salient");
  for (size_t k = 0; k < c.generators_.size(); ++k) {
    std::vector<RVector> at;
    for (const auto& f : c.facets_)
      if (tight(f, c.generators_[k])) at.push_back(f);
    if (rank_of(at, d) < d - 1)
      throw InvalidArgument("generator " + std::to_string(k) + " is not an extreme ray");
  }
  return c;
}

PolyhedralCone PolyhedralCone::from_description(std::vector<RVector> generators,
                                                std::vector<RVector> facets, RVector unit) {
  PolyhedralCone c = from_generators(std::move(generators), std::move(unit));
  std::vector<RVector> given;
  for (size_t k = 0; k < facets.size(); ++k) {
    if (facets[k].size() != c.dim())
      throw DimensionMismatch("facet " + std::to_string(k) + " has wrong length");
    const double fu = facets[k].dot(c.unit_);
    if (fu <= 0.0) throw InvalidArgument("facet " + std::to_string(k) + " is not positive at the unit");
    given.push_back(facets[k] / fu);
  }
  auto covered = [](const std::vector<RVector>& a, const std::vector<RVector>& b) {
    for (const auto& f : a) {
      bool found = false;
      for (const auto& g : b) found = found || (f - g).norm() <= 1e-7 * (1.0 + f.norm());
      if (!found) return false;
    }
    return true;
  };
  if (!covered(given, c.facets_) || !covered(c.facets_, given))
    throw InvalidArgument("facet list does not match the generators");
  c.facets_ = std::move(given);
  return c;
}

double PolyhedralCone::facet_margin(const RVector& x) const {
  if (x.size() != dim()) throw DimensionMismatch("point has wrong dimension");
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : facets_) m = std::min(m, f.dot(x));
  return m;
}

bool PolyhedralCone::contains(const RVector& x, double tol) const {
  return facet_margin(x) >= -tol * (1.0 + x.norm());
}

PolyhedralCone square_cone() {
  std::vector<RVector> g(4, RVector(3));
  g[0] << 1, -1, 1;
  g[1] << -1, 1, 1;
  g[2] << 1, 1, 1;
  g[3] << -1, -1, 1;
  std::vector<RVector> f(4, RVector(3));
  f[0] << -1, 0, 1;  // c - a
  f[1] << 1, 0, 1;   // c + a
  f[2] << 0, -1, 1;  // c - b
  f[3] << 0, 1, 1;   // c + b
  RVector u(3);
  u << 0, 0, 1;
  return PolyhedralCone::from_description(g, f, u);
}

PolyhedralCone positive_orthant(int d) {
  std::vector<RVector> g;
  for (int i = 0; i < d; ++i) g.push_back(RVector::Unit(d, i));
  return PolyhedralCone::from_generators(g, RVector::Ones(d));
}

PolyhedralCone polygon_cone(int n, double radius) {
  if (n < 3) throw InvalidArgument("polygon needs at least 3 vertices");
  std::vector<RVector> g;
  for (int k = 0; k < n; ++k) {
    RVector v(3);
    v << radius * std::cos(2 * kPi * k / n), radius * std::sin(2 * kPi * k / n), 1.0;
    g.push_back(v);
  }
  RVector u(3);
  u << 0, 0, 1;
  return PolyhedralCone::from_generators(g, u);
}

bool is_simplex(const PolyhedralCone& c) {
  return static_cast<int>(c.generators().size()) == c.dim() && rank_of(c.generators(), c.dim()) == c.dim();
}

double generator_condition_number(const PolyhedralCone& c) {
  RMatrix m(c.dim(), static_cast<int>(c.generators().size()));
  for (size_t k = 0; k < c.generators().size(); ++k) m.col(static_cast<int>(k)) = c.generators()[k];
  Eigen::JacobiSVD<RMatrix> svd(m);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

Section section(const PolyhedralCone& c, const RVector& h) {
  if (h.size() != c.dim()) throw DimensionMismatch("hyperplane normal has wrong dimension");
  const double hu = h.dot(c.unit());
  if (std::abs(hu) <= 1e-12 * h.norm() * c.unit().norm())
    throw InvalidArgument("the hyperplane contains the unit");
  Section s;
  s.normal = h / hu;
  s.center = c.unit();
  for (size_t k = 0; k < c.generators().size(); ++k) {
    const auto& g = c.generators()[k];
    if (s.normal.dot(g) <= 1e-12 * g.norm() * s.normal.norm())
      throw InvalidArgument("the hyperplane meets the cone outside the origin (generator " +
                            std::to_string(k) + "); the section is unbounded");
    s.points.push_back(section_point(g, s.normal));
  }
  return s;
}

PolyhedralCone scaled_cone(const PolyhedralCone& c, double nu, const RVector& h) {
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("scaling factor must lie in (0, 1]");
  const Section s = section(c, h);
  std::vector<RVector> g;
  for (const auto& p : s.points) g.push_back(s.center + nu * (p - s.center));
  return PolyhedralCone::from_generators(g, c.unit());
}

bool sandwich_holds(const PolyhedralCone& c, double nu, const RVector& h, const PolyhedralCone& s,
                    double tol) {
  const Section sec = section(c, h);
  for (const auto& p : sec.points)
    if (!s.contains(RVector(sec.center + nu * (p - sec.center)), tol)) return false;
  for (const auto& g : s.generators())
    if (!c.contains(g, tol)) return false;
  return true;
}

std::optional<PolyhedralCone> find_sandwich_simplex(const PolyhedralCone& c, double nu,
                                                    const RVector& h) {
  if (!(nu > 0.0 && nu <= 1.0)) throw InvalidArgument("scaling factor must lie in (0, 1]");
  const Section sec = section(c, h);
  for (const auto& cand : sandwich_candidates(c, sec)) {
    const RMatrix f = simplex_facets(cand.vertices);
    if (simplex_nu(f, sec.center, sec.points) < nu - 1e-12) continue;
    PolyhedralCone s = PolyhedralCone::from_generators(cand.vertices, c.unit());
    if (sandwich_holds(c, nu, h, s)) return s;
  }
  return std::nullopt;
}

SandwichBest best_sandwich_simplex(const PolyhedralCone& c, const RVector& h) {
  const Section sec = section(c, h);
  SandwichBest best;
  const SimplexData* arg = nullptr;
  const auto cands = sandwich_candidates(c, sec);
  for (const auto& cand : cands) {
    const double nu = simplex_nu(simplex_facets(cand.vertices), sec.center, sec.points);
    if (nu > best.nu + 1e-12) {
      best.nu = nu;
      arg = &cand;
    }
  }
  if (arg) best.simplex = PolyhedralCone::from_generators(arg->vertices, c.unit());
  return best;
}

MaxVolumeSimplex max_volume_inscribed_simplex(const PolyhedralCone& c, const RVector& h) {
  const Section sec = section(c, h);
  const int d = c.dim();
  const int n = static_cast<int>(sec.points.size());
  double best = 0.0;
  std::vector<int> arg;
  for_each_subset(n, d, [&](const std::vector<int>& idx) {
    std::vector<RVector> v;
    for (int k : idx) v.push_back(sec.points[k]);
    const double vol = section_volume(v, sec.normal);
    if (vol > best * (1.0 + 1e-12)) {
      best = vol;
      arg = idx;
    }
  });
  if (arg.empty()) throw InvalidArgument("section has no full-dimensional vertex simplex");
  RVector bary = RVector::Zero(d);
  std::vector<RVector> gens;
  for (int k : arg) {
    bary += sec.points[k] / d;
    gens.push_back(c.generators()[k]);
  }
  return MaxVolumeSimplex{PolyhedralCone::from_generators(gens, bary), arg, best, bary};
}

bool is_centrally_symmetric(const PolyhedralCone& c, const RVector& h) {
  const Section sec = section(c, h);
  for (const auto& p : sec.points) {
    const RVector q = 2.0 * sec.center - p;
    bool found = false;
    for (const auto& r : sec.points) found = found || (q - r).norm() <= 1e-9 * (1.0 + q.norm());
    if (!found) return false;
  }
  return true;
}

}  // namespace freespec

// Salient polyhedral cones in R^d with both generator and facet descriptions.
#pragma once

#include <optional>
#include <vector>

#include "freespec/linalg.hpp"

namespace freespec {

class PolyhedralCone {
 public:
  static constexpr double kTol = 1e-9;

  /// Computes facets by exhaustive enumeration over (d-1)-subsets.
  static PolyhedralCone from_generators(std::vector<RVector> generators, RVector unit);
  /// Validates given facets (normalized to l(u) = 1 on the way in) and
  /// checks that no facet of the generator hull is missing.
  static PolyhedralCone from_description(std::vector<RVector> generators,
                                         std::vector<RVector> facets, RVector unit);

  int dim() const { return static_cast<int>(unit_.size()); }
  const std::vector<RVector>& generators() const { return generators_; }
  /// Facet functionals l_k with l_k(u) = 1.
  const std::vector<RVector>& facets() const { return facets_; }
  const RVector& unit() const { return unit_; }

  /// min_k l_k(x); nonnegative iff x lies in the cone.
  double facet_margin(const RVector& x) const;
  bool contains(const RVector& x, double tol = kTol) const;

 private:
  PolyhedralCone() = default;
  void check_generators() const;

  std::vector<RVector> generators_;
  std::vector<RVector> facets_;
  RVector unit_;
};

PolyhedralCone square_cone();
/// R^d_+ with unit (1,...,1).
PolyhedralCone positive_orthant(int d);
/// Cone over a regular n-gon of circumradius `radius` centred at (0,...,0,1) in R^3.
PolyhedralCone polygon_cone(int n, double radius = 1.0);

bool is_simplex(const PolyhedralCone& c);
/// 2-norm condition number of the generator matrix (meaningful for simplices).
double generator_condition_number(const PolyhedralCone& c);

/// Points of the section C ∩ {<h,x> = 1}, one per generator. h is rescaled so
/// that <h,u> = 1; throws InvalidArgument if some generator has <h,g> <= 0.
struct Section {
  RVector normal;               // rescaled h
  RVector center;               // u, lies on the section
  std::vector<RVector> points;  // g_k / <h, g_k>
};
Section section(const PolyhedralCone& c, const RVector& h);

/// nu↑C: section shrunk by nu about u and coned again.
PolyhedralCone scaled_cone(const PolyhedralCone& c, double nu, const RVector& h);

/// A simplex cone S with nu↑C ⊆ S ⊆ C, or nothing.
std::optional<PolyhedralCone> find_sandwich_simplex(const PolyhedralCone& c, double nu,
                                                    const RVector& h);

/// Largest nu reachable by the sandwich search together with its simplex.
struct SandwichBest {
  double nu = 0.0;
  std::optional<PolyhedralCone> simplex;
};
SandwichBest best_sandwich_simplex(const PolyhedralCone& c, const RVector& h);

/// Two-sided facet check of nu↑C ⊆ s ⊆ c.
bool sandwich_holds(const PolyhedralCone& c, double nu, const RVector& h, const PolyhedralCone& s,
                    double tol = PolyhedralCone::kTol);

struct MaxVolumeSimplex {
  PolyhedralCone simplex;
  std::vector<int> vertices;  // generator indices of c
  double volume = 0.0;        // (d-1)-volume of the section simplex
  RVector barycenter;         // on the section
};
MaxVolumeSimplex max_volume_inscribed_simplex(const PolyhedralCone& c, const RVector& h);

bool is_centrally_symmetric(const PolyhedralCone& c, const RVector& h);

}  // namespace freespec

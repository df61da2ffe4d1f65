#include <algorithm>

#include "helpers.hpp"

#include "freespec/cones.hpp"

using namespace testing_helpers;

namespace {

RVector vec(std::initializer_list<double> v) {
  RVector r(v.size());
  int i = 0;
  for (double x : v) r(i++) = x;
  return r;
}

// Rays equal up to positive scaling, as unordered sets.
bool same_rays(const std::vector<RVector>& a, const std::vector<RVector>& b, double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b) found = found || (x.normalized() - y.normalized()).norm() < tol;
    if (!found) return false;
  }
  return true;
}

// Random polytope with vertices on a sphere in the section x_d = 1.
PolyhedralCone random_polytope_cone(Rng& rng, int d, int n) {
  std::vector<RVector> gens;
  RVector centre = RVector::Zero(d);
  for (int k = 0; k < n; ++k) {
    const CVector z = random_unit_vector(rng, d - 1);
    RVector g(d);
    for (int i = 0; i < d - 1; ++i) g(i) = z(i).real() / std::max(1e-3, z.real().norm());
    g(d - 1) = 1.0;
    gens.push_back(g);
    centre += g / n;
  }
  return PolyhedralCone::from_generators(gens, centre);
}

}  // namespace

TEST(SquareCone, GeneratorsFacetsAndUnit) {
  const PolyhedralCone c = square_cone();
  ASSERT_EQ(c.generators().size(), 4u);
  EXPECT_EQ(c.generators()[0], vec({1, -1, 1}));
  EXPECT_EQ(c.unit(), vec({0, 0, 1}));
  ASSERT_EQ(c.facets().size(), 4u);
  for (const auto& f : c.facets()) EXPECT_NEAR(f.dot(c.unit()), 1.0, 1e-15);
  // Facet order c-a, c+a, c-b, c+b.
  EXPECT_EQ(c.facets()[0], vec({-1, 0, 1}));
  EXPECT_EQ(c.facets()[1], vec({1, 0, 1}));
  EXPECT_EQ(c.facets()[2], vec({0, -1, 1}));
  EXPECT_EQ(c.facets()[3], vec({0, 1, 1}));
  EXPECT_DOUBLE_EQ(c.facets()[0].dot(vec({-1, 1, 1})), 2.0);
}

TEST(PolyhedralCone, RejectsDegenerateInput) {
  EXPECT_THROW(PolyhedralCone::from_generators({vec({1, 0}), vec({1, 0}), vec({0, 1})}, vec({1, 1})),
               InvalidArgument);
  EXPECT_THROW(PolyhedralCone::from_generators({vec({1, 0}), vec({0, 1})}, vec({1, 0})), InvalidArgument);
  EXPECT_THROW(PolyhedralCone::from_generators({vec({1, 0}), vec({-1, 0}), vec({0, 1})}, vec({0, 1})),
               InvalidArgument);
  EXPECT_THROW(PolyhedralCone::from_generators({vec({1, 0, 1}), vec({-1, 0, 1}), vec({0, 1, 1}), vec({0, 0.5, 1}),
                                                vec({0, -1, 1})},
                                               vec({0, 0, 1})),
               InvalidArgument);
  EXPECT_THROW(PolyhedralCone::from_generators({vec({1, 0}), vec({0, 1, 0})}, vec({1, 1})), Error);
}

TEST(PolyhedralCone, DescriptionMustMatchGenerators) {
  const PolyhedralCone c = square_cone();
  auto facets = c.facets();
  const PolyhedralCone d = PolyhedralCone::from_description(c.generators(), facets, c.unit());
  EXPECT_EQ(d.facets().size(), 4u);
  facets.pop_back();
  EXPECT_THROW(PolyhedralCone::from_description(c.generators(), facets, c.unit()), InvalidArgument);
}

TEST(PolyhedralCone, Containment) {
  const PolyhedralCone c = square_cone();
  EXPECT_TRUE(c.contains(vec({0.5, 0.5, 1})));
  EXPECT_TRUE(c.contains(vec({1, 1, 1})));
  EXPECT_FALSE(c.contains(vec({1.1, 0, 1})));
  EXPECT_NEAR(c.facet_margin(c.unit()), 1.0, 1e-15);
}

TEST(IsSimplex, Examples) {
  EXPECT_TRUE(is_simplex(positive_orthant(3)));
  EXPECT_FALSE(is_simplex(square_cone()));
  EXPECT_FALSE(is_simplex(polygon_cone(5)));
  EXPECT_NEAR(generator_condition_number(positive_orthant(3)), 1.0, 1e-12);
}

TEST(VHConsistency, RandomPolytopes) {
  Rng rng(31);
  for (int t = 0; t < 30; ++t) {
    const int d = 3 + t % 2;
    const int n = d + 1 + t % 4;
    const PolyhedralCone c = random_polytope_cone(rng, d, n);
    for (const auto& f : c.facets()) {
      EXPECT_NEAR(f.dot(c.unit()), 1.0, 1e-9);
      RMatrix tight(d, 0);
      for (const auto& g : c.generators()) {
        EXPECT_GE(f.dot(g), -1e-9);
        if (std::abs(f.dot(g)) < 1e-9) {
          tight.conservativeResize(d, tight.cols() + 1);
          tight.col(tight.cols() - 1) = g;
        }
      }
      EXPECT_GE(Eigen::FullPivLU<RMatrix>(tight).rank(), d - 1);
    }
    // Random points of the cone satisfy every facet; points outside violate one.
    for (int k = 0; k < 20; ++k) {
      RVector x = RVector::Zero(d);
      for (const auto& g : c.generators()) x += uniform(rng, 0, 1) * g;
      EXPECT_TRUE(c.contains(x));
    }
  }
}

TEST(ScaledCone, Examples) {
  const PolyhedralCone sq = square_cone();
  const RVector h = vec({0, 0, 1});
  EXPECT_TRUE(same_rays(scaled_cone(sq, 1.0, h).generators(), sq.generators()));
  const PolyhedralCone half = scaled_cone(sq, 0.5, h);
  EXPECT_TRUE(same_rays(half.generators(),
                        {vec({0.5, -0.5, 1}), vec({-0.5, 0.5, 1}), vec({0.5, 0.5, 1}), vec({-0.5, -0.5, 1})}));
  const PolyhedralCone third = scaled_cone(sq, 1.0 / 3, h);
  for (const auto& f : sq.facets()) EXPECT_GE(f.dot(vec({1.0 / 3, -1.0 / 3, 1})), 2.0 / 3 - 1e-12);
  EXPECT_THROW(scaled_cone(sq, 0.0, h), InvalidArgument);
  EXPECT_THROW(scaled_cone(sq, 1.5, h), InvalidArgument);
  EXPECT_THROW(scaled_cone(sq, 0.5, vec({1, 0, 0})), InvalidArgument);
  EXPECT_THROW(section(sq, vec({1, 0, 0.5})), InvalidArgument);
}

TEST(ScaledCone, CompositionAndMonotonicity) {
  Rng rng(37);
  const RVector h = vec({0, 0, 1});
  for (int t = 0; t < 10; ++t) {
    const PolyhedralCone c = t % 2 ? square_cone() : polygon_cone(5 + t % 3);
    const double a = uniform(rng, 0.1, 1), b = uniform(rng, 0.1, 1);
    EXPECT_TRUE(same_rays(scaled_cone(scaled_cone(c, a, h), b, h).generators(),
                          scaled_cone(c, a * b, h).generators()));
    const double lo = std::min(a, b), hi = std::max(a, b);
    const PolyhedralCone big = scaled_cone(c, hi, h), small = scaled_cone(c, lo, h);
    for (const auto& g : small.generators()) EXPECT_GE(big.facet_margin(g), -1e-9);
  }
}

TEST(Sandwich, SquareAtOneThird) {
  const PolyhedralCone sq = square_cone();
  const RVector h = vec({0, 0, 1});
  const auto s = find_sandwich_simplex(sq, 1.0 / 3, h);
  ASSERT_TRUE(s.has_value());
  EXPECT_TRUE(is_simplex(*s));
  EXPECT_TRUE(sandwich_holds(sq, 1.0 / 3, h, *s));
  // The triangle on (-1,-1), (1,-1), (0,1) is itself a valid certificate.
  const PolyhedralCone tri =
      PolyhedralCone::from_generators({vec({-1, -1, 1}), vec({1, -1, 1}), vec({0, 1, 1})}, vec({0, -1.0 / 3, 1}));
  EXPECT_TRUE(sandwich_holds(sq, 1.0 / 3, h, tri));
  EXPECT_FALSE(sandwich_holds(sq, 0.5, h, tri));
}

TEST(Sandwich, SquareFailsAtHighRatio) {
  EXPECT_FALSE(find_sandwich_simplex(square_cone(), 0.9, vec({0, 0, 1})).has_value());
  // A triangle inside the square that contains the nu-square needs area
  // at least 8 nu^2 and at most 2, so nu = 1/2 is out of reach as well.
  EXPECT_FALSE(find_sandwich_simplex(square_cone(), 0.5, vec({0, 0, 1})).has_value());
  const SandwichBest best = best_sandwich_simplex(square_cone(), vec({0, 0, 1}));
  EXPECT_GE(best.nu, 1.0 / 3);
  EXPECT_LT(best.nu, 0.5);
  ASSERT_TRUE(best.simplex.has_value());
  EXPECT_TRUE(sandwich_holds(square_cone(), best.nu, vec({0, 0, 1}), *best.simplex));
}

TEST(Sandwich, SimplexAtOneIsItself) {
  Rng rng(53);
  for (int d = 2; d <= 4; ++d) {
    const PolyhedralCone c = random_simplex_cone(rng, d);
    const auto s = find_sandwich_simplex(c, 1.0, c.unit());
    ASSERT_TRUE(s.has_value());
    EXPECT_TRUE(same_rays(s->generators(), c.generators()));
  }
}

TEST(Sandwich, OutputPassesOwnCertificate) {
  const RVector h = vec({0, 0, 1});
  for (int n = 4; n <= 8; ++n) {
    const PolyhedralCone c = polygon_cone(n);
    for (double nu : {0.1, 0.2, 0.3, 0.4}) {
      const auto s = find_sandwich_simplex(c, nu, h);
      if (s) EXPECT_TRUE(sandwich_holds(c, nu, h, *s)) << n << " " << nu;
    }
  }
}

TEST(MaxVolumeSimplex, Square) {
  const MaxVolumeSimplex m = max_volume_inscribed_simplex(square_cone(), vec({0, 0, 1}));
  EXPECT_NEAR(m.volume, 2.0, 1e-12);
  EXPECT_EQ(m.vertices.size(), 3u);
  EXPECT_NEAR(m.barycenter(2), 1.0, 1e-12);
}

TEST(MaxVolumeSimplex, TriangleIsItself) {
  const PolyhedralCone tri =
      PolyhedralCone::from_generators({vec({-1, -1, 1}), vec({1, -1, 1}), vec({0, 1, 1})}, vec({0, -1.0 / 3, 1}));
  const MaxVolumeSimplex m = max_volume_inscribed_simplex(tri, vec({0, 0, 1}));
  EXPECT_NEAR(m.volume, 2.0, 1e-12);
  EXPECT_TRUE(same_rays(m.simplex.generators(), tri.generators()));
}

TEST(MaxVolumeSimplex, HexagonMatchesBruteForce) {
  const PolyhedralCone hex = polygon_cone(6);
  const Section sec = section(hex, vec({0, 0, 1}));
  double best = 0.0;
  for (int a = 0; a < 6; ++a)
    for (int b = a + 1; b < 6; ++b)
      for (int c = b + 1; c < 6; ++c) {
        const RVector p = sec.points[b] - sec.points[a], q = sec.points[c] - sec.points[a];
        best = std::max(best, 0.5 * std::abs(p(0) * q(1) - p(1) * q(0)));
      }
  const MaxVolumeSimplex m = max_volume_inscribed_simplex(hex, vec({0, 0, 1}));
  EXPECT_NEAR(m.volume, best, 1e-12);
  // Alternating triangle: half the hexagon's area 3 sqrt3 / 2.
  EXPECT_NEAR(m.volume, 0.5 * 1.5 * std::sqrt(3.0), 1e-12);
}

TEST(CentralSymmetry, Examples) {
  const RVector h = vec({0, 0, 1});
  EXPECT_TRUE(is_centrally_symmetric(square_cone(), h));
  EXPECT_TRUE(is_centrally_symmetric(polygon_cone(6), h));
  EXPECT_FALSE(is_centrally_symmetric(polygon_cone(5), h));
  const PolyhedralCone tri =
      PolyhedralCone::from_generators({vec({-1, -1, 1}), vec({1, -1, 1}), vec({0, 1, 1})}, vec({0, -1.0 / 3, 1}));
  EXPECT_FALSE(is_centrally_symmetric(tri, h));
}

// Smallest and largest operator systems of a polyhedral cone, separation,
// and the square-cone constructions built on them.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "freespec/cones.hpp"
#include "freespec/pencil.hpp"
#include "freespec/sdp.hpp"

namespace freespec {

struct MaxMembershipResult {
  Membership kind = Membership::Outside;
  double margin = 0.0;   // min over facets of the minimum eigenvalue of (l_k ⊗ id)(A)
  int worst_facet = -1;
};

MaxMembershipResult max_membership(const PolyhedralCone& c, const MatrixTuple& a,
                                   double tol = kBoundaryTol);

/// A = sum_k c_k ⊗ P_k over the generators c_k.
struct MinMembershipCertificate {
  std::vector<HermitianMatrix> weights;
  double residual = 0.0;
};

/// phi(B) = sum_i tr(conj(N_i) B_i).
struct SeparationFunctional {
  std::vector<HermitianMatrix> n;
  double margin = 0.0;  // minimum eigenvalue of sum_i u_i N_i

  double evaluate(const MatrixTuple& b) const;
};

/// min over generators c_k of the minimum eigenvalue of sum_i c_k[i] conj(N_i).
/// Nonnegative iff phi >= 0 on every level of C^min.
double min_positivity(const SeparationFunctional& phi, const PolyhedralCone& c);

enum class MinVerdict { Member, NotMember, Unknown };
const char* to_string(MinVerdict v);

struct MinMembershipResult {
  MinVerdict verdict = MinVerdict::Unknown;
  std::optional<MinMembershipCertificate> certificate;
  std::optional<SeparationFunctional> separator;
  double query_value = 0.0;  // phi(A) when a separator exists
  std::string message;
};

/// Feasibility problem for A = sum_k c_k ⊗ P_k, P_k >= 0; rows indexed (i, alpha).
sdp::SdpProblem min_membership_problem(const PolyhedralCone& c, const MatrixTuple& a);

MinMembershipResult min_membership(const PolyhedralCone& c, const MatrixTuple& a,
                                   const sdp::SolveOptions& opts = {});

/// Recheck of a certificate: residual of sum_k c_k ⊗ P_k - A and PSD-ness.
bool check_min_certificate(const PolyhedralCone& c, const MatrixTuple& a,
                           const MinMembershipCertificate& cert, double* residual = nullptr);

struct PauliWitness {
  MatrixTuple tuple;
  std::array<HermitianMatrix, 4> components;
};

/// Rank-one projections A_1..A_4 and A = sum v_k ⊗ A_k over the square's generators.
PauliWitness pauli_witness(double alpha);

enum class EssentialVerdict { InEssentialBoundary, No, Unknown };
const char* to_string(EssentialVerdict v);

struct EssentialBoundaryResult {
  EssentialVerdict verdict = EssentialVerdict::Unknown;
  // Functional data (M_1, M_2, M_3) with S = M_1 + M_2, D = M_1 - M_2.
  std::optional<HermitianMatrix> m3, d, s;
  std::optional<CMatrix> u;     // M_3^{1/2}
  std::optional<SeparationFunctional> functional;
  double margin = 0.0;          // minimum eigenvalue of M_3
  double orthogonality = 0.0;   // largest |<A_k, X_k>|
  std::string message;
};

inline constexpr double kStrictEps = 1e-6;

/// Square cone only. Throws InvalidArgument when every component is zero.
EssentialBoundaryResult essential_boundary_square(const std::array<HermitianMatrix, 4>& a,
                                                  double eps = kStrictEps,
                                                  const sdp::SolveOptions& opts = {});
bool check_essential_certificate(const std::array<HermitianMatrix, 4>& a, const HermitianMatrix& m3,
                                 const HermitianMatrix& d, const HermitianMatrix& s, double eps,
                                 double tol, std::string* why = nullptr);

struct CompressionReport {
  int r = 0;
  std::vector<double> angles;
  int required_orthogonal_columns = 0;  // 2r
  int ambient_dimension = 0;            // r
  bool obstruction = false;             // 2r > r
  int trials = 0;
  double best_residual = 0.0;           // smallest orthogonality residual seen
  int trials_below_threshold = 0;
  double threshold = 1e-3;
};

/// Samples nonzero V_1..V_r in M_{r,2}(C) and measures how far the compressed
/// Pauli witnesses are from satisfying the orthogonality conditions.
CompressionReport compression_obstruction_demo(const std::vector<double>& angles, int trials,
                                               std::uint64_t seed, double threshold = 1e-3);

/// M_i = N^{-1/2} N_i N^{-1/2}, N = sum_i u_i N_i. Throws InvalidArgument
/// unless the minimum eigenvalue of N exceeds tol.
LinearPencil effros_winkler_separate(const SeparationFunctional& phi, const RVector& u,
                                     double tol = 1e-12);

/// lambda_max(N^2 - M).
double comei_lambda1(const HermitianMatrix& m, const HermitianMatrix& n);

struct Lambda2Options {
  int grid = 2000;          // angular step pi/grid at s = 2
  int restarts = 200;       // s >= 3
  std::uint64_t seed = 1;
};

struct Lambda2Result {
  double value = 0.0;
  CVector argmax;
  bool lower_bound_only = false;
};

/// max over unit v of (v*Nv)^2 - v*Mv.
Lambda2Result comei_lambda2(const HermitianMatrix& m, const HermitianMatrix& n,
                            const Lambda2Options& opts = {});

/// ||Av - (v*Av) v||.
double eigen_residual(const HermitianMatrix& a, const CVector& v);

}  // namespace freespec

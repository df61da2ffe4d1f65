// Inclusion of a polytope (or free spectrahedron) in a free spectrahedron:
// the scalar test, the Choi-matrix relaxation, witnesses, and scaling.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "freespec/cones.hpp"
#include "freespec/opsys.hpp"
#include "freespec/pencil.hpp"
#include "freespec/sdp.hpp"

namespace freespec {

struct ScalarInclusion {
  bool holds = false;
  std::vector<double> margins;  // per generator, minimum eigenvalue of the target at it
  int worst = -1;
  std::optional<RVector> witness;  // violating generator when !holds
};

ScalarInclusion scalar_inclusion(const PolyhedralCone& src, const LinearPencil& tgt,
                                 double tol = kBoundaryTol);

/// Phi(X) = sum_j V_j* X V_j with Choi matrix J = sum_kl E_kl ⊗ Phi(E_kl).
struct RelaxationCertificate {
  HermitianMatrix choi;
  std::vector<CMatrix> kraus;  // r x t each
  double residual = 0.0;       // max entry of sum_j V_j* M_i V_j - N_i
};

enum class RelaxationStatus { Feasible, Infeasible, Unknown };
const char* to_string(RelaxationStatus s);

struct RelaxationResult {
  RelaxationStatus status = RelaxationStatus::Unknown;
  std::optional<RelaxationCertificate> certificate;
  std::optional<sdp::FarkasCertificate> farkas;
  std::string message;
};

/// Rows <kron(M_i^T, H_alpha), J> = <H_alpha, N_i> on one PSD block of size r*t.
sdp::SdpProblem relaxation_problem(const LinearPencil& src, const LinearPencil& tgt);

RelaxationResult relaxation(const LinearPencil& src, const LinearPencil& tgt,
                            const sdp::SolveOptions& opts = {});

/// Kraus operators from the spectral decomposition of J (eigenvalues below
/// 1e-9 tr J dropped): V_j[k][p] = conj(w_j[k t + p]) sqrt(lambda_j).
std::vector<CMatrix> kraus_from_choi(const HermitianMatrix& choi, int r, int t);
HermitianMatrix choi_from_kraus(const std::vector<CMatrix>& kraus);
/// sum_j V_j* X V_j.
HermitianMatrix apply_kraus(const std::vector<CMatrix>& kraus, const HermitianMatrix& x);
double kraus_residual(const LinearPencil& src, const LinearPencil& tgt, const std::vector<CMatrix>& kraus);

struct FreeWitness {
  int level = 2;
  MatrixTuple tuple;
  double margin = 0.0;  // minimum eigenvalue of the target at the tuple
};

/// (σ_z, σ_x, I_2) against C(alpha); margin 1 - sin(alpha) - cos(alpha).
FreeWitness free_witness_square(double alpha);

/// For sources with four generators in R^3: the square witnesses pushed
/// through a linear map sending the square's generators onto the source's.
std::optional<FreeWitness> find_free_witness(const PolyhedralCone& src, const LinearPencil& tgt,
                                             double tol = kBoundaryTol);

struct InclusionVerdict {
  ScalarInclusion scalar;
  RelaxationResult relaxation;
  std::optional<FreeWitness> free_witness;
};

InclusionVerdict check_inclusion(const PolyhedralCone& src, const LinearPencil& tgt,
                                 const sdp::SolveOptions& opts = {});

struct CommutingReport {
  ScalarInclusion scalar;
  RelaxationResult relaxation;
  CMatrix joint_basis;              // unitary diagonalising every N_i
  double diagonalization_residual;  // largest off-diagonal entry after the change of basis
  bool tight = false;               // scalar holds implies relaxation feasible
};

/// Throws InvalidArgument if some pair of target matrices does not commute.
CommutingReport commuting_target_tightness(const PolyhedralCone& src, const LinearPencil& tgt,
                                           const sdp::SolveOptions& opts = {});

struct ScalingBound {
  double nu_general = 0.0;
  std::optional<double> nu_symmetric;
  double certified_nu = 0.0;
  std::optional<PolyhedralCone> certificate;
};

ScalingBound scaling_bound(const PolyhedralCone& c, const RVector& h);

struct ScaledMaxInMin {
  bool member = false;
  MatrixTuple scaled;
  MinMembershipResult detail;
};

/// Entry i of the scaled tuple is nu A_i + (1 - nu) u_i <h, A> (h rescaled
/// so that <h,u> = 1), then tested for C^min membership. Throws
/// InvalidArgument if A is outside C_s^max.
ScaledMaxInMin scaled_max_in_min(const PolyhedralCone& c, double nu, const MatrixTuple& a,
                                 const RVector& h, double tol = kBoundaryTol,
                                 const sdp::SolveOptions& opts = {});

struct EntangledReport {
  HermitianMatrix x;                 // displayed 4x4 matrix
  HermitianMatrix a, b_plus, b_minus, c;  // blocks A - C, B + B*, (B - B*)/i, A + C
  LinearPencil pencil;               // ball-cone pencil in four variables
  double identity_residual = 0.0;    // max entry of 2X - L(...)
  double pt_min_eigenvalue = 0.0;    // of the displayed X
  double pt_min_eigenvalue_projection = 0.0;  // of X/2
  double projection_residual = 0.0;  // ||(X/2)^2 - X/2||
  bool entangled = false;
  bool minimal_realization = true;
  std::string conclusion;
};

EntangledReport entangled_example();

}  // namespace freespec

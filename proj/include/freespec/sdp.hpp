// Small dense semidefinite programs over block-diagonal Hermitian variables.
//
//   minimize    sum_b <C_b, X_b>
//   subject to  sum_b <A_ib, X_b> = b_i      i = 1..m
//               X_b >= 0
//
// Problems without an objective are feasibility problems and go through a
// phase-I reformulation; an infeasible verdict is only returned together
// with a Farkas certificate that passes an independent eigenvalue check.
#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "freespec/linalg.hpp"

namespace freespec::sdp {

/// The equality system has no solution at all. `combination` holds y with
/// sum_i y_i A_i = 0 and b.y = 1.
class InconsistentConstraints : public Error {
 public:
  InconsistentConstraints(const std::string& what, std::vector<double> combination)
      : Error(what), combination(std::move(combination)) {}
  std::vector<double> combination;
};

struct Constraint {
  std::vector<HermitianMatrix> blocks;  // one per variable block, may be zero
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_dims;
  std::vector<Constraint> constraints;
  std::optional<std::vector<HermitianMatrix>> objective;

  int num_blocks() const { return static_cast<int>(block_dims.size()); }
  int num_constraints() const { return static_cast<int>(constraints.size()); }

  /// Adds an all-zero constraint row and returns it for filling in.
  Constraint& add_constraint(double rhs);
  /// Throws DimensionMismatch if any block has the wrong size.
  void validate() const;
};

/// Sum_b <A_b, X_b> for a constraint or objective row.
double evaluate_row(const std::vector<HermitianMatrix>& row, const std::vector<HermitianMatrix>& x);

/// Block matrices sum_i y_i A_i.
std::vector<HermitianMatrix> adjoint_map(const SdpProblem& p, const std::vector<double>& y);

enum class Status { Feasible, Infeasible, Optimal, NumericalFailure };
std::string to_string(Status s);

/// Multipliers y with b.y > 0 and sum_i y_i A_i <= 0. Any feasible X would
/// give 0 < b.y = <sum_i y_i A_i, X> <= 0.
struct FarkasCertificate {
  std::vector<double> y;
  double rhs_value = 0.0;        // b.y, normalized to 1
  double max_eigenvalue = 0.0;   // largest eigenvalue of sum_i y_i A_i over all blocks
};

struct SdpOutcome {
  Status status = Status::NumericalFailure;
  std::optional<std::vector<HermitianMatrix>> primal;
  std::optional<std::vector<double>> dual;  // y at Optimal
  std::optional<FarkasCertificate> dual_certificate;
  std::optional<double> objective_value;
  std::optional<double> dual_objective_value;
  double phase1_value = 0.0;  // optimal t of the phase-I problem when it ran
  int iterations = 0;
  std::string message;
};

enum class Embedding { RealSymmetric, ComplexNative };

struct SolveOptions {
  int max_iter = 150;
  /// Phase-I threshold: Feasible iff the optimal shift t < tol.
  double tol = 1e-7;
  /// Relative residual target for the interior-point iterations.
  double ipm_tol = 1e-10;
  Embedding embedding = Embedding::RealSymmetric;
};

SdpOutcome solve(const SdpProblem& p, const SolveOptions& opts = {});

/// Accepts when b.y > 0 and max eigenvalue of sum y_i A_i <= kFarkasTol * b.y.
inline constexpr double kFarkasTol = 1e-9;
bool farkas_valid(const SdpProblem& p, const std::vector<double>& y, double* rhs_value = nullptr,
                  double* max_eig = nullptr);

struct VerifyReport {
  bool ok = false;
  double max_residual = 0.0;     // constraint residual, or Farkas eigenvalue excess
  double min_eigenvalue = 0.0;   // smallest primal eigenvalue over blocks
  std::string detail;
};

/// Independent re-check of an outcome using only linalg.
VerifyReport verify(const SdpOutcome& outcome, const SdpProblem& p);

/// Text dump in SDPA sparse layout with complex entries:
///   m, nblocks, block sizes, b, then "matno blkno i j re im" lines,
///   matno 0 being the objective. Indices are 1-based, upper triangle.
void write_sdpa(std::ostream& os, const SdpProblem& p);
SdpProblem read_sdpa(std::istream& is);

}  // namespace freespec::sdp

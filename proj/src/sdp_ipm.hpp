// Primal-dual interior-point core (HKM direction, Mehrotra predictor-corrector)
// for standard-form SDPs over real symmetric or complex Hermitian blocks.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace freespec::sdp::detail {

template <class Scalar>
struct CoreProblem {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  struct Term {
    int block;
    Mat a;
  };
  std::vector<int> dims;
  std::vector<std::vector<Term>> rows;
  Eigen::VectorXd b;
  std::vector<Mat> c;  // objective, one entry per block (zero allowed)
};

struct CoreOptions {
  int max_iter = 150;
  double tol = 1e-10;
  /// Fallback when progress stops: the best iterate counts as converged at this accuracy.
  double accept_tol = 1e-8;
  double step_fraction = 0.95;
};

template <class Scalar>
struct CoreResult {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  bool converged = false;
  std::vector<Mat> x;
  std::vector<Mat> z;
  Eigen::VectorXd y;
  int iterations = 0;
  double primal_infeasibility = 0.0;  // relative
  double dual_infeasibility = 0.0;    // relative
  double relative_gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::string message;
};

template <class Scalar>
CoreResult<Scalar> solve_core(const CoreProblem<Scalar>& p, const CoreOptions& opts);

}  // namespace freespec::sdp::detail

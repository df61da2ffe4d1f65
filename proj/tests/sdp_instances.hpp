// Random SDP instances with a known answer.
#pragma once

#include <random>

#include "freespec/random.hpp"
#include "freespec/sdp.hpp"

namespace sdp_instances {

using namespace freespec;

enum class Kind { Feasible, Optimal, Infeasible };

struct Instance {
  sdp::SdpProblem problem;
  Kind kind;
};

inline std::vector<int> random_blocks(Rng& rng, int max_dim, int max_blocks) {
  std::uniform_int_distribution<int> nb(1, max_blocks), nd(1, max_dim);
  std::vector<int> dims(nb(rng));
  for (int& d : dims) d = nd(rng);
  return dims;
}

inline int capacity(const std::vector<int>& dims) {
  int c = 0;
  for (int d : dims) c += d * d;
  return c;
}

inline std::vector<HermitianMatrix> random_row(Rng& rng, const std::vector<int>& dims) {
  std::vector<HermitianMatrix> row;
  for (int d : dims) row.push_back(random_hermitian(rng, d));
  return row;
}

// Rows A_i random, b = A(X0) for a random X0 >= 0 (possibly singular).
inline Instance feasible(Rng& rng, const std::vector<int>& dims, int m, bool with_objective, bool singular) {
  Instance in{{dims, {}, std::nullopt}, with_objective ? Kind::Optimal : Kind::Feasible};
  std::vector<HermitianMatrix> x0;
  for (int d : dims) x0.push_back(random_psd(rng, d, singular ? std::max(1, d / 2) : -1));
  for (int i = 0; i < m; ++i) {
    auto row = random_row(rng, dims);
    const double b = sdp::evaluate_row(row, x0);
    in.problem.constraints.push_back({std::move(row), b});
  }
  if (with_objective) {
    // C = Z0 + sum y0_i A_i with Z0 > 0 keeps the dual strictly feasible.
    std::vector<HermitianMatrix> c;
    std::normal_distribution<double> g;
    std::vector<double> y0(m);
    for (double& v : y0) v = g(rng);
    for (size_t k = 0; k < dims.size(); ++k) {
      HermitianMatrix ck = random_psd(rng, dims[k]) + 0.1 * HermitianMatrix::identity(dims[k]);
      for (int i = 0; i < m; ++i) ck += y0[i] * in.problem.constraints[i].blocks[k];
      c.push_back(ck);
    }
    in.problem.objective = c;
  }
  return in;
}

// sum y_i A_i = -P with P > 0 and b.y = 1 rules out every X >= 0.
inline Instance infeasible(Rng& rng, const std::vector<int>& dims, int m) {
  Instance in{{dims, {}, std::nullopt}, Kind::Infeasible};
  std::normal_distribution<double> g;
  std::vector<double> y(m);
  for (double& v : y) v = g(rng);
  if (std::abs(y[m - 1]) < 0.3) y[m - 1] = y[m - 1] < 0 ? -0.3 : 0.3;
  std::vector<HermitianMatrix> acc;
  for (int d : dims) acc.push_back(-1.0 * (random_psd(rng, d) + 0.2 * HermitianMatrix::identity(d)));
  std::vector<double> b(m);
  double by = 0.0;
  for (int i = 0; i + 1 < m; ++i) {
    auto row = random_row(rng, dims);
    for (size_t k = 0; k < dims.size(); ++k) acc[k] += (-y[i]) * row[k];
    b[i] = g(rng);
    by += b[i] * y[i];
    in.problem.constraints.push_back({std::move(row), b[i]});
  }
  std::vector<HermitianMatrix> last;
  for (auto& a : acc) last.push_back((1.0 / y[m - 1]) * a);
  b[m - 1] = (1.0 - by) / y[m - 1];
  in.problem.constraints.push_back({std::move(last), b[m - 1]});
  return in;
}

// Mix used by the self-test: blocks <= 8, <= 60 constraints.
inline Instance random_instance(Rng& rng, int index) {
  auto dims = random_blocks(rng, index % 2 == 0 ? 8 : 4, 3);
  if (capacity(dims) < 3) dims.push_back(2);
  std::uniform_int_distribution<int> md(1, std::min(60, capacity(dims) - 1));
  const int m = md(rng);
  switch (index % 4) {
    case 0: return feasible(rng, dims, m, false, false);
    case 1: return feasible(rng, dims, m, true, false);
    case 2: return infeasible(rng, dims, std::max(2, m));
    default: return feasible(rng, dims, m, false, true);
  }
}

}  // namespace sdp_instances

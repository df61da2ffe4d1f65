#pragma once

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "freespec/linalg.hpp"
#include "freespec/random.hpp"

namespace testing_helpers {

using namespace freespec;

inline constexpr double kPi = std::numbers::pi;

inline HermitianMatrix sx() { return pauli::x(); }
inline HermitianMatrix sy() { return pauli::y(); }
inline HermitianMatrix sz() { return pauli::z(); }
inline HermitianMatrix id2() { return pauli::identity(); }

inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Closed-form spectrum of a 2x2 Hermitian matrix.
inline std::pair<double, double> eig2(const HermitianMatrix& a) {
  const double p = 0.5 * (a(0, 0).real() + a(1, 1).real());
  const double q = 0.5 * (a(0, 0).real() - a(1, 1).real());
  const double r = std::sqrt(q * q + std::norm(a(0, 1)));
  return {p - r, p + r};
}

inline std::string fixture(const std::string& name) { return std::string(FREESPEC_FIXTURES) + "/" + name; }

}  // namespace testing_helpers

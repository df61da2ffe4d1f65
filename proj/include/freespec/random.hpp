// Seeded random instances for property tests, the acceptance suite and the CLI.
#pragma once

#include <cstdint>
#include <random>

#include "freespec/cones.hpp"
#include "freespec/linalg.hpp"

namespace freespec {

using Rng = std::mt19937_64;

CMatrix random_complex_matrix(Rng& rng, int rows, int cols);
/// Entries of real and imaginary parts standard normal, then symmetrized.
HermitianMatrix random_hermitian(Rng& rng, int n);
/// G G* / n for a complex Gaussian G with `rank` columns.
HermitianMatrix random_psd(Rng& rng, int n, int rank = -1);
CMatrix random_unitary(Rng& rng, int n);
CVector random_unit_vector(Rng& rng, int n);
double uniform(Rng& rng, double lo, double hi);

/// Simplex cone whose generators are the columns of a well-conditioned
/// random matrix, with unit equal to their sum.
PolyhedralCone random_simplex_cone(Rng& rng, int d);

}  // namespace freespec

#pragma once

#include <cstddef>
#include <vector>

#include "mvcca/matrix.hpp"

namespace mvcca::linalg {

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws NumericError when a pivot is not strictly positive.
Matrix cholesky(const Matrix& a);

// Solves L y = b (forward) and L' x = y (backward) column-by-column, i.e.
// x = (L L')^{-1} b.
Matrix cholesky_solve(const Matrix& chol_lower, const Matrix& b);

// Solves L y = b for lower-triangular L.
Matrix forward_substitute(const Matrix& chol_lower, const Matrix& b);

// Solves L' x = y for lower-triangular L.
Matrix backward_substitute(const Matrix& chol_lower, const Matrix& y);

struct EigenDecomposition {
  std::vector<double> values;  // unsorted
  Matrix vectors;              // columns match values
};

// Cyclic two-sided Jacobi; all eigenpairs of a symmetric matrix. Accurate to
// machine precision with orthonormal vectors; intended for n up to ~64.
EigenDecomposition jacobi_eigen(const Matrix& a);

// Householder tridiagonalization followed by implicit-shift QL; the path for
// larger symmetric matrices.
EigenDecomposition tridiag_eigen(const Matrix& a);

struct SvdResult {
  Matrix u;                    // m x r, orthonormal columns
  std::vector<double> values;  // r singular values, descending
  Matrix v;                    // n x r, orthonormal columns
};

// One-sided Jacobi SVD (Hestenes rotations on column pairs). r = min(m, n).
SvdResult onesided_jacobi_svd(const Matrix& a);

}  // namespace mvcca::linalg

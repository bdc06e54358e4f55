#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mvcca/matrix.hpp"
#include "mvcca/segmentation.hpp"

namespace mvcca::decomp {

struct EigenResult {
  std::vector<double> values;  // descending
  Matrix vectors;              // n x k, orthonormal columns
};

// Top-k eigenpairs of a symmetric matrix, values descending. The kernel is
// cyclic Jacobi for n <= 64 and Householder tridiagonalization + QL above.
// Each eigenvector is normalized so its largest-magnitude entry is positive
// (ties broken toward the smallest index); eigenvalues within 1e-12 * |a|_max
// of each other are ordered by descending lexicographic comparison of the
// sign-fixed vectors, so results are reproducible even on degenerate
// subspaces.
EigenResult sym_eig(const Matrix& a, std::size_t k);

struct MccaModel {
  Matrix shared;                   // F x t, orthonormal columns (S*)
  std::vector<Matrix> projectors;  // M matrices of c x t (U_m*)
  std::vector<double> eigenvalues; // t values, descending, in [0, M]
  double epsilon = 1e-4;
  std::size_t m_chunks = 0;
  std::size_t components = 0;
};

// MAXVAR multiview CCA. Builds K = sum_m X_m (X_m' X_m + eps I)^{-1} X_m',
// takes its top-t eigenpairs as the shared representation and eigenvalues,
// and recovers per-view projectors U_m = (X_m' X_m + eps I)^{-1} X_m' S*.
// The per-view contributions to K are summed in value order per entry, so a
// permutation of the views yields a bitwise-identical model.
MccaModel fit_mcca(const seg::ViewSet& views, std::size_t t, double epsilon = 1e-4);

// Chunks the segment into m views and returns the fitted shared
// representation (F x t, kind=reduced).
FeatureMatrix mcca_reduce(const FeatureMatrix& segment, std::size_t m,
                          std::size_t t, double epsilon = 1e-4);

struct Cca2Result {
  Matrix u1;                         // t1 x t
  Matrix u2;                         // t2 x t
  std::vector<double> correlations;  // t values in [0, 1], descending
};

// Two-view CCA under the constraints U_m'(X_m' X_m + eps I)U_m = I, solved by
// whitening both Grams with Cholesky factors and taking the SVD of the
// whitened cross matrix.
Cca2Result cca2(const FeatureMatrix& x1, const FeatureMatrix& x2,
                std::size_t t, double epsilon = 1e-4);

// Top-t eigenvectors of X X' (uncentered), i.e. the leading left singular
// directions, with the sym_eig sign convention. Output shape F x t matches
// mcca_reduce so the two reductions are interchangeable downstream.
FeatureMatrix pca_reduce(const FeatureMatrix& segment, std::size_t t);

// sum_m |X_m U_m - S|_F^2. Requires consistent shapes and S'S = I to 1e-6.
double mcca_objective(const seg::ViewSet& views, const std::vector<Matrix>& projectors,
                      const Matrix& shared);

// Persistence: S*, all U_m and the eigenvalue row stacked into one FMX1
// container (kind=reduced) plus a JSON sidecar of the scalars.
void write_mcca_model(const MccaModel& model, const std::string& path);
MccaModel read_mcca_model(const std::string& path);

}  // namespace mvcca::decomp

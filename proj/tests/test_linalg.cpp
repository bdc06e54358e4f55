#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mvcca/common.hpp"
#include "mvcca/linalg.hpp"
#include "mvcca/rng.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mvcca;

namespace {

Matrix spd_matrix(SplitRng& rng, std::size_t n) {
  const Matrix a = testutil::random_matrix(rng, n + 2, n);
  Matrix g = matmul_at_b(a, a);
  for (std::size_t i = 0; i < n; ++i) g(i, i) += 0.5;
  return g;
}

double eigen_residual(const Matrix& a, const linalg::EigenDecomposition& eig) {
  double worst = 0.0;
  for (std::size_t j = 0; j < a.rows(); ++j) {
    for (std::size_t i = 0; i < a.rows(); ++i) {
      double av = 0.0;
      for (std::size_t k = 0; k < a.rows(); ++k) av += a(i, k) * eig.vectors(k, j);
      worst = std::max(worst, std::fabs(av - eig.values[j] * eig.vectors(i, j)));
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("cholesky factors SPD matrices and solves") {
  SplitRng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + trial % 8;
    const Matrix g = spd_matrix(rng, n);
    const Matrix l = linalg::cholesky(g);
    const Matrix rebuilt = matmul_a_bt(l, l);
    CHECK(max_abs_diff(g, rebuilt) < 1e-10 * std::max(1.0, max_abs(g)));

    const Matrix b = testutil::random_matrix(rng, n, 3);
    const Matrix x = linalg::cholesky_solve(l, b);
    const Matrix gx = matmul(g, x);
    CHECK(max_abs_diff(gx, b) < 1e-8);
  }
}

TEST_CASE("cholesky rejects indefinite input") {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = -1.0;
  CHECK_THROWS_AS(linalg::cholesky(a), NumericError);
}

TEST_CASE("jacobi and tridiagonal eigensolvers agree on the same matrix") {
  SplitRng rng(12);
  for (std::size_t n : {2ul, 5ul, 17ul, 40ul}) {
    const Matrix a = testutil::random_symmetric(rng, n);
    auto ja = linalg::jacobi_eigen(a);
    auto tr = linalg::tridiag_eigen(a);
    std::sort(ja.values.begin(), ja.values.end());
    std::sort(tr.values.begin(), tr.values.end());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::fabs(ja.values[i] - tr.values[i]) < 1e-11 * std::max(1.0, max_abs(a)));
  }
}

TEST_CASE("eigen kernels: residual and orthonormality") {
  SplitRng rng(13);
  for (std::size_t n : {3ul, 8ul, 64ul}) {
    const Matrix a = testutil::random_symmetric(rng, n);
    const auto eig = linalg::jacobi_eigen(a);
    CHECK(eigen_residual(a, eig) < 1e-12 * static_cast<double>(n));
    CHECK(orthonormality_defect(eig.vectors) < 1e-12 * static_cast<double>(n));
  }
  for (std::size_t n : {65ul, 100ul}) {
    const Matrix a = testutil::random_symmetric(rng, n);
    const auto eig = linalg::tridiag_eigen(a);
    CHECK(eigen_residual(a, eig) < 1e-12 * static_cast<double>(n));
    CHECK(orthonormality_defect(eig.vectors) < 1e-12 * static_cast<double>(n));
  }
}

TEST_CASE("one-sided jacobi SVD reconstructs and matches gram eigenvalues") {
  SplitRng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 3 + trial % 5;
    const std::size_t n = 2 + trial % 4;
    const Matrix a = testutil::random_matrix(rng, m, n);
    const auto svd = linalg::onesided_jacobi_svd(a);

    // U diag(s) V' == A
    const std::size_t r = svd.values.size();
    Matrix scaled = svd.u;
    for (std::size_t j = 0; j < r; ++j)
      for (std::size_t i = 0; i < scaled.rows(); ++i) scaled(i, j) *= svd.values[j];
    CHECK(max_abs_diff(matmul_a_bt(scaled, svd.v), a) < 1e-10);

    CHECK(std::is_sorted(svd.values.rbegin(), svd.values.rend()));
    auto gram_eig = linalg::jacobi_eigen(matmul_at_b(a, a));
    std::sort(gram_eig.values.begin(), gram_eig.values.end(), std::greater<>());
    for (std::size_t j = 0; j < std::min<std::size_t>(r, gram_eig.values.size()); ++j)
      CHECK(std::fabs(svd.values[j] * svd.values[j] - gram_eig.values[j]) < 1e-9);
  }
}

TEST_CASE("closed-form characteristic polynomial oracle is self-consistent") {
  SplitRng rng(15);
  // The oracle itself must produce genuine roots: p(root) ~ 0.
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Matrix a = testutil::random_symmetric(rng, n);
    const auto coeffs = oracles::char_poly_coefficients(a);
    for (double root : oracles::char_poly_eigenvalues(a)) {
      double acc = 0.0;
      for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * root + coeffs[i];
      CHECK(std::fabs(acc) < 1e-10);
    }
  }
}

#include "mvcca/decomp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include <json.hpp>

#include "mvcca/common.hpp"
#include "mvcca/linalg.hpp"
#include "mvcca/matrixio.hpp"

namespace mvcca::decomp {
namespace {

constexpr std::size_t kJacobiSizeLimit = 64;

// Largest-magnitude entry positive; among tied magnitudes the smallest index
// decides.
void fix_column_sign(Matrix& m, std::size_t col) {
  std::size_t pivot = 0;
  double best = std::fabs(m(0, col));
  for (std::size_t i = 1; i < m.rows(); ++i) {
    const double v = std::fabs(m(i, col));
    if (v > best) {
      best = v;
      pivot = i;
    }
  }
  if (m(pivot, col) < 0.0)
    for (std::size_t i = 0; i < m.rows(); ++i) m(i, col) = -m(i, col);
}

bool lex_greater(const Matrix& m, std::size_t a, std::size_t b) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (m(i, a) != m(i, b)) return m(i, a) > m(i, b);
  }
  return false;
}

Matrix symmetrized(const Matrix& a) {
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

// Entry-wise sum of the per-view contributions, each entry accumulated in
// ascending value order. The result depends only on the multiset of
// contributions, so permuting the views cannot change a single bit.
Matrix value_ordered_sum(const std::vector<Matrix>& terms) {
  const std::size_t rows = terms.front().rows();
  const std::size_t cols = terms.front().cols();
  Matrix out(rows, cols);
  std::vector<double> bucket(terms.size());
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t m = 0; m < terms.size(); ++m) bucket[m] = terms[m](i, j);
      std::sort(bucket.begin(), bucket.end());
      double acc = 0.0;
      for (double v : bucket) acc += v;
      out(i, j) = acc;
    }
  }
  return out;
}

void check_views(const seg::ViewSet& views) {
  if (views.views.empty()) throw ArgumentError("fit_mcca: no views");
  const std::size_t rows = views.views.front().rows();
  const std::size_t cols = views.views.front().cols();
  if (cols < 1) throw ArgumentError("fit_mcca: views have zero width");
  for (const Matrix& v : views.views) {
    if (v.rows() != rows || v.cols() != cols)
      throw ArgumentError("fit_mcca: views must share one shape");
    if (!v.all_finite()) throw ValidationError("fit_mcca: non-finite view entry");
  }
}

// (X'X + eps I) as the regularized Gram.
Matrix regularized_gram(const Matrix& x, double epsilon) {
  Matrix g = matmul_at_b(x, x);
  for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += epsilon;
  return symmetrized(g);
}

}  // namespace

EigenResult sym_eig(const Matrix& a, std::size_t k) {
  if (a.rows() != a.cols()) throw ArgumentError("sym_eig: matrix not square");
  const std::size_t n = a.rows();
  if (k < 1 || k > n) throw ArgumentError("sym_eig: k must lie in [1, n]");
  const double scale = max_abs(a);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > 1e-10 * std::max(scale, 1e-300))
        throw ArgumentError("sym_eig: input is not symmetric");

  const Matrix sym = symmetrized(a);
  linalg::EigenDecomposition full =
      n <= kJacobiSizeLimit ? linalg::jacobi_eigen(sym) : linalg::tridiag_eigen(sym);

  for (std::size_t j = 0; j < n; ++j) fix_column_sign(full.vectors, j);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return full.values[i] > full.values[j];
  });

  // Within groups of near-degenerate eigenvalues the value order is
  // meaningless; fall back to descending lexicographic vector order so the
  // output is still a deterministic function of the input.
  const double gap_tol = 1e-12 * std::max(scale, 1e-300);
  std::size_t run_begin = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const bool breaks = i == n || full.values[order[run_begin]] - full.values[order[i]] > gap_tol;
    if (breaks) {
      if (i - run_begin > 1)
        std::sort(order.begin() + static_cast<std::ptrdiff_t>(run_begin),
                  order.begin() + static_cast<std::ptrdiff_t>(i),
                  [&](std::size_t x, std::size_t y) {
                    return lex_greater(full.vectors, x, y);
                  });
      run_begin = i;
    }
  }

  EigenResult out;
  out.values.resize(k);
  out.vectors = Matrix(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    out.values[j] = full.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = full.vectors(i, order[j]);
  }
  return out;
}

MccaModel fit_mcca(const seg::ViewSet& views, std::size_t t, double epsilon) {
  check_views(views);
  if (epsilon < 0.0) throw ArgumentError("fit_mcca: epsilon must be non-negative");
  const std::size_t m_chunks = views.views.size();
  const std::size_t rows = views.feature_rows();
  const std::size_t width = views.view_width();
  if (t < 1 || t > std::min(rows, width))
    throw ArgumentError("fit_mcca: t must lie in [1, min(F, view width)]; got t=" +
                        std::to_string(t));

  // Per view: Z_m = (X'X + eps I)^{-1} X', contribution X Z_m to K.
  std::vector<Matrix> solved(m_chunks);
  std::vector<Matrix> contributions(m_chunks);
  for (std::size_t m = 0; m < m_chunks; ++m) {
    const Matrix& x = views.views[m];
    const Matrix chol = linalg::cholesky(regularized_gram(x, epsilon));
    solved[m] = linalg::cholesky_solve(chol, transpose(x));
    contributions[m] = symmetrized(matmul(x, solved[m]));
  }
  const Matrix k_matrix = value_ordered_sum(contributions);

  EigenResult eig = sym_eig(k_matrix, t);

  MccaModel model;
  model.shared = eig.vectors;
  model.eigenvalues = std::move(eig.values);
  for (double& v : model.eigenvalues)
    v = std::clamp(v, 0.0, static_cast<double>(m_chunks));
  model.epsilon = epsilon;
  model.m_chunks = m_chunks;
  model.components = t;
  model.projectors.reserve(m_chunks);
  for (std::size_t m = 0; m < m_chunks; ++m)
    model.projectors.push_back(matmul(solved[m], model.shared));
  return model;
}

FeatureMatrix mcca_reduce(const FeatureMatrix& segment, std::size_t m,
                          std::size_t t, double epsilon) {
  const seg::ViewSet views = seg::chunk_views(segment, m);
  MccaModel model = fit_mcca(views, t, epsilon);
  FeatureMatrix out;
  out.values = std::move(model.shared);
  out.kind = MatrixKind::reduced;
  out.source_id = segment.source_id;
  return out;
}

Cca2Result cca2(const FeatureMatrix& x1, const FeatureMatrix& x2, std::size_t t,
                double epsilon) {
  validate(x1);
  validate(x2);
  if (x1.rows() != x2.rows())
    throw ArgumentError("cca2: views must share the feature dimension");
  const std::size_t t1 = x1.cols();
  const std::size_t t2 = x2.cols();
  if (t < 1 || t > std::min({t1, t2, x1.rows()}))
    throw ArgumentError("cca2: t must lie in [1, min(t1, t2, F)]");

  const Matrix l1 = linalg::cholesky(regularized_gram(x1.values, epsilon));
  const Matrix l2 = linalg::cholesky(regularized_gram(x2.values, epsilon));

  // C = L1^{-1} (X1' X2) L2^{-T}, whitened so the SVD of C carries the
  // canonical correlations directly.
  const Matrix cross = matmul_at_b(x1.values, x2.values);
  const Matrix half = linalg::forward_substitute(l1, cross);
  const Matrix c = transpose(linalg::forward_substitute(l2, transpose(half)));

  linalg::SvdResult svd = linalg::onesided_jacobi_svd(c);

  Cca2Result out;
  out.correlations.resize(t);
  Matrix a(t1, t), b(t2, t);
  for (std::size_t j = 0; j < t; ++j) {
    out.correlations[j] = std::clamp(svd.values[j], 0.0, 1.0);
    for (std::size_t i = 0; i < t1; ++i) a(i, j) = svd.u(i, j);
    for (std::size_t i = 0; i < t2; ++i) b(i, j) = svd.v(i, j);
  }
  out.u1 = linalg::backward_substitute(l1, a);
  out.u2 = linalg::backward_substitute(l2, b);

  // Deterministic sign: fix u1's columns by the eigenvector convention and
  // flip u2 in tandem so each correlation keeps its sign.
  for (std::size_t j = 0; j < t; ++j) {
    std::size_t pivot = 0;
    double best = std::fabs(out.u1(0, j));
    for (std::size_t i = 1; i < t1; ++i) {
      const double v = std::fabs(out.u1(i, j));
      if (v > best) {
        best = v;
        pivot = i;
      }
    }
    if (out.u1(pivot, j) < 0.0) {
      for (std::size_t i = 0; i < t1; ++i) out.u1(i, j) = -out.u1(i, j);
      for (std::size_t i = 0; i < t2; ++i) out.u2(i, j) = -out.u2(i, j);
    }
  }
  return out;
}

FeatureMatrix pca_reduce(const FeatureMatrix& segment, std::size_t t) {
  validate(segment);
  if (t < 1 || t > std::min(segment.rows(), segment.cols()))
    throw ArgumentError("pca_reduce: t must lie in [1, min(F, T)]");
  const Matrix outer = symmetrized(matmul_a_bt(segment.values, segment.values));
  EigenResult eig = sym_eig(outer, t);
  FeatureMatrix out;
  out.values = std::move(eig.vectors);
  out.kind = MatrixKind::reduced;
  out.source_id = segment.source_id;
  return out;
}

double mcca_objective(const seg::ViewSet& views, const std::vector<Matrix>& projectors,
                      const Matrix& shared) {
  check_views(views);
  if (projectors.size() != views.views.size())
    throw ArgumentError("mcca_objective: one projector per view required");
  const std::size_t rows = views.feature_rows();
  const std::size_t width = views.view_width();
  const std::size_t t = shared.cols();
  if (shared.rows() != rows)
    throw ArgumentError("mcca_objective: shared rows must equal view rows");
  for (const Matrix& u : projectors)
    if (u.rows() != width || u.cols() != t)
      throw ArgumentError("mcca_objective: projector shape mismatch");
  if (orthonormality_defect(shared) > 1e-6)
    throw ArgumentError("mcca_objective: shared columns are not orthonormal");

  double total = 0.0;
  for (std::size_t m = 0; m < views.views.size(); ++m) {
    const Matrix projected = matmul(views.views[m], projectors[m]);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < t; ++j) {
        const double d = projected(i, j) - shared(i, j);
        total += d * d;
      }
  }
  return total;
}

void write_mcca_model(const MccaModel& model, const std::string& path) {
  const std::size_t rows = model.shared.rows();
  const std::size_t width = model.projectors.empty() ? 0 : model.projectors.front().rows();
  const std::size_t t = model.components;

  FeatureMatrix container;
  container.kind = MatrixKind::reduced;
  container.source_id = "mcca-model";
  container.values = Matrix(rows + model.m_chunks * width + 1, t);
  std::size_t r = 0;
  for (std::size_t i = 0; i < rows; ++i, ++r)
    for (std::size_t j = 0; j < t; ++j) container.values(r, j) = model.shared(i, j);
  for (const Matrix& u : model.projectors)
    for (std::size_t i = 0; i < width; ++i, ++r)
      for (std::size_t j = 0; j < t; ++j) container.values(r, j) = u(i, j);
  for (std::size_t j = 0; j < t; ++j) container.values(r, j) = model.eigenvalues[j];
  io::write_fmx(container, path);

  nlohmann::ordered_json sidecar{{"feature_rows", rows},
                                 {"view_width", width},
                                 {"m_chunks", model.m_chunks},
                                 {"components", t},
                                 {"epsilon", model.epsilon}};
  std::ofstream out(path + ".json", std::ios::trunc);
  if (!out) throw PersistenceError("cannot open for write: " + path + ".json");
  out << sidecar.dump(2) << '\n';
  if (!out) throw PersistenceError("write failed: " + path + ".json");
}

MccaModel read_mcca_model(const std::string& path) {
  std::ifstream in(path + ".json");
  if (!in) throw PersistenceError("cannot open for read: " + path + ".json");
  nlohmann::json sidecar;
  try {
    in >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mcca model sidecar: ") + e.what());
  }

  MccaModel model;
  std::size_t rows, width;
  try {
    rows = sidecar.at("feature_rows").get<std::size_t>();
    width = sidecar.at("view_width").get<std::size_t>();
    model.m_chunks = sidecar.at("m_chunks").get<std::size_t>();
    model.components = sidecar.at("components").get<std::size_t>();
    model.epsilon = sidecar.at("epsilon").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("mcca model sidecar: ") + e.what());
  }

  const FeatureMatrix container = io::read_fmx(path);
  const std::size_t t = model.components;
  if (container.cols() != t ||
      container.rows() != rows + model.m_chunks * width + 1)
    throw FormatError("mcca model: container shape disagrees with sidecar");

  model.shared = Matrix(rows, t);
  std::size_t r = 0;
  for (std::size_t i = 0; i < rows; ++i, ++r)
    for (std::size_t j = 0; j < t; ++j) model.shared(i, j) = container.values(r, j);
  for (std::size_t m = 0; m < model.m_chunks; ++m) {
    Matrix u(width, t);
    for (std::size_t i = 0; i < width; ++i, ++r)
      for (std::size_t j = 0; j < t; ++j) u(i, j) = container.values(r, j);
    model.projectors.push_back(std::move(u));
  }
  model.eigenvalues.resize(t);
  for (std::size_t j = 0; j < t; ++j) model.eigenvalues[j] = container.values(r, j);
  return model;
}

}  // namespace mvcca::decomp

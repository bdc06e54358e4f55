#include "mvcca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mvcca/common.hpp"

namespace mvcca::linalg {
namespace {

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

}  // namespace

Matrix cholesky(const Matrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0))
      throw NumericError("cholesky: matrix not positive definite at pivot " +
                         std::to_string(j));
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= l(i, k) * l(j, k);
      l(i, j) = acc / ljj;
    }
  }
  return l;
}

Matrix forward_substitute(const Matrix& l, const Matrix& b) {
  const std::size_t n = l.rows();
  if (b.rows() != n) throw ArgumentError("forward_substitute: shapes disagree");
  Matrix y(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = b(i, c);
      for (std::size_t k = 0; k < i; ++k) acc -= l(i, k) * y(k, c);
      y(i, c) = acc / l(i, i);
    }
  }
  return y;
}

Matrix backward_substitute(const Matrix& l, const Matrix& y) {
  const std::size_t n = l.rows();
  if (y.rows() != n) throw ArgumentError("backward_substitute: shapes disagree");
  Matrix x(n, y.cols());
  for (std::size_t c = 0; c < y.cols(); ++c) {
    for (std::size_t ii = n; ii > 0; --ii) {
      const std::size_t i = ii - 1;
      double acc = y(i, c);
      for (std::size_t k = i + 1; k < n; ++k) acc -= l(k, i) * x(k, c);
      x(i, c) = acc / l(i, i);
    }
  }
  return x;
}

Matrix cholesky_solve(const Matrix& chol_lower, const Matrix& b) {
  return backward_substitute(chol_lower, forward_substitute(chol_lower, b));
}

EigenDecomposition jacobi_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("jacobi_eigen: matrix not square");
  const std::size_t n = a.rows();
  Matrix work = a;
  Matrix v = Matrix::identity(n);
  if (n == 1) return {{work(0, 0)}, v};

  constexpr std::size_t kMaxSweeps = 60;
  const double scale = std::max(max_abs(a), 1e-300);

  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += work(p, q) * work(p, q);
    if (std::sqrt(off) <= 1e-15 * scale * static_cast<double>(n)) {
      std::vector<double> values(n);
      for (std::size_t i = 0; i < n; ++i) values[i] = work(i, i);
      return {values, v};
    }
    for (std::size_t p = 0; p < n - 1; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = work(p, q);
        if (std::fabs(apq) <= 1e-300) continue;
        const double theta = (work(q, q) - work(p, p)) / (2.0 * apq);
        const double sign = theta >= 0.0 ? 1.0 : -1.0;
        const double t = sign / (std::fabs(theta) + hypot2(theta, 1.0));
        const double c = 1.0 / hypot2(t, 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        const double app = work(p, p);
        const double aqq = work(q, q);
        work(p, p) = app - t * apq;
        work(q, q) = aqq + t * apq;
        work(p, q) = 0.0;
        work(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = work(i, p);
          const double aiq = work(i, q);
          work(i, p) = aip - s * (aiq + tau * aip);
          work(i, q) = aiq + s * (aip - tau * aiq);
          work(p, i) = work(i, p);
          work(q, i) = work(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  throw NumericError("jacobi_eigen: no convergence within 60 sweeps");
}

EigenDecomposition tridiag_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw ArgumentError("tridiag_eigen: matrix not square");
  const std::size_t n = a.rows();
  Matrix z = a;
  std::vector<double> d(n, 0.0), e(n, 0.0);

  // Householder reduction to tridiagonal form, accumulating the orthogonal
  // transformation in z (Martin-Reinsch-Wilkinson scheme).
  for (std::size_t ii = n; ii-- > 1;) {
    const std::size_t i = ii;
    const std::size_t l = i - 1;
    double h = 0.0;
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::fabs(z(i, k));
      if (scale == 0.0) {
        e[i] = z(i, l);
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          z(i, k) /= scale;
          h += z(i, k) * z(i, k);
        }
        double f = z(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        z(i, l) = f - g;
        f = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          z(j, i) = z(i, j) / h;
          g = 0.0;
          for (std::size_t k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
          for (std::size_t k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
          e[j] = g / h;
          f += e[j] * z(i, j);
        }
        const double hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            z(j, k) -= f * e[k] + g * z(i, k);
        }
      }
    } else {
      e[i] = z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] != 0.0) {
      for (std::size_t j = 0; j < i; ++j) {
        double g = 0.0;
        for (std::size_t k = 0; k < i; ++k) g += z(i, k) * z(k, j);
        for (std::size_t k = 0; k < i; ++k) z(k, j) -= g * z(k, i);
      }
    }
    d[i] = z(i, i);
    z(i, i) = 1.0;
    for (std::size_t j = 0; j < i; ++j) {
      z(j, i) = 0.0;
      z(i, j) = 0.0;
    }
  }

  // Implicit-shift QL on the tridiagonal (d, e), rotations applied to z.
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  constexpr int kMaxIter = 50;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
        if (std::fabs(e[m]) <= 2.3e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == kMaxIter)
          throw NumericError(
              "tridiag_eigen: QL failed to converge within 50 iterations per "
              "eigenvalue");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = hypot2(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::fabs(r) : -std::fabs(r)));
        double s = 1.0, c = 1.0, p = 0.0;
        for (std::size_t ii = m; ii-- > l;) {
          const std::size_t i = ii;
          double f = s * e[i];
          const double b = c * e[i];
          r = hypot2(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          for (std::size_t k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (r == 0.0 && m - l > 1) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return {d, z};
}

SvdResult onesided_jacobi_svd(const Matrix& a) {
  const bool transposed = a.rows() < a.cols();
  Matrix u = transposed ? transpose(a) : a;
  const std::size_t m = u.rows();
  const std::size_t n = u.cols();
  Matrix v = Matrix::identity(n);

  constexpr std::size_t kMaxSweeps = 60;
  const double eps = 1e-15;
  bool converged = false;
  for (std::size_t sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += u(k, p) * u(k, p);
          beta += u(k, q) * u(k, q);
          gamma += u(k, p) * u(k, q);
        }
        if (std::fabs(gamma) <= eps * std::sqrt(alpha * beta) ||
            std::fabs(gamma) <= 1e-300)
          continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double sign = zeta >= 0.0 ? 1.0 : -1.0;
        const double t = sign / (std::fabs(zeta) + hypot2(zeta, 1.0));
        const double c = 1.0 / hypot2(t, 1.0);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double up = u(k, p);
          const double uq = u(k, q);
          u(k, p) = c * up - s * uq;
          u(k, q) = s * up + c * uq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vp = v(k, p);
          const double vq = v(k, q);
          v(k, p) = c * vp - s * vq;
          v(k, q) = s * vp + c * vq;
        }
      }
    }
  }
  if (!converged)
    throw NumericError("onesided_jacobi_svd: no convergence within 60 sweeps");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) acc += u(k, j) * u(k, j);
    sigma[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return sigma[i] > sigma[j];
  });

  SvdResult out;
  out.values.resize(n);
  out.u = Matrix(m, n);
  out.v = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.values[j] = sigma[src];
    const double inv = sigma[src] > 0.0 ? 1.0 / sigma[src] : 0.0;
    for (std::size_t k = 0; k < m; ++k) out.u(k, j) = u(k, src) * inv;
    for (std::size_t k = 0; k < n; ++k) out.v(k, j) = v(k, src);
  }
  if (transposed) std::swap(out.u, out.v);
  return out;
}

}  // namespace mvcca::linalg

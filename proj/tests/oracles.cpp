#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mvcca/decomp.hpp"
#include "mvcca/linalg.hpp"

namespace oracles {
namespace {

using mvcca::Matrix;

double det2(double a, double b, double c, double d) { return a * d - b * c; }

double det3(const Matrix& m, int r0, int r1, int r2, int c0, int c1, int c2) {
  return m(r0, c0) * det2(m(r1, c1), m(r1, c2), m(r2, c1), m(r2, c2)) -
         m(r0, c1) * det2(m(r1, c0), m(r1, c2), m(r2, c0), m(r2, c2)) +
         m(r0, c2) * det2(m(r1, c0), m(r1, c1), m(r2, c0), m(r2, c1));
}

double det4(const Matrix& m) {
  double acc = 0.0;
  for (int c = 0; c < 4; ++c) {
    int cols[3], k = 0;
    for (int j = 0; j < 4; ++j)
      if (j != c) cols[k++] = j;
    const double minor = det3(m, 1, 2, 3, cols[0], cols[1], cols[2]);
    acc += (c % 2 == 0 ? 1.0 : -1.0) * m(0, c) * minor;
  }
  return acc;
}

// All-real roots of x^3 + p x + q (trigonometric method).
std::vector<double> depressed_cubic_roots(double p, double q) {
  if (std::fabs(p) < 1e-300) {
    const double r = std::cbrt(-q);
    return {r, r, r};
  }
  const double m = 2.0 * std::sqrt(std::max(-p / 3.0, 0.0));
  if (m == 0.0) {
    const double r = std::cbrt(-q);
    return {r, r, r};
  }
  double arg = 3.0 * q / (p * m);
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;
  std::vector<double> roots(3);
  for (int k = 0; k < 3; ++k)
    roots[k] = m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0);
  return roots;
}

std::vector<double> cubic_roots(double b, double c, double d) {
  // x^3 + b x^2 + c x + d, all roots real.
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  std::vector<double> roots = depressed_cubic_roots(p, q);
  for (double& r : roots) r -= shift;
  return roots;
}

std::vector<double> quartic_roots(double a, double b, double c, double d) {
  // x^4 + a x^3 + b x^2 + c x + d with all roots real (symmetric input).
  const double shift = a / 4.0;
  const double a2 = a * a;
  const double p = b - 3.0 * a2 / 8.0;
  const double q = c - a * b / 2.0 + a2 * a / 8.0;
  const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;

  std::vector<double> roots;
  if (std::fabs(q) < 1e-13 * (1.0 + std::fabs(p) + std::fabs(r))) {
    // Biquadratic: y^4 + p y^2 + r.
    const double disc = std::max(p * p - 4.0 * r, 0.0);
    const double sq = std::sqrt(disc);
    for (double y2 : {(-p + sq) / 2.0, (-p - sq) / 2.0}) {
      const double y = std::sqrt(std::max(y2, 0.0));
      roots.push_back(y);
      roots.push_back(-y);
    }
  } else {
    // Ferrari: resolvent cubic z^3 - p z^2 - 4 r z + (4 p r - q^2) = 0; with
    // all-real quartic roots the largest resolvent root keeps z - p >= 0.
    const std::vector<double> zs = cubic_roots(-p, -4.0 * r, 4.0 * p * r - q * q);
    const double z = *std::max_element(zs.begin(), zs.end());
    const double big_a = std::sqrt(std::max(z - p, 0.0));
    const double big_b = big_a > 1e-150 ? q / (2.0 * big_a)
                                        : std::sqrt(std::max(z * z / 4.0 - r, 0.0));
    // (y^2 + z/2)^2 = (A y - B)^2
    for (int branch = 0; branch < 2; ++branch) {
      const double lin = branch == 0 ? -big_a : big_a;
      const double cst = branch == 0 ? z / 2.0 + big_b : z / 2.0 - big_b;
      const double disc = std::max(lin * lin - 4.0 * cst, 0.0);
      const double sq = std::sqrt(disc);
      roots.push_back((-lin + sq) / 2.0);
      roots.push_back((-lin - sq) / 2.0);
    }
  }
  for (double& y : roots) y -= shift;
  return roots;
}

double poly_eval(const std::vector<double>& coeffs, double x) {
  // coeffs c0..cn of c0 + c1 x + ... + cn x^n
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
  return acc;
}

double poly_deriv_eval(const std::vector<double>& coeffs, double x) {
  double acc = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;)
    acc = acc * x + coeffs[i] * static_cast<double>(i);
  return acc;
}

void newton_polish(const std::vector<double>& coeffs, std::vector<double>& roots) {
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = poly_eval(coeffs, r);
      const double df = poly_deriv_eval(coeffs, r);
      if (std::fabs(df) < 1e-12) break;
      const double step = f / df;
      if (!std::isfinite(step) || std::fabs(step) > 1.0) break;
      r -= step;
    }
  }
}

}  // namespace

std::vector<double> char_poly_coefficients(const Matrix& a) {
  const std::size_t n = a.rows();
  // Ascending-power coefficients of det(lambda I - A).
  if (n == 1) return {-a(0, 0), 1.0};
  if (n == 2) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = det2(a(0, 0), a(0, 1), a(1, 0), a(1, 1));
    return {det, -tr, 1.0};
  }
  if (n == 3) {
    const double c1 = a(0, 0) + a(1, 1) + a(2, 2);
    const double c2 = det2(a(0, 0), a(0, 1), a(1, 0), a(1, 1)) +
                      det2(a(0, 0), a(0, 2), a(2, 0), a(2, 2)) +
                      det2(a(1, 1), a(1, 2), a(2, 1), a(2, 2));
    const double c3 = det3(a, 0, 1, 2, 0, 1, 2);
    return {-c3, c2, -c1, 1.0};
  }
  if (n == 4) {
    double c1 = 0.0;
    for (int i = 0; i < 4; ++i) c1 += a(i, i);
    double c2 = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j)
        c2 += det2(a(i, i), a(i, j), a(j, i), a(j, j));
    double c3 = 0.0;
    for (int drop = 0; drop < 4; ++drop) {
      int idx[3], k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != drop) idx[k++] = i;
      c3 += det3(a, idx[0], idx[1], idx[2], idx[0], idx[1], idx[2]);
    }
    const double c4 = det4(a);
    return {c4, -c3, c2, -c1, 1.0};
  }
  throw std::invalid_argument("char_poly_coefficients: n must be <= 4");
}

std::vector<double> char_poly_eigenvalues(const Matrix& a) {
  const std::size_t n = a.rows();
  const std::vector<double> coeffs = char_poly_coefficients(a);
  std::vector<double> roots;
  if (n == 1) {
    roots = {a(0, 0)};
  } else if (n == 2) {
    // Stable quadratic formula for x^2 + b x + c.
    const double b = coeffs[1];
    const double c = coeffs[0];
    const double disc = std::max(b * b - 4.0 * c, 0.0);
    const double sq = std::sqrt(disc);
    const double r1 = b >= 0.0 ? (-b - sq) / 2.0 : (-b + sq) / 2.0;
    const double r2 = r1 != 0.0 ? c / r1 : -b - r1;
    roots = {r1, r2};
  } else if (n == 3) {
    roots = cubic_roots(coeffs[2], coeffs[1], coeffs[0]);
  } else {
    roots = quartic_roots(coeffs[3], coeffs[2], coeffs[1], coeffs[0]);
  }
  newton_polish(coeffs, roots);
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return roots;
}

std::vector<double> naive_dft_magnitudes(const std::vector<double>& frame) {
  const std::size_t n = frame.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t f = 0; f < out.size(); ++f) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(f) *
                           static_cast<double>(k) / static_cast<double>(n);
      acc += frame[k] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    out[f] = std::abs(acc);
  }
  return out;
}

std::vector<double> whitening_cca_correlations(const Matrix& x1, const Matrix& x2,
                                               double epsilon, std::size_t t) {
  using namespace mvcca;
  auto gram = [epsilon](const Matrix& x) {
    Matrix g = matmul_at_b(x, x);
    for (std::size_t i = 0; i < g.rows(); ++i) g(i, i) += epsilon;
    return g;
  };
  const Matrix l1 = linalg::cholesky(gram(x1));
  const Matrix l2 = linalg::cholesky(gram(x2));
  const Matrix s21 = matmul_at_b(x2, x1);
  // Y = L2^{-1} S21 L1^{-T}; rho^2 are the eigenvalues of Y'Y.
  const Matrix inner = linalg::forward_substitute(l2, s21);
  const Matrix y = transpose(linalg::forward_substitute(l1, transpose(inner)));
  Matrix product = matmul_at_b(y, y);
  for (std::size_t i = 0; i < product.rows(); ++i)
    for (std::size_t j = i + 1; j < product.cols(); ++j) {
      const double v = 0.5 * (product(i, j) + product(j, i));
      product(i, j) = v;
      product(j, i) = v;
    }
  const mvcca::decomp::EigenResult eig = mvcca::decomp::sym_eig(product, t);
  std::vector<double> rho(t);
  for (std::size_t i = 0; i < t; ++i)
    rho[i] = std::sqrt(std::clamp(eig.values[i], 0.0, 1.0));
  return rho;
}

}  // namespace oracles

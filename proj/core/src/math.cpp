#include "fairaudit/math.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fairaudit {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kEpsilon = 1e-15;
constexpr double kFpMin = std::numeric_limits<double>::min() / kEpsilon;

// Series expansion of P(a, x); converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxIterations; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a, x) via modified Lentz; converges for x >= a + 1.
double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kFpMin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = b + an / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
    if (std::isinf(x) && x > 0.0) return 1.0;
    throw std::domain_error("gamma_p: invalid arguments");
  }
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_fraction(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0 || !std::isfinite(x)) {
    if (std::isinf(x) && x > 0.0) return 0.0;
    throw std::domain_error("gamma_q: invalid arguments");
  }
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_fraction(a, x);
}

double chisq_sf(double x, double df) {
  if (!(df > 0.0)) throw std::domain_error("chisq_sf: df must be positive");
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

SymmetricEigen symmetric_eigen(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("symmetric_eigen: size mismatch");
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
  auto vt = [&](std::size_t r, std::size_t c) -> double& { return v[r * n + c]; };

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (off < 1e-30) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vt(k, p);
          const double vkq = vt(k, q);
          vt(k, p) = c * vkp - s * vkq;
          vt(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = at(i, i);

  // Sort ascending, permuting eigenvector columns alongside.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (out.values[order[j]] < out.values[order[i]]) std::swap(order[i], order[j]);

  SymmetricEigen sorted;
  sorted.values.resize(n);
  sorted.vectors.resize(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    sorted.values[j] = out.values[order[j]];
    for (std::size_t i = 0; i < n; ++i) sorted.vectors[i * n + j] = v[i * n + order[j]];
  }
  return sorted;
}

QuadraticForm pseudo_inverse_quadratic(const std::vector<double>& matrix, std::size_t n,
                                       const std::vector<double>& d) {
  if (d.size() != n) throw std::invalid_argument("pseudo_inverse_quadratic: size mismatch");
  const SymmetricEigen eig = symmetric_eigen(matrix, n);

  double max_abs = 0.0;
  for (double lambda : eig.values) max_abs = std::max(max_abs, std::fabs(lambda));
  const double tol = static_cast<double>(n) * max_abs * 1e-12;

  QuadraticForm out;
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = eig.values[j];
    if (std::fabs(lambda) <= tol) continue;
    double proj = 0.0;
    for (std::size_t i = 0; i < n; ++i) proj += eig.vectors[i * n + j] * d[i];
    out.value += proj * proj / lambda;
    ++out.rank;
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace fairaudit

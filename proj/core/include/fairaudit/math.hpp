#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace fairaudit {

/// Survival function of the chi-squared distribution: P(X >= x) with df
/// degrees of freedom. Accurate in the far tail (no 1-CDF cancellation).
double chisq_sf(double x, double df);

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

struct SymmetricEigen {
  std::vector<double> values;   // ascending
  std::vector<double> vectors;  // row-major n*n; column j = eigenvector j
};

/// Cyclic Jacobi eigendecomposition; intended for small n (attribute levels).
SymmetricEigen symmetric_eigen(std::vector<double> matrix, std::size_t n);

/// Quadratic form d' M^+ d through the spectral pseudo-inverse of the
/// symmetric matrix M; also reports rank(M). Eigenvalues below
/// n * max|lambda| * 1e-12 are treated as zero.
struct QuadraticForm {
  double value = 0.0;
  std::size_t rank = 0;
};
QuadraticForm pseudo_inverse_quadratic(const std::vector<double>& matrix, std::size_t n,
                                       const std::vector<double>& d);

/// FNV-1a 64-bit hash; used for config and methodology fingerprints.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace fairaudit

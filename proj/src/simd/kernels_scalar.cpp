#include "colourrisk/simd/kernels.hpp"

namespace colourrisk::simd::detail {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double weighted_dot_scalar(const double* w, const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * a[i] * b[i];
  return s;
}

double sum_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i];
  return s;
}

double centered_sumsq_scalar(const double* a, std::size_t n, double center) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - center;
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void affine_scalar(const double* x, double* y, std::size_t n, double center, double scale) {
  for (std::size_t i = 0; i < n; ++i) y[i] = (x[i] - center) * scale;
}

}  // namespace

const KernelTable scalar_table{Isa::scalar,   dot_scalar,  weighted_dot_scalar, sum_scalar,
                               centered_sumsq_scalar, axpy_scalar, affine_scalar};

}  // namespace colourrisk::simd::detail

#include "colourrisk/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "colourrisk/simd/kernels.hpp"

namespace colourrisk {

ZeroVarianceError::ZeroVarianceError(std::size_t column)
    : InputError("column " + std::to_string(column) + " has zero variance"), column_(column) {}

Matrix StandardScaler::transform(const Matrix& x) const {
  if (x.cols() != means.size())
    throw InputError("standardize: expected " + std::to_string(means.size()) + " columns, got " +
                     std::to_string(x.cols()));
  const auto& k = simd::kernels();
  Matrix z(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j)
    k.affine(x.col(j).data(), z.col(j).data(), x.rows(), means[j], 1.0 / sds[j]);
  return z;
}

Standardized standardize(const Matrix& x, bool sample_sd) {
  const std::size_t n = x.rows();
  if (n < 2) throw InputError("standardize: need at least 2 rows");
  const auto& k = simd::kernels();
  Standardized out;
  out.scaler.sample_sd = sample_sd;
  out.scaler.means.resize(x.cols());
  out.scaler.sds.resize(x.cols());
  const double denom = sample_sd ? static_cast<double>(n - 1) : static_cast<double>(n);
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double* col = x.col(j).data();
    const double mean = k.sum(col, n) / static_cast<double>(n);
    if (!std::isfinite(mean)) throw InputError("standardize: non-finite value in column " + std::to_string(j));
    const double sd = std::sqrt(k.centered_sumsq(col, n, mean) / denom);
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean)))) throw ZeroVarianceError(j);
    out.scaler.means[j] = mean;
    out.scaler.sds[j] = sd;
  }
  out.z = out.scaler.transform(x);
  return out;
}

SymmetricEigen jacobi_eigen(const Matrix& input, double tolerance, std::optional<int> max_sweeps) {
  const std::size_t k = input.rows();
  if (input.cols() != k) throw NumericalError("jacobi_eigen: matrix is not square");
  Matrix a = input;
  Matrix v = Matrix::identity(k);
  const int sweep_cap = max_sweeps.value_or(static_cast<int>(10 * k * k));

  double frob = 0.0;
  for (double x : a.data()) frob += x * x;
  frob = std::sqrt(frob);
  const double limit = tolerance * std::max(frob, 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t p = 0; p < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) s += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  int sweeps = 0;
  while (off_norm() > limit) {
    if (sweeps >= sweep_cap)
      throw NumericalError("jacobi_eigen: no convergence after " + std::to_string(sweep_cap) + " sweeps");
    ++sweeps;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < k; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < k; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out;
  out.sweeps = sweeps;
  out.values.resize(k);
  out.vectors = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    out.values[i] = a(order[i], order[i]);
    std::ranges::copy(v.col(order[i]), out.vectors.col(i).begin());
  }
  return out;
}

Matrix correlation_of(const Matrix& z) {
  const std::size_t n = z.rows();
  const std::size_t k = z.cols();
  const auto& kern = simd::kernels();
  Matrix centered(n, k);
  std::vector<double> norms(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double mean = kern.sum(z.col(j).data(), n) / static_cast<double>(n);
    kern.affine(z.col(j).data(), centered.col(j).data(), n, mean, 1.0);
    norms[j] = std::sqrt(kern.dot(centered.col(j).data(), centered.col(j).data(), n));
    if (!(norms[j] > 0.0)) throw ZeroVarianceError(j);
  }
  Matrix corr(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    corr(i, i) = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double c = kern.dot(centered.col(i).data(), centered.col(j).data(), n) / (norms[i] * norms[j]);
      corr(i, j) = c;
      corr(j, i) = c;
    }
  }
  return corr;
}

PcaModel fit_pca(const Matrix& z) {
  const std::size_t k = z.cols();
  if (z.rows() < 2) throw InputError("fit_pca: need at least 2 rows");
  if (k < 1 || k > 16) throw InputError("fit_pca: dimension must be in 1..16");
  for (double x : z.data())
    if (!std::isfinite(x)) throw InputError("fit_pca: non-finite input");

  const SymmetricEigen eig = jacobi_eigen(correlation_of(z));

  PcaModel model;
  model.sweeps = eig.sweeps;
  model.eigenvalues = eig.values;
  model.loadings = Matrix(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto vec = eig.vectors.col(i);
    // Sign convention: the largest-magnitude entry is positive, ties to the lowest index.
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < k; ++j)
      if (std::fabs(vec[j]) > std::fabs(vec[pivot]) + 1e-12) pivot = j;
    const double sign = vec[pivot] < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = 0; j < k; ++j) model.loadings(i, j) = sign * vec[j];
  }

  const double total = std::accumulate(eig.values.begin(), eig.values.end(), 0.0);
  model.explained_ratio.resize(k);
  model.cumulative_ratio.resize(k);
  double running = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    model.explained_ratio[i] = eig.values[i] / total;
    running += eig.values[i];
    model.cumulative_ratio[i] = running / total;
  }
  return model;
}

ComponentChoice select_components(const PcaModel& model, double threshold, std::optional<std::size_t> cap) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InputError("threshold must be in (0, 1]");
  const std::size_t k = model.dimension();
  ComponentChoice choice{k, false};
  for (std::size_t m = 0; m < k; ++m) {
    // The 1e-12 slack absorbs rounding in the cumulative sum (e.g. at threshold 1.0).
    if (model.cumulative_ratio[m] >= threshold - 1e-12) {
      choice.count = m + 1;
      break;
    }
  }
  if (cap && *cap >= 1 && choice.count > *cap) {
    choice.count = *cap;
    choice.threshold_unmet = true;
  }
  return choice;
}

Matrix project(const StandardScaler& scaler, const PcaModel& model, const Matrix& x, std::size_t r) {
  const std::size_t k = model.dimension();
  if (x.cols() != k || scaler.means.size() != k)
    throw InputError("project: expected " + std::to_string(k) + " columns, got " + std::to_string(x.cols()));
  if (r < 1 || r > k) throw InputError("project: component count out of range");
  const Matrix z = scaler.transform(x);
  const auto& kern = simd::kernels();
  Matrix scores(x.rows(), r);
  for (std::size_t c = 0; c < r; ++c) {
    auto dst = scores.col(c);
    for (std::size_t j = 0; j < k; ++j) kern.axpy(model.loadings(c, j), z.col(j).data(), dst.data(), x.rows());
  }
  return scores;
}

}  // namespace colourrisk

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "colourrisk/errors.hpp"
#include "colourrisk/io/serialize.hpp"
#include "colourrisk/pca.hpp"
#include "oracles/oracles.hpp"

using namespace colourrisk;

namespace {

Matrix correlated_data(std::mt19937_64& rng, std::size_t n, std::size_t k, double coupling = 0.6) {
  std::normal_distribution<double> g;
  Matrix x(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const double common = g(rng);
    for (std::size_t j = 0; j < k; ++j) x(i, j) = 10.0 * static_cast<double>(j) + coupling * common + g(rng);
  }
  return x;
}

PcaModel fitted(const Matrix& x) { return fit_pca(standardize(x).z); }

PcaModel with_ratios(std::vector<double> ratios) {
  PcaModel m;
  double cum = 0.0;
  for (double r : ratios) {
    m.eigenvalues.push_back(r * static_cast<double>(ratios.size()));
    m.explained_ratio.push_back(r);
    cum += r;
    m.cumulative_ratio.push_back(cum);
  }
  m.loadings = Matrix::identity(ratios.size());
  return m;
}

oracle::Mat to_rows(const Matrix& m) {
  oracle::Mat rows(m.rows(), oracle::Vec(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) rows[i][j] = m(i, j);
  return rows;
}

void check_model_invariants(const PcaModel& m) {
  const std::size_t k = m.dimension();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum += m.eigenvalues[i];
    CHECK(m.eigenvalues[i] >= -1e-12);
    if (i > 0) {
      CHECK(m.eigenvalues[i] <= m.eigenvalues[i - 1]);
      CHECK(m.cumulative_ratio[i] >= m.cumulative_ratio[i - 1]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < k; ++c) d += m.loadings(i, c) * m.loadings(j, c);
      CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) <= 1e-9);
    }
  }
  CHECK(std::abs(sum - static_cast<double>(k)) <= 1e-9);
  CHECK(std::abs(m.cumulative_ratio.back() - 1.0) <= 1e-12);
}

}  // namespace

TEST_CASE("standardize: arithmetic, idempotence and a two-pass oracle") {
  Matrix x(3, 1);
  x(0, 0) = 1;
  x(1, 0) = 2;
  x(2, 0) = 3;
  const Standardized s = standardize(x);
  CHECK(s.scaler.means[0] == 2.0);
  CHECK(s.scaler.sds[0] == 1.0);
  CHECK(s.z(0, 0) == -1.0);
  CHECK(s.z(1, 0) == 0.0);
  CHECK(s.z(2, 0) == 1.0);

  std::mt19937_64 rng(1);
  const Matrix r = correlated_data(rng, 10, 4);
  const Standardized a = standardize(r);
  const Standardized b = standardize(a.z);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(b.z(i, j) - a.z(i, j)) <= 1e-12);
  const auto rows = to_rows(r);
  for (std::size_t j = 0; j < 4; ++j) {
    const auto col = oracle::column(rows, j);
    CHECK(std::abs(a.scaler.means[j] - oracle::mean(col)) <= 1e-12 * std::abs(oracle::mean(col)));
    CHECK(std::abs(a.scaler.sds[j] - oracle::sample_sd(col)) <= 1e-12 * oracle::sample_sd(col));
  }
}

TEST_CASE("a constant column is rejected by name") {
  Matrix x(5, 3, 1.0);
  for (std::size_t i = 0; i < 5; ++i) {
    x(i, 0) = static_cast<double>(i);
    x(i, 2) = static_cast<double>(i * i);
  }
  try {
    (void)standardize(x);
    FAIL("expected ZeroVarianceError");
  } catch (const ZeroVarianceError& e) {
    CHECK(e.column() == 1);
  }
}

TEST_CASE("single variable: loading 1.00 and explained ratio 1.00") {
  std::mt19937_64 rng(2);
  const PcaModel m = fitted(correlated_data(rng, 48, 1));
  CHECK(m.loadings(0, 0) == 1.0);
  CHECK(m.explained_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(select_components(m).count == 1);
}

TEST_CASE("two correlated variables: loadings +-1/sqrt2 and 100% at r = 2") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const PcaModel m = fitted(correlated_data(rng, 48, 2, 0.2 + 0.1 * rep));
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(std::abs(m.loadings(i, j)) - std::sqrt(0.5)) <= 1e-12);
    CHECK(std::abs(m.cumulative_ratio[1] - 1.0) <= 1e-12);
    check_model_invariants(m);
  }
}

TEST_CASE("eigen-decomposition agrees with an independent max-pivot Jacobi oracle") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t k = 2 + static_cast<std::size_t>(rep % 7);
    const Matrix z = standardize(correlated_data(rng, 30, k)).z;
    const PcaModel m = fit_pca(z);
    const oracle::Eigen e = oracle::jacobi_max_pivot(to_rows(correlation_of(z)));
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(std::abs(m.eigenvalues[i] - e.values[i]) <= 1e-9);
      double same = 0.0, flipped = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        same = std::max(same, std::abs(m.loadings(i, j) - e.vectors[i][j]));
        flipped = std::max(flipped, std::abs(m.loadings(i, j) + e.vectors[i][j]));
      }
      CHECK(std::min(same, flipped) <= 1e-8);
    }
    check_model_invariants(m);
  }
}

TEST_CASE("jacobi_eigen handles diagonal and 2x2 closed forms") {
  Matrix d(3, 3);
  d(0, 0) = 1;
  d(1, 1) = 3;
  d(2, 2) = 2;
  const SymmetricEigen e = jacobi_eigen(d);
  CHECK(e.values == std::vector<double>{3, 2, 1});
  Matrix two(2, 2, 0.5);
  two(0, 0) = two(1, 1) = 1.0;
  const SymmetricEigen t = jacobi_eigen(two);
  CHECK(t.values[0] == doctest::Approx(1.5));
  CHECK(t.values[1] == doctest::Approx(0.5));
}

TEST_CASE("select_components examples and monotonicity") {
  CHECK(select_components(with_ratios({0.95, 0.05})).count == 1);
  CHECK(select_components(with_ratios({0.50, 0.30, 0.15, 0.05}), 0.90).count == 3);
  CHECK(select_components(with_ratios({0.5, 0.5}), 1.0).count == 2);
  const auto capped = select_components(with_ratios({0.40, 0.30, 0.20, 0.10}), 0.90, 2);
  CHECK(capped.count == 2);
  CHECK(capped.threshold_unmet);
  CHECK_THROWS_AS(select_components(with_ratios({1.0}), 0.0), InputError);

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    const PcaModel m = fitted(correlated_data(rng, 40, 6, 0.3 * rep));
    std::size_t prev = 0;
    for (double t = 0.05; t <= 1.0; t += 0.05) {
      const std::size_t r = select_components(m, t).count;
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("projection: reconstruction, score variances and by-hand dot products") {
  std::mt19937_64 rng(6);
  const Matrix x = correlated_data(rng, 25, 5);
  const Standardized st = standardize(x);
  const PcaModel m = fit_pca(st.z);
  const Matrix s = project(st.scaler, m, x, 5);
  double worst = 0.0;
  for (std::size_t i = 0; i < 25; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double back = 0.0;
      for (std::size_t c = 0; c < 5; ++c) back += s(i, c) * m.loadings(c, j);
      worst = std::max(worst, std::abs(back - st.z(i, j)));
    }
  CHECK(worst <= 1e-8);
  for (std::size_t c = 0; c < 5; ++c) {
    const auto col = oracle::column(to_rows(s), c);
    const double sd = oracle::sample_sd(col);
    CHECK(std::abs(sd * sd - m.eigenvalues[c]) <= 1e-9);
  }

  Matrix row(1, 5);
  for (std::size_t j = 0; j < 5; ++j) row(0, j) = x(3, j) + 0.25 * static_cast<double>(j + 1);
  const Matrix p = project(st.scaler, m, row, 2);
  for (std::size_t c = 0; c < 2; ++c) {
    double hand = 0.0;
    for (std::size_t j = 0; j < 5; ++j) hand += (row(0, j) - st.scaler.means[j]) / st.scaler.sds[j] * m.loadings(c, j);
    CHECK(std::abs(p(0, c) - hand) <= 1e-12);
  }
}

TEST_CASE("permuting columns permutes loadings up to sign") {
  std::mt19937_64 rng(7);
  const Matrix x = correlated_data(rng, 40, 4, 1.0);
  const std::vector<std::size_t> perm{2, 0, 3, 1};
  const PcaModel a = fitted(x);
  const PcaModel b = fitted(x.select_columns(perm));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(a.eigenvalues[i] - b.eigenvalues[i]) <= 1e-10);
    double same = 0.0, flipped = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      same = std::max(same, std::abs(b.loadings(i, j) - a.loadings(i, perm[j])));
      flipped = std::max(flipped, std::abs(b.loadings(i, j) + a.loadings(i, perm[j])));
    }
    CHECK(std::min(same, flipped) <= 1e-8);
  }
}

TEST_CASE("fits are bit-identical across repeats and serialize losslessly") {
  std::mt19937_64 rng(8);
  const Matrix x = correlated_data(rng, 48, 7);
  const Standardized st = standardize(x);
  const PcaModel a = fit_pca(st.z);
  const PcaModel b = fit_pca(st.z);
  CHECK(a == b);
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    std::size_t pivot = 0;
    for (std::size_t j = 1; j < a.dimension(); ++j)
      if (std::abs(a.loadings(i, j)) > std::abs(a.loadings(i, pivot)) + 1e-12) pivot = j;
    CHECK(a.loadings(i, pivot) > 0.0);
  }
  StandardScaler scaler;
  PcaModel back;
  from_json(nlohmann::json::parse(to_json(st.scaler, a).dump()), scaler, back);
  CHECK(scaler == st.scaler);
  CHECK(back.loadings == a.loadings);
  CHECK(back.eigenvalues == a.eigenvalues);
}

TEST_CASE("fit_pca rejects malformed input") {
  CHECK_THROWS_AS(fit_pca(Matrix(1, 3)), InputError);
  CHECK_THROWS_AS(fit_pca(Matrix(5, 0)), InputError);
  Matrix bad(4, 2, 0.5);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(fit_pca(bad), InputError);
}

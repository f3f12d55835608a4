#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "colourrisk/errors.hpp"
#include "colourrisk/matrix.hpp"

namespace colourrisk {

struct StandardScaler {
  std::vector<double> means;
  std::vector<double> sds;
  /// true: n-1 denominator; false: n.
  bool sample_sd = true;

  /// (x - mean) / sd column by column, with the stored parameters.
  Matrix transform(const Matrix& x) const;
  bool operator==(const StandardScaler&) const = default;
};

class ZeroVarianceError : public InputError {
 public:
  explicit ZeroVarianceError(std::size_t column);
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

struct Standardized {
  StandardScaler scaler;
  Matrix z;
};

/// Throws ZeroVarianceError naming the first constant column.
Standardized standardize(const Matrix& x, bool sample_sd = true);

/// Eigendecomposition of the correlation matrix of standardized data.
/// Row i of `loadings` is the unit eigenvector for eigenvalues[i].
struct PcaModel {
  Matrix loadings;
  std::vector<double> eigenvalues;  // descending
  std::vector<double> explained_ratio;
  std::vector<double> cumulative_ratio;
  int sweeps = 0;

  std::size_t dimension() const { return eigenvalues.size(); }
  bool operator==(const PcaModel&) const = default;
};

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi rotations. Stops when the off-diagonal Frobenius norm falls
/// below tolerance * ||A||_F; throws NumericalError after `max_sweeps`
/// (default 10 k^2).
SymmetricEigen jacobi_eigen(const Matrix& a, double tolerance = 1e-12,
                            std::optional<int> max_sweeps = std::nullopt);

/// Sample correlation matrix of the columns of z.
Matrix correlation_of(const Matrix& z);

PcaModel fit_pca(const Matrix& z);

struct ComponentChoice {
  std::size_t count = 0;
  bool threshold_unmet = false;
};

/// Smallest m with cumulative_ratio[m-1] >= threshold, optionally capped.
ComponentChoice select_components(const PcaModel& model, double threshold = 0.90,
                                  std::optional<std::size_t> cap = std::nullopt);

/// Scores of raw rows: standardize with `scaler`, multiply by the first r
/// loading rows. Result is n x r.
Matrix project(const StandardScaler& scaler, const PcaModel& model, const Matrix& x, std::size_t r);

}  // namespace colourrisk

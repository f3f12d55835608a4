#pragma once

// Proportional-odds (cumulative logit) regression with three ordered levels:
//
//   logit P(Y <= l | s) = eta_l + beta . s,   l = 1, 2,   eta_1 < eta_2
//
// Note the sign: a larger beta . s raises P(Y <= l), i.e. pushes toward the
// lower risk level. The optimizer works on (eta_1, delta, beta) with
// eta_2 = eta_1 + exp(delta), which keeps the thresholds ordered.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "colourrisk/matrix.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk {

struct OrdinalModel {
  double eta1 = 0.0;
  double eta2 = 0.0;
  std::vector<double> beta;

  std::size_t predictors() const { return beta.size(); }
  bool operator==(const OrdinalModel&) const = default;
};

struct FitOptions {
  int max_iter = 200;
  /// Convergence: infinity norm of the NLL gradient.
  double tol = 1e-8;
  int max_halvings = 30;
  /// Any |parameter| beyond this marks the fit as separated.
  double separation_bound = 1e5;
  bool record_trace = false;
};

struct FitResult {
  OrdinalModel model;
  double nll = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separation = false;
  double gradient_norm = 0.0;
  /// NLL at each accepted iterate (only with FitOptions::record_trace).
  std::vector<double> nll_trace;

  bool operator==(const FitResult&) const = default;
};

/// (P(L), P(M), P(H)) for one score vector.
std::array<double, 3> class_probabilities(const OrdinalModel& model, std::span<const double> scores);

struct NllDerivatives {
  double nll = 0.0;
  std::vector<double> gradient;  // (eta_1, delta, beta_1..beta_r)
  Matrix hessian;
};

/// Negative log-likelihood with gradient and Hessian in the (eta_1, delta,
/// beta) parameterization. Throws NumericalError on a non-finite term.
NllDerivatives nll_grad_hess(const OrdinalModel& model, const Matrix& scores,
                             std::span<const RiskLevel> y);

double negative_log_likelihood(const OrdinalModel& model, const Matrix& scores,
                               std::span<const RiskLevel> y);

/// Parameter vector (eta_1, log(eta_2 - eta_1), beta...).
std::vector<double> to_parameters(const OrdinalModel& model);
OrdinalModel from_parameters(std::span<const double> theta);

/// Maximum likelihood by Newton's method with step halving. Throws
/// InputError if fewer than two levels occur or the design has r >= n.
FitResult fit_ordinal(const Matrix& scores, std::span<const RiskLevel> y, const FitOptions& options = {});

/// Argmax of the class probabilities; exact ties go to the lower level.
RiskLevel predict_from_probabilities(const std::array<double, 3>& p);
RiskLevel predict(const OrdinalModel& model, std::span<const double> scores);

struct ErrorCount {
  std::size_t wrong = 0;
  std::size_t total = 0;
  double rate() const { return total == 0 ? 0.0 : static_cast<double>(wrong) / static_cast<double>(total); }
};

ErrorCount misclassification(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y);

}  // namespace colourrisk

#include "colourrisk/ordreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "colourrisk/errors.hpp"
#include "colourrisk/simd/kernels.hpp"

namespace colourrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sigmoid(double a) {
  if (a >= 0.0) return 1.0 / (1.0 + std::exp(-a));
  const double e = std::exp(a);
  return e / (1.0 + e);
}

double log_sigmoid(double a) { return a >= 0.0 ? -std::log1p(std::exp(-a)) : a - std::log1p(std::exp(a)); }

struct Evaluation {
  double nll = 0.0;
  std::vector<double> gradient;
  Matrix hessian;
  std::size_t bad_row = 0;
};

// Linear predictor u = S beta.
std::vector<double> linear_predictor(const OrdinalModel& model, const Matrix& scores) {
  std::vector<double> u(scores.rows(), 0.0);
  const auto& k = simd::kernels();
  for (std::size_t j = 0; j < model.beta.size(); ++j)
    k.axpy(model.beta[j], scores.col(j).data(), u.data(), scores.rows());
  return u;
}

// NLL only; +inf when the model is invalid or a term is not finite.
double nll_value(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y,
                 std::size_t* bad_row = nullptr) {
  const double gap = model.eta2 - model.eta1;
  if (!(gap > 0.0) || !std::isfinite(model.eta1) || !std::isfinite(model.eta2)) return kInf;
  const double log_gap_term = std::log(-std::expm1(-gap));
  const auto u = linear_predictor(model, scores);
  double nll = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a1 = model.eta1 + u[i];
    const double a2 = model.eta2 + u[i];
    double lp = 0.0;
    switch (y[i]) {
      case RiskLevel::low:
        lp = log_sigmoid(a1);
        break;
      case RiskLevel::medium:
        lp = log_sigmoid(a2) + log_sigmoid(-a1) + log_gap_term;
        break;
      case RiskLevel::high:
        lp = log_sigmoid(-a2);
        break;
    }
    if (!std::isfinite(lp)) {
      if (bad_row) *bad_row = i;
      return kInf;
    }
    nll -= lp;
  }
  return nll;
}

Evaluation evaluate(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y) {
  const std::size_t n = y.size();
  const std::size_t r = model.beta.size();
  const std::size_t p = r + 2;
  Evaluation ev;
  ev.gradient.assign(p, 0.0);
  ev.hessian = Matrix(p, p);
  ev.nll = nll_value(model, scores, y, &ev.bad_row);
  if (!std::isfinite(ev.nll)) return ev;

  const double gap = model.eta2 - model.eta1;  // exp(delta)
  const double gap_factor = -std::expm1(-gap);
  const auto u = linear_predictor(model, scores);

  // Per-row derivatives of the log-likelihood w.r.t. (a1, a2), folded into
  // the weights of the chain rule: g = g1 + g2, A = h11 + 2 h12 + h22,
  // B = h12 + h22; the delta-delta entry needs g2 and h22 separately.
  std::vector<double> wg(n), wa(n), wb(n);
  double sum_g2 = 0.0, sum_h22 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a1 = model.eta1 + u[i];
    const double a2 = model.eta2 + u[i];
    double g1 = 0.0, g2 = 0.0, h11 = 0.0, h12 = 0.0, h22 = 0.0;
    switch (y[i]) {
      case RiskLevel::low: {
        const double s1 = sigmoid(a1), c1 = sigmoid(-a1);
        g1 = c1;
        h11 = -s1 * c1;
        break;
      }
      case RiskLevel::high: {
        const double s2 = sigmoid(a2), c2 = sigmoid(-a2);
        g2 = -s2;
        h22 = -s2 * c2;
        break;
      }
      case RiskLevel::medium: {
        const double s1 = sigmoid(a1), c1 = sigmoid(-a1);
        const double s2 = sigmoid(a2), c2 = sigmoid(-a2);
        const double r1 = s1 / (s2 * gap_factor);
        const double r2 = c2 / (c1 * gap_factor);
        g1 = -r1;
        g2 = r2;
        h11 = -r1 * (c1 - s1) - r1 * r1;
        h22 = r2 * (c2 - s2) - r2 * r2;
        h12 = r1 * r2;
        break;
      }
    }
    wg[i] = g1 + g2;
    wa[i] = h11 + 2.0 * h12 + h22;
    wb[i] = h12 + h22;
    sum_g2 += g2;
    sum_h22 += h22;
    if (!std::isfinite(wg[i]) || !std::isfinite(wa[i]) || !std::isfinite(wb[i])) {
      ev.bad_row = i;
      ev.nll = kInf;
      return ev;
    }
  }

  const auto& k = simd::kernels();
  // Log-likelihood derivatives, negated at the end.
  auto& g = ev.gradient;
  auto& h = ev.hessian;
  g[0] = k.sum(wg.data(), n);
  g[1] = gap * sum_g2;
  const double sum_a = k.sum(wa.data(), n);
  const double sum_b = k.sum(wb.data(), n);
  h(0, 0) = sum_a;
  h(0, 1) = gap * sum_b;
  h(1, 1) = gap * gap * sum_h22 + gap * sum_g2;
  for (std::size_t j = 0; j < r; ++j) {
    const double* s = scores.col(j).data();
    g[2 + j] = k.dot(wg.data(), s, n);
    h(0, 2 + j) = k.dot(wa.data(), s, n);
    h(1, 2 + j) = gap * k.dot(wb.data(), s, n);
    for (std::size_t l = j; l < r; ++l) h(2 + j, 2 + l) = k.weighted_dot(wa.data(), s, scores.col(l).data(), n);
  }
  for (std::size_t a = 0; a < p; ++a) {
    g[a] = -g[a];
    for (std::size_t b = a; b < p; ++b) {
      h(a, b) = -h(a, b);
      h(b, a) = h(a, b);
    }
  }
  return ev;
}

// Solves (H + mu I) d = -g by Cholesky, raising mu until H + mu I is
// positive definite. Falls back to steepest descent.
std::vector<double> newton_direction(const Matrix& h, const std::vector<double>& g) {
  const std::size_t p = g.size();
  double scale = 0.0;
  for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, std::fabs(h(i, i)));
  double mu = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Matrix l(p, p);
    bool ok = true;
    for (std::size_t j = 0; j < p && ok; ++j) {
      double d = h(j, j) + mu;
      for (std::size_t q = 0; q < j; ++q) d -= l(j, q) * l(j, q);
      if (!(d > 0.0) || !std::isfinite(d)) {
        ok = false;
        break;
      }
      l(j, j) = std::sqrt(d);
      for (std::size_t i = j + 1; i < p; ++i) {
        double s = h(i, j);
        for (std::size_t q = 0; q < j; ++q) s -= l(i, q) * l(j, q);
        l(i, j) = s / l(j, j);
      }
    }
    if (ok) {
      std::vector<double> z(p), d(p);
      for (std::size_t i = 0; i < p; ++i) {
        double s = -g[i];
        for (std::size_t q = 0; q < i; ++q) s -= l(i, q) * z[q];
        z[i] = s / l(i, i);
      }
      for (std::size_t i = p; i-- > 0;) {
        double s = z[i];
        for (std::size_t q = i + 1; q < p; ++q) s -= l(q, i) * d[q];
        d[i] = s / l(i, i);
      }
      return d;
    }
    mu = mu == 0.0 ? std::max(1e-10, 1e-8 * scale) : mu * 10.0;
  }
  std::vector<double> d(p);
  for (std::size_t i = 0; i < p; ++i) d[i] = -g[i];
  return d;
}

std::vector<double> natural(const OrdinalModel& m) {
  std::vector<double> v{m.eta1, m.eta2};
  v.insert(v.end(), m.beta.begin(), m.beta.end());
  return v;
}

OrdinalModel from_natural(const std::vector<double>& v) {
  return {v[0], v[1], std::vector<double>(v.begin() + 2, v.end())};
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

// Step in (eta_1, eta_2, beta) coordinates corresponding to a step d in
// (eta_1, delta, beta) to first order.
std::vector<double> natural_step(const OrdinalModel& m, const std::vector<double>& d) {
  std::vector<double> out(d);
  out[1] = d[0] + (m.eta2 - m.eta1) * d[1];
  return out;
}

// Follows a ray while the NLL does not increase; succeeds once a parameter
// passes the separation bound. The NLL of separable data decreases toward
// its infimum without attaining it, so this walk escapes to the bound;
// data with a finite optimum turns the NLL upward and stops the walk.
std::optional<OrdinalModel> escape_along(const Matrix& scores, std::span<const RiskLevel> y,
                                         const OrdinalModel& start, double start_nll,
                                         const std::vector<double>& direction, bool scaling,
                                         double bound) {
  std::vector<double> q = natural(start);
  double f = start_nll;
  double t = 1.0;
  for (int step = 0; step < 64; ++step) {
    std::vector<double> cand(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) cand[i] = scaling ? 2.0 * q[i] : q[i] + t * direction[i];
    const double fc = nll_value(from_natural(cand), scores, y);
    if (!(fc <= f)) return std::nullopt;
    q = std::move(cand);
    f = fc;
    t *= 2.0;
    if (max_abs(q) > bound) return from_natural(q);
  }
  return std::nullopt;
}

std::optional<OrdinalModel> probe_separation(const Matrix& scores, std::span<const RiskLevel> y,
                                             const OrdinalModel& model, double nll,
                                             const std::vector<double>& newton_step, double bound) {
  // Complete separation: scaling every parameter up keeps improving the fit.
  if (max_abs(natural(model)) > 0.0) {
    if (auto hit = escape_along(scores, y, model, nll, {}, true, bound)) return hit;
  }
  // Partial separation: only the dominant components of the Newton step drift.
  std::vector<double> drift = natural_step(model, newton_step);
  const double largest = max_abs(drift);
  if (!(largest > 0.0)) return std::nullopt;
  for (double& x : drift)
    if (std::fabs(x) < 0.1 * largest) x = 0.0;
  return escape_along(scores, y, model, nll, drift, false, bound);
}

void validate_inputs(const Matrix& scores, std::span<const RiskLevel> y, std::size_t r) {
  if (scores.rows() != y.size())
    throw InputError("ordinal fit: " + std::to_string(scores.rows()) + " score rows but " +
                     std::to_string(y.size()) + " labels");
  if (scores.cols() != r) throw InputError("ordinal fit: slope count does not match score columns");
  for (double v : scores.data())
    if (!std::isfinite(v)) throw InputError("ordinal fit: non-finite score");
}

}  // namespace

std::array<double, 3> class_probabilities(const OrdinalModel& model, std::span<const double> scores) {
  double u = 0.0;
  for (std::size_t j = 0; j < model.beta.size(); ++j) u += model.beta[j] * scores[j];
  const double a1 = model.eta1 + u;
  const double a2 = model.eta2 + u;
  const double low = sigmoid(a1);
  const double high = sigmoid(-a2);
  const double mid = sigmoid(a2) * sigmoid(-a1) * -std::expm1(-(model.eta2 - model.eta1));
  return {low, mid, high};
}

double negative_log_likelihood(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y) {
  validate_inputs(scores, y, model.beta.size());
  std::size_t bad = 0;
  const double v = nll_value(model, scores, y, &bad);
  if (!std::isfinite(v)) throw NumericalError("ordinal NLL is not finite at row " + std::to_string(bad));
  return v;
}

NllDerivatives nll_grad_hess(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y) {
  validate_inputs(scores, y, model.beta.size());
  if (y.empty()) throw InputError("ordinal NLL: no observations");
  Evaluation ev = evaluate(model, scores, y);
  if (!std::isfinite(ev.nll))
    throw NumericalError("ordinal NLL derivatives are not finite at row " + std::to_string(ev.bad_row));
  return {ev.nll, std::move(ev.gradient), std::move(ev.hessian)};
}

std::vector<double> to_parameters(const OrdinalModel& model) {
  std::vector<double> theta{model.eta1, std::log(model.eta2 - model.eta1)};
  theta.insert(theta.end(), model.beta.begin(), model.beta.end());
  return theta;
}

OrdinalModel from_parameters(std::span<const double> theta) {
  OrdinalModel m;
  m.eta1 = theta[0];
  m.eta2 = theta[0] + std::exp(theta[1]);
  m.beta.assign(theta.begin() + 2, theta.end());
  return m;
}

FitResult fit_ordinal(const Matrix& scores, std::span<const RiskLevel> y, const FitOptions& options) {
  const std::size_t n = y.size();
  const std::size_t r = scores.cols();
  validate_inputs(scores, y, r);
  if (n < 3) throw InputError("ordinal fit: need at least 3 observations");
  if (r >= n) throw InputError("ordinal fit: " + std::to_string(r) + " predictors for " + std::to_string(n) +
                               " observations is unidentifiable");
  std::array<std::size_t, 3> counts{};
  for (RiskLevel level : y) ++counts[static_cast<std::size_t>(level_index(level))];
  if (std::ranges::count_if(counts, [](std::size_t c) { return c > 0; }) < 2)
    throw InputError("ordinal fit: fewer than two risk levels present");

  // Start: beta = 0, thresholds at the cumulative logits of the class
  // frequencies (half a count added per class so empty classes stay finite).
  const double total = static_cast<double>(n) + 1.5;
  const double q1 = (static_cast<double>(counts[0]) + 0.5) / total;
  const double q2 = (static_cast<double>(counts[0] + counts[1]) + 1.0) / total;
  OrdinalModel current;
  current.eta1 = std::log(q1 / (1.0 - q1));
  current.eta2 = std::log(q2 / (1.0 - q2));
  current.beta.assign(r, 0.0);

  FitResult result;
  Evaluation ev = evaluate(current, scores, y);
  if (!std::isfinite(ev.nll)) throw NumericalError("ordinal fit: start point has non-finite NLL");
  if (options.record_trace) result.nll_trace.push_back(ev.nll);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    const double gnorm = max_abs(ev.gradient);
    const std::vector<double> d = newton_direction(ev.hessian, ev.gradient);

    if (gnorm <= options.tol) {
      const double step = max_abs(natural_step(current, d));
      if (step <= 1e-3 * std::max(1.0, max_abs(natural(current)))) {
        result.converged = true;
        break;
      }
      // Vanishing gradient with a long Newton step: the optimum is at infinity.
      if (auto escaped = probe_separation(scores, y, current, ev.nll, d, options.separation_bound)) {
        current = std::move(*escaped);
        result.separation = true;
        break;
      }
    }

    const std::vector<double> theta = to_parameters(current);
    std::optional<OrdinalModel> accepted;
    double predicted = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) predicted -= 0.5 * d[i] * ev.gradient[i];
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ev.nll));
    double t = 1.0;
    for (int halving = 0; halving <= options.max_halvings; ++halving, t *= 0.5) {
      std::vector<double> cand(theta.size());
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = theta[i] + t * d[i];
      OrdinalModel trial = from_parameters(cand);
      const double f = nll_value(trial, scores, y);
      if (f < ev.nll) {
        accepted = std::move(trial);
        break;
      }
      // Next to the optimum the predicted decrease is below the resolution
      // of the NLL itself; take the full step if it shrinks the gradient.
      if (halving == 0 && predicted <= slack && f <= ev.nll + slack) {
        const Evaluation te = evaluate(trial, scores, y);
        if (std::isfinite(te.nll) && max_abs(te.gradient) < gnorm) {
          accepted = std::move(trial);
          break;
        }
      }
    }
    if (!accepted) {
      // Line search stalled; separated data stalls with the NLL still falling.
      if (auto escaped = probe_separation(scores, y, current, ev.nll, d, options.separation_bound)) {
        current = std::move(*escaped);
        result.separation = true;
      }
      break;
    }
    current = std::move(*accepted);
    ++result.iterations;
    ev = evaluate(current, scores, y);
    if (!std::isfinite(ev.nll)) throw NumericalError("ordinal fit: NLL became non-finite");
    if (options.record_trace) result.nll_trace.push_back(ev.nll);
    if (max_abs(natural(current)) > options.separation_bound) {
      result.separation = true;
      break;
    }
  }

  if (!result.converged && !result.separation && max_abs(natural(current)) > options.separation_bound)
    result.separation = true;

  const Evaluation final_ev = evaluate(current, scores, y);
  result.model = current;
  result.nll = final_ev.nll;
  result.gradient_norm = std::isfinite(final_ev.nll) ? max_abs(final_ev.gradient) : kInf;
  if (result.separation) {
    result.converged = false;
    if (options.record_trace) result.nll_trace.push_back(result.nll);
  }
  return result;
}

RiskLevel predict_from_probabilities(const std::array<double, 3>& p) {
  if (p[0] >= p[1] && p[0] >= p[2]) return RiskLevel::low;
  if (p[1] >= p[2]) return RiskLevel::medium;
  return RiskLevel::high;
}

RiskLevel predict(const OrdinalModel& model, std::span<const double> scores) {
  return predict_from_probabilities(class_probabilities(model, scores));
}

ErrorCount misclassification(const OrdinalModel& model, const Matrix& scores, std::span<const RiskLevel> y) {
  validate_inputs(scores, y, model.beta.size());
  ErrorCount count;
  count.total = y.size();
  std::vector<double> row(scores.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    for (std::size_t j = 0; j < scores.cols(); ++j) row[j] = scores(i, j);
    if (predict(model, row) != y[i]) ++count.wrong;
  }
  return count;
}

}  // namespace colourrisk

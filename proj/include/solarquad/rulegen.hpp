#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <valarray>
#include <vector>

#include "band.hpp"
#include "chebyshev.hpp"
#include "errors.hpp"
#include "gauss_kronrod.hpp"
#include "spectrum.hpp"
#include "tridiagonal.hpp"

namespace solarquad {

inline constexpr std::size_t kMaxOrder = 200;

struct RuleSettings {
  /// Relative tolerance of every moment integral.
  double rel_tol = 1e-11;
  /// Absolute floor for scalar moment integrals; 0 selects a floor at the
  /// rounding level of the integrand magnitude.
  double abs_tol = 0.0;
  std::size_t max_evals = 10'000'000;
};

/// Three-term recurrence of the orthonormal polynomials of a weight on its
/// band, in canonical coordinates:
///   sqrt(beta[k+1]) q_{k+1} = (x - alpha[k]) q_k - sqrt(beta[k]) q_{k-1},
/// with beta[0] = integral of the weight over the band (in nm).
struct RecurrenceCoeffs {
  std::vector<double> alpha;
  std::vector<double> beta;
  Band band;
  /// q_0 .. q_{N-1}, orthonormal under the weight.
  std::vector<ChebSeries> polynomials;
  /// Integrand evaluations spent up to and including step k.
  std::vector<std::size_t> evaluations;

  [[nodiscard]] std::size_t order() const noexcept { return alpha.size(); }

  /// First n steps (the recurrence does not depend on the final order).
  [[nodiscard]] RecurrenceCoeffs truncated(std::size_t n) const {
    if (n == 0 || n > order()) throw DomainError("truncated: order out of range");
    RecurrenceCoeffs r;
    r.alpha.assign(alpha.begin(), alpha.begin() + n);
    r.beta.assign(beta.begin(), beta.begin() + n);
    r.band = band;
    r.polynomials.assign(polynomials.begin(), polynomials.begin() + std::min(n, polynomials.size()));
    r.evaluations.assign(evaluations.begin(), evaluations.begin() + n);
    return r;
  }
};

struct RuleMeta {
  std::string source_id;
  std::string column;
  std::string modifier = "none";
  double rel_tol = 0.0;
  std::size_t evaluations = 0;
};

/// N-point rule on a band. Invariants (checked on construction): nodes
/// strictly increasing and strictly inside the band, weights positive.
class QuadratureRule {
 public:
  QuadratureRule(std::vector<double> nodes, std::vector<double> weights, Band band, RuleMeta meta = {})
      : nodes_(std::move(nodes)), weights_(std::move(weights)), band_(band), meta_(std::move(meta)) {
    band_.validate();
    if (nodes_.empty() || nodes_.size() != weights_.size()) {
      throw StructuralError("rule needs equal, nonzero numbers of nodes and weights");
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!(nodes_[i] > band_.lo && nodes_[i] < band_.hi)) {
        throw StructuralError("node " + std::to_string(nodes_[i]) + " not strictly inside band");
      }
      if (i > 0 && !(nodes_[i - 1] < nodes_[i])) throw StructuralError("nodes not strictly increasing");
      if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) throw StructuralError("non-positive weight");
    }
  }

  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
  [[nodiscard]] const Band& band() const noexcept { return band_; }
  [[nodiscard]] std::size_t order() const noexcept { return nodes_.size(); }
  [[nodiscard]] const RuleMeta& meta() const noexcept { return meta_; }
  [[nodiscard]] double total_weight() const { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  Band band_;
  RuleMeta meta_;
};

namespace rule_detail {

/// Trapezoid sum of |g| over the model's knots: a cheap magnitude used to set
/// the rounding-level absolute floor of an integral.
template <typename G>
double knot_magnitude(const WeightModel& model, G&& g) {
  const auto& k = model.knots();
  double sum = 0.0;
  double prev = std::abs(g(k[0]));
  for (std::size_t i = 1; i < k.size(); ++i) {
    const double cur = std::abs(g(k[i]));
    sum += 0.5 * (prev + cur) * (k[i] - k[i - 1]);
    prev = cur;
  }
  return sum;
}

inline double rounding_floor(double magnitude) {
  return std::max(64.0 * std::numeric_limits<double>::epsilon() * magnitude, std::numeric_limits<double>::min());
}

inline double canonical(const Band& band, double lambda) { return std::clamp(band.to_canonical(lambda), -1.0, 1.0); }

}  // namespace rule_detail

/// S{p}: integral over the band of weight(lambda) * p(x(lambda)) d lambda,
/// with x the affine image of lambda in [-1, 1]. Breakpoints are the model's
/// knots. Returns the full integration result, non-converged or not.
template <typename P>
IntegralResult<double> moment_integral(const WeightModel& model, P&& p_eval, const RuleSettings& settings = {}) {
  const Band& band = model.domain();
  const auto integrand = [&](double lambda) { return model(lambda) * p_eval(rule_detail::canonical(band, lambda)); };
  IntegrationOptions opts{settings.rel_tol, settings.abs_tol, settings.max_evals};
  std::size_t extra = 0;
  if (!(opts.abs_tol > 0.0)) {
    opts.abs_tol = rule_detail::rounding_floor(rule_detail::knot_magnitude(model, integrand));
    extra = model.knots().size();
  }
  auto r = adaptive_integrate(integrand, model.knots(), opts);
  r.evaluations += extra;
  return r;
}

/// As moment_integral, but throws ConstructionError if the integral did not
/// reach its tolerance.
template <typename P>
double moment_functional(const WeightModel& model, P&& p_eval, const RuleSettings& settings = {}) {
  const auto r = moment_integral(model, std::forward<P>(p_eval), settings);
  if (!r.converged) {
    throw ConstructionError("moment integral did not converge (error estimate " + std::to_string(r.error_estimate) +
                                ")",
                            r.error_estimate);
  }
  return r.value;
}

namespace rule_detail {

struct Projection {
  std::vector<double> coeffs;  // <v, q_j>
  double norm_sq = 0.0;        // <v, v>
  std::size_t evaluations = 0;
};

/// Rounding level of integrals of weight * p * q with <q, q> = 1 and
/// <p, p> <= 1, where p and q are evaluated from Chebyshev coefficients:
/// each evaluation carries an absolute error of order eps * sum |c_k|.
inline double product_rounding_floor(double mass, double p_l1, double q_l1) {
  return 8.0 * std::numeric_limits<double>::epsilon() * std::sqrt(mass) * (p_l1 + q_l1);
}

/// <v, q_j> for every basis polynomial and <v, v>, from one batched integral.
/// The basis is orthonormal and <v, v> <= 1.
inline Projection project(const WeightModel& model, const ChebSeries& v, std::span<const ChebSeries> basis,
                          double mass, const RuleSettings& settings) {
  const Band& band = model.domain();
  const ChebSeriesSet set(basis);
  const std::size_t m = basis.size();
  std::vector<double> qvals(m), scratch(2 * m);
  const auto integrand = [&](double lambda) {
    const double x = canonical(band, lambda);
    const double pv = clenshaw_eval(v, x);
    const double sv = model(lambda) * pv;
    set.eval(x, qvals, scratch);
    std::valarray<double> out(m + 1);
    for (std::size_t j = 0; j < m; ++j) out[j] = sv * qvals[j];
    out[m] = sv * pv;
    return out;
  };
  double basis_l1 = 0.0;
  for (const auto& q : basis) basis_l1 = std::max(basis_l1, coeff_l1(q));
  const IntegrationOptions opts{settings.rel_tol, product_rounding_floor(mass, coeff_l1(v), basis_l1),
                                settings.max_evals};
  auto r = adaptive_integrate(integrand, model.knots(), opts);
  if (!r.converged) {
    throw ConstructionError("projection integral did not converge (error estimate " +
                                std::to_string(r.error_estimate) + ")",
                            r.error_estimate);
  }
  Projection out;
  out.coeffs.assign(std::begin(r.value), std::begin(r.value) + static_cast<std::ptrdiff_t>(m));
  out.norm_sq = r.value[m];
  out.evaluations = r.evaluations;
  return out;
}

}  // namespace rule_detail

/// Stieltjes procedure in Lanczos form on the multiply-by-x operator, with the
/// polynomials held as Chebyshev series and every inner product integrated
/// against the weight. Each new vector is re-orthogonalised against all
/// previous ones; a second pass runs when the first removes more than half of
/// the squared norm.
inline RecurrenceCoeffs stieltjes_lanczos(const WeightModel& model, std::size_t order,
                                          const RuleSettings& settings = {}) {
  if (order < 1 || order > kMaxOrder) {
    throw DomainError("order must be in [1, " + std::to_string(kMaxOrder) + "], got " + std::to_string(order));
  }
  RecurrenceCoeffs rc;
  rc.band = model.domain();

  const auto mass = moment_integral(model, [](double) { return 1.0; }, settings);
  if (!mass.converged) throw ConstructionError("total weight integral did not converge", mass.error_estimate);
  if (!(mass.value > 0.0) || !std::isfinite(mass.value)) throw ConstructionError("weight has no positive mass");
  std::size_t evals = mass.evaluations;

  rc.beta.push_back(mass.value);
  rc.polynomials.push_back(ChebSeries{1.0 / std::sqrt(mass.value)});

  for (std::size_t k = 0; k < order; ++k) {
    const ChebSeries v = mul_by_x(rc.polynomials[k]);
    const std::span<const ChebSeries> basis(rc.polynomials);
    const auto first = rule_detail::project(model, v, basis, mass.value, settings);
    evals += first.evaluations;
    double alpha = first.coeffs[k];

    if (k + 1 == order) {
      rc.alpha.push_back(alpha);
      rc.evaluations.push_back(evals);
      break;
    }

    ChebSeries w = v;
    double remaining = first.norm_sq;
    for (std::size_t j = 0; j <= k; ++j) {
      w = axpy(-first.coeffs[j], rc.polynomials[j], w);
      remaining -= first.coeffs[j] * first.coeffs[j];
    }
    if (remaining < 0.5 * first.norm_sq) {
      const auto second = rule_detail::project(model, w, basis, mass.value, settings);
      evals += second.evaluations;
      for (std::size_t j = 0; j <= k; ++j) w = axpy(-second.coeffs[j], rc.polynomials[j], w);
      alpha += second.coeffs[k];
    }

    RuleSettings norm_settings = settings;
    const double w_l1 = coeff_l1(w);
    norm_settings.abs_tol = std::max(1e-3 * settings.rel_tol * first.norm_sq,
                                     rule_detail::product_rounding_floor(mass.value, w_l1, w_l1));
    const auto norm = moment_integral(
        model,
        [&w](double x) {
          const double y = clenshaw_eval(w, x);
          return y * y;
        },
        norm_settings);
    evals += norm.evaluations;
    if (!norm.converged) throw ConstructionError("norm integral did not converge", norm.error_estimate);
    const double beta = norm.value;
    if (!(beta > 0.0) || !std::isfinite(beta) || !std::isfinite(alpha)) {
      throw ConstructionError("loss of orthogonality at step " + std::to_string(k + 1) +
                              " (beta = " + std::to_string(beta) + ")");
    }

    rc.alpha.push_back(alpha);
    rc.evaluations.push_back(evals);
    rc.beta.push_back(beta);
    rc.polynomials.push_back(scaled(1.0 / std::sqrt(beta), w));
  }

  for (double a : rc.alpha) {
    if (!(a > -1.0 && a < 1.0)) throw ConstructionError("recurrence alpha outside (-1, 1): " + std::to_string(a));
  }
  return rc;
}

/// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix mapped to the
/// band, weights are beta_0 times the squared first eigenvector components.
inline QuadratureRule golub_welsch(const RecurrenceCoeffs& coeffs, const Band& band, RuleMeta meta = {}) {
  const std::size_t n = coeffs.order();
  if (n == 0 || coeffs.beta.size() != n) throw DomainError("golub_welsch: malformed recurrence");
  for (double b : coeffs.beta) {
    if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("golub_welsch: beta must be positive");
  }
  std::vector<double> off(n - 1);
  for (std::size_t k = 1; k < n; ++k) off[k - 1] = std::sqrt(coeffs.beta[k]);
  const auto eig = tridiagonal_eigen(coeffs.alpha, off);

  for (std::size_t i = 1; i < n; ++i) {
    if (eig.values[i] - eig.values[i - 1] <= 1e-14) {
      throw NumericError("golub_welsch: coincident eigenvalues near " + std::to_string(eig.values[i]));
    }
  }
  std::vector<double> nodes(n), weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = band.from_canonical(eig.values[i]);
    weights[i] = coeffs.beta[0] * eig.first_components[i] * eig.first_components[i];
  }
  if (meta.evaluations == 0 && !coeffs.evaluations.empty()) meta.evaluations = coeffs.evaluations.back();
  return QuadratureRule(std::move(nodes), std::move(weights), band, std::move(meta));
}

inline RuleMeta make_meta(const WeightModel& model, const RuleSettings& settings, std::size_t evaluations = 0) {
  return {model.source_id(), model.column_label(), describe(model.modifier()), settings.rel_tol, evaluations};
}

inline QuadratureRule build_rule(const WeightModel& model, std::size_t order, const RuleSettings& settings = {}) {
  const auto rc = stieltjes_lanczos(model, order, settings);
  return golub_welsch(rc, model.domain(), make_meta(model, settings, rc.evaluations.back()));
}

/// Sum of w_i f(lambda_i). Throws EvaluationError on a non-finite f value.
template <typename F>
double apply_rule(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.order(); ++i) {
    const double y = f(rule.nodes()[i]);
    if (!std::isfinite(y)) throw EvaluationError(rule.nodes()[i], "non-finite function value at node");
    sum += rule.weights()[i] * y;
  }
  return sum;
}

}  // namespace solarquad

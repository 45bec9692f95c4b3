#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "gauss_kronrod.hpp"
#include "rulegen.hpp"
#include "spectrum.hpp"
#include "spline.hpp"

namespace solarquad {

/// A test function of wavelength: a sinusoid sin(2 pi lambda / period), a
/// polynomial in lambda (nm), or a spline through tabulated values.
class TestIntegrand {
 public:
  enum class Kind { sinusoid, polynomial, tabulated };

  static TestIntegrand sinusoid(double period_nm) {
    if (!(period_nm > 0.0) || !std::isfinite(period_nm)) throw DomainError("sinusoid period must be positive");
    TestIntegrand t(Kind::sinusoid);
    t.period_ = period_nm;
    char buf[64];
    std::snprintf(buf, sizeof buf, "sin:%.17g", period_nm);
    t.id_ = buf;
    return t;
  }
  /// sin(2 pi lambda / 500)
  static TestIntegrand f1() { return sinusoid(500.0); }
  /// sin(2 pi lambda / 50)
  static TestIntegrand f2() { return sinusoid(50.0); }

  /// c0 + c1 lambda + c2 lambda^2 + ...
  static TestIntegrand polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) throw DomainError("polynomial needs at least one coefficient");
    TestIntegrand t(Kind::polynomial);
    t.id_ = "poly:";
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%s%.17g", i ? "," : "", coeffs[i]);
      t.id_ += buf;
    }
    t.coeffs_ = std::move(coeffs);
    return t;
  }

  /// Natural cubic spline through (lambda, value) points; evaluating outside
  /// the table throws DomainError.
  static TestIntegrand tabulated(std::span<const double> lambda, std::span<const double> values, std::string tag) {
    TestIntegrand t(Kind::tabulated);
    t.table_ = std::make_shared<const CubicSpline>(lambda, values);
    t.id_ = "table:" + tag;
    return t;
  }

  [[nodiscard]] double operator()(double lambda) const {
    switch (kind_) {
      case Kind::sinusoid: return std::sin(2.0 * std::numbers::pi * lambda / period_);
      case Kind::polynomial: {
        double y = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) y = y * lambda + *it;
        return y;
      }
      case Kind::tabulated: return (*table_)(lambda);
    }
    return 0.0;
  }

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& id() const noexcept { return id_; }
  [[nodiscard]] double period() const noexcept { return period_; }

 private:
  explicit TestIntegrand(Kind k) : kind_(k) {}

  Kind kind_;
  double period_ = 0.0;
  std::vector<double> coeffs_;
  std::shared_ptr<const CubicSpline> table_;
  std::string id_;
};

inline constexpr double kOracleRelTol = 1e-13;

/// Brute-force reference: adaptive Gauss-Kronrod of weight * f over the
/// model's knots. The absolute floor sits at the rounding level of
/// integral |weight * f|. Non-convergence is reported in the result.
template <typename F>
IntegralResult<double> oracle_integral(const WeightModel& model, F&& f, double rel_tol = kOracleRelTol,
                                       std::size_t max_evals = 10'000'000) {
  const auto integrand = [&](double lambda) { return model(lambda) * f(lambda); };
  const IntegrationOptions opts{rel_tol, rule_detail::rounding_floor(rule_detail::knot_magnitude(model, integrand)),
                                max_evals};
  auto r = adaptive_integrate(integrand, model.knots(), opts);
  r.evaluations += model.knots().size();
  return r;
}

/// Oracle values keyed by (model fingerprint, integrand id, rel_tol). Safe for
/// concurrent lookup and insertion.
class OracleCache {
 public:
  IntegralResult<double> get(const WeightModel& model, const TestIntegrand& f, double rel_tol = kOracleRelTol) {
    const Key key{model.fingerprint(), f.id(), rel_tol};
    {
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    }
    auto r = oracle_integral(model, f, rel_tol);
    std::lock_guard lock(mutex_);
    return entries_.emplace(key, r).first->second;
  }

  [[nodiscard]] std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  using Key = std::tuple<std::uint64_t, std::string, double>;
  mutable std::mutex mutex_;
  std::map<Key, IntegralResult<double>> entries_;
};

struct ConvergenceRow {
  std::size_t order = 0;
  double quad_value = 0.0;
  double oracle_value = 0.0;
  /// |quad - oracle| / |oracle|, or the absolute error when the oracle is 0.
  double rel_error = 0.0;
  bool absolute = false;
  /// Weight evaluations spent constructing the rule.
  std::size_t evaluations = 0;
};

/// Builds the rule of every requested order, applies it to f and compares
/// with one cached oracle value. Rows come back ordered by N. The recurrence
/// is computed once for the largest order; smaller rules use its prefix, which
/// is exactly what an independent construction would produce. Runs on the
/// calling thread.
inline std::vector<ConvergenceRow> convergence_study(const WeightModel& model, const TestIntegrand& f,
                                                     std::vector<std::size_t> orders, const RuleSettings& settings = {},
                                                     OracleCache* cache = nullptr) {
  if (orders.empty()) throw DomainError("convergence_study: no orders given");
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  if (orders.front() < 1) throw DomainError("convergence_study: orders must be >= 1");

  OracleCache local;
  OracleCache& oracles = cache ? *cache : local;
  const auto oracle = oracles.get(model, f);
  if (!oracle.converged) {
    throw ConstructionError("oracle integral did not converge", oracle.error_estimate);
  }

  const auto rc = stieltjes_lanczos(model, orders.back(), settings);
  std::vector<ConvergenceRow> rows;
  rows.reserve(orders.size());
  for (std::size_t n : orders) {
    const auto prefix = rc.truncated(n);
    const auto rule = golub_welsch(prefix, model.domain(), make_meta(model, settings, prefix.evaluations.back()));
    ConvergenceRow row;
    row.order = n;
    row.quad_value = apply_rule(rule, f);
    row.oracle_value = oracle.value;
    const double diff = std::abs(row.quad_value - row.oracle_value);
    row.absolute = oracle.value == 0.0;
    row.rel_error = row.absolute ? diff : diff / std::abs(oracle.value);
    row.evaluations = prefix.evaluations.back();
    rows.push_back(row);
  }
  return rows;
}

/// (node, f(node)) pairs: what the rule actually sees of f.
template <typename F>
std::vector<std::pair<double, double>> aliasing_probe(const QuadratureRule& rule, F&& f) {
  std::vector<std::pair<double, double>> out;
  out.reserve(rule.order());
  for (double x : rule.nodes()) out.emplace_back(x, f(x));
  return out;
}

}  // namespace solarquad

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "band.hpp"
#include "errors.hpp"

namespace solarquad {

/// p(x) = sum_k c_k T_k(x) on [-1, 1]. Exact-zero trailing coefficients are
/// trimmed on construction; the zero polynomial is stored as {0}.
class ChebSeries {
 public:
  ChebSeries() : coeffs_{0.0} {}
  explicit ChebSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }
  ChebSeries(std::initializer_list<double> coeffs) : coeffs_(coeffs) { trim(); }

  [[nodiscard]] const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }
  [[nodiscard]] double operator[](std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : 0.0; }

  friend bool operator==(const ChebSeries&, const ChebSeries&) = default;

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(0.0);
  }

  std::vector<double> coeffs_;
};

inline constexpr double kCanonicalSlack = 1e-14;

/// Backward Clenshaw recurrence. |x| may exceed 1 by kCanonicalSlack.
inline double clenshaw_eval(const ChebSeries& p, double x) {
  if (!(std::abs(x) <= 1.0 + kCanonicalSlack)) {
    throw DomainError("Chebyshev series evaluated outside [-1, 1] at " + std::to_string(x));
  }
  const auto& c = p.coeffs();
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t k = c.size() - 1; k >= 1; --k) {
    const double b0 = c[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + x * b1 - b2;
}

/// Coefficients of x p(x), using x T_k = (T_{k+1} + T_{|k-1|}) / 2.
inline ChebSeries mul_by_x(const ChebSeries& p) {
  const auto& c = p.coeffs();
  std::vector<double> out(c.size() + 1, 0.0);
  out[1] += c[0];
  for (std::size_t k = 1; k < c.size(); ++k) {
    out[k + 1] += 0.5 * c[k];
    out[k - 1] += 0.5 * c[k];
  }
  return ChebSeries(std::move(out));
}

/// sum |c_k|: bounds sup |p| on [-1, 1] and scales the rounding error of
/// evaluating p from its coefficients.
inline double coeff_l1(const ChebSeries& p) {
  double s = 0.0;
  for (double c : p.coeffs()) s += std::abs(c);
  return s;
}

/// alpha * p + q.
inline ChebSeries axpy(double alpha, const ChebSeries& p, const ChebSeries& q) {
  std::vector<double> out(std::max(p.coeffs().size(), q.coeffs().size()), 0.0);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = alpha * p[k] + q[k];
  return ChebSeries(std::move(out));
}

inline ChebSeries scaled(double alpha, const ChebSeries& p) {
  std::vector<double> out = p.coeffs();
  for (double& v : out) v *= alpha;
  return ChebSeries(std::move(out));
}

/// p evaluated at the canonical image of lambda in band.
inline double to_band(const ChebSeries& p, const Band& band, double lambda) {
  if (!band.contains(lambda)) throw DomainError("wavelength " + std::to_string(lambda) + " outside band");
  return clenshaw_eval(p, std::clamp(band.to_canonical(lambda), -1.0, 1.0));
}

/// Several series evaluated together at one point: the Clenshaw recurrence
/// runs across all series at once, which vectorises.
class ChebSeriesSet {
 public:
  explicit ChebSeriesSet(std::span<const ChebSeries> series) : count_(series.size()) {
    std::size_t deg = 0;
    for (const auto& s : series) deg = std::max(deg, s.degree());
    degree_ = deg;
    coeffs_.assign((deg + 1) * count_, 0.0);
    for (std::size_t j = 0; j < count_; ++j) {
      const auto& c = series[j].coeffs();
      for (std::size_t k = 0; k < c.size(); ++k) coeffs_[k * count_ + j] = c[k];
    }
    // Leading series whose degree is below k contribute nothing at level k.
    first_active_.assign(deg + 1, 0);
    for (std::size_t k = 0; k <= deg; ++k) {
      std::size_t j = 0;
      while (j < count_ && series[j].degree() < k) ++j;
      first_active_[k] = j;
    }
  }

  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] std::size_t degree() const noexcept { return degree_; }

  /// Writes p_j(x) to out[j]. `scratch` must hold 2 * size() doubles.
  void eval(double x, std::span<double> out, std::span<double> scratch) const {
    double* b1 = scratch.data();
    double* b2 = scratch.data() + count_;
    std::fill(scratch.begin(), scratch.begin() + 2 * count_, 0.0);
    const double two_x = 2.0 * x;
    for (std::size_t k = degree_; k >= 1; --k) {
      const double* c = coeffs_.data() + k * count_;
      for (std::size_t j = first_active_[k]; j < count_; ++j) b2[j] = c[j] + two_x * b1[j] - b2[j];
      std::swap(b1, b2);
    }
    for (std::size_t j = 0; j < count_; ++j) out[j] = coeffs_[j] + x * b1[j] - b2[j];
  }

 private:
  std::size_t count_ = 0;
  std::size_t degree_ = 0;
  std::vector<double> coeffs_;  // degree-major: coeffs_[k * count_ + j]
  std::vector<std::size_t> first_active_;
};

}  // namespace solarquad

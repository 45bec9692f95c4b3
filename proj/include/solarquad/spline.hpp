#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"

namespace solarquad {

enum class SplineBoundary { natural, not_a_knot };

/// Interpolating cubic spline on strictly increasing knots.
///
/// Each interval [x_i, x_{i+1}] stores a cubic in the local offset t = x - x_i:
///   y_i + b_i t + c_i t^2 + d_i t^3.
/// Evaluation outside [front knot, back knot] throws; the spline never
/// extrapolates.
class CubicSpline {
 public:
  using Piece = std::array<double, 4>;  // a, b, c, d

  CubicSpline() = default;

  CubicSpline(std::span<const double> x, std::span<const double> y,
              SplineBoundary boundary = SplineBoundary::natural)
      : knots_(x.begin(), x.end()), boundary_(boundary) {
    const std::size_t n = x.size();
    if (n != y.size()) throw StructuralError("spline: knot and value counts differ");
    if (n < 4) throw StructuralError("spline: at least 4 points required");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (!(x[i] < x[i + 1])) throw StructuralError("spline: knots not strictly increasing");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw StructuralError("spline: non-finite data");
    }

    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x[i + 1] - x[i];

    // Tridiagonal system for the interior second derivatives M_1 .. M_{n-2}.
    const std::size_t m = n - 2;
    std::vector<double> sub(m), diag(m), sup(m), rhs(m);
    for (std::size_t r = 0; r < m; ++r) {
      const std::size_t i = r + 1;
      sub[r] = h[i - 1];
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      sup[r] = h[i];
      rhs[r] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    if (boundary_ == SplineBoundary::not_a_knot) {
      // Eliminate M_0 and M_{n-1} using continuity of the third derivative at
      // the second and second-to-last knots.
      const double h0 = h[0], h1 = h[1];
      diag[0] += h0 * (h0 + h1) / h1;
      sup[0] -= h0 * h0 / h1;
      const double hl = h[n - 2], hp = h[n - 3];
      diag[m - 1] += hl * (hp + hl) / hp;
      sub[m - 1] -= hl * hl / hp;
    }

    // Thomas algorithm.
    for (std::size_t r = 1; r < m; ++r) {
      const double f = sub[r] / diag[r - 1];
      diag[r] -= f * sup[r - 1];
      rhs[r] -= f * rhs[r - 1];
    }
    std::vector<double> M(n, 0.0);
    M[m] = rhs[m - 1] / diag[m - 1];
    for (std::size_t r = m - 1; r-- > 0;) M[r + 1] = (rhs[r] - sup[r] * M[r + 2]) / diag[r];

    if (boundary_ == SplineBoundary::not_a_knot) {
      M[0] = ((h[0] + h[1]) * M[1] - h[0] * M[2]) / h[1];
      M[n - 1] = ((h[n - 3] + h[n - 2]) * M[n - 2] - h[n - 2] * M[n - 3]) / h[n - 3];
    }

    pieces_.resize(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double hi = h[i];
      pieces_[i] = {y[i], (y[i + 1] - y[i]) / hi - hi * (2.0 * M[i] + M[i + 1]) / 6.0, 0.5 * M[i],
                    (M[i + 1] - M[i]) / (6.0 * hi)};
    }
    last_value_ = y[n - 1];
  }

  [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
  [[nodiscard]] const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  [[nodiscard]] SplineBoundary boundary() const noexcept { return boundary_; }
  [[nodiscard]] double front() const { return knots_.front(); }
  [[nodiscard]] double back() const { return knots_.back(); }
  [[nodiscard]] bool empty() const noexcept { return pieces_.empty(); }

  /// Index of the piece that covers x. Knot x_i maps to piece i (the last knot
  /// maps to the last piece).
  [[nodiscard]] std::size_t interval(double x) const {
    if (!(x >= knots_.front() && x <= knots_.back())) {
      throw DomainError("spline evaluated outside [" + std::to_string(knots_.front()) + ", " +
                        std::to_string(knots_.back()) + "] at " + std::to_string(x));
    }
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto idx = static_cast<std::size_t>(it - knots_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, pieces_.size() - 1);
  }

  [[nodiscard]] double operator()(double x) const {
    if (x == knots_.back()) return last_value_;
    const std::size_t i = interval(x);
    return eval_piece(i, x, 0);
  }

  /// Value (order 0) or derivative (order 1..3) of piece i at x; x is not
  /// range-checked against the piece, so one-sided limits at knots are easy.
  [[nodiscard]] double eval_piece(std::size_t i, double x, int order = 0) const {
    const Piece& p = pieces_[i];
    const double t = x - knots_[i];
    switch (order) {
      case 0: return p[0] + t * (p[1] + t * (p[2] + t * p[3]));
      case 1: return p[1] + t * (2.0 * p[2] + 3.0 * t * p[3]);
      case 2: return 2.0 * p[2] + 6.0 * t * p[3];
      case 3: return 6.0 * p[3];
      default: return 0.0;
    }
  }

  [[nodiscard]] double derivative(double x, int order) const { return eval_piece(interval(x), x, order); }

 private:
  std::vector<double> knots_;
  std::vector<Piece> pieces_;
  double last_value_ = 0.0;
  SplineBoundary boundary_ = SplineBoundary::natural;
};

}  // namespace solarquad

#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace solarquad {

/// A closed wavelength interval [lo, hi] in nm, with the affine map onto the
/// canonical interval [-1, 1] used by the Chebyshev machinery.
struct Band {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] constexpr double width() const noexcept { return hi - lo; }
  [[nodiscard]] constexpr double midpoint() const noexcept { return 0.5 * (lo + hi); }
  [[nodiscard]] constexpr bool contains(double x) const noexcept { return x >= lo && x <= hi; }

  [[nodiscard]] constexpr double to_canonical(double lambda) const noexcept {
    return (2.0 * lambda - (lo + hi)) / (hi - lo);
  }
  [[nodiscard]] constexpr double from_canonical(double x) const noexcept {
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
  }

  /// Throws DomainError unless lo < hi and both are finite.
  void validate() const {
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
      throw DomainError("invalid band (" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
  }

  friend constexpr bool operator==(const Band&, const Band&) = default;
};

}  // namespace solarquad

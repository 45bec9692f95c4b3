#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"

namespace solarquad {

/// Eigenvalues of a symmetric tridiagonal matrix together with the first
/// component of each normalised eigenvector, sorted by ascending eigenvalue.
struct TridiagonalEigen {
  std::vector<double> values;
  std::vector<double> first_components;
};

/// Implicit-shift QL (EISPACK tql2 lineage). Only the first row of the
/// accumulated rotation product is tracked, which is all Golub-Welsch needs.
/// Throws NumericError after `max_iter` sweeps on one eigenvalue.
inline TridiagonalEigen tridiagonal_eigen(std::span<const double> diag, std::span<const double> offdiag,
                                          int max_iter = 50) {
  const int n = static_cast<int>(diag.size());
  if (n == 0) return {};
  if (offdiag.size() + 1 != diag.size()) throw NumericError("tridiagonal_eigen: off-diagonal length mismatch");

  std::vector<double> d(diag.begin(), diag.end());
  std::vector<double> e(n, 0.0);
  std::copy(offdiag.begin(), offdiag.end(), e.begin());
  std::vector<double> z(n, 0.0);
  z[0] = 1.0;

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) + dd == dd) break;
      }
      if (m != l) {
        if (iter++ == max_iter) throw NumericError("tridiagonal_eigen: no convergence");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          f = z[i + 1];
          z[i + 1] = s * z[i] + c * f;
          z[i] = c * z[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&d](int a, int b) { return d[a] < d[b]; });
  TridiagonalEigen out;
  out.values.reserve(n);
  out.first_components.reserve(n);
  for (int k : order) {
    out.values.push_back(d[k]);
    out.first_components.push_back(z[k]);
  }
  return out;
}

}  // namespace solarquad

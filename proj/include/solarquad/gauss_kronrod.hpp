#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <type_traits>
#include <utility>
#include <valarray>
#include <vector>

#include "errors.hpp"

namespace solarquad {

/// Embedded 7-point Gauss / 15-point Kronrod pair on (-1, 1).
struct GKPair {
  std::array<double, 7> gauss_nodes;
  std::array<double, 15> kronrod_nodes;
  std::array<double, 7> gauss_weights;
  std::array<double, 15> kronrod_weights;
};

namespace gk_detail {

// Nonnegative abscissae, largest first; index 7 is the centre. Odd indices are
// the Gauss nodes.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace gk_detail

/// The full (both-signs) 7-15 tables, nodes ascending.
inline constexpr GKPair gk7_15() {
  using namespace gk_detail;
  GKPair p{};
  for (std::size_t j = 0; j < 7; ++j) {
    p.kronrod_nodes[j] = -xgk[j];
    p.kronrod_weights[j] = wgk[j];
    p.kronrod_nodes[14 - j] = xgk[j];
    p.kronrod_weights[14 - j] = wgk[j];
  }
  p.kronrod_nodes[7] = 0.0;
  p.kronrod_weights[7] = wgk[7];
  for (std::size_t j = 0; j < 3; ++j) {
    p.gauss_nodes[j] = -xgk[2 * j + 1];
    p.gauss_weights[j] = wg[j];
    p.gauss_nodes[6 - j] = xgk[2 * j + 1];
    p.gauss_weights[6 - j] = wg[j];
  }
  p.gauss_nodes[3] = 0.0;
  p.gauss_weights[3] = wg[3];
  return p;
}

// ---------------------------------------------------------------------------
// Integrand values: double, or std::valarray<double> for batched integrals
// that share abscissae.

namespace gk_detail {

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(const std::valarray<double>& v) { return v.size() ? std::abs(v).max() : 0.0; }

inline bool all_finite(double v) { return std::isfinite(v); }
inline bool all_finite(const std::valarray<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

template <typename F>
auto checked_call(F& f, double x) {
  auto v = f(x);
  if (!all_finite(v)) throw EvaluationError(x, "non-finite integrand value");
  return v;
}

}  // namespace gk_detail

template <typename V>
struct GKEstimate {
  V estimate;
  double error_bound;
};

/// 15-point Kronrod estimate over [lo, hi] with |K15 - G7| as the error bound.
/// Always makes exactly 15 integrand calls.
template <typename F>
auto gk15(F&& f, double lo, double hi) {
  using namespace gk_detail;
  const double centre = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  auto fc = checked_call(f, centre);
  using V = std::decay_t<decltype(fc)>;
  V resk = fc * wgk[7];
  V resg = fc * wg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    V pair = checked_call(f, centre - dx);
    pair += checked_call(f, centre + dx);
    resk += pair * wgk[j];
    if (j % 2 == 1) resg += pair * wg[j / 2];
  }
  V diff = resk - resg;
  const double err = magnitude(diff) * std::abs(half);
  resk *= half;
  return GKEstimate<V>{std::move(resk), err};
}

struct IntegrationOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-300;
  std::size_t max_evals = 10'000'000;
};

template <typename V>
struct IntegralResult {
  V value;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

template <typename V>
struct Segment {
  double lo;
  double hi;
  V estimate;
  double error_bound;
};

/// Globally adaptive Gauss-Kronrod integration.
///
/// The initial segments are exactly the breakpoint intervals. The segment with
/// the largest error bound (ties: lower left endpoint) is bisected until the
/// summed error is at most max(abs_tol, rel_tol * |sum of estimates|) or the
/// evaluation budget runs out, in which case `converged` is false. Segments
/// narrower than 1e-12 of the full width are never split. For valarray-valued
/// integrands, |.| is the max-norm.
template <typename F>
auto adaptive_integrate(F&& f, std::span<const double> breakpoints, const IntegrationOptions& opts = {}) {
  using V = std::decay_t<decltype(gk15(f, 0.0, 1.0).estimate)>;
  if (breakpoints.size() < 2) throw DomainError("adaptive_integrate: need at least two breakpoints");
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(std::isfinite(breakpoints[i]) && std::isfinite(breakpoints[i + 1]) && breakpoints[i] < breakpoints[i + 1])) {
      throw DomainError("adaptive_integrate: breakpoints must be finite and strictly increasing");
    }
  }
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
    throw DomainError("adaptive_integrate: tolerances must be positive");
  }

  const double min_width = 1e-12 * (breakpoints.back() - breakpoints.front());
  std::vector<Segment<V>> segs;
  segs.reserve(2 * breakpoints.size());
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    auto r = gk15(f, breakpoints[i], breakpoints[i + 1]);
    evals += 15;
    segs.push_back({breakpoints[i], breakpoints[i + 1], std::move(r.estimate), r.error_bound});
  }

  const auto sum_all = [&segs] {
    V total = segs.front().estimate;
    double err = segs.front().error_bound;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      total += segs[i].estimate;
      err += segs[i].error_bound;
    }
    return std::pair<V, double>(std::move(total), err);
  };

  const auto worse = [&segs](std::size_t a, std::size_t b) {
    if (segs[a].error_bound != segs[b].error_bound) return segs[a].error_bound < segs[b].error_bound;
    return segs[a].lo > segs[b].lo;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(worse)> queue(worse);
  for (std::size_t i = 0; i < segs.size(); ++i) queue.push(i);

  auto [total, total_err] = sum_all();
  const auto tolerance = [&opts](const V& t) { return std::max(opts.abs_tol, opts.rel_tol * gk_detail::magnitude(t)); };

  for (;;) {
    if (total_err <= tolerance(total)) {
      // The running sums drift; confirm with an exact re-summation.
      std::tie(total, total_err) = sum_all();
      if (total_err <= tolerance(total)) break;
    }
    if (queue.empty() || evals + 30 > opts.max_evals) break;
    const std::size_t idx = queue.top();
    queue.pop();
    Segment<V>& s = segs[idx];
    if (s.hi - s.lo < min_width) continue;  // accepted as is

    const double mid = 0.5 * (s.lo + s.hi);
    auto left = gk15(f, s.lo, mid);
    auto right = gk15(f, mid, s.hi);
    evals += 30;
    total -= s.estimate;
    total += left.estimate;
    total += right.estimate;
    total_err += left.error_bound + right.error_bound - s.error_bound;

    const double hi = s.hi;
    s = Segment<V>{s.lo, mid, std::move(left.estimate), left.error_bound};
    segs.push_back({mid, hi, std::move(right.estimate), right.error_bound});
    queue.push(idx);
    queue.push(segs.size() - 1);
  }

  std::tie(total, total_err) = sum_all();
  const bool ok = total_err <= tolerance(total);
  return IntegralResult<V>{std::move(total), total_err, evals, ok};
}

}  // namespace solarquad

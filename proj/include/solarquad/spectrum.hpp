#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "band.hpp"
#include "errors.hpp"
#include "spline.hpp"

namespace solarquad {

/// Irradiance columns of an ASTM G173-style file, in file order after the
/// wavelength column: extraterrestrial, global_tilt, direct_circumsolar.
enum class Column { global_tilt, direct_circumsolar, extraterrestrial };

inline std::string to_string(Column c) {
  switch (c) {
    case Column::global_tilt: return "global_tilt";
    case Column::direct_circumsolar: return "direct_circumsolar";
    case Column::extraterrestrial: return "extraterrestrial";
  }
  return "unknown";
}

struct Sample {
  double wavelength;  // nm
  double irradiance;  // W m^-2 nm^-1
};

/// Raw spectrum samples. Invariants (checked on construction): wavelengths
/// strictly increasing, irradiance >= 0, at least 4 samples.
class TabulatedSpectrum {
 public:
  TabulatedSpectrum(std::vector<Sample> samples, std::string source_id, std::string column_label)
      : samples_(std::move(samples)), source_id_(std::move(source_id)), column_label_(std::move(column_label)) {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const Sample& s = samples_[i];
      if (!std::isfinite(s.wavelength) || !std::isfinite(s.irradiance)) {
        throw StructuralError("sample " + std::to_string(i) + " is not finite");
      }
      if (s.irradiance < 0.0) {
        throw StructuralError("negative irradiance at " + std::to_string(s.wavelength) + " nm");
      }
      if (i > 0 && !(samples_[i - 1].wavelength < s.wavelength)) {
        throw StructuralError("wavelengths not strictly increasing at " + std::to_string(s.wavelength) + " nm");
      }
    }
    if (samples_.size() < 4) throw StructuralError("a spectrum needs at least 4 samples");
  }

  [[nodiscard]] const std::vector<Sample>& samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
  [[nodiscard]] const std::string& source_id() const noexcept { return source_id_; }
  [[nodiscard]] const std::string& column_label() const noexcept { return column_label_; }
  [[nodiscard]] Band range() const { return {samples_.front().wavelength, samples_.back().wavelength}; }

 private:
  std::vector<Sample> samples_;
  std::string source_id_;
  std::string column_label_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r' || s.front() == '\n')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\n')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view token, double& out) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  if (token.empty()) return false;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

}  // namespace detail

/// One numeric row of a delimited table, with its 1-based source line.
struct TableRow {
  std::size_t line;
  std::vector<double> values;
};

/// Reads comma- or tab-delimited numeric rows. Lines before the first data row
/// whose first field is not a number are headers and are skipped; blank lines
/// are skipped anywhere. Every data row must have the same field count.
inline std::vector<TableRow> read_numeric_table(std::string_view text) {
  std::vector<TableRow> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    for (;;) {
      const auto sep = line.find_first_of(",\t");
      fields.push_back(line.substr(0, sep));
      if (sep == std::string_view::npos) break;
      line.remove_prefix(sep + 1);
    }

    double first = 0.0;
    if (!detail::parse_double(fields.front(), first)) {
      if (rows.empty()) continue;  // header
      throw ParseError(line_no, "non-numeric field '" + std::string(detail::trim(fields.front())) + "'");
    }
    TableRow row{line_no, {first}};
    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_double(fields[i], v)) {
        throw ParseError(line_no, "non-numeric field '" + std::string(detail::trim(fields[i])) + "'");
      }
      row.values.push_back(v);
    }
    if (!rows.empty() && row.values.size() != rows.front().values.size()) {
      throw ParseError(line_no, "expected " + std::to_string(rows.front().values.size()) + " fields, found " +
                                    std::to_string(row.values.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parses an ASTM G173-style file (wavelength, extraterrestrial, global_tilt,
/// direct_circumsolar) or a two-column (wavelength, irradiance) file. The
/// column selector is ignored for two-column input.
inline TabulatedSpectrum parse_spectrum(std::string_view text, Column column = Column::global_tilt,
                                        std::string source_id = "spectrum") {
  const auto rows = read_numeric_table(text);
  if (rows.empty()) throw ParseError(1, "no numeric data rows");
  const std::size_t width = rows.front().values.size();
  if (width != 2 && width != 4) {
    throw ParseError(rows.front().line, "expected 2 or 4 numeric fields, found " + std::to_string(width));
  }
  std::size_t col = 1;
  std::string label = "irradiance";
  if (width == 4) {
    switch (column) {
      case Column::extraterrestrial: col = 1; break;
      case Column::global_tilt: col = 2; break;
      case Column::direct_circumsolar: col = 3; break;
    }
    label = to_string(column);
  }
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (const auto& r : rows) samples.push_back({r.values[0], r.values[col]});
  return TabulatedSpectrum(std::move(samples), std::move(source_id), std::move(label));
}

// ---------------------------------------------------------------------------
// Weight modifiers

struct NoModifier {};
struct LambdaModifier {};

/// Black-body spectral radiance per unit wavelength, W m^-2 sr^-1 nm^-1.
struct PlanckModifier {
  double temperature;  // K
};

/// User-tabulated nonnegative factor. Interpolated the same way as the
/// spectrum: a spline through the square roots, squared on evaluation.
struct TabulatedModifier {
  std::shared_ptr<const CubicSpline> sqrt_factor;
  std::string tag;
  std::uint64_t data_hash = 0;
};

using Modifier = std::variant<NoModifier, LambdaModifier, PlanckModifier, TabulatedModifier>;

inline double planck_radiance(double lambda_nm, double temperature) {
  constexpr double h = 6.62607015e-34;
  constexpr double c = 299792458.0;
  constexpr double k = 1.380649e-23;
  const double lam = lambda_nm * 1e-9;
  const double lam5 = lam * lam * lam * lam * lam;
  return 2.0 * h * c * c / lam5 / std::expm1(h * c / (lam * k * temperature)) * 1e-9;
}

inline double modifier_value(const Modifier& m, double lambda) {
  struct Visitor {
    double lambda;
    double operator()(const NoModifier&) const { return 1.0; }
    double operator()(const LambdaModifier&) const { return lambda; }
    double operator()(const PlanckModifier& p) const { return planck_radiance(lambda, p.temperature); }
    double operator()(const TabulatedModifier& t) const {
      const double r = (*t.sqrt_factor)(lambda);
      return r * r;
    }
  };
  return std::visit(Visitor{lambda}, m);
}

/// Short text form: "none", "lambda", "planck:<T>", "table:<tag>".
inline std::string describe(const Modifier& m) {
  struct Visitor {
    std::string operator()(const NoModifier&) const { return "none"; }
    std::string operator()(const LambdaModifier&) const { return "lambda"; }
    std::string operator()(const PlanckModifier& p) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "planck:%.17g", p.temperature);
      return buf;
    }
    std::string operator()(const TabulatedModifier& t) const { return "table:" + t.tag; }
  };
  return std::visit(Visitor{}, m);
}

/// Builds a tabulated modifier from (wavelength, factor) samples; factors must
/// be nonnegative.
inline TabulatedModifier make_tabulated_modifier(const TabulatedSpectrum& table,
                                                 SplineBoundary boundary = SplineBoundary::natural) {
  std::vector<double> x, r;
  for (const auto& s : table.samples()) {
    x.push_back(s.wavelength);
    r.push_back(std::sqrt(s.irradiance));
  }
  std::uint64_t hash = 1469598103934665603ULL;
  for (const auto& s : table.samples()) {
    unsigned char bytes[2 * sizeof(double)];
    std::memcpy(bytes, &s.wavelength, sizeof(double));
    std::memcpy(bytes + sizeof(double), &s.irradiance, sizeof(double));
    for (unsigned char b : bytes) hash = (hash ^ b) * 1099511628211ULL;
  }
  return {std::make_shared<const CubicSpline>(x, r, boundary), table.source_id(), hash};
}

/// Parses "none", "lambda" or "planck:<T>". Tabulated modifiers need data and
/// are built with make_tabulated_modifier.
inline Modifier parse_modifier(std::string_view text) {
  if (text == "none") return NoModifier{};
  if (text == "lambda") return LambdaModifier{};
  if (text.starts_with("planck:")) {
    double t = 0.0;
    if (detail::parse_double(text.substr(7), t) && t > 0.0 && std::isfinite(t)) return PlanckModifier{t};
    throw DomainError("planck temperature must be a positive number");
  }
  throw DomainError("unknown modifier '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Weight model

class WeightModel;
inline WeightModel build_weight_model(const TabulatedSpectrum& spectrum, Band band, Modifier modifier = NoModifier{},
                               SplineBoundary boundary = SplineBoundary::natural);

/// Nonnegative weight on a band: S(lambda) ~ C(lambda)^2 * modifier(lambda),
/// where C interpolates sqrt(S) at every sample of the full spectrum.
/// Immutable after construction and safe for concurrent reads.
class WeightModel {
 public:
  [[nodiscard]] double operator()(double lambda) const {
    if (!domain_.contains(lambda)) {
      throw DomainError("weight evaluated outside band at " + std::to_string(lambda) + " nm");
    }
    const double c = sqrt_spline_(lambda);
    return c * c * modifier_value(modifier_, lambda);
  }

  [[nodiscard]] const Band& domain() const noexcept { return domain_; }
  /// Breakpoints for integration: band ends plus every point strictly inside
  /// where the piecewise definition changes.
  [[nodiscard]] const std::vector<double>& knots() const noexcept { return knots_; }
  [[nodiscard]] const CubicSpline& sqrt_spline() const noexcept { return sqrt_spline_; }
  [[nodiscard]] const Modifier& modifier() const noexcept { return modifier_; }
  [[nodiscard]] const std::string& source_id() const noexcept { return source_id_; }
  [[nodiscard]] const std::string& column_label() const noexcept { return column_label_; }
  /// Hash of sample data, band, and modifier.
  [[nodiscard]] std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  friend WeightModel build_weight_model(const TabulatedSpectrum&, Band, Modifier, SplineBoundary);
  WeightModel() = default;

  CubicSpline sqrt_spline_;
  Band domain_;
  Modifier modifier_;
  std::vector<double> knots_;
  std::string source_id_;
  std::string column_label_;
  std::uint64_t fingerprint_ = 0;
};

inline WeightModel build_weight_model(const TabulatedSpectrum& spectrum, Band band, Modifier modifier,
                                      SplineBoundary boundary) {
  band.validate();
  if (spectrum.size() < 4) throw StructuralError("a spectrum needs at least 4 samples");
  const Band range = spectrum.range();
  if (band.lo < range.lo || band.hi > range.hi) {
    throw DomainError("band (" + std::to_string(band.lo) + ", " + std::to_string(band.hi) +
                      ") outside data range (" + std::to_string(range.lo) + ", " + std::to_string(range.hi) + ")");
  }

  WeightModel m;
  std::vector<double> x, r;
  x.reserve(spectrum.size());
  r.reserve(spectrum.size());
  for (const auto& s : spectrum.samples()) {
    x.push_back(s.wavelength);
    r.push_back(std::sqrt(s.irradiance));
  }
  m.sqrt_spline_ = CubicSpline(x, r, boundary);
  m.domain_ = band;
  m.source_id_ = spectrum.source_id();
  m.column_label_ = spectrum.column_label();

  m.knots_.push_back(band.lo);
  for (double k : x) {
    if (k > band.lo && k < band.hi) m.knots_.push_back(k);
  }
  if (const auto* t = std::get_if<TabulatedModifier>(&modifier)) {
    const auto& tk = t->sqrt_factor->knots();
    if (band.lo < tk.front() || band.hi > tk.back()) throw DomainError("band outside modifier table range");
    for (double k : tk) {
      if (k > band.lo && k < band.hi) m.knots_.push_back(k);
    }
    std::sort(m.knots_.begin() + 1, m.knots_.end());
    m.knots_.erase(std::unique(m.knots_.begin(), m.knots_.end()), m.knots_.end());
  }
  m.knots_.push_back(band.hi);

  std::uint64_t hash = 1469598103934665603ULL;
  const auto mix = [&hash](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) hash = (hash ^ p[i]) * 1099511628211ULL;
  };
  for (const auto& s : spectrum.samples()) {
    mix(&s.wavelength, sizeof(double));
    mix(&s.irradiance, sizeof(double));
  }
  mix(&band.lo, sizeof(double));
  mix(&band.hi, sizeof(double));
  const auto bc = static_cast<int>(boundary);
  mix(&bc, sizeof bc);
  const std::string desc = describe(modifier);
  mix(desc.data(), desc.size());
  if (const auto* t = std::get_if<TabulatedModifier>(&modifier)) mix(&t->data_hash, sizeof t->data_hash);
  m.fingerprint_ = hash;

  m.modifier_ = std::move(modifier);
  return m;
}

}  // namespace solarquad

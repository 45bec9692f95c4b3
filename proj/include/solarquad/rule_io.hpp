#pragma once

#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "errors.hpp"
#include "rulegen.hpp"
#include "spectrum.hpp"
#include "validate.hpp"

namespace solarquad {

inline constexpr std::string_view kVersion = "1.0.0";

/// %.17g in the C locale: enough digits to round-trip any double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// CSV rule files:
//
//   # solarquad rule
//   # key=value            (source_id, column, band_lo_nm, band_hi_nm, order,
//   # ...                   modifier, rel_tol, evaluations, version)
//   node_nm,weight
//   <node>,<weight>        (N rows)

inline void write_rule_csv(std::ostream& os, const QuadratureRule& rule) {
  const auto& m = rule.meta();
  os << "# solarquad rule\n";
  os << "# source_id=" << m.source_id << '\n';
  os << "# column=" << m.column << '\n';
  os << "# band_lo_nm=" << format_double(rule.band().lo) << '\n';
  os << "# band_hi_nm=" << format_double(rule.band().hi) << '\n';
  os << "# order=" << rule.order() << '\n';
  os << "# modifier=" << m.modifier << '\n';
  os << "# rel_tol=" << format_double(m.rel_tol) << '\n';
  os << "# evaluations=" << m.evaluations << '\n';
  os << "# version=" << kVersion << '\n';
  os << "node_nm,weight\n";
  for (std::size_t i = 0; i < rule.order(); ++i) {
    os << format_double(rule.nodes()[i]) << ',' << format_double(rule.weights()[i]) << '\n';
  }
}

inline void write_rule_json(std::ostream& os, const QuadratureRule& rule) {
  const auto& m = rule.meta();
  nlohmann::ordered_json j;
  j["meta"] = {{"source_id", m.source_id},
               {"column", m.column},
               {"band_nm", {rule.band().lo, rule.band().hi}},
               {"order", rule.order()},
               {"modifier", m.modifier},
               {"rel_tol", m.rel_tol},
               {"evaluations", m.evaluations},
               {"version", kVersion}};
  j["nodes"] = rule.nodes();
  j["weights"] = rule.weights();
  os << j.dump(2) << '\n';
}

namespace io_detail {

inline double to_double(std::string_view s, std::size_t line) {
  double v = 0.0;
  if (!detail::parse_double(s, v)) throw ParseError(line, "not a number: '" + std::string(s) + "'");
  return v;
}

inline QuadratureRule read_rule_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const auto& meta = j.at("meta");
    RuleMeta m;
    m.source_id = meta.value("source_id", "");
    m.column = meta.value("column", "");
    m.modifier = meta.value("modifier", "none");
    m.rel_tol = meta.value("rel_tol", 0.0);
    m.evaluations = meta.value("evaluations", std::size_t{0});
    const auto band = meta.at("band_nm").get<std::vector<double>>();
    if (band.size() != 2) throw ParseError(1, "band_nm must have two entries");
    auto nodes = j.at("nodes").get<std::vector<double>>();
    auto weights = j.at("weights").get<std::vector<double>>();
    if (meta.contains("order") && meta.at("order").get<std::size_t>() != nodes.size()) {
      throw ParseError(1, "order does not match node count");
    }
    return QuadratureRule(std::move(nodes), std::move(weights), Band{band[0], band[1]}, std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("invalid rule JSON: ") + e.what());
  }
}

inline QuadratureRule read_rule_csv(std::string_view text) {
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<double> nodes, weights;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = detail::trim(text.substr(0, eol));
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      line.remove_prefix(1);
      const auto eq = line.find('=');
      if (eq != std::string_view::npos) {
        meta.emplace(std::string(detail::trim(line.substr(0, eq))), std::string(detail::trim(line.substr(eq + 1))));
      }
      continue;
    }
    if (!header_seen) {
      if (line != "node_nm,weight") throw ParseError(line_no, "expected header 'node_nm,weight'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError(line_no, "expected 'node,weight'");
    nodes.push_back(to_double(line.substr(0, comma), line_no));
    weights.push_back(to_double(line.substr(comma + 1), line_no));
  }
  if (!header_seen) throw ParseError(line_no, "missing 'node_nm,weight' header");

  const auto get = [&meta](std::string_view key) -> std::string {
    const auto it = meta.find(key);
    if (it == meta.end()) throw ParseError(1, "missing metadata '" + std::string(key) + "'");
    return it->second;
  };
  const Band band{to_double(get("band_lo_nm"), 1), to_double(get("band_hi_nm"), 1)};
  const auto order = static_cast<std::size_t>(to_double(get("order"), 1));
  if (order != nodes.size()) {
    throw ParseError(line_no, "order " + std::to_string(order) + " but " + std::to_string(nodes.size()) + " rows");
  }
  RuleMeta m;
  m.source_id = meta.contains("source_id") ? meta.at("source_id") : "";
  m.column = meta.contains("column") ? meta.at("column") : "";
  m.modifier = meta.contains("modifier") ? meta.at("modifier") : "none";
  m.rel_tol = meta.contains("rel_tol") ? to_double(meta.at("rel_tol"), 1) : 0.0;
  m.evaluations = meta.contains("evaluations") ? static_cast<std::size_t>(to_double(meta.at("evaluations"), 1)) : 0;
  return QuadratureRule(std::move(nodes), std::move(weights), band, std::move(m));
}

}  // namespace io_detail

/// Reads a rule written by write_rule_csv or write_rule_json (detected from
/// the first non-blank character).
inline QuadratureRule read_rule(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return io_detail::read_rule_json(text);
  return io_detail::read_rule_csv(text);
}

inline void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "N,value,oracle,rel_error,evals\n";
  for (const auto& r : rows) {
    os << r.order << ',' << format_double(r.quad_value) << ',' << format_double(r.oracle_value) << ','
       << format_double(r.rel_error) << ',' << r.evaluations << '\n';
  }
}

}  // namespace solarquad

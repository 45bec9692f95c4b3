// solarquad: build weighted Gaussian quadrature rules from tabulated spectra,
// apply them, and compare against brute-force integration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "solarquad/solarquad.hpp"

#ifndef SOLARQUAD_DEFAULT_SPECTRUM
#define SOLARQUAD_DEFAULT_SPECTRUM "data/ASTMG173.csv"
#endif

namespace sq = solarquad;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw sq::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string_view rest = text;
  for (;;) {
    const auto comma = rest.find(',');
    double v = 0.0;
    if (!sq::detail::parse_double(rest.substr(0, comma), v)) {
      throw UsageError(std::string("bad ") + what + " '" + text + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

struct SpectrumOptions {
  std::string path = SOLARQUAD_DEFAULT_SPECTRUM;
  std::string column = "global";
  std::string band;
  std::string modifier = "none";

  void add_to(CLI::App& app) {
    app.add_option("--spectrum", path, "ASTM G173-style or two-column spectrum file")->capture_default_str();
    app.add_option("--column", column, "irradiance column")
        ->check(CLI::IsMember({"global", "direct", "etr"}))
        ->capture_default_str();
    app.add_option("--band", band, "band A,B in nm (default: full data range)");
    app.add_option("--modifier", modifier, "none | lambda | planck:T | table:PATH")->capture_default_str();
  }

  [[nodiscard]] sq::WeightModel model() const {
    const sq::Column col = column == "direct" ? sq::Column::direct_circumsolar
                           : column == "etr"  ? sq::Column::extraterrestrial
                                              : sq::Column::global_tilt;
    auto stem = path.substr(path.find_last_of('/') + 1);
    stem = stem.substr(0, stem.find('.'));
    const auto spectrum = sq::parse_spectrum(read_file(path), col, stem);
    sq::Band b = spectrum.range();
    if (!band.empty()) {
      const auto ab = parse_list(band, "band");
      if (ab.size() != 2) throw UsageError("--band expects A,B");
      b = {ab[0], ab[1]};
    }
    sq::Modifier mod;
    if (modifier.starts_with("table:")) {
      const auto table_path = modifier.substr(6);
      const auto table = sq::parse_spectrum(read_file(table_path), sq::Column::global_tilt, table_path);
      mod = sq::make_tabulated_modifier(table);
    } else {
      try {
        mod = sq::parse_modifier(modifier);
      } catch (const sq::DomainError& e) {
        throw UsageError(e.what());
      }
    }
    return sq::build_weight_model(spectrum, b, std::move(mod));
  }
};

struct IntegrandOptions {
  std::optional<double> sin_period;
  std::string poly;
  std::string table;

  void add_to(CLI::App& app) {
    app.add_option("--sin", sin_period, "f = sin(2 pi lambda / PERIOD), PERIOD in nm");
    app.add_option("--poly", poly, "f = c0 + c1 lambda + ... given as \"c0,c1,...\"");
    app.add_option("--table", table, "two-column (lambda, f) file, spline-interpolated");
  }

  [[nodiscard]] sq::TestIntegrand integrand() const {
    const int given = (sin_period ? 1 : 0) + (poly.empty() ? 0 : 1) + (table.empty() ? 0 : 1);
    if (given != 1) throw UsageError("give exactly one of --sin, --poly, --table");
    if (sin_period) {
      if (!(*sin_period > 0.0)) throw UsageError("--sin period must be positive");
      return sq::TestIntegrand::sinusoid(*sin_period);
    }
    if (!poly.empty()) return sq::TestIntegrand::polynomial(parse_list(poly, "polynomial"));
    const auto rows = sq::read_numeric_table(read_file(table));
    std::vector<double> x, y;
    for (const auto& r : rows) {
      if (r.values.size() != 2) throw sq::ParseError(r.line, "integrand table needs two columns");
      x.push_back(r.values[0]);
      y.push_back(r.values[1]);
    }
    return sq::TestIntegrand::tabulated(x, y, table);
  }
};

std::vector<std::size_t> parse_orders(const std::string& text) {
  std::vector<std::size_t> out;
  const auto to_order = [&text](double v) {
    if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw UsageError("bad order in '" + text + "'");
    }
    return static_cast<std::size_t>(v);
  };
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::string_view rest = text;
    for (;;) {
      const auto colon = rest.find(':');
      double v = 0.0;
      if (!sq::detail::parse_double(rest.substr(0, colon), v)) throw UsageError("bad range '" + text + "'");
      parts.push_back(v);
      if (colon == std::string_view::npos) break;
      rest.remove_prefix(colon + 1);
    }
    if (parts.size() != 3) throw UsageError("range must be START:STEP:STOP");
    const auto start = to_order(parts[0]), step = to_order(parts[1]), stop = to_order(parts[2]);
    for (std::size_t n = start; n <= stop; n += step) out.push_back(n);
  } else {
    for (double v : parse_list(text, "order list")) out.push_back(to_order(v));
  }
  if (out.empty()) throw UsageError("no orders in '" + text + "'");
  return out;
}

/// Writes to --out PATH when given, else standard output.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw sq::Error("cannot write '" + out_path + "'");
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted Gaussian quadrature rules for tabulated spectra"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(sq::kVersion));

  // rule
  auto* rule_cmd = app.add_subcommand("rule", "construct an N-point rule and write it");
  SpectrumOptions rule_spec;
  rule_spec.add_to(*rule_cmd);
  std::size_t order = 0;
  std::string format = "csv", rule_out;
  double rule_rtol = sq::RuleSettings{}.rel_tol;
  rule_cmd->add_option("--order", order, "number of nodes")->required()->check(CLI::Range(std::size_t{1}, sq::kMaxOrder));
  rule_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  rule_cmd->add_option("--out", rule_out, "output file (default: stdout)");
  rule_cmd->add_option("--rtol", rule_rtol, "relative tolerance of the moment integrals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // integrate
  auto* integrate_cmd = app.add_subcommand("integrate", "apply a rule file to an integrand");
  std::string rule_path;
  integrate_cmd->add_option("--rule", rule_path, "rule file (CSV or JSON)")->required();
  IntegrandOptions integrate_f;
  integrate_f.add_to(*integrate_cmd);

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force adaptive integral of weight * f");
  SpectrumOptions oracle_spec;
  oracle_spec.add_to(*oracle_cmd);
  IntegrandOptions oracle_f;
  oracle_f.add_to(*oracle_cmd);
  double oracle_rtol = sq::kOracleRelTol;
  oracle_cmd->add_option("--rtol", oracle_rtol, "relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();

  // convergence
  auto* conv_cmd = app.add_subcommand("convergence", "error of the N-point rule versus the oracle, per N");
  SpectrumOptions conv_spec;
  conv_spec.add_to(*conv_cmd);
  IntegrandOptions conv_f;
  conv_f.add_to(*conv_cmd);
  std::string orders_text, conv_out;
  double conv_rtol = sq::RuleSettings{}.rel_tol;
  conv_cmd->add_option("--orders", orders_text, "START:STEP:STOP or N1,N2,...")->required();
  conv_cmd->add_option("--rtol", conv_rtol, "relative tolerance of the moment integrals")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  conv_cmd->add_option("--out", conv_out, "output file (default: stdout)");

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "sample an integrand at the nodes of a rule");
  std::string probe_rule;
  probe_cmd->add_option("--rule", probe_rule, "rule file (CSV or JSON)")->required();
  IntegrandOptions probe_f;
  probe_f.add_to(*probe_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*rule_cmd) {
      const auto model = rule_spec.model();
      const auto rule = sq::build_rule(model, order, sq::RuleSettings{rule_rtol});
      std::ostringstream os;
      if (format == "json") {
        sq::write_rule_json(os, rule);
      } else {
        sq::write_rule_csv(os, rule);
      }
      emit(rule_out, os.str());
    } else if (*integrate_cmd) {
      const auto f = integrate_f.integrand();
      const auto rule = sq::read_rule(read_file(rule_path));
      emit("", sq::format_double(sq::apply_rule(rule, f)) + "\n");
    } else if (*oracle_cmd) {
      const auto f = oracle_f.integrand();
      const auto model = oracle_spec.model();
      const auto r = sq::oracle_integral(model, f, oracle_rtol);
      if (!r.converged) {
        std::cerr << "solarquad: oracle did not converge (error estimate " << sq::format_double(r.error_estimate)
                  << " after " << r.evaluations << " evaluations)\n";
        return 1;
      }
      emit("", "value,error_estimate\n" + sq::format_double(r.value) + "," + sq::format_double(r.error_estimate) +
                   "\n");
    } else if (*conv_cmd) {
      const auto f = conv_f.integrand();
      const auto orders = parse_orders(orders_text);
      for (auto n : orders) {
        if (n > sq::kMaxOrder) throw UsageError("order " + std::to_string(n) + " exceeds " + std::to_string(sq::kMaxOrder));
      }
      const auto model = conv_spec.model();
      const auto rows = sq::convergence_study(model, f, orders, sq::RuleSettings{conv_rtol});
      std::ostringstream os;
      sq::write_convergence_csv(os, rows);
      emit(conv_out, os.str());
    } else if (*probe_cmd) {
      const auto f = probe_f.integrand();
      const auto rule = sq::read_rule(read_file(probe_rule));
      std::ostringstream os;
      os << "node_nm,f\n";
      for (const auto& [x, y] : sq::aliasing_probe(rule, f)) os << sq::format_double(x) << ',' << sq::format_double(y) << '\n';
      emit("", os.str());
    }
  } catch (const UsageError& e) {
    std::cerr << "solarquad: " << e.what() << "\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "solarquad: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

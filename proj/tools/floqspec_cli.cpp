// floqspec command-line driver: decomposition, correlations, spectra, DPO
// sweeps and oracle verification. Grids go to CSV, scalars to a JSON summary.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "floqspec/correlations.hpp"
#include "floqspec/dpo.hpp"
#include "floqspec/errors.hpp"
#include "floqspec/floquet.hpp"
#include "floqspec/oracle.hpp"
#include "floqspec/parallel.hpp"
#include "floqspec/sampled_system.hpp"
#include "floqspec/spectra.hpp"

namespace fs = floqspec;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kSchema = "floqspec.summary/1";

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kUnstable = 3, kNumerical = 4, kVerify = 5 };

struct Options {
  double tol_rel = 1e-10;
  double tol_abs = 1e-12;
  std::optional<double> omega_min;
  std::optional<double> omega_max;
  int omega_count = 601;
  int kd = 0;  // 0 selects the long-detection limit
  double tr = 0.0;
  std::string mode = "full";
  std::string output;
  std::string summary;
  unsigned threads = 1;
  double quality = 3.0;
  double sigma = 0.0;
  std::string system_file;
  std::vector<std::string> pairs;
  double q_min = 2.0;
  double q_max = 10.0;
  int q_count = 9;
  int samples = 256;
};

std::string number(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw fs::ConfigError("output", "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) stream() << (i ? "," : "") << names[i];
    stream() << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) stream() << (i ? "," : "") << number(values[i]);
    stream() << '\n';
  }

 private:
  std::ofstream file_;
};

fs::IntegrationTolerances tolerances(const Options& o) {
  fs::IntegrationTolerances tol{o.tol_rel, o.tol_abs};
  tol.validate();
  return tol;
}

void check_threads(const Options& o) {
  if (o.threads > 1024) throw fs::ConfigError("threads", "must be at most 1024 (0 = all cores)");
}

fs::PeriodicLinearSystem selected_system(const Options& o) {
  if (!o.system_file.empty()) return fs::load_sampled_system(o.system_file);
  return fs::build_dpo_system({o.quality, o.sigma}, fs::parse_dpo_mode(o.mode));
}

fs::DetectionMode detection(const Options& o, double period) {
  if (o.kd < 0) throw fs::ConfigError("kd", "must be >= 0 (0 selects infinite detection)");
  if (o.kd == 0) {
    if (o.tr != 0.0) throw fs::ConfigError("tr", "requires --kd >= 1");
    return fs::InfiniteDetection{};
  }
  if (!(o.tr >= 0.0 && o.tr < period)) throw fs::ConfigError("tr", "must lie in [0, T)");
  return fs::FiniteDetection{o.kd, o.tr};
}

std::vector<double> omega_grid(const Options& o, double period) {
  const double scale = 3.0 * std::numbers::pi / period;  // 3Q for the DPO
  const double lo = o.omega_min.value_or(-scale);
  const double hi = o.omega_max.value_or(scale);
  if (!std::isfinite(lo)) throw fs::ConfigError("omega-min", "must be finite");
  if (!std::isfinite(hi)) throw fs::ConfigError("omega-max", "must be finite");
  if (o.omega_count < 1) throw fs::ConfigError("omega-count", "must be positive");
  if (hi < lo) throw fs::ConfigError("omega-max", "must not be below omega-min");
  if (o.omega_count == 1) return {lo};
  std::vector<double> grid;
  for (int i = 0; i < o.omega_count; ++i) {
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(o.omega_count - 1));
  }
  return grid;
}

json complex_json(fs::Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const fs::CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

json metadata(const std::string& command, const Options& o, const fs::PeriodicLinearSystem* system) {
  json meta;
  meta["command"] = command;
  meta["units"] =
      "dimensionless; times in units of 1/gamma for the DPO, frequencies in units of gamma; "
      "complex numbers as [re, im]";
  meta["tolerances"] = {{"relative", o.tol_rel}, {"absolute", o.tol_abs}};
  if (system != nullptr) {
    meta["system"] = {{"description", system->description()},
                      {"dimension", system->dimension()},
                      {"noise_count", system->noise_count()},
                      {"period", system->period()}};
    if (!o.system_file.empty()) {
      meta["system"]["file"] = o.system_file;
      meta["system"]["interpolation"] = "periodic cubic spline";
      meta["system"]["interpolation_order"] = 3;
    } else {
      meta["system"]["Q"] = o.quality;
      meta["system"]["sigma"] = o.sigma;
      meta["system"]["mode"] = o.mode;
    }
  }
  if (o.kd == 0) {
    meta["detection"] = "infinite";
  } else {
    meta["detection"] = {{"kd", o.kd}, {"tr", o.tr}};
  }
  meta["threads_irrelevant_to_output"] = true;
  return meta;
}

void write_summary(const Options& o, const json& meta, const json& results) {
  if (o.summary.empty()) return;
  json doc;
  doc["schema"] = kSchema;
  doc["metadata"] = meta;
  doc["results"] = results;
  std::ofstream out(o.summary, std::ios::binary);
  if (!out) throw fs::ConfigError("summary", "cannot open '" + o.summary + "' for writing");
  out << doc.dump(2) << '\n';
}

json exponents_json(const fs::FloquetDecomposition& d) {
  json list = json::array();
  for (Eigen::Index a = 0; a < d.exponents().size(); ++a) list.push_back(complex_json(d.exponents()(a)));
  return list;
}

// ---------------------------------------------------------------------------

int run_decompose(const Options& o) {
  const auto system = selected_system(o);
  const auto decomposition = fs::FloquetDecomposition::build(system, tolerances(o));
  json results;
  results["exponents"] = exponents_json(decomposition);
  json multipliers = json::array();
  for (Eigen::Index a = 0; a < decomposition.multipliers().size(); ++a) {
    multipliers.push_back(complex_json(decomposition.multipliers()(a)));
  }
  results["multipliers"] = multipliers;
  results["monodromy"] = matrix_json(decomposition.monodromy());
  results["modes"] = matrix_json(decomposition.modes());
  results["mode_condition"] = decomposition.mode_condition();
  results["max_growth_rate"] = decomposition.max_growth_rate();
  results["stable"] = fs::stability_check(decomposition).stable;

  json doc;
  doc["schema"] = kSchema;
  doc["metadata"] = metadata("decompose", o, &system);
  doc["results"] = results;
  CsvWriter out(o.output);
  out.stream() << doc.dump(2) << '\n';
  write_summary(o, doc["metadata"], results);
  return kOk;
}

int run_export_system(const Options& o) {
  if (o.samples < 4) throw fs::ConfigError("samples", "need at least 4 samples per period");
  const auto system = selected_system(o);
  CsvWriter out(o.output);
  fs::write_sampled_system(out.stream(), system, static_cast<std::size_t>(o.samples));
  return kOk;
}

std::pair<double, double> parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw fs::ConfigError("pair", "expected 't,t2', got '" + text + "'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw fs::ConfigError("pair", "expected two numbers, got '" + text + "'");
  }
}

int run_correlate(const Options& o) {
  const auto system = selected_system(o);
  const auto tol = tolerances(o);
  const auto kernel = fs::NoiseKernel::build(fs::FloquetDecomposition::build(system, tol), tol);
  if (o.pairs.empty()) throw fs::ConfigError("pair", "at least one --pair t,t2 is required");
  std::vector<std::pair<double, double>> pairs;
  for (const auto& text : o.pairs) {
    const auto p = parse_pair(text);
    if (!(p.first >= 0.0 && p.second >= 0.0) || !std::isfinite(p.first) || !std::isfinite(p.second)) {
      throw fs::ConfigError("pair", "times must be finite and non-negative");
    }
    pairs.push_back(p);
  }
  const std::size_t d = system.dimension();
  std::vector<std::string> header{"t", "t2"};
  for (std::size_t m = 1; m <= d; ++m) {
    for (std::size_t n = 1; n <= d; ++n) {
      header.push_back("X" + std::to_string(m) + std::to_string(n) + "_re");
      header.push_back("X" + std::to_string(m) + std::to_string(n) + "_im");
    }
  }
  std::vector<fs::CMatrix> values(pairs.size());
  fs::parallel_for(pairs.size(), o.threads, [&](std::size_t i) {
    values[i] = fs::fluctuation_correlation(kernel, pairs[i].first, pairs[i].second);
  });
  CsvWriter out(o.output);
  out.header(header);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<double> row{pairs[i].first, pairs[i].second};
    for (Eigen::Index m = 0; m < values[i].rows(); ++m) {
      for (Eigen::Index n = 0; n < values[i].cols(); ++n) {
        row.push_back(values[i](m, n).real());
        row.push_back(values[i](m, n).imag());
      }
    }
    out.row(row);
  }
  write_summary(o, metadata("correlate", o, &system),
                {{"pairs", pairs.size()}, {"exponents", exponents_json(kernel.decomposition())}});
  return kOk;
}

int run_spectrum(const Options& o) {
  const auto system = selected_system(o);
  const auto tol = tolerances(o);
  const auto mode = detection(o, system.period());
  const auto grid = omega_grid(o, system.period());
  const auto kernel = fs::NoiseKernel::build(fs::FloquetDecomposition::build(system, tol), tol);
  std::vector<fs::CMatrix> values(grid.size());
  fs::parallel_for(grid.size(), o.threads, [&](std::size_t i) {
    values[i] = fs::fluctuation_spectrum(kernel, std::span<const double>(&grid[i], 1), mode, tol).front();
  });
  const std::size_t d = system.dimension();
  std::vector<std::string> header{"omega"};
  for (std::size_t m = 1; m <= d; ++m) {
    for (std::size_t n = 1; n <= d; ++n) {
      header.push_back("S" + std::to_string(m) + std::to_string(n) + "_re");
      header.push_back("S" + std::to_string(m) + std::to_string(n) + "_im");
    }
  }
  CsvWriter out(o.output);
  out.header(header);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (Eigen::Index m = 0; m < values[i].rows(); ++m) {
      for (Eigen::Index n = 0; n < values[i].cols(); ++n) {
        row.push_back(values[i](m, n).real());
        row.push_back(values[i](m, n).imag());
      }
    }
    out.row(row);
  }
  write_summary(o, metadata("spectrum", o, &system),
                {{"omega_count", grid.size()}, {"exponents", exponents_json(kernel.decomposition())}});
  return kOk;
}

int run_dpo_spectrum(const Options& o) {
  const fs::DpoParameters params{o.quality, o.sigma};
  params.validate();
  const auto dpo_mode = fs::parse_dpo_mode(o.mode);
  if (!o.system_file.empty()) throw fs::ConfigError("system-file", "dpo-spectrum uses the builtin DPO");
  const auto tol = tolerances(o);
  const auto grid = omega_grid(o, params.period());
  const fs::DpoSpectrum spectrum(params, dpo_mode, tol, detection(o, params.period()));
  const auto table = spectrum.table(grid, o.threads);
  CsvWriter out(o.output);
  out.header({"omega", "V11", "V12", "V22", "V1", "V2", "detV", "V2_dB"});
  double min_det = INFINITY;
  double max_residue = 0.0;
  for (const auto& p : table) {
    out.row({p.omega, p.covariance(0, 0), p.covariance(0, 1), p.covariance(1, 1), p.v1, p.v2,
             p.determinant, p.v2_db});
    min_det = std::min(min_det, p.determinant);
    max_residue = std::max(max_residue, p.imaginary_residue);
  }
  const auto system = fs::build_dpo_system(params, dpo_mode);
  write_summary(o, metadata("dpo-spectrum", o, &system),
                {{"exponents", exponents_json(spectrum.engine().kernel().decomposition())},
                 {"min_detV", min_det},
                 {"max_imaginary_residue", max_residue}});
  return kOk;
}

int run_dpo_sweep(const Options& o) {
  const auto dpo_mode = fs::parse_dpo_mode(o.mode);
  const auto tol = tolerances(o);
  if (!(o.q_min > 0.0)) throw fs::ConfigError("Q-min", "must be positive");
  if (o.q_max < o.q_min) throw fs::ConfigError("Q-max", "must not be below Q-min");
  if (o.q_count < 1) throw fs::ConfigError("Q-count", "must be positive");
  std::vector<double> qs;
  for (int i = 0; i < o.q_count; ++i) {
    qs.push_back(o.q_count == 1 ? o.q_min
                                : o.q_min + (o.q_max - o.q_min) * i / static_cast<double>(o.q_count - 1));
  }
  std::vector<fs::OptimalSqueezing> results(qs.size());
  fs::parallel_for(qs.size(), o.threads,
                   [&](std::size_t i) { results[i] = fs::find_optimal_squeezing(qs[i], dpo_mode, tol); });
  CsvWriter out(o.output);
  out.header({"Q", "sigma_ins", "sigma_opt", "V2opt_dB"});
  json rows = json::array();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    out.row({qs[i], results[i].sigma_instability, results[i].sigma, results[i].v2_db});
    rows.push_back({{"Q", qs[i]},
                    {"sigma_ins", results[i].sigma_instability},
                    {"sigma_opt", results[i].sigma},
                    {"V2opt_dB", results[i].v2_db}});
  }
  json meta = metadata("dpo-sweep", o, nullptr);
  meta["mode"] = o.mode;
  meta["sweep"] = {{"Q_min", o.q_min}, {"Q_max", o.q_max}, {"Q_count", o.q_count}};
  write_summary(o, meta, {{"sweep", rows}});
  return kOk;
}

// Oracle cross-checks on the selected system.
int run_verify(const Options& o) {
  const auto system = selected_system(o);
  const auto tol = tolerances(o);
  const auto kernel = fs::NoiseKernel::build(fs::FloquetDecomposition::build(system, tol), tol);
  const fs::CovarianceOracle oracle(system);
  const double period = system.period();
  struct Check {
    std::string name;
    double error;
    double limit;
  };
  std::vector<Check> checks;

  const fs::CMatrix x0 = oracle.equal_time(0.3 * period);
  const fs::CMatrix x1 = oracle.equal_time(1.3 * period);
  checks.push_back({"oracle covariance periodicity", (x1 - x0).norm() / x0.norm(), 1e-8});

  double two_time = 0.0;
  const double pairs[][2] = {{0.0, 0.0}, {2.3, 0.7}, {0.4, 3.1}, {4.6, 4.6}, {1.0, 3.0}};
  for (const auto& p : pairs) {
    const fs::CMatrix fast = fs::fluctuation_correlation(kernel, p[0] * period, p[1] * period);
    const fs::CMatrix reference = oracle.two_time(p[0] * period, p[1] * period);
    two_time = std::max(two_time, (fast - reference).norm() / reference.norm());
  }
  checks.push_back({"two-time correlation vs covariance ODE", two_time, 1e-6});

  const int kd = o.kd > 0 ? o.kd : 2;
  const double omega_scale = std::numbers::pi / period;
  for (double tr : {0.0, 0.3 * period}) {
    double worst = 0.0;
    for (double omega : {0.0, omega_scale, 2.0 * omega_scale}) {
      const fs::FiniteDetection window{kd, tr};
      const auto fast = fs::fluctuation_spectrum(kernel, std::span<const double>(&omega, 1), window, tol).front();
      const auto reference = fs::oracle_fluctuation_spectrum(oracle, omega, window);
      worst = std::max(worst, (fast - reference.value).norm() / reference.value.norm());
    }
    checks.push_back({"finite-window spectrum vs 2-D quadrature (T_r = " + number(tr) + ")", worst, 1e-6});
  }

  bool ok = true;
  CsvWriter out(o.output);
  out.stream() << "check,relative_error,limit,status\n";
  json rows = json::array();
  for (const auto& c : checks) {
    const bool pass = c.error < c.limit;
    ok = ok && pass;
    out.stream() << '"' << c.name << "\"," << number(c.error) << ',' << number(c.limit) << ','
                 << (pass ? "PASS" : "FAIL") << '\n';
    rows.push_back({{"check", c.name}, {"relative_error", c.error}, {"limit", c.limit}, {"pass", pass}});
  }
  write_summary(o, metadata("verify", o, &system), {{"checks", rows}, {"all_passed", ok}});
  return ok ? kOk : kVerify;
}

void report_error(const std::string& kind, const std::string& message, const std::string& field = {}) {
  json err{{"error", {{"kind", kind}, {"message", message}}}};
  if (!field.empty()) err["error"]["field"] = field;
  std::cerr << err.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet-based spectra of periodically driven linear Langevin systems"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol-rel", o.tol_rel, "relative integration tolerance")->capture_default_str();
    sub->add_option("--tol-abs", o.tol_abs, "absolute integration tolerance")->capture_default_str();
    sub->add_option("--output", o.output, "output path (default: stdout)");
    sub->add_option("--summary", o.summary, "JSON summary path");
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  };
  auto add_dpo = [&](CLI::App* sub) {
    sub->add_option("--Q", o.quality, "DPO quality factor Q")->capture_default_str();
    sub->add_option("--sigma", o.sigma, "normalized modulation amplitude")->capture_default_str();
    sub->add_option("--mode", o.mode, "full | rwa")->capture_default_str();
  };
  auto add_system = [&](CLI::App* sub) {
    add_dpo(sub);
    sub->add_option("--system-file", o.system_file, "sampled-system file (overrides the builtin DPO)");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--omega-min", o.omega_min, "lowest frequency (default -3 pi / T)");
    sub->add_option("--omega-max", o.omega_max, "highest frequency (default 3 pi / T)");
    sub->add_option("--omega-count", o.omega_count, "number of grid points")->capture_default_str();
    sub->add_option("--kd", o.kd, "whole periods in the detection window (0 = infinite)")
        ->capture_default_str();
    sub->add_option("--tr", o.tr, "remainder of the detection window in [0, T)")->capture_default_str();
  };

  auto* decompose = app.add_subcommand("decompose", "Floquet exponents, multipliers and modes");
  add_common(decompose);
  add_system(decompose);
  auto* correlate = app.add_subcommand("correlate", "two-time correlation X(t, t2)");
  add_common(correlate);
  add_system(correlate);
  correlate->add_option("--pair", o.pairs, "time pair 't,t2' (repeatable)");
  auto* spectrum = app.add_subcommand("spectrum", "fluctuation spectral matrix on a frequency grid");
  add_common(spectrum);
  add_system(spectrum);
  add_grid(spectrum);
  auto* dpo_spectrum = app.add_subcommand("dpo-spectrum", "DPO output spectral covariance V(omega)");
  add_common(dpo_spectrum);
  add_dpo(dpo_spectrum);
  add_grid(dpo_spectrum);
  auto* dpo_sweep = app.add_subcommand("dpo-sweep", "instability and optimal squeezing versus Q");
  add_common(dpo_sweep);
  dpo_sweep->add_option("--mode", o.mode, "full | rwa")->capture_default_str();
  dpo_sweep->add_option("--Q-min", o.q_min, "first Q")->capture_default_str();
  dpo_sweep->add_option("--Q-max", o.q_max, "last Q")->capture_default_str();
  dpo_sweep->add_option("--Q-count", o.q_count, "number of Q values")->capture_default_str();
  auto* export_system = app.add_subcommand("export-system", "write the selected system as a sampled-system file");
  add_common(export_system);
  add_system(export_system);
  export_system->add_option("--samples", o.samples, "samples per period")->capture_default_str();
  auto* verify = app.add_subcommand("verify", "cross-check fast paths against the brute-force oracle");
  add_common(verify);
  add_system(verify);
  verify->add_option("--kd", o.kd, "whole periods for the spectral check (default 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("config", e.what());
    return kConfig;
  }

  try {
    check_threads(o);
    if (*decompose) return run_decompose(o);
    if (*correlate) return run_correlate(o);
    if (*spectrum) return run_spectrum(o);
    if (*dpo_spectrum) return run_dpo_spectrum(o);
    if (*dpo_sweep) return run_dpo_sweep(o);
    if (*export_system) return run_export_system(o);
    if (*verify) return run_verify(o);
  } catch (const fs::ConfigError& e) {
    report_error("config", e.what(), e.field());
    return kConfig;
  } catch (const fs::UnstableSystemError& e) {
    report_error("instability", e.what());
    return kUnstable;
  } catch (const fs::Error& e) {
    report_error("numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    report_error("other", e.what());
    return kOther;
  }
  return kOther;
}

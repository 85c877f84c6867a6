#include "floqspec/sampled_system.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>

#include "floqspec/errors.hpp"
#include "floqspec/interpolation.hpp"

namespace floqspec {

namespace {

std::vector<std::string> split(const std::string& text, char separator) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, separator)) out.push_back(item);
  if (!text.empty() && text.back() == separator) out.emplace_back();
  return out;
}

std::string trim(std::string text) {
  const auto first = text.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = text.find_last_not_of(" \t\r");
  return text.substr(first, last - first + 1);
}

double parse_number(const std::string& text, const std::string& field) {
  const std::string clean = trim(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(clean, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != clean.size() || !std::isfinite(value)) {
    throw ConfigError(field, "not a finite number: '" + clean + "'");
  }
  return value;
}

std::size_t parse_count(const std::string& text, const std::string& field) {
  const double value = parse_number(text, field);
  if (value < 1.0 || value != std::floor(value)) throw ConfigError(field, "must be a positive integer");
  return static_cast<std::size_t>(value);
}

std::vector<std::string> expected_header(std::size_t d, std::size_t n) {
  std::vector<std::string> header{"t"};
  auto add = [&](const char* name, std::size_t rows, std::size_t cols) {
    for (std::size_t i = 1; i <= rows; ++i) {
      for (std::size_t j = 1; j <= cols; ++j) {
        const std::string base = name + std::to_string(i) + std::to_string(j);
        header.push_back(base + "_re");
        header.push_back(base + "_im");
      }
    }
  };
  add("L", d, d);
  add("B", d, n);
  return header;
}

}  // namespace

PeriodicLinearSystem read_sampled_system(std::istream& in, const std::string& source) {
  const std::string field = "system-file";
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!trim(line).empty()) return true;
    }
    return false;
  };
  if (!next_line() || trim(line) != kSampledSystemMagic) {
    throw ConfigError(field, source + ": missing '" + kSampledSystemMagic + "' preamble");
  }

  std::map<std::string, std::string> keys;
  std::string g_text;
  while (next_line() && line.rfind('#', 0) == 0) {
    const std::string body = trim(line.substr(1));
    if (body.rfind("G=", 0) == 0) {
      g_text = body.substr(2);
      continue;
    }
    for (const auto& token : split(body, ' ')) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) continue;
      keys[token.substr(0, eq)] = token.substr(eq + 1);
    }
  }
  for (const char* key : {"dimension", "noise_count", "period"}) {
    if (!keys.contains(key)) throw ConfigError(field, source + ": preamble lacks '" + key + "='");
  }
  const std::size_t d = parse_count(keys["dimension"], field + ".dimension");
  const std::size_t n = parse_count(keys["noise_count"], field + ".noise_count");
  const double period = parse_number(keys["period"], field + ".period");
  if (!(period > 0.0)) throw ConfigError(field + ".period", "must be positive");

  const auto g_values = split(g_text, ',');
  if (g_values.size() != 2 * n * n) {
    throw ConfigError(field + ".G", "expected " + std::to_string(2 * n * n) + " numbers (re,im pairs)");
  }
  CMatrix g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n * n; ++k) {
    g(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n)) =
        Complex(parse_number(g_values[2 * k], field + ".G"), parse_number(g_values[2 * k + 1], field + ".G"));
  }

  const auto header = split(line, ',');
  const auto expected = expected_header(d, n);
  if (header.size() != expected.size()) {
    throw ConfigError(field, source + ": header has " + std::to_string(header.size()) +
                                 " columns, expected " + std::to_string(expected.size()));
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (trim(header[i]) != expected[i]) {
      throw ConfigError(field, source + ": column " + std::to_string(i + 1) + " is '" +
                                   trim(header[i]) + "', expected '" + expected[i] + "'");
    }
  }

  std::vector<std::vector<double>> rows;
  while (next_line()) {
    const auto cells = split(line, ',');
    if (cells.size() != expected.size()) {
      throw ConfigError(field, source + ": row " + std::to_string(rows.size() + 1) + " has " +
                                   std::to_string(cells.size()) + " columns");
    }
    std::vector<double> row;
    for (std::size_t i = 0; i < cells.size(); ++i) row.push_back(parse_number(cells[i], field + "." + expected[i]));
    rows.push_back(std::move(row));
  }
  const std::size_t m = rows.size();
  if (m < 4) throw ConfigError(field, source + ": need at least 4 samples per period");
  for (std::size_t j = 0; j < m; ++j) {
    const double expected_time = period * static_cast<double>(j) / static_cast<double>(m);
    if (std::abs(rows[j][0] - expected_time) > 1e-9 * period) {
      throw ConfigError(field + ".t", source + ": sample " + std::to_string(j) +
                                           " is not on the uniform grid j*T/M");
    }
  }

  CMatrix drift_samples(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d * d));
  CMatrix noise_samples(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d * n));
  for (std::size_t j = 0; j < m; ++j) {
    std::size_t c = 1;
    for (std::size_t k = 0; k < d * d; ++k, c += 2) {
      drift_samples(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = Complex(rows[j][c], rows[j][c + 1]);
    }
    for (std::size_t k = 0; k < d * n; ++k, c += 2) {
      noise_samples(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = Complex(rows[j][c], rows[j][c + 1]);
    }
  }
  auto drift = std::make_shared<const PeriodicSpline>(drift_samples, period);
  auto noise = std::make_shared<const PeriodicSpline>(noise_samples, period);
  // Spline columns are row-major matrix entries.
  auto unflatten = [](const PeriodicSpline& spline, std::size_t rows_count, std::size_t cols, double t) {
    const CVector v = spline(t);
    CMatrix out(static_cast<Eigen::Index>(rows_count), static_cast<Eigen::Index>(cols));
    for (std::size_t k = 0; k < rows_count * cols; ++k) {
      out(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = v(static_cast<Eigen::Index>(k));
    }
    return out;
  };
  PeriodicLinearSystem system(
      d, n, period, [drift, d, unflatten](double t) { return unflatten(*drift, d, d, t); },
      [noise, d, n, unflatten](double t) { return unflatten(*noise, d, n, t); }, g, drift->knots());
  system.set_description("sampled system from " + source + " (" + std::to_string(m) +
                         " samples, periodic cubic spline, order " +
                         std::to_string(PeriodicSpline::kOrder) + ")");
  return system;
}

PeriodicLinearSystem load_sampled_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("system-file", "cannot open '" + path + "'");
  return read_sampled_system(in, path);
}

void write_sampled_system(std::ostream& out, const PeriodicLinearSystem& system, std::size_t samples) {
  const std::size_t d = system.dimension();
  const std::size_t n = system.noise_count();
  char buffer[64];
  auto number = [&](double v) {
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return std::string(buffer);
  };
  out << kSampledSystemMagic << '\n';
  out << "# dimension=" << d << " noise_count=" << n << " period=" << number(system.period()) << '\n';
  out << "# G=";
  for (std::size_t k = 0; k < n * n; ++k) {
    const Complex v = system.noise_correlation()(static_cast<Eigen::Index>(k / n), static_cast<Eigen::Index>(k % n));
    out << (k ? "," : "") << number(v.real()) << ',' << number(v.imag());
  }
  out << '\n';
  const auto header = expected_header(d, n);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t j = 0; j < samples; ++j) {
    const double t = system.period() * static_cast<double>(j) / static_cast<double>(samples);
    out << number(t);
    for (const CMatrix& m : {system.drift(t), system.noise_matrix(t)}) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) out << ',' << number(m(r, c).real()) << ',' << number(m(r, c).imag());
      }
    }
    out << '\n';
  }
}

}  // namespace floqspec

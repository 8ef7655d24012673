#include "feller/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <initializer_list>

namespace feller {
namespace {

class RowWriter {
 public:
  RowWriter(std::ostream& os, char delimiter) : os_(os), delimiter_(delimiter) {}

  RowWriter& cell(const std::string& s) {
    if (!first_) os_ << delimiter_;
    os_ << s;
    first_ = false;
    return *this;
  }
  void end() {
    os_ << '\n';
    first_ = true;
  }

 private:
  std::ostream& os_;
  char delimiter_;
  bool first_ = true;
};

void write_preamble(std::ostream& os, const Metadata& meta, const CsvFormat& fmt,
                    std::initializer_list<const char*> header) {
  for (const auto& [key, value] : meta) os << "# " << key << '=' << value << '\n';
  RowWriter row(os, fmt.delimiter);
  for (const char* h : header) row.cell(h);
  row.end();
}

std::string num(double v, const CsvFormat& fmt, int decimals = 2) {
  if (std::isnan(v)) return "";
  return fmt.round ? format_fixed(v, decimals) : format_number(v);
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string out(buf);
  // Avoid "-0.00" for values that round to zero.
  if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-') out.erase(0, 1);
  return out;
}

void write_survival_csv(std::ostream& os, const SurvivalReport& report, const CsvFormat& fmt,
                        const Metadata& meta) {
  write_preamble(os, meta, fmt, {"param", "t", "theo_pct", "sim_pct", "stderr_pct"});
  RowWriter row(os, fmt.delimiter);
  for (const auto& r : report.rows) {
    row.cell(format_number(r.parameter))
        .cell(format_number(r.time))
        .cell(num(100.0 * r.theoretical, fmt))
        .cell(num(100.0 * r.simulated, fmt))
        .cell(num(100.0 * r.std_error, fmt));
    row.end();
  }
}

void write_mean_position_csv(std::ostream& os, const MeanPositionReport& report,
                             const CsvFormat& fmt, const Metadata& meta) {
  Metadata all = meta;
  all.emplace_back("outside_ci", std::to_string(report.outside_count()));
  write_preamble(os, all, fmt, {"x0", "t", "xbar", "ci_lo", "ci_hi", "alpha"});
  RowWriter row(os, fmt.delimiter);
  for (const auto& r : report.rows) {
    row.cell(format_number(r.x0))
        .cell(format_number(r.time))
        .cell(num(r.mean, fmt))
        .cell(num(r.ci_lower, fmt))
        .cell(num(r.ci_upper, fmt))
        .cell(format_number(r.alpha));
    row.end();
  }
}

void write_hitting_csv(std::ostream& os, const HittingTimeResult& result, const CsvFormat& fmt,
                       const Metadata& meta) {
  Metadata all = meta;
  all.emplace_back("tstar", format_number(result.typical_time));
  all.emplace_back("censored", std::to_string(result.censored));
  all.emplace_back("n_paths", std::to_string(result.n_paths));
  write_preamble(os, all, fmt, {"bin_lo", "bin_hi", "count", "density", "f_theory"});
  RowWriter row(os, fmt.delimiter);
  const auto& h = result.histogram;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    row.cell(format_number(h.edges[i]))
        .cell(format_number(h.edges[i + 1]))
        .cell(std::to_string(h.counts[i]))
        .cell(num(h.value(i), fmt, 8))
        .cell(num(result.overlay[i], fmt, 8));
    row.end();
  }
}

void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble, const CsvFormat& fmt,
                     const Metadata& meta) {
  write_preamble(os, meta, fmt, {"path_id", "t", "x"});
  RowWriter row(os, fmt.delimiter);
  for (std::size_t p = 0; p < ensemble.positions.size(); ++p) {
    const auto& path = ensemble.positions[p];
    for (std::size_t i = 0; i < path.size(); ++i) {
      row.cell(std::to_string(p)).cell(format_number(ensemble.times[i])).cell(num(path[i], fmt));
      row.end();
    }
  }
}

void write_density_csv(std::ostream& os, const DensityValidationReport& r, const CsvFormat& fmt,
                       const Metadata& meta) {
  Metadata all = meta;
  all.emplace_back("atom_theoretical", format_number(r.atom_theoretical));
  all.emplace_back("atom_empirical", format_number(r.atom_empirical));
  all.emplace_back("atom_std_error", format_number(r.atom_std_error));
  all.emplace_back("max_density_deviation", format_number(r.max_density_deviation));
  all.emplace_back("max_density_z", format_number(r.max_density_z));
  all.emplace_back("ks_nonzero", format_number(r.ks_nonzero));
  all.emplace_back("ks_critical", format_number(r.ks_critical));
  all.emplace_back("max_cf_error", format_number(r.max_characteristic_error));
  for (const auto& cp : r.characteristic) {
    all.emplace_back("cf", format_number(cp.k) + ' ' + format_number(cp.empirical.real()) + ' ' +
                               format_number(cp.empirical.imag()) + ' ' +
                               format_number(cp.theoretical.real()) + ' ' +
                               format_number(cp.theoretical.imag()));
  }
  write_preamble(os, all, fmt, {"bin_lo", "bin_hi", "count", "density", "theory"});
  RowWriter row(os, fmt.delimiter);
  const auto& h = r.histogram;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    row.cell(format_number(h.edges[i]))
        .cell(format_number(h.edges[i + 1]))
        .cell(std::to_string(h.counts[i]))
        .cell(num(h.value(i), fmt, 8))
        .cell(num(r.bin_theoretical[i], fmt, 8));
    row.end();
  }
}

void write_exactness_csv(std::ostream& os, std::span<const ExactnessReport> reports,
                         double ks_limit, const CsvFormat& fmt, const Metadata& meta) {
  write_preamble(os, meta, fmt,
                 {"lambda", "sigma2", "x0", "dt", "n", "substeps", "atom_theo", "atom_exact",
                  "atom_euler", "atom_se", "ks", "ks_limit"});
  RowWriter row(os, fmt.delimiter);
  for (const auto& r : reports) {
    row.cell(format_number(r.lambda))
        .cell(format_number(r.process.sigma2))
        .cell(format_number(r.process.x0))
        .cell(format_number(r.dt))
        .cell(std::to_string(r.n_samples))
        .cell(std::to_string(r.substeps))
        .cell(num(r.atom_theoretical, fmt, 4))
        .cell(num(r.atom_exact, fmt, 4))
        .cell(num(r.atom_euler, fmt, 4))
        .cell(num(r.atom_std_error, fmt, 4))
        .cell(num(r.ks_exact_vs_euler, fmt, 4))
        .cell(format_number(ks_limit));
    row.end();
  }
}

}  // namespace feller

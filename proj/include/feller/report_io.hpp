#pragma once

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "feller/experiments.hpp"
#include "feller/sampler.hpp"

namespace feller {

struct CsvFormat {
  char delimiter = ',';
  bool round = false;  ///< 2-decimal presentation of percentages and positions
};

/// `# key=value` lines written ahead of the header row.
using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Shortest decimal string that round-trips to the same double.
std::string format_number(double value);
/// Fixed-point with `decimals` digits.
std::string format_fixed(double value, int decimals);

// Schemas:
//   survival : param, t, theo_pct, sim_pct, stderr_pct
//   meanpos  : x0, t, xbar, ci_lo, ci_hi, alpha
//   hitting  : bin_lo, bin_hi, count, density, f_theory
//   paths    : path_id, t, x
//   density  : bin_lo, bin_hi, count, density, theory
//   validate : lambda, sigma2, x0, dt, n, substeps, atom_theo, atom_exact,
//              atom_euler, atom_se, ks, ks_limit

void write_survival_csv(std::ostream& os, const SurvivalReport& report, const CsvFormat& fmt,
                        const Metadata& meta = {});
void write_mean_position_csv(std::ostream& os, const MeanPositionReport& report,
                             const CsvFormat& fmt, const Metadata& meta = {});
void write_hitting_csv(std::ostream& os, const HittingTimeResult& result, const CsvFormat& fmt,
                       const Metadata& meta = {});
void write_paths_csv(std::ostream& os, const PathEnsemble& ensemble, const CsvFormat& fmt,
                     const Metadata& meta = {});
void write_density_csv(std::ostream& os, const DensityValidationReport& report,
                       const CsvFormat& fmt, const Metadata& meta = {});
void write_exactness_csv(std::ostream& os, std::span<const ExactnessReport> reports,
                         double ks_limit, const CsvFormat& fmt, const Metadata& meta = {});

}  // namespace feller

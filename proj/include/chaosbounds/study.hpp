#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chaosbounds/bounds.hpp"
#include "chaosbounds/families.hpp"
#include "chaosbounds/io.hpp"

namespace chaosbounds {

inline constexpr const char* kToolVersion = "chaos-bounds 1.0.0";

/// Frozen verification configuration. The bands and the tail constant were
/// fixed by a pilot calibration run and are part of the acceptance
/// contract; changing them changes what "pass" means.
struct StudyConfig {
  std::uint64_t seed = 2026;
  std::int64_t samples = 0;  // 0 -> per-order defaults
  std::int64_t saa_samples = 4096;
  double constant = 8.0;  // tail bound calibration c
  int workers = 0;        // 0 -> hardware concurrency

  double moment_band = 50.0;      // empirical / RHS in [1/band, band]
  double decoupling_band = 20.0;  // coupled / decoupled
  double exp_diag_band = 10.0;    // exponential vs centered-square diagonal
  double prop8_band = 10.0;       // base C of the L_r closed-form bands
  double slope_lo = 0.4, slope_hi = 1.1;
  double witness_rate = 0.95;  // required s = 1 lower-witness rate

  Json to_json() const;
  static StudyConfig from_json(const Json& j);
};

struct StudyRecord {
  std::string study, check, family, space;
  Index n = 0, m = 0;
  double r = 0;               // Lr order when applicable
  double p = 0, t = 0, s = 0; // moment order / threshold / grid scale
  double estimate = 0, ci_low = 0, ci_high = 0;
  double bound = 0, bound2 = 0;
  double ratio = 0;
  double band_lo = 0, band_hi = 0;
  bool pass = true, skipped = false;
  std::string note;
  std::uint64_t seed = 0;
  std::int64_t n_samples = 0;
  double term_e_chaos = 0, term_e_lin_gij = 0, term_sup_x_e_lin = 0, term_u_hs = 0, term_v = 0;

  Json to_json() const;
  static StudyRecord from_json(const Json& j);
};

/// Structured result of a verification run. Everything needed to recompute
/// each pass flag is stored in the records; `wall_clock_sec` is the only
/// volatile field and is excluded from the canonical serialization used
/// for reproducibility comparisons.
struct StudyReport {
  std::string study;
  std::string tool_version = kToolVersion;
  Json config;
  double wall_clock_sec = 0;
  std::vector<StudyRecord> records;
  double min_ratio = 0, max_ratio = 0;
  bool pass = true;
  std::vector<std::string> notes;

  Json canonical_json() const;
  Json full_json() const;
};

enum class ReportFormat { Json, Csv, Markdown };
ReportFormat format_from_name(const std::string& name);

void emit_report(const StudyReport& report, ReportFormat format, std::ostream& out);
void emit_report_file(const StudyReport& report, ReportFormat format, const std::string& path);
StudyReport report_from_json(const Json& j);
StudyReport report_from_csv(std::istream& in);
StudyReport load_report(const std::string& path);  // by extension: .json / .csv

/// Recomputes every record verdict and the study pass flag from the stored
/// raw numbers; returns the recomputed pass flag and fails loudly (throws
/// ValidationError) if any stored flag disagrees.
bool recheck_report(const StudyReport& report);

// Default instance plans for the verification studies.
std::vector<FamilySpec> moment_study_families();
std::vector<FamilySpec> tail_study_families();
std::vector<FamilySpec> subgaussian_study_families();
std::vector<FamilySpec> conjecture_study_families();

/// Moment ratio study: empirical ||S||_p against the lower and upper RHS
/// evaluated with C = 1, per instance and moment order, plus the scalar
/// closed form and a log-log growth slope for scalar instances.
StudyReport run_moment_ratio_study(const std::vector<FamilySpec>& families,
                                   const std::vector<double>& p_grid, const StudyConfig& config);

/// Tail study: upper coverage strictly above the validity threshold and
/// shifted lower-bound witnesses at t = E + s U, with the subgaussian
/// variant on Rademacher / UniformScaled instances.
StudyReport run_tail_study(const std::vector<FamilySpec>& families, const StudyConfig& config);

/// Consistency suite: decoupling band, symmetrization, the diagonal
/// W-sandwich, the exponential-diagonal equivalence and the L_r
/// closed-form bands.
StudyReport run_consistency_suite(const StudyConfig& config);

/// Evidence study for the open two-sided conjecture on polytope norms:
/// reports LHS / RHS ratios only and never gates a pass flag.
StudyReport run_conjecture_study(const std::vector<FamilySpec>& polytope_instances,
                                 const std::vector<double>& p_grid, const StudyConfig& config);

struct SuiteResult {
  std::vector<StudyReport> reports;
  bool pass = true;
  double wall_clock_sec = 0;
};

/// The default verification suite: moment ratios, tails, consistency.
SuiteResult run_default_suite(const StudyConfig& config);

}  // namespace chaosbounds

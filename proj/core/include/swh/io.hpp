#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swh/bounds.hpp"
#include "swh/gradient.hpp"
#include "swh/recurrence.hpp"

namespace swh::io {

/// 17 significant digits; nan/inf as "nan"/"inf" (CSV) or null (JSON).
std::string format_double(double x);
std::string json_number(double x);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_coeffs_ndjson(const std::filesystem::path& path, const Trajectory& traj);
void write_bounds_csv(const std::filesystem::path& path, const std::vector<BoundReport>& reports);
void write_recurrence_csv(const std::filesystem::path& path, const RecurrenceReport& report);
void write_equilibria_ndjson(const std::filesystem::path& path, const std::vector<Equilibrium>& equilibria);

struct MorseSummaryRow {
  double a = 0.0;
  double b = 0.0;
  int r_zero = 0;
  std::size_t count_K0 = 0;
  double min_V = 0.0;
};

void write_morse_summary_csv(const std::filesystem::path& path, const std::vector<MorseSummaryRow>& rows);
void write_separation_csv(const std::filesystem::path& path, const std::vector<SeparationReport>& reports,
                          double threshold);

/// Column-oriented CSV reader for the files written above.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws when missing
  std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// One-line human summary of a recurrence report.
std::string verdict_line(const RecurrenceReport& report, const std::string& label);

}  // namespace swh::io

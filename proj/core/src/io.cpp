#include "swh/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "swh/error.hpp"

namespace swh::io {
namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  return out;
}

std::string json_array(std::span<const double> values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += json_number(values[i]);
  }
  s += ']';
  return s;
}

std::string json_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

std::string json_number(double x) { return std::isfinite(x) ? fmt::format("{:.17g}", x) : "null"; }

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  out << "t,l2,l4,h2,V,fingerprint\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const NormBundle& n = traj.norms[i];
    const std::string V = i < traj.lyapunov.size() ? format_double(traj.lyapunov[i]) : "";
    out << format_double(traj.times[i]) << ',' << format_double(n.l2) << ',' << format_double(n.l4) << ','
        << format_double(n.h2) << ',' << V << ',' << format_double(traj.fingerprint[i]) << '\n';
  }
}

void write_coeffs_ndjson(const std::filesystem::path& path, const Trajectory& traj) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << "{\"t\":" << json_number(traj.times[i]) << ",\"coeffs\":" << json_array(traj.states[i].coeffs())
        << "}\n";
  }
}

void write_bounds_csv(const std::filesystem::path& path, const std::vector<BoundReport>& reports) {
  auto out = open_out(path);
  out << "inequality,max_violation,margin_min,applicable\n";
  for (const auto& r : reports) {
    out << r.id << ',' << format_double(r.max_violation) << ',' << format_double(r.margin_min) << ','
        << (r.applicable ? "true" : "false") << '\n';
  }
}

void write_recurrence_csv(const std::filesystem::path& path, const RecurrenceReport& report) {
  auto out = open_out(path);
  out << "eps,ell,max_gap,witness_count\n";
  for (const auto& row : report.eps_ell) {
    out << format_double(row.eps) << ',' << format_double(row.ell) << ',' << format_double(row.max_gap) << ','
        << row.witness_count << '\n';
  }
}

void write_equilibria_ndjson(const std::filesystem::path& path, const std::vector<Equilibrium>& equilibria) {
  auto out = open_out(path);
  for (const auto& e : equilibria) {
    std::string spectrum = "[";
    for (std::size_t i = 0; i < e.spectrum.size(); ++i) {
      if (i) spectrum += ',';
      spectrum += fmt::format("[{},{}]", json_number(e.spectrum[i].value), e.spectrum[i].multiplicity);
    }
    spectrum += ']';
    out << "{\"id\":" << json_string(e.id) << ",\"kind\":" << json_string(to_string(e.model.kind))
        << ",\"a\":" << json_number(e.model.a) << ",\"b\":" << json_number(e.model.b)
        << ",\"V\":" << json_number(e.V) << ",\"residual\":" << json_number(e.residual)
        << ",\"l2\":" << json_number(l2_norm(e.state)) << ",\"unstable_dim\":" << e.unstable_dim
        << ",\"marginal_dim\":" << e.marginal_dim << ",\"spectrum\":" << spectrum
        << ",\"coeffs\":" << json_array(e.state.coeffs()) << "}\n";
  }
}

void write_morse_summary_csv(const std::filesystem::path& path, const std::vector<MorseSummaryRow>& rows) {
  auto out = open_out(path);
  out << "a,b,r_zero,count_K0,min_V\n";
  for (const auto& r : rows) {
    out << format_double(r.a) << ',' << format_double(r.b) << ',' << r.r_zero << ',' << r.count_K0 << ','
        << format_double(r.min_V) << '\n';
  }
}

void write_separation_csv(const std::filesystem::path& path, const std::vector<SeparationReport>& reports,
                          double threshold) {
  auto out = open_out(path);
  out << "first,second,min_shift_distance,best_shift,threshold,separated\n";
  for (const auto& r : reports) {
    out << r.first_id << ',' << r.second_id << ',' << format_double(r.min_shift_distance) << ','
        << format_double(r.best_shift) << ',' << format_double(threshold) << ','
        << (r.min_shift_distance >= threshold ? "true" : "false") << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(fmt::format("missing column '{}'", name));
}

std::vector<double> CsvTable::numbers(const std::string& name) const {
  const std::size_t c = column(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(c < r.size() && !r[c].empty() ? std::stod(r[c]) : std::nan(""));
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  CsvTable t;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!l.empty() && l.back() == ',') cells.emplace_back();
    return cells;
  };
  if (std::getline(in, line)) t.header = split(line);
  while (std::getline(in, line)) {
    if (!line.empty()) t.rows.push_back(split(line));
  }
  return t;
}

std::string verdict_line(const RecurrenceReport& report, const std::string& label) {
  std::string eps;
  for (const auto& row : report.eps_ell) {
    eps += fmt::format(" eps={:g}:ell={:.4g}", row.eps, row.ell);
  }
  return fmt::format("{}: {} (horizon {:g}, norm {}){}", label, to_string(report.verdict), report.horizon,
                     to_string(report.norm_used), eps);
}

}  // namespace swh::io

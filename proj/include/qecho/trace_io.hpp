#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qecho/errors.hpp"
#include "qecho/format.hpp"
#include "qecho/polarization.hpp"

namespace qecho {

// CSV column layout used by every trace export:
//   t, re_P, im_P, abs_P_normalized
// where re_P/im_P are the raw ensemble sums and the last column is
// |P| / ensemble_count. Numbers are printed with %.17g so a read-back
// reproduces the doubles bit-exactly.
inline void export_trace(const PolarizationTrace& trace, std::ostream& out) {
  using detail::g17;
  out << "t,re_P,im_P,abs_P_normalized\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    const std::complex<double> v = trace.values[k];
    out << g17(trace.grid.time(k)) << ',' << g17(v.real()) << ',' << g17(v.imag())
        << ',' << g17(std::abs(v) / static_cast<double>(trace.ensemble_count)) << '\n';
  }
}

inline void export_trace(const PolarizationTrace& trace,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open trace file for writing: " + path.string());
  export_trace(trace, out);
  if (!out) throw IoError("short write on trace file: " + path.string());
}

struct TraceRow {
  double t = 0.0;
  double re = 0.0;
  double im = 0.0;
  double abs_normalized = 0.0;
};

inline std::vector<TraceRow> load_trace_rows(std::istream& in) {
  std::vector<TraceRow> rows;
  std::string line;
  if (!std::getline(in, line)) throw IoError("trace file is empty");
  if (line != "t,re_P,im_P,abs_P_normalized") {
    throw IoError("trace file has unexpected header: " + line);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    TraceRow row;
    double* fields[4] = {&row.t, &row.re, &row.im, &row.abs_normalized};
    std::size_t pos = 0;
    for (int f = 0; f < 4; ++f) {
      const std::size_t comma = line.find(',', pos);
      const bool last = (f == 3);
      if (last != (comma == std::string::npos)) {
        throw IoError("trace file line " + std::to_string(lineno) +
                      ": expected 4 fields");
      }
      const std::string token =
          last ? line.substr(pos) : line.substr(pos, comma - pos);
      char* end = nullptr;
      *fields[f] = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || token.empty()) {
        throw IoError("trace file line " + std::to_string(lineno) +
                      ": bad number '" + token + "'");
      }
      pos = comma + 1;
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::vector<TraceRow> load_trace_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path.string());
  return load_trace_rows(in);
}

// One sweep result row. `param` is the swept quantity (detuning range in meV,
// or trained-interval count m). Non-finite metrics indicate a diverged run and
// are serialized as "inf".
struct SweepRow {
  double param = 0.0;
  double dt = 0.0;
  double l2 = 0.0;
  double rel_peak = 0.0;
};

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::string& param_name, std::ostream& out) {
  using detail::g17;
  auto cell = [](double v) {
    return std::isfinite(v) ? detail::g17(v) : std::string("inf");
  };
  out << param_name << ",dt,l2,rel_peak\n";
  for (const SweepRow& row : rows) {
    out << cell(row.param) << ',' << g17(row.dt) << ',' << cell(row.l2) << ','
        << cell(row.rel_peak) << '\n';
  }
}

inline void write_sweep_csv(const std::vector<SweepRow>& rows,
                            const std::string& param_name,
                            const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open sweep file for writing: " + path.string());
  write_sweep_csv(rows, param_name, out);
  if (!out) throw IoError("short write on sweep file: " + path.string());
}

// Plain key=value report, one entry per line.
inline void write_report(const std::vector<std::pair<std::string, std::string>>& entries,
                         std::ostream& out) {
  for (const auto& [key, value] : entries) {
    out << key << '=' << value << '\n';
  }
}

inline void write_report(const std::vector<std::pair<std::string, std::string>>& entries,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open report file for writing: " + path.string());
  write_report(entries, out);
  if (!out) throw IoError("short write on report file: " + path.string());
}

}  // namespace qecho

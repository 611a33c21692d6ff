#pragma once

#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "monojunta/montecarlo.hpp"

namespace monojunta {

/// One CSV row. stderr and n_samples are present exactly when mode == "mc".
struct ResultRow {
  std::string experiment_id;
  std::size_t d = 0;
  std::size_t t = 0;
  std::size_t m = 0;
  std::optional<std::uint64_t> seed;
  std::string family_ref;
  std::string quantity;
  std::optional<std::size_t> k;
  std::string mode;
  double value = 0;
  std::optional<double> std_error;
  std::optional<std::size_t> n_samples;
};

inline constexpr std::string_view kCsvHeader =
    "experiment_id,d,t,m,seed,family_ref,quantity,k,mode,value,stderr,n_samples";

inline const std::vector<std::string>& known_quantities() {
  static const std::vector<std::string> q = {"p0",         "p1",         "p2plus",          "mean_T",
                                             "second_factorial", "moment_gap", "total_influence",
                                             "junta_distance",   "lemma5_bound", "sensitivity_mean"};
  return q;
}

/// %.12g, the fixed real format of the CSV.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string to_csv_line(const ResultRow& r) {
  std::string s;
  s += csv_field(r.experiment_id) + ',';
  s += std::to_string(r.d) + ',' + std::to_string(r.t) + ',' + std::to_string(r.m) + ',';
  s += (r.seed ? std::to_string(*r.seed) : "") + ',';
  s += csv_field(r.family_ref) + ',';
  s += r.quantity + ',';
  s += (r.k ? std::to_string(*r.k) : "") + ',';
  s += r.mode + ',';
  s += format_real(r.value) + ',';
  s += (r.std_error ? format_real(*r.std_error) : "") + ',';
  s += r.n_samples ? std::to_string(*r.n_samples) : "";
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << to_csv_line(r) << '\n';
}

/// Row skeleton for quantity `q` of a family, filled from an exact value.
inline ResultRow exact_row(ResultRow base, std::string q, double value, std::optional<std::size_t> k = {}) {
  base.quantity = std::move(q);
  base.mode = "exact";
  base.value = value;
  base.k = k;
  base.std_error.reset();
  base.n_samples.reset();
  return base;
}

inline ResultRow mc_row(ResultRow base, std::string q, const EstimateResult& e, std::optional<std::size_t> k = {}) {
  base.quantity = std::move(q);
  base.mode = "mc";
  base.value = e.estimate;
  base.k = k;
  base.std_error = e.std_error;
  base.n_samples = e.n_samples;
  return base;
}

}  // namespace monojunta

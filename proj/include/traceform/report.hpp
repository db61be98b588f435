#pragma once

// CSV and JSON serialization of experiment reports. CSV bodies are
// deterministic: numbers use %.17g and the only header line is a comment
// carrying the schema version and config hash.

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/spectra.hpp"

namespace traceform::report {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// JSON cannot hold inf; represent it as a string.
inline json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& config_hash, std::vector<std::string> columns) : columns_(columns.size()) {
    text_ = "# schema_version=" + std::to_string(kSchemaVersion) + " config_hash=" + config_hash + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
    text_ += "\n";
  }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw Error(ErrorKind::InvalidArgument, "csv row has the wrong width");
    for (std::size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
    text_ += "\n";
  }

  const std::string& str() const noexcept { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << text;
}

inline std::string convergence_csv(const ConvergenceReport& rep, const std::string& hash) {
  CsvWriter csv(hash, {"n", "k", "E_n_k", "bound_n", "gap_k", "ratio_k"});
  for (const auto& r : rep.rows) {
    csv.row({std::to_string(r.n), std::to_string(r.k), num(r.energy), num(r.bound), num(r.gap), num(r.ratio)});
  }
  return csv.str();
}

inline json convergence_json(const ConvergenceReport& rep, const std::string& hash) {
  const auto& s = rep.summary;
  json terms = json::array();
  for (const auto& t : rep.terms) {
    terms.push_back({{"n", t.n},
                     {"support", t.support},
                     {"bound", jnum(t.bound)},
                     {"ground_energy", jnum(t.ground_energy)},
                     {"operator_norm", jnum(t.operator_norm)},
                     {"identity_residual", jnum(t.identity_residual)},
                     {"interval_counts", t.interval_counts}});
  }
  json stable = json::array();
  for (const auto& f : s.stable_from) stable.push_back(f ? json(*f) : json(nullptr));
  json limit = json::array();
  for (std::size_t k = 0; k <= static_cast<std::size_t>(rep.k_max); ++k) limit.push_back(rep.limit_energies[k]);
  return {{"schema_version", kSchemaVersion},
          {"config_hash", hash},
          {"direction", rep.direction == Direction::Increasing ? "increasing" : "decreasing"},
          {"k_max", rep.k_max},
          {"limit_energies", limit},
          {"terms", terms},
          {"summary",
           {{"empirical_c", jnum(s.empirical_c)},
            {"converged", s.converged},
            {"gap_monotone", s.gap_monotone},
            {"ground_monotone", s.ground_monotone},
            {"ground_strict", s.ground_strict},
            {"identity_max_residual", jnum(s.identity_max_residual)},
            {"limit_counts", s.limit_counts},
            {"stable_from", stable}}}};
}

}  // namespace traceform::report

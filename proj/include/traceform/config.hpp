#pragma once

// JSON schema for kernels, measures, sequences and grids.
//
//   {"kernel": {"type": "exponential1d" | "newtonian" | "riesz", "d": 3, "alpha": 0.5}}
//   {"type": "atomic", "points": [0, 1] | [[x, y, z], ...], "weights": [...]}
//   {"type": "spheres", "radii": [...], "masses": [...]}
//   {"type": "lebesgue", "lo": 0, "hi": 1}                       (Kato tests only)
//   {"family": "truncated-exponential", "rate": 0.5, "n_max": 40, "schedule": [...]}
//   {"family": "thinning-shell", "slices": 64, "depth": 0.5, "schedule": [...]}
//   {"family": "explicit", "direction": "increasing", "labels": [...], "terms": [...], "limit": {...}}
//   {"grid": {"lo": -45, "hi": 45, "step": 0.01, "extra_points": [...]}}
//   {"grid": {"r_max": 3, "step": 0.01, "extra_radii": [...]}}

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "traceform/errors.hpp"
#include "traceform/kato.hpp"
#include "traceform/kernels.hpp"
#include "traceform/measures.hpp"
#include "traceform/potentials.hpp"

namespace traceform::config {

using json = nlohmann::json;

inline json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigParse, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, path + ": " + e.what());
  }
}

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw Error(ErrorKind::ConfigParse, std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigParse, std::string("key '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

inline Kernel parse_kernel(const json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "exponential1d") return Kernel::exponential1d();
  if (type == "newtonian") return Kernel::newtonian(get_or<int>(j, "d", 3));
  if (type == "riesz") return Kernel::riesz(get<int>(j, "d"), get<double>(j, "alpha"));
  throw Error(ErrorKind::ConfigParse, "unknown kernel type '" + type + "'");
}

inline std::vector<Point> parse_points(const json& j) {
  if (!j.is_array()) throw Error(ErrorKind::ConfigParse, "'points' must be an array");
  std::vector<Point> pts;
  for (const auto& p : j) {
    if (p.is_number()) {
      pts.push_back({p.get<double>()});
    } else if (p.is_array()) {
      pts.push_back(p.get<Point>());
    } else {
      throw Error(ErrorKind::ConfigParse, "point must be a number or an array of numbers");
    }
  }
  return pts;
}

inline Measure parse_measure(const json& j) {
  const auto type = get<std::string>(j, "type");
  if (type == "atomic") {
    return AtomicMeasure::create(parse_points(j.at("points")), get<std::vector<double>>(j, "weights"));
  }
  if (type == "spheres") {
    return SphereFamilyMeasure::create(get<std::vector<double>>(j, "radii"), get<std::vector<double>>(j, "masses"));
  }
  throw Error(ErrorKind::ConfigParse, "unsupported measure type '" + type + "'");
}

inline kato::KatoMeasure parse_kato_measure(const json& j) {
  if (get<std::string>(j, "type") == "lebesgue") {
    const double lo = get<double>(j, "lo"), hi = get<double>(j, "hi");
    if (!(hi > lo)) throw Error(ErrorKind::ConfigParse, "lebesgue interval needs hi > lo");
    return kato::LebesgueInterval{lo, hi};
  }
  return kato::from_measure(parse_measure(j));
}

inline Direction parse_direction(const std::string& s) {
  if (s == "increasing") return Direction::Increasing;
  if (s == "decreasing") return Direction::Decreasing;
  throw Error(ErrorKind::ConfigParse, "direction must be 'increasing' or 'decreasing'");
}

inline MeasureSequence parse_sequence(const json& j) {
  const auto family = get<std::string>(j, "family");
  if (family == "truncated-exponential") {
    const int n_max = get<int>(j, "n_max");
    std::vector<int> schedule;
    if (j.contains("schedule")) {
      schedule = get<std::vector<int>>(j, "schedule");
    } else {
      for (int n = 0; n <= n_max; ++n) schedule.push_back(n);
    }
    return truncated_exponential(get<double>(j, "rate"), n_max, schedule);
  }
  if (family == "thinning-shell") {
    return thinning_shell_sequence(get<int>(j, "slices"), get<std::vector<int>>(j, "schedule"),
                                   get_or<double>(j, "depth", 0.5));
  }
  if (family == "explicit") {
    std::vector<Measure> terms;
    for (const auto& t : j.at("terms")) terms.push_back(parse_measure(t));
    std::vector<int> labels;
    if (j.contains("labels")) {
      labels = get<std::vector<int>>(j, "labels");
    } else {
      for (std::size_t i = 0; i < terms.size(); ++i) labels.push_back(static_cast<int>(i));
    }
    return MeasureSequence::create(std::move(labels), std::move(terms), parse_measure(j.at("limit")),
                                   parse_direction(get_or<std::string>(j, "direction", "increasing")));
  }
  throw Error(ErrorKind::ConfigParse, "unknown sequence family '" + family + "'");
}

inline EvaluationGrid parse_grid(const json& j) {
  if (j.contains("r_max")) {
    return EvaluationGrid::radial(get<double>(j, "r_max"), get_or<double>(j, "step", 0.01),
                                  get_or<std::vector<double>>(j, "extra_radii", {}));
  }
  return EvaluationGrid::uniform_line(get<double>(j, "lo"), get<double>(j, "hi"), get_or<double>(j, "step", 0.01),
                                      get_or<std::vector<double>>(j, "extra_points", {}));
}

/// Grid used when a config omits one: 1D line around the atoms, or radii
/// [0, 2 R_max] for sphere families, step 0.01. Atoms of higher dimension
/// are evaluated on their own support only.
inline EvaluationGrid default_grid(const Measure& m) {
  if (const auto* a = std::get_if<AtomicMeasure>(&m)) {
    if (a->dimension() == 1 && !a->empty()) {
      double lo = a->points().front()[0], hi = lo;
      for (const auto& p : a->points()) {
        lo = std::min(lo, p[0]);
        hi = std::max(hi, p[0]);
      }
      return EvaluationGrid::uniform_line(lo - 5.0, hi + 5.0, 0.01).with_support(m);
    }
    return EvaluationGrid().with_support(m);
  }
  const auto& s = std::get<SphereFamilyMeasure>(m);
  return EvaluationGrid::radial(s.empty() ? 1.0 : 2.0 * s.radii().back(), 0.01).with_support(m);
}

/// FNV-1a 64 of the compact dump (keys are sorted by nlohmann::json).
inline std::string config_hash(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace traceform::config

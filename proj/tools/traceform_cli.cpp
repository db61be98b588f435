// traceform: command-line driver for trace-form spectra, convergence
// experiments and the accompanying certification checks.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 a certification
// check failed (reports are still written).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "traceform/traceform.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace traceform;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kCertificationFailed = 2;

struct Outputs {
  fs::path csv;
  fs::path json;
};

// --out may name a .csv file, a .json file or a directory.
Outputs resolve_outputs(const std::string& out, const std::string& stem) {
  if (out.empty()) return {};
  fs::path p(out);
  if (p.extension() == ".csv") return {p, fs::path(p).replace_extension(".json")};
  if (p.extension() == ".json") return {fs::path(p).replace_extension(".csv"), p};
  return {p / (stem + ".csv"), p / (stem + ".json")};
}

int finish(const json& summary, const std::string& csv, const Outputs& out, bool certified) {
  if (!out.json.empty()) report::write_file(out.json, summary.dump(2) + "\n");
  if (!out.csv.empty() && !csv.empty()) report::write_file(out.csv, csv);
  std::cout << summary.dump(2) << "\n";
  return certified ? kOk : kCertificationFailed;
}

json stamp(json j, const std::string& hash, unsigned threads, long seed) {
  j["schema_version"] = report::kSchemaVersion;
  j["config_hash"] = hash;
  j["threads"] = threads;
  j["seed"] = seed;
  return j;
}

std::vector<std::pair<double, double>> parse_intervals(const json& cfg) {
  std::vector<std::pair<double, double>> out;
  if (!cfg.contains("count_intervals")) return out;
  for (const auto& iv : cfg.at("count_intervals")) {
    if (!iv.is_array() || iv.size() != 2) throw Error(ErrorKind::ConfigParse, "count_intervals entries are [a, b]");
    out.emplace_back(iv[0].get<double>(), iv[1].get<double>());
  }
  return out;
}

struct Globals {
  unsigned threads = 1;
  long seed = 0;
};

int cmd_spectrum(const std::string& cfg_path, const std::string& out, const Globals& g) {
  const json cfg = config::load_file(cfg_path);
  const Kernel kernel = config::parse_kernel(cfg.at("kernel"));
  const Measure mu = config::parse_measure(cfg.at("measure"));
  const EvaluationGrid grid =
      cfg.contains("grid") ? config::parse_grid(cfg.at("grid")).with_support(mu) : config::default_grid(mu);
  const double mtol = config::get_or<double>(cfg, "multiplicity_tol", 1e-8);
  const auto hash = config::config_hash(cfg);

  const auto op = operator_matrix(kernel, mu);
  const auto spec = eigendecompose(op, mtol);
  const auto hardy = hardy_constant_bounds(kernel, mu, grid);

  const auto n = op.size();
  const double orth = n ? (spec.eigenvectors.transpose() * spec.eigenvectors - Eigen::MatrixXd::Identity(n, n))
                              .cwiseAbs()
                              .maxCoeff()
                        : 0.0;
  double resid = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto v = spec.eigenvectors.col(k);
    resid = std::max(resid, (op.matrix * v - spec.lambdas[static_cast<std::size_t>(k)] * v).norm());
  }
  const double snorm = n ? spec.lambdas.front() : 0.0;

  report::CsvWriter csv(hash, {"k", "lambda", "energy", "group", "group_size"});
  for (std::size_t gi = 0; gi < spec.groups.size(); ++gi) {
    const auto& grp = spec.groups[gi];
    for (std::size_t k = grp.first; k < grp.first + grp.count; ++k) {
      csv.row({std::to_string(k), report::num(spec.lambdas[k]), report::num(spec.energies[k]), std::to_string(gi),
               std::to_string(grp.count)});
    }
  }
  const bool sandwich = hardy.lower <= hardy.upper * (1.0 + 1e-12) + 1e-15;
  const bool orth_ok = orth < 1e-10;
  const bool resid_ok = resid <= 1e-10 * std::max(snorm, 1e-300);
  json j = {{"command", "spectrum"},
            {"kernel", kernel.name()},
            {"support", n},
            {"hardy_lower", hardy.lower},
            {"hardy_upper", hardy.upper},
            {"grid_step", grid.step()},
            {"orthonormality_error", orth},
            {"max_residual", resid},
            {"certifications", {{"hardy_sandwich", sandwich}, {"orthonormal", orth_ok}, {"residual", resid_ok}}}};
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "spectrum"),
                sandwich && orth_ok && resid_ok);
}

int cmd_converge(const std::string& cfg_path, const std::string& out, const Globals& g) {
  const json cfg = config::load_file(cfg_path);
  const Kernel kernel = config::parse_kernel(cfg.at("kernel"));
  const MeasureSequence seq = config::parse_sequence(cfg.at("sequence"));
  const EvaluationGrid grid =
      cfg.contains("grid") ? config::parse_grid(cfg.at("grid")) : config::default_grid(seq.limit());
  ConvergenceOptions opt;
  opt.multiplicity_tol = config::get_or<double>(cfg, "multiplicity_tol", 1e-8);
  opt.convergence_tol = config::get_or<double>(cfg, "convergence_tol", 1e-6);
  opt.count_intervals = parse_intervals(cfg);
  opt.threads = g.threads;
  const int k_max = config::get_or<int>(cfg, "k_max", 0);
  const auto hash = config::config_hash(cfg);

  const auto rep = convergence_experiment(kernel, seq, k_max, grid, opt);
  const auto& s = rep.summary;
  bool ratios_finite = true, cap_ok = true;
  for (const auto& r : rep.rows) {
    ratios_finite = ratios_finite && std::isfinite(r.ratio);
    if (r.k == 0) cap_ok = cap_ok && r.ratio <= 1.0 + 1e-9;
  }
  const bool converged = std::all_of(s.converged.begin(), s.converged.end(), [](bool b) { return b; });
  const bool monotone = std::all_of(s.gap_monotone.begin(), s.gap_monotone.end(), [](bool b) { return b; });
  const bool identity = s.identity_max_residual < 1e-10;
  json j = report::convergence_json(rep, hash);
  j["command"] = "converge";
  j["certifications"] = {{"converged", converged},       {"gap_monotone", monotone},
                         {"ratios_finite", ratios_finite}, {"ground_ratio_cap", cap_ok},
                         {"ground_monotone", s.ground_monotone}, {"ground_identity", identity}};
  return finish(stamp(j, hash, g.threads, g.seed), report::convergence_csv(rep, hash), resolve_outputs(out, "converge"),
                converged && monotone && ratios_finite && cap_ok && s.ground_monotone && identity);
}

int cmd_graph1d(double rate, int n, double tol, const std::string& out, const Globals& g) {
  const auto weights = exponential_weights(rate, n);
  const auto cv = graph1d::cross_validate(weights, n, tol);
  const json args = {{"rate", rate}, {"n", n}, {"tol", tol}};
  const auto hash = config::config_hash(args);
  report::CsvWriter csv(hash, {"k", "graph_energy", "kernel_energy"});
  for (std::size_t k = 0; k < cv.graph_energies.size(); ++k) {
    csv.row({std::to_string(k), report::num(cv.graph_energies[k]), report::num(cv.kernel_energies[k])});
  }
  json j = {{"command", "graph1d-validate"},
            {"args", args},
            {"max_relative_discrepancy", cv.max_relative_discrepancy},
            {"multiplicities_equal", cv.multiplicities_equal},
            {"displayed_form_discrepancy", cv.displayed_form_discrepancy},
            {"pass", cv.pass}};
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "graph1d"), cv.pass);
}

int cmd_ball_eig(int m, double tol, const std::string& out, const Globals& g) {
  const auto ev = ball::ball_eigenvalue(m, tol);
  const json args = {{"m", m}, {"tol", tol}};
  const auto hash = config::config_hash(args);
  json j = {{"command", "ball-eig"},   {"m", m},
            {"value", ev.value},       {"multiplicity", ev.multiplicity},
            {"tail_bound", ev.tail_bound}, {"terms", ev.zeros.size()}};
  return finish(stamp(j, hash, g.threads, g.seed), "", resolve_outputs(out, "ball_eig"), ev.tail_bound < tol);
}

int cmd_annulus(const std::vector<int>& ns, int qp, const std::string& out, const Globals& g) {
  const json args = {{"n", ns}, {"quadrature_points", qp}};
  const auto hash = config::config_hash(args);
  report::CsvWriter csv(hash, {"n", "gap", "argmax_radius"});
  std::vector<double> xs, ys;
  for (int n : ns) {
    const auto gap = ball::annulus_gap_detail(n, qp);
    csv.row({std::to_string(n), report::num(gap.value), report::num(gap.argmax_radius)});
    xs.push_back(n);
    ys.push_back(gap.value);
  }
  json j = {{"command", "annulus-gap"}, {"args", args}, {"values", ys}};
  bool ok = true;
  if (xs.size() >= 2) {
    const double slope = ball::loglog_slope(xs, ys);
    j["loglog_slope"] = slope;
    ok = std::abs(slope + 1.0) <= 0.1;
    j["certifications"] = {{"slope_within_0.1_of_minus_1", ok}};
  }
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "annulus_gap"), ok);
}

std::function<double(double)> radial_data(const json& cfg) {
  if (!cfg.contains("u")) return [](double) { return 1.0; };
  const auto& u = cfg.at("u");
  if (u.is_number()) {
    const double c = u.get<double>();
    return [c](double) { return c; };
  }
  throw Error(ErrorKind::ConfigParse, "'u' must be a constant (radial data per sphere goes in 'u_values')");
}

int cmd_stationary_solve(const std::string& cfg_path, std::optional<double> alpha_flag, const std::string& out,
                         const Globals& g) {
  json cfg = config::load_file(cfg_path);
  const Measure mu = config::parse_measure(cfg.at("measure"));
  const auto* spheres = std::get_if<SphereFamilyMeasure>(&mu);
  if (!spheres) throw Error(ErrorKind::ConfigParse, "stationary solve needs a 'spheres' measure");
  const double alpha = alpha_flag ? *alpha_flag : config::get_or<double>(cfg, "alpha", 1.0);
  cfg["alpha"] = alpha;
  const auto hash = config::config_hash(cfg);

  std::vector<double> u;
  if (cfg.contains("u_values")) {
    u = config::get<std::vector<double>>(cfg, "u_values");
  } else {
    const auto f = radial_data(cfg);
    for (double r : spheres->radii()) u.push_back(f(r));
  }
  const auto field = stationary::stationary_solve(*spheres, alpha, u);

  const double r_max = config::get_or<double>(cfg, "r_max", 2.0 * spheres->radii().back());
  const double step = config::get_or<double>(cfg, "step", 0.01);
  report::CsvWriter csv(hash, {"r", "u_n"});
  std::vector<double> radii;
  const auto count = static_cast<long>(std::floor(r_max / step + 1e-9));
  for (long i = 0; i <= count; ++i) {
    const double r = static_cast<double>(i) * step;
    radii.push_back(r);
    csv.row({report::num(r), report::num(field(r))});
  }
  const double identity = stationary::resolvent_identity_residual(field, radii);

  // off-support harmonicity: certified inside the innermost sphere and beyond twice the outermost,
  // reported everywhere at least 4h from a sphere
  const double h = 1e-3;
  const auto [rmin, rmax] = std::minmax_element(spheres->radii().begin(), spheres->radii().end());
  std::vector<Point> pts, pts_all;
  for (double r : radii) {
    const bool clear = std::all_of(spheres->radii().begin(), spheres->radii().end(),
                                   [&](double rad) { return std::abs(r - rad) > 4.0 * h; });
    if (!clear || r <= 4.0 * h) continue;
    const Point x{r / std::sqrt(3.0), r / std::sqrt(3.0), r / std::sqrt(3.0)};
    pts_all.push_back(x);
    if (r < *rmin || r >= 2.0 * *rmax) pts.push_back(x);
  }
  const double harm = pts.empty() ? 0.0 : stationary::harmonicity_residual(field, pts, h);
  const double harm_all = pts_all.empty() ? 0.0 : stationary::harmonicity_residual(field, pts_all, h);
  const bool ok = identity < 1e-10 && harm < 1e-6;
  json j = {{"command", "stationary"},
            {"alpha", alpha},
            {"sphere_values", field.sphere_values()},
            {"identity_residual", identity},
            {"harmonicity_residual", harm},
            {"harmonicity_residual_all_off_support", harm_all},
            {"far_field_charge", field.far_field_charge()},
            {"certifications", {{"identity", identity < 1e-10}, {"harmonic_off_support", harm < 1e-6}}}};
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "stationary"), ok);
}

int cmd_stationary_compare(const std::string& cfg_path, std::optional<double> alpha_flag, const std::string& out,
                           const Globals& g) {
  json cfg = config::load_file(cfg_path);
  const MeasureSequence seq = config::parse_sequence(cfg.at("sequence"));
  const double alpha = alpha_flag ? *alpha_flag : config::get_or<double>(cfg, "alpha", 1.0);
  cfg["alpha"] = alpha;
  const auto hash = config::config_hash(cfg);
  const EvaluationGrid grid =
      cfg.contains("grid") ? config::parse_grid(cfg.at("grid")) : EvaluationGrid::radial(3.0, 0.01);
  const auto rep = stationary::stationary_compare(seq, alpha, radial_data(cfg), grid);
  report::CsvWriter csv(hash, {"n", "sup_difference", "bound", "pass"});
  for (const auto& r : rep.rows) {
    csv.row({std::to_string(r.n), report::num(r.sup_difference), report::num(r.bound), r.pass ? "1" : "0"});
  }
  json j = {{"command", "stationary-compare"}, {"alpha", alpha}, {"all_pass", rep.all_pass}, {"monotone", rep.monotone}};
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "stationary_compare"),
                rep.all_pass);
}

int cmd_kato(const std::string& kernel_name, int d, double alpha, const std::string& measure_path,
             const std::vector<double>& radii, double tol, std::optional<double> growth_s, double step,
             const std::string& out, const Globals& g) {
  json kspec = {{"type", kernel_name}, {"d", d}};
  if (kernel_name == "riesz") kspec["alpha"] = alpha;
  const Kernel kernel = config::parse_kernel(kspec);
  const json mcfg = config::load_file(measure_path);
  const auto mu = config::parse_kato_measure(mcfg);

  const auto* line = std::get_if<kato::LebesgueInterval>(&mu);
  const EvaluationGrid grid = line ? EvaluationGrid::uniform_line(line->lo - 1.0, line->hi + 1.0, step)
                                   : config::default_grid(config::parse_measure(mcfg));
  const json args = {{"kernel", kspec}, {"measure", mcfg}, {"radii", radii}, {"tol", tol}};
  const auto hash = config::config_hash(args);
  auto rep = kato::kato_check(kernel, mu, radii, grid, tol);
  json j = {{"command", "kato-check"}, {"kernel", kernel.name()}, {"beta", kernel.beta()},
            {"radii", rep.radii},      {"verdict", kato::to_string(rep.verdict)}, {"note", rep.note}};
  json vals = json::array();
  for (double v : rep.sup_integrals) vals.push_back(report::jnum(v));
  j["sup_integrals"] = vals;
  report::CsvWriter csv(hash, {"r", "sup_integral"});
  for (std::size_t i = 0; i < radii.size(); ++i) csv.row({report::num(radii[i]), report::num(rep.sup_integrals[i])});
  if (growth_s) {
    const auto vg = kato::volume_growth_check(mu, *growth_s, kernel.beta(), grid, radii);
    j["volume_growth"] = {{"s", *growth_s}, {"c_prime", report::jnum(vg.c_prime)}, {"pass", vg.pass}, {"slope", vg.slope}};
  }
  return finish(stamp(j, hash, g.threads, g.seed), csv.str(), resolve_outputs(out, "kato"),
                rep.verdict == kato::Verdict::Pass);
}

// Flat command names map onto the nested subcommands.
std::vector<std::string> expand_aliases(int argc, char** argv) {
  static const std::map<std::string, std::vector<std::string>> aliases = {
      {"spectrum", {"spectra", "spectrum"}},         {"converge", {"spectra", "converge"}},
      {"graph1d-validate", {"graph1d", "validate"}}, {"ball-eig", {"ball", "eig"}},
      {"annulus-gap", {"ball", "annulus-gap"}},      {"kato-check", {"kato", "check"}}};
  std::vector<std::string> args(argv + 1, argv + argc);
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads" || args[i] == "--seed") {
      ++i;
      continue;
    }
    if (args[i].rfind("-", 0) == 0) continue;
    if (auto it = aliases.find(args[i]); it != aliases.end()) {
      args[i] = it->second[1];
      args.insert(args.begin() + static_cast<long>(i), it->second[0]);
      break;
    }
    if (args[i] == "stationary") {
      if (i + 1 == args.size() || (args[i + 1] != "solve" && args[i + 1] != "compare"))
        args.insert(args.begin() + static_cast<long>(i) + 1, "solve");
      break;
    }
    break;
  }
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectra of trace Dirichlet forms realized as weighted Green-kernel matrices", "traceform"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "worker threads for parallel sections")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for randomized checks (never affects core results)");

  std::string cfg_path, out, measure_path, kernel_name = "newtonian";
  double rate = 0.5, tol = 1e-9, ball_tol = 1e-8, kato_alpha = 0.5, kato_tol = 0.2, grid_step = 0.01;
  int n = 10, m = 0, d = 3, qp = 4096;
  std::optional<double> alpha, growth_s;
  std::vector<int> ns{2, 4, 8, 16, 32};
  std::vector<double> radii{0.1, 0.01, 0.001};

  auto* spectra = app.add_subcommand("spectra", "kernel-matrix spectra")->require_subcommand(1);
  auto* spectrum = spectra->add_subcommand("spectrum", "spectrum and Hardy bounds of one measure");
  spectrum->add_option("--config", cfg_path)->required();
  spectrum->add_option("--out", out);
  auto* converge = spectra->add_subcommand("converge", "eigenvalue convergence along a monotone sequence");
  converge->add_option("--config", cfg_path)->required();
  converge->add_option("--out", out);

  auto* graph = app.add_subcommand("graph1d", "explicit trace form on Z")->require_subcommand(1);
  auto* validate = graph->add_subcommand("validate", "cross-validate against the kernel matrix");
  validate->add_option("--rate", rate, "a_k = rate^|k|");
  validate->add_option("--n", n, "cutoff");
  validate->add_option("--tol", tol, "relative tolerance");
  validate->add_option("--out", out);

  auto* ballc = app.add_subcommand("ball", "unit-ball Dirichlet-to-Neumann spectrum")->require_subcommand(1);
  auto* eig = ballc->add_subcommand("eig", "eigenvalue for harmonic degree m");
  eig->add_option("--m", m)->check(CLI::NonNegativeNumber);
  eig->add_option("--tol", ball_tol)->check(CLI::PositiveNumber);
  eig->add_option("--out", out);
  auto* annulus = ballc->add_subcommand("annulus-gap", "shell potential gap sup_x int |x-y|^{-1} dy");
  annulus->add_option("--n", ns)->delimiter(',');
  annulus->add_option("--quadrature-points", qp);
  annulus->add_option("--out", out);

  auto* stat = app.add_subcommand("stationary", "stationary solutions for sphere families")->require_subcommand(1);
  auto* solve = stat->add_subcommand("solve", "solve and sample u_n(r)");
  solve->add_option("--config", cfg_path)->required();
  solve->add_option("--alpha", alpha);
  solve->add_option("--out", out);
  auto* compare = stat->add_subcommand("compare", "sup-norm convergence along a sphere sequence");
  compare->add_option("--config", cfg_path)->required();
  compare->add_option("--alpha", alpha);
  compare->add_option("--out", out);

  auto* katoc = app.add_subcommand("kato", "Kato-class admissibility tests")->require_subcommand(1);
  auto* check = katoc->add_subcommand("check", "sup-integral criterion (and optional volume growth)");
  check->add_option("--kernel", kernel_name)->check(CLI::IsMember({"exponential1d", "newtonian", "riesz"}));
  check->add_option("--d", d);
  check->add_option("--alpha", kato_alpha);
  check->add_option("--measure", measure_path)->required();
  check->add_option("--radii", radii)->delimiter(',');
  check->add_option("--tol", kato_tol);
  check->add_option("--growth-s", growth_s, "also run the volume-growth test with exponent s");
  check->add_option("--grid-step", grid_step);
  check->add_option("--out", out);

  try {
    auto args = expand_aliases(argc, argv);
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*spectrum) return cmd_spectrum(cfg_path, out, g);
    if (*converge) return cmd_converge(cfg_path, out, g);
    if (*validate) return cmd_graph1d(rate, n, tol, out, g);
    if (*eig) return cmd_ball_eig(m, ball_tol, out, g);
    if (*annulus) return cmd_annulus(ns, qp, out, g);
    if (*solve) return cmd_stationary_solve(cfg_path, alpha, out, g);
    if (*compare) return cmd_stationary_compare(cfg_path, alpha, out, g);
    if (*check) return cmd_kato(kernel_name, d, kato_alpha, measure_path, radii, kato_tol, growth_s, grid_step, out, g);
  } catch (const traceform::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: ConfigParse: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

// Batch entry point: simulate, verify, analytic, duality.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fragchain/analytic.hpp"
#include "fragchain/config.hpp"
#include "fragchain/duality.hpp"
#include "fragchain/engine.hpp"
#include "fragchain/io.hpp"
#include "fragchain/suites.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace fragchain;

namespace {

enum ExitCode : int {
  kOk = 0,
  kGenericError = 1,
  kUsage = 2,
  kConfigNotFound = 3,
  kInvalidConfig = 4,
  kPrecondition = 5,
  kUnwritableOutput = 6,
  kVerifyFailed = 7,
  kDomain = 8,
};

struct UnwritableOutput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Writes a set of files into `dir`; every CSV gets the manifest hash line
// first and manifest.json carries the same hash as its first field.
class OutputDir {
 public:
  OutputDir(std::string dir, ordered_json manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw UnwritableOutput("cannot create output directory " + dir_);
    hash_line_ = manifest_line(manifest_.dump());
  }

  const std::string& hash_line() const { return hash_line_; }

  void write(const std::string& name, const std::string& body) const {
    const fs::path path = fs::path(dir_) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UnwritableOutput("cannot write " + path.string());
    out << body;
    if (!out) throw UnwritableOutput("cannot write " + path.string());
  }

  void write_csv(const std::string& name, const std::string& csv) const { write(name, hash_line_ + "\n" + csv); }

  void write_manifest() const {
    ordered_json m;
    m["manifest_hash"] = hash_line_.substr(hash_line_.rfind(' ') + 1);
    for (const auto& [k, v] : manifest_.items()) m[k] = v;
    write("manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string dir_;
  ordered_json manifest_;
  std::string hash_line_;
};

std::string format_analytic(double v) {
  if (std::isnan(v) || std::isinf(v)) return format_double(v);
  char buf[64];
  if (v != 0.0 && (std::abs(v) < 1e-4 || std::abs(v) >= 1e12)) {
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.12f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--param", "expected key=value, got '" + item + "'");
    try {
      out[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--param", "value of '" + item + "' is not a number");
    }
  }
  return out;
}

int simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
             std::optional<std::size_t> replicas, const std::string& out_dir) {
  SimConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (replicas) cfg.replicas = *replicas;
  cfg.validate();

  ordered_json manifest;
  manifest["command"] = "simulate";
  manifest["config_path"] = config_path;
  manifest["config"] = ordered_json::parse(config_to_json(cfg));
  manifest["suites"] = ordered_json::array();
  manifest["seed"] = cfg.seed;
  const OutputDir out(out_dir, manifest);

  const auto logs = run_replicas(cfg);
  std::ostringstream trajectory, events;
  write_trajectory_csv(trajectory, logs);
  write_events_csv(events, logs);
  out.write_csv("trajectory.csv", trajectory.str());
  out.write_csv("events.csv", events.str());
  out.write_manifest();
  std::cout << out.hash_line() << "\nwrote " << logs.size() << " replicas to " << out_dir << "\n";
  return kOk;
}

int verify(const std::string& suite, std::uint64_t seed, const std::string& out_dir) {
  std::vector<std::string> ids;
  if (suite == "all") {
    ids = suite_ids();
  } else {
    const auto& known = suite_ids();
    if (std::find(known.begin(), known.end(), suite) == known.end()) throw UnknownSuiteError("unknown suite '" + suite + "'");
    ids = {suite};
  }
  ordered_json manifest;
  manifest["command"] = "verify";
  manifest["config_path"] = nullptr;
  manifest["suites"] = ids;
  manifest["seed"] = seed;
  std::optional<OutputDir> out;
  if (!out_dir.empty()) out.emplace(out_dir, manifest);

  std::vector<TestReport> reports;
  for (const auto& id : ids) {
    auto rows = run_suite(id, SuiteOptions{seed});
    reports.insert(reports.end(), rows.begin(), rows.end());
  }
  std::ostringstream csv;
  write_report_csv(csv, reports);
  std::cout << manifest_line(manifest.dump()) << "\n" << csv.str();
  if (out) {
    out->write_csv("report.csv", csv.str());
    out->write_manifest();
  }
  return all_pass(reports) ? kOk : kVerifyFailed;
}

struct AnalyticRequest {
  std::string law;
  std::vector<std::string> params;
  double erosion = 0.0;
  std::optional<double> kappa, kappa_derivative, kappa_second, moment, exit_density, tagged;
  std::optional<std::size_t> rho;
  bool malthusian = false, pbar = false;
  double time = 1.0, alpha = 0.0;
};

int analytic(const AnalyticRequest& q) {
  const KappaFunction kappa(make_law(q.law, parse_params(q.params)), ErosionParams{q.erosion});
  std::vector<double> values;
  if (q.kappa) values.push_back(kappa(*q.kappa));
  if (q.kappa_derivative) values.push_back(kappa.derivative(*q.kappa_derivative, 1));
  if (q.kappa_second) values.push_back(kappa.derivative(*q.kappa_second, 2));
  if (q.malthusian) values.push_back(kappa.malthusian());
  if (q.pbar) values.push_back(kappa.p_bar());
  if (q.moment) values.push_back(moment_series(kappa, *q.moment, q.time, q.alpha));
  if (q.rho)
    for (double m : rho_moments(kappa, q.alpha, *q.rho).moments) values.push_back(m);
  if (q.exit_density) values.push_back(exit_density(kappa, *q.exit_density));
  if (q.tagged) values.push_back(tagged_laplace(kappa, *q.tagged, q.time));
  if (values.empty()) throw CLI::ValidationError("analytic", "no quantity requested");
  for (double v : values) std::cout << format_analytic(v) << "\n";
  return kOk;
}

int duality(std::uint64_t seed, std::size_t replicas, const std::string& out_dir) {
  if (replicas == 0) throw PreconditionError("duality: replicas must be positive");
  ordered_json manifest;
  manifest["command"] = "duality";
  manifest["config_path"] = nullptr;
  manifest["suites"] = ordered_json::array();
  manifest["seed"] = seed;
  manifest["replicas"] = replicas;
  const OutputDir out(out_dir, manifest);
  const auto grid = coalescent_grid();
  std::vector<std::vector<MergeEvent>> merges(replicas);
  for (std::size_t r = 0; r < replicas; ++r) {
    RngStream rng(seed, r);
    merges[r] = reverse(build_cut_process(1.0, rng), grid).merges;
  }
  std::ostringstream csv;
  write_merge_csv(csv, merges);
  out.write_csv("merges.csv", csv.str());
  out.write_manifest();
  std::cout << out.hash_line() << "\nwrote " << replicas << " replicas to " << out_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-similar fragmentation chains: simulation and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", suite;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;

  auto* sim = app.add_subcommand("simulate", "Run replicas and write trajectory/event CSVs");
  sim->add_option("--config", config_path, "JSON config")->required();
  sim->add_option("--seed", seed, "Override the config seed");
  sim->add_option("--replicas", replicas, "Override the replica count");
  sim->add_option("--out", out_dir, "Output directory");

  std::uint64_t verify_seed = 7;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run acceptance suites and print the report");
  ver->add_option("--suite", suite, "AC1..AC15 or all")->required();
  ver->add_option("--seed", verify_seed, "Suite seed");
  ver->add_option("--out", verify_out, "Also write report.csv into this directory");

  AnalyticRequest q;
  auto* ana = app.add_subcommand("analytic", "Evaluate closed-form and numerical quantities");
  ana->add_option("--law", q.law, "Law name")->required();
  ana->add_option("--param", q.params, "Law parameter key=value (repeatable)");
  ana->add_option("--erosion", q.erosion, "Erosion coefficient c");
  ana->add_option("--kappa", q.kappa, "kappa(p)");
  ana->add_option("--kappa-derivative", q.kappa_derivative, "kappa'(p)");
  ana->add_option("--kappa-second", q.kappa_second, "kappa''(p)");
  ana->add_flag("--malthusian", q.malthusian, "Malthusian exponent p*");
  ana->add_flag("--pbar", q.pbar, "Maximiser of kappa(p)/p");
  ana->add_option("--moment", q.moment, "E[sum X_i^p(t)] via the moment series (uses --time, --alpha)");
  ana->add_option("--rho", q.rho, "First K moments of the limit measure (uses --alpha)");
  ana->add_option("--exit-density", q.exit_density, "Exit measure density at x");
  ana->add_option("--tagged-laplace", q.tagged, "E[chi(t)^q] (uses --time)");
  ana->add_option("--time", q.time, "Time t");
  ana->add_option("--alpha", q.alpha, "Self-similarity index");

  std::uint64_t dual_seed = 7;
  std::size_t dual_replicas = 1000;
  std::string dual_out = "out";
  auto* dual = app.add_subcommand("duality", "Cut process reversed into a coalescent; merge-event CSV");
  dual->add_option("--seed", dual_seed, "Seed");
  dual->add_option("--replicas", dual_replicas, "Replicas");
  dual->add_option("--out", dual_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) return simulate(config_path, seed, replicas, out_dir);
    if (*ver) return verify(suite, verify_seed, verify_out);
    if (*ana) return analytic(q);
    if (*dual) return duality(dual_seed, dual_replicas, dual_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnknownSuiteError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigNotFoundError& e) {
    std::cerr << e.what() << "\n";
    return kConfigNotFound;
  } catch (const UnknownLawError& e) {
    std::cerr << e.what() << "\n";
    return kInvalidConfig;
  } catch (const InvalidConfigError& e) {
    std::cerr << e.what() << "\n";
    return kInvalidConfig;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return kPrecondition;
  } catch (const UnwritableOutput& e) {
    std::cerr << e.what() << "\n";
    return kUnwritableOutput;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const ConvergenceError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kGenericError;
  }
  return kUsage;
}

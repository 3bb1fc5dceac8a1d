// magree: agreement among multiple raters with replicated measurements.

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "magree/dataset.hpp"
#include "magree/errors.hpp"
#include "magree/estimation.hpp"
#include "magree/grading.hpp"
#include "magree/raucpc.hpp"
#include "magree/report.hpp"
#include "magree/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInconclusive = 2;

// Writes to --out when given, stdout otherwise.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) magree::fail(magree::ErrorCode::Io, "cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::vector<magree::Index> parse_indices(const std::string& text) {
  if (text == "all") return {magree::Index::Ocp, magree::Index::Otdi, magree::Index::Rauocpc};
  std::vector<magree::Index> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(magree::parse_index(item));
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0) magree::fail(magree::ErrorCode::InvalidArgument, "bad grid value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

struct InputOptions {
  std::string input;
  magree::CsvSchema schema;

  void add(CLI::App* app, bool required = true) {
    auto* opt = app->add_option("--input,-i", input, "Long-format CSV (subject,rater,replicate,value)");
    if (required) opt->required();
    opt->check(CLI::ExistingFile);
    app->add_option("--subject-col", schema.subject, "Subject column name")->capture_default_str();
    app->add_option("--rater-col", schema.rater, "Rater column name")->capture_default_str();
    app->add_option("--replicate-col", schema.replicate, "Replicate column name")->capture_default_str();
    app->add_option("--value-col", schema.value, "Value column name")->capture_default_str();
  }

  magree::MeasurementDataset load() const { return magree::load_csv(input, schema); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Agreement among multiple raters: OCP, OTDI and RAUOCPC"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "magree 1.0.0");

  double delta0 = 15.0;
  double pi0 = 0.85;
  double tau0 = 0.5875;
  double delta_max = 20.0;
  double confidence = 0.95;
  std::string format = "json";
  std::string out_path;
  std::uint64_t seed = 20240101;
  std::size_t threads = 0;

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Estimate indices, one-sided CIs and tests");
  InputOptions analyze_in;
  analyze_in.add(analyze);
  std::string index_text = "all";
  std::string scope_text = "overall";
  bool continuity = false;
  std::optional<double> bandwidth;
  analyze->add_option("--index", index_text, "ocp, otdi, rauocpc or all")->capture_default_str();
  analyze->add_option("--scope", scope_text, "overall, pairs, intra or all (comma list)")
      ->capture_default_str();
  analyze->add_option("--delta0", delta0, "OCP boundary / OTDI test threshold")->capture_default_str();
  analyze->add_option("--pi0", pi0, "OTDI quantile level / OCP test threshold")->capture_default_str();
  analyze->add_option("--tau0", tau0, "RAUOCPC test threshold")->capture_default_str();
  analyze->add_option("--delta-max", delta_max, "RAUOCPC horizon")->capture_default_str();
  analyze->add_option("--confidence", confidence, "One-sided confidence level")->capture_default_str();
  analyze->add_flag("--continuity-correction", continuity, "Add a half-success pseudo-subject");
  analyze->add_option("--bandwidth", bandwidth, "OTDI kernel bandwidth (default: Silverman)");
  analyze->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  analyze->add_option("--out,-o", out_path, "Output file (default stdout)");
  analyze->add_option("--threads", threads, "Worker cap (estimation is single-threaded)");

  // curve
  auto* curve = app.add_subcommand("curve", "Empirical overall CP curve as CSV (d,cp)");
  InputOptions curve_in;
  curve_in.add(curve);
  std::string curve_scope = "overall";
  std::size_t steps = 200;
  std::string grid_text;
  curve->add_option("--scope", curve_scope, "overall, pair:<a>,<b> or intra:<r>")->capture_default_str();
  curve->add_option("--delta-max", delta_max, "Upper end of the default grid")->capture_default_str();
  curve->add_option("--steps", steps, "Grid steps (rows = steps + 1)")->capture_default_str();
  curve->add_option("--grid", grid_text, "Explicit comma-separated grid, e.g. 5,10,15,20");
  curve->add_option("--out,-o", out_path, "Output file (default stdout)");

  // grade
  auto* grade = app.add_subcommand("grade", "Grade CP curves against a device protocol (BHSP default)");
  InputOptions grade_in;
  grade_in.add(grade, false);
  std::string curve_file;
  std::string protocol_file;
  std::string grade_scope = "overall";
  grade->add_option("--curve", curve_file, "Curve CSV (d,cp) instead of --input")->check(CLI::ExistingFile);
  grade->add_option("--protocol", protocol_file, "Protocol JSON (default: built-in BHSP)")
      ->check(CLI::ExistingFile);
  grade->add_option("--scope", grade_scope, "overall, pairs, intra or all")->capture_default_str();
  grade->add_option("--confidence", confidence, "One-sided level for the tau0 comparison")
      ->capture_default_str();
  grade->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  grade->add_option("--out,-o", out_path, "Output file (default stdout)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of a scenario");
  std::string preset;
  std::string scenario_file;
  std::string scenario_name;
  std::string sim_index = "ocp";
  std::size_t n_subjects = 500;
  std::size_t replicates = 3;
  std::size_t replications = 1000;
  std::size_t oracle_n = 100000;
  std::optional<double> sim_delta0, sim_pi0, sim_delta_max;
  auto* preset_opt = simulate->add_option("--preset", preset,
                                          "normal|lognormal-{high,low}-{noshift,shift} or "
                                          "normal|lognormal-{high,moderate,mild,low}");
  auto* file_opt = simulate->add_option("--scenario-file", scenario_file, "INI scenario file")
                       ->check(CLI::ExistingFile);
  simulate->add_option("--scenario", scenario_name, "Section name in --scenario-file");
  preset_opt->excludes(file_opt);
  simulate->add_option("--index", sim_index, "ocp, otdi or rauocpc")->capture_default_str();
  simulate->add_option("--n", n_subjects, "Subjects per data set")->capture_default_str();
  simulate->add_option("--replicates,-k", replicates, "Replicates per rater (presets only)")
      ->capture_default_str();
  simulate->add_option("--replications", replications, "Simulated data sets")->capture_default_str();
  simulate->add_option("--oracle-n", oracle_n, "Subjects in the true-value sample")->capture_default_str();
  simulate->add_option("--delta0", sim_delta0, "OCP boundary (default 4 normal, 3.5 log-normal)");
  simulate->add_option("--pi0", sim_pi0, "OTDI level (default 0.8)");
  simulate->add_option("--delta-max", sim_delta_max, "RAUOCPC horizon (default 5 normal, 4 log-normal)");
  simulate->add_option("--confidence", confidence, "One-sided level")->capture_default_str();
  simulate->add_option("--seed", seed, "Master seed")->capture_default_str();
  simulate->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
  std::string sim_format = "csv";
  simulate->add_option("--format", sim_format, "csv or json")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  simulate->add_option("--out,-o", out_path, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*analyze) {
      magree::AnalysisRequest request;
      request.indices = parse_indices(index_text);
      request.scopes = magree::ScopeSelection::parse(scope_text);
      request.thresholds.delta0 = delta0;
      request.thresholds.pi0 = pi0;
      request.thresholds.tau0 = tau0;
      request.thresholds.delta_max = delta_max;
      request.thresholds.confidence = confidence;
      request.options.continuity_correction = continuity;
      request.options.bandwidth = bandwidth;
      const auto report = magree::run_analysis(analyze_in.load(), request);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      Output out(out_path);
      if (format == "csv") {
        magree::write_report_csv(out.stream(), report);
      } else {
        out.stream() << magree::report_json(report);
      }
      return report.any_inconclusive() ? kExitInconclusive : kExitOk;
    }

    if (*curve) {
      const auto ds = curve_in.load();
      const auto scope = magree::scoped_distance(ds, curve_scope);
      const auto grid = grid_text.empty() ? magree::uniform_grid(delta_max, steps) : parse_grid(grid_text);
      Output out(out_path);
      magree::write_csv(out.stream(), magree::empirical_cp_curve(scope.distances.pooled(), grid));
      return kExitOk;
    }

    if (*grade) {
      const auto protocol = protocol_file.empty() ? magree::bhsp() : magree::load_protocol(protocol_file);
      std::vector<magree::GradeRow> rows;
      if (!curve_file.empty()) {
        std::ifstream in(curve_file);
        rows.push_back(magree::grade_curve(magree::read_curve_csv(in), protocol));
        rows.back().label = curve_file;
      } else if (!grade_in.input.empty()) {
        std::vector<std::string> warnings;
        const auto scopes = magree::scoped_distances(
            grade_in.load(), magree::ScopeSelection::parse(grade_scope), warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& s : scopes) rows.push_back(magree::grade_scope(s, protocol, confidence));
      } else {
        std::cerr << "grade: one of --input or --curve is required\n";
        return kExitError;
      }
      Output out(out_path);
      if (format == "csv") {
        magree::write_grades_csv(out.stream(), rows, protocol);
      } else {
        out.stream() << magree::grades_json(rows, protocol);
      }
      return kExitOk;
    }

    if (*simulate) {
      magree::ScenarioConfig cfg;
      if (!scenario_file.empty()) {
        const auto all = magree::load_scenarios(scenario_file);
        if (scenario_name.empty() && all.size() == 1) {
          cfg = all.front();
        } else {
          const auto it = std::find_if(all.begin(), all.end(),
                                       [&](const auto& c) { return c.name == scenario_name; });
          if (it == all.end()) {
            std::cerr << "simulate: scenario '" << scenario_name << "' not found in " << scenario_file << '\n';
            return kExitError;
          }
          cfg = *it;
        }
      } else if (!preset.empty()) {
        cfg = magree::find_preset(preset, replicates);
      } else {
        std::cerr << "simulate: one of --preset or --scenario-file is required\n";
        return kExitError;
      }
      cfg.validate();
      const bool normal = cfg.family == magree::Family::Normal;
      magree::AgreementQuestion q;
      q.index = magree::parse_index(sim_index);
      q.delta0 = sim_delta0.value_or(normal ? 4.0 : 3.5);
      q.pi0 = sim_pi0.value_or(0.8);
      q.delta_max = sim_delta_max.value_or(normal ? 5.0 : 4.0);
      q.confidence = confidence;
      magree::MonteCarloOptions opts;
      opts.threads = threads;
      opts.oracle_n = oracle_n;
      const auto report = magree::run_monte_carlo(cfg, q, n_subjects, replications, seed, opts);
      Output out(out_path);
      if (sim_format == "json") {
        out.stream() << magree::monte_carlo_json(cfg.name, report);
      } else {
        magree::write_csv_header(out.stream());
        magree::write_csv_row(out.stream(), cfg.name, report);
      }
      return kExitOk;
    }
  } catch (const magree::Error& e) {
    std::cerr << "error [" << magree::to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

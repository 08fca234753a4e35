#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"
#include "chebdea/pipeline.hpp"
#include "chebdea/records.hpp"
#include "chebdea/synth.hpp"

namespace fs = std::filesystem;
using namespace chebdea;

namespace {

struct Options {
  std::string input;
  std::string rts = "vrs";
  std::string method = "linear";
  double epsilon = kDefaultLogitEpsilon;
  std::size_t min_bucket = 138;
  std::size_t max_depth = 7;
  std::size_t leaves = 11;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t n = 4660;
  double sigma2 = 1.0;
  int threads = 0;
  std::string mode = "both";
  bool use_density = false;
};

ReturnsToScale parse_rts(const std::string& s) {
  if (s == "vrs") return ReturnsToScale::Variable;
  if (s == "crs") return ReturnsToScale::Constant;
  throw InputError("--rts must be vrs or crs");
}

ScoringMethod parse_method(const std::string& s) {
  if (s == "linear") return ScoringMethod::Linear;
  if (s == "exact") return ScoringMethod::Exact;
  throw InputError("--method must be linear or exact");
}

void add_data_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--input", o.input, "Library CSV");
  cmd->add_option("--seed", o.seed, "Generate a synthetic panel with this seed instead of --input");
  cmd->add_option("--n", o.n, "Synthetic panel size")->capture_default_str();
  cmd->add_option("--rts", o.rts, "Returns to scale: vrs or crs")->capture_default_str();
  cmd->add_option("--method", o.method, "Scoring method: linear or exact")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads, 0 = auto")->capture_default_str();
}

void add_stage_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--epsilon", o.epsilon, "Logit clamp")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory");
}

void add_tree_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--min-bucket", o.min_bucket, "Minimum units per leaf")->capture_default_str();
  cmd->add_option("--max-depth", o.max_depth, "Maximum tree depth")->capture_default_str();
  cmd->add_option("--leaves", o.leaves, "Leaves kept after pruning")->capture_default_str();
  cmd->add_flag("--use-density", o.use_density, "Offer population density as a split feature");
}

std::vector<LibraryRecord> load(const Options& o) {
  if (!o.input.empty() && o.seed) throw InputError("use either --input or --seed, not both");
  if (o.seed) {
    SynthConfig config;
    config.seed = *o.seed;
    config.n_units = o.n;
    return generate_panel(config).records;
  }
  if (o.input.empty()) throw InputError("--input is required (or --seed for a synthetic panel)");
  auto loaded = load_records(o.input);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return std::move(loaded.records);
}

PipelineConfig make_config(const Options& o, CategorizationMode mode) {
  PipelineConfig c;
  c.mode = mode;
  c.rts = parse_rts(o.rts);
  c.method = parse_method(o.method);
  c.epsilon = o.epsilon;
  c.tree.min_bucket = o.min_bucket;
  c.tree.max_depth = o.max_depth;
  c.tree.n_leaves = o.leaves;
  c.tree_uses_density = o.use_density;
  c.threads = o.threads;
  return c;
}

PipelineReport run_report(const Options& o, CategorizationMode mode) {
  auto report = run_pipeline(load(o), make_config(o, mode));
  for (const auto& d : report.data.dropped) std::cerr << "warning: dropped " << d.id << " (" << d.reason << ")\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return report;
}

int emit(const Options& o, const PipelineReport& report) {
  if (o.out.empty()) {
    write_summary(std::cout, report);
  } else {
    write_report(o.out, report);
  }
  return 0;
}

int cmd_scores(const Options& o) {
  const auto data = preprocess(load(o));
  for (const auto& d : data.dropped) std::cerr << "warning: dropped " << d.id << " (" << d.reason << ")\n";
  const auto scores = score_all(data.panel, parse_rts(o.rts), parse_method(o.method), o.threads);
  std::ofstream file;
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    file.open(fs::path(o.out) / "scores.csv", std::ios::binary);
    if (!file) throw InputError("cannot write to '" + o.out + "'");
  }
  std::ostream& out = o.out.empty() ? std::cout : file;
  csv::write_row(out, {"id", "name", "delta", "score", "classification"});
  for (std::size_t i = 0; i < scores.size(); ++i) {
    csv::write_row(out, {scores[i].dmu_id, data.names[i], csv::format_double(scores[i].delta),
                         csv::format_double(scores[i].score), to_string(scores[i].classification)});
  }
  return 0;
}

int cmd_compare(const Options& o) {
  const auto report = run_report(o, CategorizationMode::Both);
  write_correlations_csv(std::cout, report);
  if (!o.out.empty()) write_report(o.out, report);
  return 0;
}

int cmd_synth(const Options& o) {
  if (o.out.empty()) throw InputError("synth needs --out");
  SynthConfig config;
  config.seed = o.seed.value_or(1);
  config.n_units = o.n;
  config.sigma2 = o.sigma2;
  const auto panel = generate_panel(config);
  fs::create_directories(o.out);
  const auto open = [&](const char* name) {
    std::ofstream f(fs::path(o.out) / name, std::ios::binary);
    if (!f) throw InputError("cannot write to '" + o.out + "'");
    return f;
  };
  auto records = open("records.csv");
  write_records(records, panel.records);
  auto truth = open("ground_truth.csv");
  write_ground_truth(truth, panel.records, panel.truth);
  auto planted = open("planted.csv");
  write_planted(planted, panel.truth);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chebyshev-distance DEA with two-stage environmental analysis"};
  app.require_subcommand(1);
  Options o;

  auto* scores = app.add_subcommand("scores", "Efficiency scores for every library");
  add_data_flags(scores, o);
  scores->add_option("--out", o.out, "Output directory (stdout when omitted)");

  auto* second = app.add_subcommand("second-stage", "Scores plus logit-OLS environmental regression");
  add_data_flags(second, o);
  add_stage_flags(second, o);

  auto* tree = app.add_subcommand("tree", "Regression-tree categories and separated scores");
  add_data_flags(tree, o);
  add_stage_flags(tree, o);
  add_tree_flags(tree, o);

  auto* expert = app.add_subcommand("expert", "Expert-rule categories and separated scores");
  add_data_flags(expert, o);
  add_stage_flags(expert, o);

  auto* compare = app.add_subcommand("compare", "Correlations among preliminary, tree and expert scores");
  add_data_flags(compare, o);
  add_stage_flags(compare, o);
  add_tree_flags(compare, o);

  auto* synth = app.add_subcommand("synth", "Synthetic panel with a planted environmental effect");
  synth->add_option("--seed", o.seed, "Random seed (default 1)");
  synth->add_option("--n", o.n, "Number of libraries")->capture_default_str();
  synth->add_option("--sigma2", o.sigma2, "Noise variance of the planted effect")->capture_default_str();
  synth->add_option("--out", o.out, "Output directory")->required();

  auto* pipeline = app.add_subcommand("pipeline", "End-to-end report");
  add_data_flags(pipeline, o);
  add_stage_flags(pipeline, o);
  add_tree_flags(pipeline, o);
  pipeline->add_option("--mode", o.mode, "none, tree, expert or both")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*scores) return cmd_scores(o);
    if (*second) return emit(o, run_report(o, CategorizationMode::None));
    if (*tree) return emit(o, run_report(o, CategorizationMode::Tree));
    if (*expert) return emit(o, run_report(o, CategorizationMode::Expert));
    if (*compare) return cmd_compare(o);
    if (*synth) return cmd_synth(o);
    if (*pipeline) return emit(o, run_report(o, parse_mode(o.mode)));
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

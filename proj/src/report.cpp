#include <cstdio>
#include <fstream>
#include <ostream>

#include "chebdea/csv.hpp"
#include "chebdea/error.hpp"
#include "chebdea/pipeline.hpp"

namespace chebdea {

namespace {

using csv::format_double;

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

const CategoryTable* table_for(const PipelineReport& report, const std::string& set) {
  if (set == "tree" && report.tree_categories) return &*report.tree_categories;
  if (set == "expert" && report.expert_categories) return &*report.expert_categories;
  return nullptr;
}

void write_summary_row(std::ostream& out, const std::string& label, const ScoreSummary& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  %-12s n=%-6zu inefficient=%6.2f%%  mean=%.4f  median=%.4f\n",
                label.c_str(), s.count, 100.0 * s.share_inefficient, s.mean, s.median);
  out << buf;
}

}  // namespace

void write_scores_csv(std::ostream& out, const PipelineReport& report) {
  csv::Row header = {"id", "name", "population", "density", "distance"};
  for (const auto& set : report.score_sets) {
    if (table_for(report, set.name)) header.push_back(set.name + "_category");
    header.push_back(set.name + "_delta");
    header.push_back(set.name + "_score");
    header.push_back(set.name + "_class");
  }
  csv::write_row(out, header);
  const auto& data = report.data;
  for (std::size_t i = 0; i < data.panel.size(); ++i) {
    csv::Row row = {data.panel.ids()[i], data.names[i], format_double(data.environment.population[i]),
                    format_double(data.environment.density[i]), format_double(data.environment.distance[i])};
    for (const auto& set : report.score_sets) {
      if (const auto* table = table_for(report, set.name)) row.push_back(table->assignment.labels[i]);
      row.push_back(format_double(set.scores[i].delta));
      row.push_back(format_double(set.scores[i].score));
      row.push_back(to_string(set.scores[i].classification));
    }
    csv::write_row(out, row);
  }
}

void write_regression_csv(std::ostream& out, const PipelineReport& report) {
  csv::write_row(out, {"set", "term", "beta", "std_error", "t_stat", "p_value", "r_squared", "n_obs",
                       "sigma2_hat"});
  for (const auto& set : report.score_sets) {
    if (!set.regression) continue;
    const auto& fit = *set.regression;
    for (std::size_t l = 0; l < fit.labels.size(); ++l) {
      const auto k = static_cast<Eigen::Index>(l);
      csv::write_row(out, {set.name, fit.labels[l], format_double(fit.beta[k]),
                           format_double(fit.std_errors[k]), format_double(fit.t_stats[k]),
                           format_double(fit.p_values[k]), format_double(fit.r_squared),
                           std::to_string(fit.n_obs), format_double(fit.sigma2_hat)});
    }
  }
}

void write_categories_csv(std::ostream& out, const CategoryTable& table) {
  csv::write_row(out, {"category", "rule", "count", "preliminary_share_inefficient", "preliminary_mean",
                       "preliminary_median", "separated_share_inefficient", "separated_mean",
                       "separated_median"});
  for (const auto& row : table.rows) {
    csv::write_row(out, {row.label, row.rule, std::to_string(row.count),
                         format_double(row.preliminary.share_inefficient), format_double(row.preliminary.mean),
                         format_double(row.preliminary.median), format_double(row.separated.share_inefficient),
                         format_double(row.separated.mean), format_double(row.separated.median)});
  }
}

void write_correlations_csv(std::ostream& out, const PipelineReport& report) {
  csv::Row header = {"set"};
  for (const auto& set : report.score_sets) header.push_back(set.name);
  csv::write_row(out, header);
  for (std::size_t a = 0; a < report.score_sets.size(); ++a) {
    csv::Row row = {report.score_sets[a].name};
    for (std::size_t b = 0; b < report.score_sets.size(); ++b) row.push_back(format_double(report.correlations[a][b]));
    csv::write_row(out, row);
  }
}

void write_density_csv(std::ostream& out, const PipelineReport& report) {
  csv::write_row(out, {"set", "bandwidth", "x", "density"});
  for (const auto& set : report.score_sets) {
    const auto h = format_double(set.density.bandwidth);
    for (std::size_t g = 0; g < set.density.grid.size(); ++g) {
      csv::write_row(out, {set.name, h, format_double(set.density.grid[g]), format_double(set.density.density[g])});
    }
  }
}

void write_drop_log_csv(std::ostream& out, const PipelineReport& report) {
  csv::write_row(out, {"id", "reason"});
  for (const auto& d : report.data.dropped) csv::write_row(out, {d.id, d.reason});
}

void write_summary(std::ostream& out, const PipelineReport& report) {
  const auto& cfg = report.config;
  out << "Chebyshev DEA two-stage report\n";
  out << "mode " << to_string(cfg.mode) << ", rts " << to_string(cfg.rts) << ", method "
      << to_string(cfg.method) << ", epsilon " << format_double(cfg.epsilon) << "\n";
  out << "records " << report.raw_record_count << ", scored " << report.data.panel.size() << ", dropped "
      << report.data.dropped.size() << "\n\n";

  out << "Score sets\n";
  for (const auto& set : report.score_sets) write_summary_row(out, set.name, set.summary);

  for (const auto& set : report.score_sets) {
    out << "\nRegression of transformed " << set.name << " scores\n";
    if (!set.regression) {
      out << "  not fitted\n";
      continue;
    }
    const auto& fit = *set.regression;
    char buf[160];
    std::snprintf(buf, sizeof buf, "  %-10s %14s %12s %10s %10s\n", "term", "estimate", "std.error", "t", "p");
    out << buf;
    for (std::size_t l = 0; l < fit.labels.size(); ++l) {
      const auto k = static_cast<Eigen::Index>(l);
      std::snprintf(buf, sizeof buf, "  %-10s %14.4f %12.4f %10.3f %10.4g\n", fit.labels[l].c_str(), fit.beta[k],
                    fit.std_errors[k], fit.t_stats[k], fit.p_values[k]);
      out << buf;
    }
    out << "  R^2 " << fixed(fit.r_squared, 4) << ", n " << fit.n_obs << ", sigma^2 " << fixed(fit.sigma2_hat, 4)
        << "\n";
  }

  for (const auto* table : {report.tree_categories ? &*report.tree_categories : nullptr,
                            report.expert_categories ? &*report.expert_categories : nullptr}) {
    if (!table) continue;
    out << "\n" << (table->scheme == "tree" ? "Tree" : "Expert") << " categories (separated scores)\n";
    for (const auto& row : table->rows) {
      write_summary_row(out, row.label, row.separated);
      out << "    " << row.rule << "\n";
    }
  }

  if (report.score_sets.size() > 1) {
    out << "\nCorrelations\n";
    for (std::size_t a = 0; a < report.score_sets.size(); ++a) {
      for (std::size_t b = a + 1; b < report.score_sets.size(); ++b) {
        out << "  " << report.score_sets[a].name << " / " << report.score_sets[b].name << ": "
            << fixed(report.correlations[a][b], 4) << "\n";
      }
    }
  }

  if (!report.warnings.empty()) {
    out << "\nWarnings\n";
    for (const auto& w : report.warnings) out << "  " << w << "\n";
  }
}

void write_report(const std::filesystem::path& dir, const PipelineReport& report) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());

  auto scores = open_output(dir / "scores.csv");
  write_scores_csv(scores, report);
  auto regression = open_output(dir / "regression.csv");
  write_regression_csv(regression, report);
  auto correlations = open_output(dir / "correlations.csv");
  write_correlations_csv(correlations, report);
  auto density = open_output(dir / "density.csv");
  write_density_csv(density, report);
  auto drops = open_output(dir / "drop_log.csv");
  write_drop_log_csv(drops, report);
  if (report.tree_categories) {
    auto out = open_output(dir / "categories_tree.csv");
    write_categories_csv(out, *report.tree_categories);
  }
  if (report.expert_categories) {
    auto out = open_output(dir / "categories_expert.csv");
    write_categories_csv(out, *report.expert_categories);
  }
  if (report.tree) {
    auto out = open_output(dir / "tree.txt");
    write_tree(out, report.tree->tree);
  }
  auto summary = open_output(dir / "summary.txt");
  write_summary(summary, report);
}

}  // namespace chebdea

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "studentrisk/association.hpp"
#include "studentrisk/classifier.hpp"
#include "studentrisk/dataset.hpp"
#include "studentrisk/error.hpp"
#include "studentrisk/evaluation.hpp"
#include "studentrisk/imputation.hpp"
#include "studentrisk/rng.hpp"
#include "studentrisk/synth.hpp"

namespace {

using namespace studentrisk;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw InputError("cannot write '" + path + "'");
}

/// Writes to --out when given, stdout otherwise.
void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
  } else {
    write_file(out_path, text);
  }
}

std::string default_schema_path(const std::string& data_path) {
  std::filesystem::path p(data_path);
  p.replace_extension(".schema.json");
  return p.string();
}

std::string dataset_label(const std::string& data_path) {
  return std::filesystem::path(data_path).stem().string();
}

Dataset load_input(const std::string& data_path, const std::string& schema_path) {
  std::string schema_file =
      schema_path.empty() ? default_schema_path(data_path) : schema_path;
  return load_dataset_files(data_path, schema_file);
}

/// Auto-imputes when the dataset has missing cells, with a note on
/// stderr so machine-readable stdout stays clean.
Dataset ensure_complete(Dataset data, bool no_impute, std::size_t* imputed_cells) {
  if (imputed_cells) *imputed_cells = 0;
  std::size_t missing = data.missing_count();
  if (missing == 0) return data;
  if (no_impute) {
    throw InputError("dataset has " + std::to_string(missing) +
                     " missing cells and --no-impute is set");
  }
  auto result = impute_missing(data);
  std::cerr << "note: imputed " << result.second.cells_imputed
            << " missing cells in " << result.second.rows_touched
            << " rows before analysis\n";
  if (imputed_cells) *imputed_cells = result.second.cells_imputed;
  return std::move(result.first);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      current += c;
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

SelectionConfig selection_config(double alpha, double tau, bool no_tau) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InputError("--alpha must lie strictly between 0 and 1");
  }
  if (tau < 0.0) throw InputError("--tau must be nonnegative");
  SelectionConfig config;
  config.alpha = alpha;
  config.tau = no_tau ? std::nullopt : std::optional<double>(tau);
  return config;
}

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, value);
  return buf;
}

// ---------------------------------------------------------------- describe

struct DescribeOptions {
  std::string data;
  std::string schema;
  std::string format = "markdown";
  std::string out;
};

int run_describe(const DescribeOptions& opt) {
  Dataset data = load_input(opt.data, opt.schema);
  const Schema& schema = data.schema();
  std::vector<int> y = data.outcome_labels();
  auto pass = std::count(y.begin(), y.end(), 1);
  long rate_pct = std::lround(100.0 * static_cast<double>(pass) /
                              static_cast<double>(y.size()));

  struct VariableRow {
    std::string name;
    std::string kind;
    std::string levels;
    std::string summary;
    std::size_t missing = 0;
    std::optional<double> mean;
    std::optional<long> upper_level_percent;
  };
  std::vector<VariableRow> rows;
  for (std::size_t c : schema.predictor_indices()) {
    const VariableSpec& var = schema.variables[c];
    VariableRow row;
    row.name = var.name;
    row.kind = std::string(to_string(var.kind));
    row.levels = var.is_discrete() ? var.levels_label() : "";
    double sum = 0.0;
    std::size_t observed = 0;
    std::size_t upper = 0;
    for (const Cell& cell : data.column(c)) {
      if (!cell) continue;
      sum += *cell;
      ++observed;
      if (var.kind == VarKind::Binary && *cell == var.levels[1]) ++upper;
    }
    row.missing = data.n_rows() - observed;
    if (observed == 0) {
      row.summary = "—";
    } else if (var.kind == VarKind::Binary) {
      long pct = std::lround(100.0 * static_cast<double>(upper) /
                             static_cast<double>(observed));
      row.upper_level_percent = pct;
      row.summary = std::to_string(pct) + "% at level " + std::to_string(var.levels[1]);
    } else {
      row.mean = sum / static_cast<double>(observed);
      row.summary = "mean " + fmt("%.1f", *row.mean);
    }
    rows.push_back(std::move(row));
  }

  if (opt.format == "json") {
    nlohmann::json doc;
    doc["dataset"] = dataset_label(opt.data);
    doc["n_rows"] = data.n_rows();
    doc["success_rate_percent"] = rate_pct;
    doc["success_rate"] =
        static_cast<double>(pass) / static_cast<double>(y.size());
    nlohmann::json vars = nlohmann::json::array();
    for (const auto& row : rows) {
      nlohmann::json v;
      v["name"] = row.name;
      v["kind"] = row.kind;
      v["levels"] = row.levels;
      v["missing"] = row.missing;
      if (row.mean) v["mean"] = *row.mean;
      if (row.upper_level_percent) v["upper_level_percent"] = *row.upper_level_percent;
      vars.push_back(std::move(v));
    }
    doc["variables"] = std::move(vars);
    emit(doc.dump(2) + "\n", opt.out);
  } else {
    std::ostringstream md;
    md << "# Descriptive statistics: " << dataset_label(opt.data) << "\n\n";
    md << "- Number of students: " << data.n_rows() << "\n";
    md << "- Success rate (%): " << rate_pct << "\n\n";
    md << "| Variable | Type | Levels | Summary | Missing |\n";
    md << "| --- | --- | --- | --- | --- |\n";
    for (const auto& row : rows) {
      md << "| " << row.name << " | " << row.kind << " | " << row.levels
         << " | " << row.summary << " | " << row.missing << " |\n";
    }
    emit(md.str(), opt.out);
  }
  return 0;
}

// --------------------------------------------------------------- associate

struct AssociateOptions {
  std::string data;
  std::string schema;
  double alpha = 0.05;
  double tau = 0.15;
  bool no_tau = false;
  double rho_report = 0.2;
  bool no_impute = false;
  std::string format = "markdown";
  std::string out;
};

int run_associate(const AssociateOptions& opt) {
  Dataset data = load_input(opt.data, opt.schema);
  std::size_t imputed = 0;
  data = ensure_complete(std::move(data), opt.no_impute, &imputed);
  SelectionResult sel =
      select_variables(data, selection_config(opt.alpha, opt.tau, opt.no_tau));

  std::vector<std::string> strong;
  for (const auto& row : sel.rows) {
    if (row.diagnostic.empty() && std::fabs(row.spearman_rho) > opt.rho_report) {
      strong.push_back(row.name);
    }
  }
  std::vector<GroupMeansRow> means;
  if (!strong.empty()) means = group_means(data, strong);

  if (opt.format == "json") {
    nlohmann::json doc;
    doc["dataset"] = dataset_label(opt.data);
    doc["imputed_cells"] = imputed;
    doc["selection"] = nlohmann::json::parse(render_selection_json(sel));
    doc["group_means_threshold"] = opt.rho_report;
    doc["group_means"] = nlohmann::json::parse(render_group_means_json(means));
    emit(doc.dump(2) + "\n", opt.out);
  } else {
    std::ostringstream md;
    md << "# Association screen: " << dataset_label(opt.data) << "\n\n";
    if (imputed > 0) {
      md << "Imputed " << imputed << " missing cells before analysis.\n\n";
    }
    md << render_selection_markdown(sel);
    if (sel.selected_columns.empty()) md << "\nNo variables were selected.\n";
    md << "\n## Group means (|rho| > " << fmt("%.2f", opt.rho_report) << ")\n\n";
    if (strong.empty()) {
      md << "No variables exceed the threshold.\n";
    } else {
      md << render_group_means_markdown(means);
    }
    emit(md.str(), opt.out);
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string data;
  std::string schema;
  std::uint64_t seed = 0;
  int folds = 10;
  double alpha = 0.05;
  double tau = 0.15;
  bool no_tau = false;
  std::string methods;
  std::size_t trees = 1000;
  bool select_in_folds = false;
  bool no_impute = false;
  std::string format = "markdown";
  std::string out;
};

int run_evaluate(const EvaluateOptions& opt) {
  Dataset data = load_input(opt.data, opt.schema);
  std::size_t imputed = 0;
  data = ensure_complete(std::move(data), opt.no_impute, &imputed);

  std::vector<Method> battery;
  if (opt.methods.empty()) {
    battery.assign(kBenchmarkOrder.begin(), kBenchmarkOrder.end());
  } else {
    for (const std::string& token : split_list(opt.methods)) {
      if (token == "baseline") continue;
      auto method = method_from_key(token);
      if (!method) {
        throw InputError("unknown method '" + token +
                         "'; valid: tree1, tree2, lda, qda, forest, logistic, "
                         "svm1, svm2, knn, baseline");
      }
      battery.push_back(*method);
    }
  }

  BenchmarkConfig config;
  config.dataset_name = dataset_label(opt.data);
  config.folds = opt.folds;
  config.forest_trees = opt.trees;
  config.selection_inside_folds = opt.select_in_folds;
  config.selection = selection_config(opt.alpha, opt.tau, opt.no_tau);
  config.seed = opt.seed;

  EvaluationReport report = run_benchmark(data, battery, config);
  if (opt.format == "json") {
    emit(report.to_json_string() + "\n", opt.out);
  } else {
    emit(report.to_markdown(), opt.out);
  }

  bool all_failed =
      !report.results.empty() &&
      std::all_of(report.results.begin(), report.results.end(),
                  [](const MethodResult& r) { return !r.resub_error && !r.cv_mean; });
  return all_failed ? 1 : 0;
}

// ----------------------------------------------------------------- predict

struct PredictOptions {
  std::string train;
  std::string apply;
  std::string schema;
  std::string method = "forest";
  std::uint64_t seed = 0;
  std::size_t trees = 1000;
  double alpha = 0.05;
  double tau = 0.15;
  bool no_tau = false;
  bool no_select = false;
  bool no_impute = false;
  std::string format = "markdown";
  std::string out;
};

std::vector<std::string> nonblank_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

bool header_has_column(const std::string& header, const std::string& name) {
  for (const std::string& field : split_list(header)) {
    if (field == name) return true;
  }
  return false;
}

int run_predict(const PredictOptions& opt) {
  auto method = method_from_key(opt.method);
  if (!method) {
    throw InputError("unknown method '" + opt.method +
                     "'; valid: tree1, tree2, lda, qda, forest, logistic, "
                     "svm1, svm2, knn");
  }
  std::string schema_file =
      opt.schema.empty() ? default_schema_path(opt.train) : opt.schema;
  Schema schema = Schema::from_json(read_file(schema_file));

  std::vector<std::string> apply_lines = nonblank_lines(read_file(opt.apply));
  if (apply_lines.size() <= 1) {
    if (opt.format == "json") {
      nlohmann::json doc;
      doc["method"] = std::string(method_key(*method));
      doc["display_name"] = std::string(method_display_name(*method));
      doc["hyperparameters"] = "";
      doc["students"] = nlohmann::json::array();
      emit(doc.dump(2) + "\n", opt.out);
    } else {
      emit("# Risk list: " + dataset_label(opt.apply) +
               "\n\nNo students in the apply set.\n",
           opt.out);
    }
    return 0;
  }

  std::istringstream train_csv(read_file(opt.train));
  Dataset train = Dataset::from_csv(train_csv, schema);
  train = ensure_complete(std::move(train), opt.no_impute, nullptr);

  std::vector<std::size_t> columns = schema.predictor_indices();
  if (!opt.no_select) {
    SelectionResult sel =
        select_variables(train, selection_config(opt.alpha, opt.tau, opt.no_tau));
    columns = sel.selected_columns;
    if (columns.empty()) {
      throw ModelError(
          "variable selection kept no predictors; rerun with --no-select");
    }
  }

  MethodSpec spec;
  spec.method = *method;
  spec.forest_trees = opt.trees;
  Rng rng(opt.seed);
  Matrix x_train = train.values(columns);
  FittedClassifier fitted = fit_classifier(spec, x_train, train.outcome_labels(), rng);

  // The apply file may omit the outcome column; pad it with a
  // placeholder so the shared schema still parses it.
  const std::string& outcome_name =
      schema.variables[schema.outcome_index()].name;
  std::string apply_text;
  if (header_has_column(apply_lines[0], outcome_name)) {
    apply_text = read_file(opt.apply);
  } else {
    std::ostringstream padded;
    padded << apply_lines[0] << ',' << outcome_name << '\n';
    for (std::size_t i = 1; i < apply_lines.size(); ++i) {
      padded << apply_lines[i] << ",0\n";
    }
    apply_text = padded.str();
  }
  std::istringstream apply_csv(apply_text);
  Dataset apply = Dataset::from_csv(apply_csv, schema);
  apply = ensure_complete(std::move(apply), opt.no_impute, nullptr);
  Matrix x_apply = apply.values(columns);

  struct RiskRow {
    std::size_t student = 0;
    int predicted = 0;
    std::optional<double> probability;
  };
  std::vector<RiskRow> risk;
  for (std::size_t r = 0; r < x_apply.rows; ++r) {
    RiskRow row;
    row.student = r + 1;
    row.predicted = fitted.predict(x_apply.row(r));
    row.probability = fitted.success_probability(x_apply.row(r));
    risk.push_back(row);
  }

  if (opt.format == "json") {
    nlohmann::json doc;
    doc["method"] = std::string(method_key(*method));
    doc["display_name"] = std::string(method_display_name(*method));
    doc["hyperparameters"] = fitted.hyperparameters;
    nlohmann::json students = nlohmann::json::array();
    for (const auto& row : risk) {
      nlohmann::json s;
      s["row"] = row.student;
      s["predicted"] = row.predicted;
      if (row.probability) s["probability"] = *row.probability;
      else s["probability"] = nullptr;
      s["group"] = row.predicted == 0 ? "LPS" : "HPS";
      students.push_back(std::move(s));
    }
    doc["students"] = std::move(students);
    emit(doc.dump(2) + "\n", opt.out);
  } else {
    std::ostringstream md;
    md << "# Risk list: " << dataset_label(opt.apply) << "\n\n";
    md << "- Method: " << method_display_name(*method);
    if (!fitted.hyperparameters.empty()) md << " (" << fitted.hyperparameters << ")";
    md << "\n- Students: " << risk.size() << "\n\n";
    md << "| Student | Predicted class | P(success) | Group |\n";
    md << "| --- | --- | --- | --- |\n";
    for (const auto& row : risk) {
      md << "| " << row.student << " | " << row.predicted << " | ";
      if (row.probability) md << fmt("%.4f", *row.probability);
      else md << "—";
      md << " | " << (row.predicted == 0 ? "LPS" : "HPS") << " |\n";
    }
    emit(md.str(), opt.out);
  }
  return 0;
}

// ------------------------------------------------------------------- synth

struct SynthOptions {
  std::string source;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int run_synth(const SynthOptions& opt) {
  CohortSpec spec;
  std::optional<std::uint64_t> manifest_seed;
  if (std::filesystem::exists(opt.source)) {
    std::string text = read_file(opt.source);
    nlohmann::json probe;
    try {
      probe = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw InputError("'" + opt.source + "' is not valid JSON: " + e.what());
    }
    if (probe.is_object() && probe.contains("spec")) {
      GenerationManifest manifest = GenerationManifest::from_json(text);
      spec = manifest.spec;
      manifest_seed = manifest.seed;
    } else {
      spec = CohortSpec::from_json(text);
    }
  } else {
    try {
      spec = preset_cohort(opt.source);
    } catch (const InputError&) {
      std::string names;
      for (const std::string& name : preset_cohort_names()) {
        if (!names.empty()) names += ", ";
        names += name;
      }
      throw InputError("no file or preset named '" + opt.source +
                       "'; presets: " + names);
    }
  }

  std::uint64_t seed =
      opt.seed_given ? opt.seed : (manifest_seed ? *manifest_seed : spec.seed);
  auto generated = generate_cohort(spec, Rng(seed));
  const Dataset& data = generated.first;
  const GenerationManifest& manifest = generated.second;

  std::filesystem::path dir(opt.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::string stem = spec.name.empty() ? "cohort" : spec.name;
  std::string csv_path = (dir / (stem + ".csv")).string();
  std::string schema_path = (dir / (stem + ".schema.json")).string();
  std::string manifest_path = (dir / (stem + ".manifest.json")).string();
  write_file(csv_path, data.to_csv_string());
  write_file(schema_path, data.schema().to_json_string() + "\n");
  write_file(manifest_path, manifest.to_json_string() + "\n");

  std::cout << "Wrote cohort '" << stem << "': " << data.n_rows() << " rows, "
            << spec.variables.size() << " predictors, "
            << manifest.realized_pass_count << " passing (seed " << seed << ")\n"
            << "  data:     " << csv_path << "\n"
            << "  schema:   " << schema_path << "\n"
            << "  manifest: " << manifest_path << "\n";
  return 0;
}

// ------------------------------------------------------------------ impute

struct ImputeOptions {
  std::string data;
  std::string schema;
  std::size_t neighbors = 10;
  std::string out;
  std::string log;
};

int run_impute(const ImputeOptions& opt) {
  if (opt.neighbors == 0) throw InputError("--neighbors must be at least 1");
  Dataset data = load_input(opt.data, opt.schema);
  if (data.missing_count() == 0) {
    std::cerr << "note: no missing cells; output equals input\n";
    emit(data.to_csv_string(), opt.out);
    if (!opt.log.empty()) {
      write_file(opt.log, ImputationLog{}.to_json_string() + "\n");
    }
    return 0;
  }
  ImputationConfig config;
  config.k = opt.neighbors;
  auto result = impute_missing(data, config);
  std::cerr << "note: imputed " << result.second.cells_imputed << " cells in "
            << result.second.rows_touched << " rows (k=" << opt.neighbors << ")\n";
  emit(result.first.to_csv_string(), opt.out);
  if (!opt.log.empty()) {
    write_file(opt.log, result.second.to_json_string() + "\n");
  }
  return 0;
}

void add_format_options(CLI::App* sub, std::string& format, std::string& out) {
  sub->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"markdown", "json"}))
      ->capture_default_str();
  sub->add_option("--out", out, "Write the report to a file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Student success analysis: schema-driven CSV ingestion, k-NN "
      "imputation, association screening, nine-classifier benchmarks, and "
      "synthetic cohorts"};
  app.require_subcommand(1);

  DescribeOptions describe_opt;
  auto* describe = app.add_subcommand(
      "describe", "Cohort size, success rate, and per-variable summaries");
  describe->add_option("data", describe_opt.data, "Dataset CSV path")->required();
  describe->add_option("--schema", describe_opt.schema,
                       "Schema JSON path (default: <data>.schema.json)");
  add_format_options(describe, describe_opt.format, describe_opt.out);

  AssociateOptions associate_opt;
  auto* associate = app.add_subcommand(
      "associate", "Chi-squared and rank-correlation screen against the outcome");
  associate->add_option("data", associate_opt.data, "Dataset CSV path")->required();
  associate->add_option("--schema", associate_opt.schema,
                        "Schema JSON path (default: <data>.schema.json)");
  associate->add_option("--alpha", associate_opt.alpha,
                        "Chi-squared significance level")->capture_default_str();
  associate->add_option("--tau", associate_opt.tau,
                        "Rank-correlation screen threshold")->capture_default_str();
  associate->add_flag("--no-tau", associate_opt.no_tau,
                      "Disable the rank-correlation screen");
  associate->add_option("--rho-report", associate_opt.rho_report,
                        "|rho| threshold for the group-means table")
      ->capture_default_str();
  associate->add_flag("--no-impute", associate_opt.no_impute,
                      "Fail on missing cells instead of imputing");
  add_format_options(associate, associate_opt.format, associate_opt.out);

  EvaluateOptions evaluate_opt;
  auto* evaluate = app.add_subcommand(
      "evaluate", "Resubstitution and cross-validation benchmark tables");
  evaluate->add_option("data", evaluate_opt.data, "Dataset CSV path")->required();
  evaluate->add_option("--schema", evaluate_opt.schema,
                       "Schema JSON path (default: <data>.schema.json)");
  evaluate->add_option("--seed", evaluate_opt.seed, "Random seed")
      ->capture_default_str();
  evaluate->add_option("--folds", evaluate_opt.folds, "Cross-validation folds")
      ->check(CLI::Range(2, 1000))
      ->capture_default_str();
  evaluate->add_option("--alpha", evaluate_opt.alpha,
                       "Chi-squared significance level")->capture_default_str();
  evaluate->add_option("--tau", evaluate_opt.tau,
                       "Rank-correlation screen threshold")->capture_default_str();
  evaluate->add_flag("--no-tau", evaluate_opt.no_tau,
                     "Disable the rank-correlation screen");
  evaluate->add_option(
      "--methods", evaluate_opt.methods,
      "Comma-separated subset: tree1,tree2,lda,qda,forest,logistic,svm1,svm2,"
      "knn,baseline (default: all)");
  evaluate->add_option("--trees", evaluate_opt.trees, "Random-forest size")
      ->capture_default_str();
  evaluate->add_flag("--select-in-folds", evaluate_opt.select_in_folds,
                     "Rerun variable selection inside each training fold");
  evaluate->add_flag("--no-impute", evaluate_opt.no_impute,
                     "Fail on missing cells instead of imputing");
  add_format_options(evaluate, evaluate_opt.format, evaluate_opt.out);

  PredictOptions predict_opt;
  auto* predict = app.add_subcommand(
      "predict", "Fit one method on a training cohort and tag new students "
                 "HPS/LPS");
  predict->add_option("train", predict_opt.train, "Training CSV path")->required();
  predict->add_option("apply", predict_opt.apply,
                      "CSV of students to score (outcome column optional)")
      ->required();
  predict->add_option("--schema", predict_opt.schema,
                      "Shared schema JSON path (default: <train>.schema.json)");
  predict->add_option("--method", predict_opt.method,
                      "Method key: tree1, tree2, lda, qda, forest, logistic, "
                      "svm1, svm2, knn")
      ->capture_default_str();
  predict->add_option("--seed", predict_opt.seed, "Random seed")
      ->capture_default_str();
  predict->add_option("--trees", predict_opt.trees, "Random-forest size")
      ->capture_default_str();
  predict->add_option("--alpha", predict_opt.alpha,
                      "Chi-squared significance level")->capture_default_str();
  predict->add_option("--tau", predict_opt.tau,
                      "Rank-correlation screen threshold")->capture_default_str();
  predict->add_flag("--no-tau", predict_opt.no_tau,
                    "Disable the rank-correlation screen");
  predict->add_flag("--no-select", predict_opt.no_select,
                    "Fit on all predictors without the variable screen");
  predict->add_flag("--no-impute", predict_opt.no_impute,
                    "Fail on missing cells instead of imputing");
  add_format_options(predict, predict_opt.format, predict_opt.out);

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic cohort from a preset, spec JSON, or "
               "manifest JSON");
  synth->add_option("source", synth_opt.source,
                    "Preset name, cohort spec JSON, or manifest JSON")
      ->required();
  synth->add_option("--out", synth_opt.out_dir, "Output directory")
      ->capture_default_str();
  auto* synth_seed =
      synth->add_option("--seed", synth_opt.seed,
                        "Random seed (default: the spec or manifest seed)");

  ImputeOptions impute_opt;
  auto* impute = app.add_subcommand(
      "impute", "Fill missing predictor cells by k-nearest-neighbour medians");
  impute->add_option("data", impute_opt.data, "Dataset CSV path")->required();
  impute->add_option("--schema", impute_opt.schema,
                     "Schema JSON path (default: <data>.schema.json)");
  impute->add_option("--neighbors", impute_opt.neighbors,
                     "Donors consulted per missing cell")
      ->capture_default_str();
  impute->add_option("--out", impute_opt.out,
                     "Write the completed CSV to a file instead of stdout");
  impute->add_option("--log", impute_opt.log,
                     "Write the per-cell imputation log JSON to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(describe)) return run_describe(describe_opt);
    if (app.got_subcommand(associate)) return run_associate(associate_opt);
    if (app.got_subcommand(evaluate)) return run_evaluate(evaluate_opt);
    if (app.got_subcommand(predict)) return run_predict(predict_opt);
    if (app.got_subcommand(synth)) {
      synth_opt.seed_given = synth_seed->count() > 0;
      return run_synth(synth_opt);
    }
    if (app.got_subcommand(impute)) return run_impute(impute_opt);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

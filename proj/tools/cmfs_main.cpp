// cmfs: feature ranking, selection, and evaluation from the command line.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure,
// 5 internal error.

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <cmfs/cmfs.hpp>
#include <cmfs/format.hpp>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitInternal = 5;

struct InputSpec {
  std::string path;
  bool use_stdin = false;
  std::string label_column = "0";
  std::string delimiter = "auto";
  bool no_header = false;
};

struct OutputSpec {
  std::string format = "table";
  std::string out_path;
};

void add_input_options(CLI::App* cmd, InputSpec& input) {
  auto* positional = cmd->add_option("dataset", input.path, "Delimited dataset file");
  cmd->add_flag("--stdin", input.use_stdin, "Read the dataset from standard input")
      ->excludes(positional);
  cmd->add_option("--label", input.label_column,
                  "Label column: header name, or 0-based index (default 0)");
  cmd->add_option("--delimiter", input.delimiter,
                  "Field delimiter: a single character, or 'auto'/'tab'/'comma'");
  cmd->add_flag("--no-header", input.no_header, "Treat the first line as data, not column names");
}

void add_output_options(CLI::App* cmd, OutputSpec& output) {
  cmd->add_option("--format", output.format, "Output format: table, delimited, or json")
      ->check(CLI::IsMember({"table", "delimited", "json", "structured"}));
  cmd->add_option("-o,--out", output.out_path, "Write output to a file instead of standard output");
}

cmfs::DelimitedOptions delimited_options(const InputSpec& input) {
  cmfs::DelimitedOptions options;
  options.has_header = !input.no_header;
  options.label_column = input.label_column;
  if (input.delimiter == "auto")
    options.delimiter = '\0';
  else if (input.delimiter == "tab")
    options.delimiter = '\t';
  else if (input.delimiter == "comma")
    options.delimiter = ',';
  else if (input.delimiter.size() == 1)
    options.delimiter = input.delimiter.front();
  else
    throw std::invalid_argument("--delimiter: expected a single character, 'auto', 'tab', or 'comma'");
  return options;
}

cmfs::Dataset load_input(const InputSpec& input, std::string& display_name) {
  const cmfs::DelimitedOptions options = delimited_options(input);
  if (input.use_stdin) {
    display_name = "<stdin>";
    return cmfs::parse_delimited(std::cin, options, "<stdin>");
  }
  if (input.path.empty())
    throw std::invalid_argument("no dataset given (pass a file path or --stdin)");
  display_name = std::filesystem::path(input.path).filename().string();
  return cmfs::load_delimited(input.path, options);
}

std::uint32_t resolve_seed(const CLI::App* cmd, std::uint32_t flag_value) {
  if (cmd->count("--seed") > 0) return flag_value;
  if (const char* env = std::getenv("CMFS_SEED"); env != nullptr && *env != '\0') {
    std::uint32_t v = 0;
    const char* end = env + std::strlen(env);
    auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec != std::errc{} || ptr != end)
      throw std::invalid_argument(std::string("CMFS_SEED: cannot parse '") + env +
                                  "' as an unsigned integer");
    return v;
  }
  return 1;
}

void emit(const std::string& text, const OutputSpec& output) {
  if (output.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output.out_path, std::ios::binary);
  if (!out) throw cmfs::DataError(output.out_path + ": cannot open for writing");
  out << text;
}

cmfs::Method parse_method(const std::string& token) {
  const auto method = cmfs::method_from_token(token);
  if (!method)
    throw std::invalid_argument("unknown method '" + token + "' (expected cm, pearson, laplacian, or pca)");
  return *method;
}

std::vector<cmfs::Method> parse_method_list(const std::string& tokens) {
  std::vector<cmfs::Method> methods;
  std::size_t start = 0;
  while (start <= tokens.size()) {
    const std::size_t comma = tokens.find(',', start);
    const std::string token = tokens.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!token.empty()) methods.push_back(parse_method(token));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (methods.empty()) throw std::invalid_argument("--methods: empty method list");
  return methods;
}

cmfs::RunMeta make_meta(const std::string& command, const std::string& dataset_name,
                        const cmfs::Dataset& data) {
  cmfs::RunMeta meta;
  meta.command = command;
  meta.dataset_name = dataset_name;
  meta.rows = data.n_samples();
  meta.cols = data.n_features();
  meta.hash = cmfs::fingerprint(data);
  return meta;
}

// ---------------------------------------------------------------- rank / select

struct RankArgs {
  InputSpec input;
  OutputSpec output;
  std::string method = "cm";
  bool no_standardize = false;
  int laplacian_k = 5;
  std::size_t count = 0;  // select only
};

cmfs::FeatureRanking rank_on(const cmfs::Dataset& data, const RankArgs& args) {
  cmfs::LaplacianOptions laplacian;
  laplacian.k_neighbors = args.laplacian_k;
  if (args.no_standardize) return cmfs::rank_features(data, parse_method(args.method), laplacian);
  const auto [scaled, scaler] = cmfs::standardize(data);
  return cmfs::rank_features(scaled, parse_method(args.method), laplacian);
}

void append_rank_config(cmfs::RunMeta& meta, const RankArgs& args) {
  meta.config.emplace_back("method", args.method);
  meta.config.emplace_back("label", args.input.label_column);
  meta.config.emplace_back("standardize", args.no_standardize ? "no" : "yes");
  if (parse_method(args.method) == cmfs::Method::LaplacianScore)
    meta.config.emplace_back("laplacian_k", std::to_string(args.laplacian_k));
}

int run_rank(const RankArgs& args) {
  std::string name;
  const cmfs::Dataset data = load_input(args.input, name);
  const cmfs::FeatureRanking ranking = rank_on(data, args);

  cmfs::RunMeta meta = make_meta("rank", name, data);
  append_rank_config(meta, args);

  const auto format = cmfs::format_from_token(args.output.format);
  switch (*format) {
    case cmfs::OutputFormat::Table: emit(cmfs::rank_to_table(ranking, meta), args.output); break;
    case cmfs::OutputFormat::Delimited: emit(cmfs::rank_to_delimited(ranking, meta), args.output); break;
    case cmfs::OutputFormat::Json: emit(cmfs::rank_to_json(ranking, meta), args.output); break;
  }
  return 0;
}

int run_select(const RankArgs& args) {
  std::string name;
  const cmfs::Dataset data = load_input(args.input, name);
  const cmfs::FeatureRanking ranking = rank_on(data, args);
  const std::vector<std::size_t> chosen = cmfs::select_top(ranking, args.count);

  cmfs::RunMeta meta = make_meta("select", name, data);
  append_rank_config(meta, args);
  meta.config.emplace_back("m", std::to_string(args.count));

  const auto format = cmfs::format_from_token(args.output.format);
  switch (*format) {
    case cmfs::OutputFormat::Table: emit(cmfs::select_to_table(ranking, chosen, meta), args.output); break;
    case cmfs::OutputFormat::Delimited:
      emit(cmfs::select_to_delimited(ranking, chosen, meta), args.output);
      break;
    case cmfs::OutputFormat::Json: emit(cmfs::select_to_json(ranking, chosen, meta), args.output); break;
  }
  return 0;
}

// ---------------------------------------------------------------- evaluate / bench

struct EvalArgs {
  InputSpec input;
  OutputSpec output;
  std::vector<std::string> paths;  // bench only
  std::string methods = "cm,pearson,laplacian,pca";
  int repetitions = 5;
  double train_fraction = 0.5;
  std::uint32_t seed = 1;
  int k_neighbors = 5;
  double sweep_fraction = 0.8;
  double lowdim_fraction = 0.4;
  int laplacian_k = 5;
};

void add_eval_options(CLI::App* cmd, EvalArgs& args) {
  cmd->add_option("--methods", args.methods, "Comma-separated method list (default all four)");
  cmd->add_option("--reps", args.repetitions, "Number of repeated splits");
  cmd->add_option("--train-fraction", args.train_fraction, "Training fraction of each split");
  cmd->add_option("--seed", args.seed, "Base seed; repetition r uses seed + r");
  cmd->add_option("-k,--neighbors", args.k_neighbors, "Classifier neighborhood size");
  cmd->add_option("--sweep-fraction", args.sweep_fraction, "Sweep feature counts up to this fraction");
  cmd->add_option("--lowdim-fraction", args.lowdim_fraction,
                  "Aggregate counts up to this fraction into the low-dimension mean");
  cmd->add_option("--laplacian-k", args.laplacian_k, "Neighborhood size of the Laplacian graph");
}

cmfs::ExperimentConfig make_config(const EvalArgs& args, const CLI::App* cmd) {
  cmfs::ExperimentConfig config;
  config.repetitions = args.repetitions;
  config.train_fraction = args.train_fraction;
  config.base_seed = resolve_seed(cmd, args.seed);
  config.k_neighbors = args.k_neighbors;
  config.sweep_max_fraction = args.sweep_fraction;
  config.lowdim_fraction = args.lowdim_fraction;
  config.methods = parse_method_list(args.methods);
  config.laplacian.k_neighbors = args.laplacian_k;
  config.validate();
  return config;
}

int run_evaluate(const EvalArgs& args, const CLI::App* cmd) {
  const cmfs::ExperimentConfig config = make_config(args, cmd);
  std::string name;
  const cmfs::Dataset data = load_input(args.input, name);
  const cmfs::EvaluationReport report = cmfs::run_sweep(data, config);

  cmfs::RunMeta meta = make_meta("evaluate", name, data);
  meta.config.emplace_back("label", args.input.label_column);
  for (auto& pair : cmfs::config_pairs(config)) meta.config.push_back(std::move(pair));

  const auto format = cmfs::format_from_token(args.output.format);
  switch (*format) {
    case cmfs::OutputFormat::Table: emit(cmfs::report_to_table(report, meta), args.output); break;
    case cmfs::OutputFormat::Delimited: emit(cmfs::report_to_delimited(report, meta), args.output); break;
    case cmfs::OutputFormat::Json: emit(cmfs::report_to_json(report, meta), args.output); break;
  }
  return 0;
}

int run_bench(const EvalArgs& args, const CLI::App* cmd) {
  const cmfs::ExperimentConfig config = make_config(args, cmd);

  cmfs::BenchReport bench;
  bench.methods = config.methods;
  for (const std::string& path : args.paths) {
    const std::string name = std::filesystem::path(path).filename().string();
    try {
      InputSpec input = args.input;
      input.path = path;
      std::string loaded_name;
      const cmfs::Dataset data = load_input(input, loaded_name);
      const cmfs::EvaluationReport report = cmfs::run_sweep(data, config);

      cmfs::BenchEntry entry;
      entry.dataset_name = name;
      entry.rows = data.n_samples();
      entry.cols = data.n_features();
      entry.hash = report.dataset_hash;
      for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
        entry.low_dim_pct.push_back(report.low_dim_mean[mi] * 100.0);
        if (report.low_dim_mean[mi] > report.low_dim_mean[entry.best_method]) entry.best_method = mi;
      }
      bench.entries.push_back(std::move(entry));
    } catch (const std::exception& e) {
      bench.failures.push_back({name, e.what()});
    }
  }

  cmfs::RunMeta meta;
  meta.command = "bench";
  meta.config.emplace_back("label", args.input.label_column);
  for (auto& pair : cmfs::config_pairs(config)) meta.config.push_back(std::move(pair));

  const auto format = cmfs::format_from_token(args.output.format);
  switch (*format) {
    case cmfs::OutputFormat::Table: emit(cmfs::bench_to_table(bench, meta), args.output); break;
    case cmfs::OutputFormat::Delimited: emit(cmfs::bench_to_delimited(bench, meta), args.output); break;
    case cmfs::OutputFormat::Json: emit(cmfs::bench_to_json(bench, meta), args.output); break;
  }
  return bench.entries.empty() ? kExitData : 0;
}

// ---------------------------------------------------------------- viz

struct VizArgs {
  InputSpec input;
  OutputSpec output;
  std::string method = "cm";
  std::uint32_t seed = 1;
  double train_fraction = 0.5;
  int laplacian_k = 5;
};

int run_viz(const VizArgs& args, const CLI::App* cmd) {
  const std::uint32_t seed = resolve_seed(cmd, args.seed);
  std::string name;
  const cmfs::Dataset data = load_input(args.input, name);
  if (data.n_features() < 2)
    throw cmfs::DataError(name + ": need at least 2 features for 2-D visualization");

  const cmfs::SplitPair split = cmfs::stratified_split(data, args.train_fraction, seed);
  const auto [train_std, scaler] = cmfs::standardize(split.train);
  cmfs::LaplacianOptions laplacian;
  laplacian.k_neighbors = args.laplacian_k;
  const cmfs::FeatureRanking ranking = cmfs::rank_features(train_std, parse_method(args.method), laplacian);
  const std::vector<std::size_t> top2 = cmfs::select_top(ranking, 2);

  // scatter coordinates stay in original units: ranking is computed on the
  // standardized training half, the plot shows the raw test half
  cmfs::VizData viz;
  viz.feature_x = data.feature_names[top2[0]];
  viz.feature_y = data.feature_names[top2[1]];
  for (std::size_t i = 0; i < split.test.n_samples(); ++i) {
    viz.x.push_back(split.test.features(i, top2[0]));
    viz.y.push_back(split.test.features(i, top2[1]));
    viz.class_names.push_back(split.test.class_names[static_cast<std::size_t>(split.test.labels[i])]);
  }

  cmfs::RunMeta meta = make_meta("viz", name, data);
  meta.config.emplace_back("method", args.method);
  meta.config.emplace_back("label", args.input.label_column);
  meta.config.emplace_back("seed", std::to_string(seed));
  meta.config.emplace_back("train_fraction", cmfs::fixed6(args.train_fraction));
  if (parse_method(args.method) == cmfs::Method::LaplacianScore)
    meta.config.emplace_back("laplacian_k", std::to_string(args.laplacian_k));

  const auto format = cmfs::format_from_token(args.output.format);
  switch (*format) {
    case cmfs::OutputFormat::Table: emit(cmfs::viz_to_table(viz, meta), args.output); break;
    case cmfs::OutputFormat::Delimited: emit(cmfs::viz_to_delimited(viz, meta), args.output); break;
    case cmfs::OutputFormat::Json: emit(cmfs::viz_to_json(viz, meta), args.output); break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-machine feature selection toolkit"};
  app.set_version_flag("--version", std::string("cmfs ") + cmfs::kVersion);
  app.require_subcommand(1);

  RankArgs rank_args;
  auto* rank_cmd = app.add_subcommand("rank", "Score and rank every feature");
  add_input_options(rank_cmd, rank_args.input);
  add_output_options(rank_cmd, rank_args.output);
  rank_cmd->add_option("--method", rank_args.method, "Scoring method: cm, pearson, laplacian, pca");
  rank_cmd->add_flag("--no-standardize", rank_args.no_standardize,
                     "Rank raw feature values instead of standardized ones");
  rank_cmd->add_option("--laplacian-k", rank_args.laplacian_k,
                       "Neighborhood size of the Laplacian graph");

  RankArgs select_args;
  auto* select_cmd = app.add_subcommand("select", "Emit the top-m features");
  add_input_options(select_cmd, select_args.input);
  add_output_options(select_cmd, select_args.output);
  select_cmd->add_option("--method", select_args.method, "Scoring method: cm, pearson, laplacian, pca");
  select_cmd->add_option("-m,--count", select_args.count, "How many features to keep")->required();
  select_cmd->add_flag("--no-standardize", select_args.no_standardize,
                       "Rank raw feature values instead of standardized ones");
  select_cmd->add_option("--laplacian-k", select_args.laplacian_k,
                         "Neighborhood size of the Laplacian graph");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("evaluate", "Repeated-split accuracy sweep over feature counts");
  add_input_options(eval_cmd, eval_args.input);
  add_output_options(eval_cmd, eval_args.output);
  add_eval_options(eval_cmd, eval_args);

  EvalArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Compare methods across several datasets");
  bench_cmd->add_option("datasets", bench_args.paths, "Delimited dataset files")->required();
  bench_cmd->add_option("--label", bench_args.input.label_column,
                        "Label column: header name, or 0-based index (default 0)");
  bench_cmd->add_option("--delimiter", bench_args.input.delimiter,
                        "Field delimiter: a single character, or 'auto'/'tab'/'comma'");
  bench_cmd->add_flag("--no-header", bench_args.input.no_header,
                      "Treat the first line as data, not column names");
  add_output_options(bench_cmd, bench_args.output);
  add_eval_options(bench_cmd, bench_args);

  VizArgs viz_args;
  auto* viz_cmd = app.add_subcommand("viz", "Top-2 feature scatter data for the test half");
  add_input_options(viz_cmd, viz_args.input);
  add_output_options(viz_cmd, viz_args.output);
  viz_cmd->add_option("--method", viz_args.method, "Scoring method: cm, pearson, laplacian, pca");
  viz_cmd->add_option("--seed", viz_args.seed, "Split seed");
  viz_cmd->add_option("--train-fraction", viz_args.train_fraction, "Training fraction of the split");
  viz_cmd->add_option("--laplacian-k", viz_args.laplacian_k,
                      "Neighborhood size of the Laplacian graph");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (rank_cmd->parsed()) return run_rank(rank_args);
    if (select_cmd->parsed()) return run_select(select_args);
    if (eval_cmd->parsed()) return run_evaluate(eval_args, eval_cmd);
    if (bench_cmd->parsed()) return run_bench(bench_args, bench_cmd);
    if (viz_cmd->parsed()) return run_viz(viz_args, viz_cmd);
    std::cerr << "cmfs: no subcommand\n";
    return kExitUsage;
  } catch (const cmfs::DataError& e) {
    std::cerr << "cmfs: data error: " << e.what() << "\n";
    return kExitData;
  } catch (const cmfs::NumericError& e) {
    std::cerr << "cmfs: numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "cmfs: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "cmfs: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

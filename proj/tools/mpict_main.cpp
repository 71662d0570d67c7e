// mpict — corpus building, preprocessing, anonymization, and evaluation for
// MPI code generation experiments. One binary, six subcommands; see --help.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpict/anonymize.hpp"
#include "mpict/corpus.hpp"
#include "mpict/evaluate.hpp"
#include "mpict/jsonl.hpp"
#include "mpict/preprocess.hpp"
#include "mpict/report.hpp"

namespace {

constexpr int kExitUsage = 64;     // bad flags or subcommand
constexpr int kExitData = 65;      // malformed input content
constexpr int kExitNoInput = 66;   // missing file or directory
constexpr int kExitInternal = 70;  // everything else

struct NoInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_exists(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw NoInputError("no such file or directory: " + path.string());
}

void print_error(int code, const std::string& message) {
  std::cerr << mpict::json{{"error", message}, {"exit_code", code}}.dump()
            << '\n';
}

void print_diagnostics(const mpict::Diagnostics& diags) {
  for (const auto& d : diags.entries())
    std::cerr << mpict::to_json(d).dump() << '\n';
}

int default_jobs() {
  if (const char* env = std::getenv("MPICT_JOBS")) {
    int jobs = std::atoi(env);
    if (jobs > 0) return jobs;
  }
  return 1;
}

mpict::NumberingMode numbering_from_string(const std::string& s) {
  if (s == "bare") return mpict::NumberingMode::Bare;
  if (s == "prefixed") return mpict::NumberingMode::Prefixed;
  throw CLI::ValidationError("--numbering must be 'prefixed' or 'bare'");
}

// Settings shared across subcommands, seeded from defaults, then an
// optional JSON config file, then flags (flags win).
struct RunConfig {
  std::size_t token_budget = 2048;
  std::string tokenizer = "lexical";
  std::string merges_path;
  std::string numbering = "prefixed";
  std::vector<int> variances = {0, 1, 2};
  int max_n = 20;
  int breakdown_variance = 2;
  std::uint64_t seed = 42;
  int jobs = default_jobs();

  void load(const std::filesystem::path& path) {
    require_exists(path);
    mpict::json j = mpict::json::parse(mpict::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw DataError("config file is not a JSON object: " + path.string());
    token_budget = j.value("token_budget", token_budget);
    tokenizer = j.value("tokenizer", tokenizer);
    merges_path = j.value("merges", merges_path);
    numbering = j.value("numbering", numbering);
    if (j.contains("variances"))
      variances = j["variances"].get<std::vector<int>>();
    max_n = j.value("max_n", max_n);
    breakdown_variance = j.value("breakdown_variance", breakdown_variance);
    seed = j.value("seed", seed);
    jobs = j.value("jobs", jobs);
  }
};

int run_build_corpus(const std::filesystem::path& input,
                     const std::filesystem::path& out_dir,
                     const RunConfig& config) {
  require_exists(input);
  mpict::Diagnostics diags;
  auto units = mpict::ingest(input, &diags);

  mpict::BuildOptions options;
  options.token_budget = config.token_budget;
  options.tokenizer.scheme = config.tokenizer;
  options.tokenizer.merges_path = config.merges_path;
  options.numbering = numbering_from_string(config.numbering);
  options.jobs = config.jobs;

  mpict::BuildResult result =
      mpict::build_corpus(std::move(units), options, &diags);

  std::filesystem::create_directories(out_dir);
  {
    auto out = mpict::open_output(out_dir / "dataset.jsonl");
    mpict::write_dataset_jsonl(out, result.records);
  }
  mpict::write_file(out_dir / "stats.json",
                    mpict::to_json(result.stats).dump(2) + "\n");

  print_diagnostics(diags);
  std::cout << mpict::json{
                   {"records", result.records.size()},
                   {"ingested", result.stats.total_ingested},
                   {"after_filter", result.stats.total_after_filter},
                   {"after_dedup", result.stats.total_after_dedup},
                   {"dataset", (out_dir / "dataset.jsonl").string()},
                   {"stats", (out_dir / "stats.json").string()}}
                   .dump()
            << '\n';
  return 0;
}

int run_preprocess(const std::filesystem::path& file, const RunConfig& config) {
  require_exists(file);
  mpict::Diagnostics diags;
  auto unit = mpict::make_source_unit(
      file.filename().string(), file.filename().string(),
      mpict::sanitize_utf8(mpict::read_file(file), &diags));
  auto example = mpict::strip_and_label(
      unit, numbering_from_string(config.numbering), &diags);
  std::cout << mpict::render_example(example);
  print_diagnostics(diags);
  return 0;
}

int run_anonymize(const std::filesystem::path& file, const RunConfig& config,
                  const std::string& map_path, bool anonymize_strings) {
  require_exists(file);
  mpict::Diagnostics diags;
  mpict::AnonymizeOptions options;
  options.seed = config.seed;
  options.anonymize_strings = anonymize_strings;
  auto result = mpict::anonymize(
      mpict::sanitize_utf8(mpict::read_file(file), &diags), options, &diags);
  std::cout << result.code;
  if (!map_path.empty())
    mpict::write_file(map_path, mpict::to_json(result.map).dump(2) + "\n");
  print_diagnostics(diags);
  return 0;
}

int run_evaluate(const std::filesystem::path& gt_path,
                 const std::filesystem::path& pred_path,
                 const std::string& out_path, const RunConfig& config) {
  require_exists(gt_path);
  require_exists(pred_path);
  mpict::Diagnostics diags;

  auto gt_in = mpict::open_input(gt_path);
  auto gt = mpict::read_dataset_jsonl(gt_in, gt_path.filename().string(),
                                      &diags);
  if (gt.empty())
    throw DataError("no usable ground-truth records in " + gt_path.string());

  auto pred_in = mpict::open_input(pred_path);
  auto preds = mpict::read_predictions_jsonl(
      pred_in, pred_path.filename().string(), &diags);

  mpict::MatchConfig match;
  match.variances = config.variances;
  match.max_n = config.max_n;
  match.breakdown_variance = config.breakdown_variance;

  auto report = mpict::evaluate_corpus(gt, preds, match, &diags, config.jobs);
  const std::string serialized = mpict::to_json(report).dump(2) + "\n";
  if (out_path.empty())
    std::cout << serialized;
  else
    mpict::write_file(out_path, serialized);
  print_diagnostics(diags);
  return 0;
}

int run_stats(const std::filesystem::path& input, const std::string& json_path,
              const RunConfig& config) {
  require_exists(input);
  mpict::Diagnostics diags;
  mpict::CorpusStats stats;

  bool dataset_input = false;
  if (!std::filesystem::is_directory(input)) {
    auto in = mpict::open_input(input);
    std::string line;
    while (std::getline(in, line)) {
      if (mpict::trim(line).empty()) continue;
      auto j = mpict::json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object()) continue;
      dataset_input = j.contains("mpi_label");
      break;
    }
  }

  if (dataset_input) {
    auto in = mpict::open_input(input);
    auto records =
        mpict::read_dataset_jsonl(in, input.filename().string(), &diags);
    stats.total_ingested = records.size();
    stats.total_after_filter = records.size();
    stats.total_after_dedup = records.size();
    for (const auto& record : records)
      for (const auto& label : mpict::parse_labels(record.mpi_label, &diags))
        if (auto call = mpict::parse_call(label.call_text))
          ++stats.per_function_counts[call->function_name];
  } else {
    auto units = mpict::ingest(input, &diags);
    stats = mpict::corpus_stats(units, config.jobs, &diags);
  }

  std::printf("%-18s %10s\n", "function", "count");
  for (const auto& [name, count] : mpict::common_core_distribution(stats))
    std::printf("%-18s %10zu\n", name.c_str(), count);

  if (!json_path.empty())
    mpict::write_file(json_path, mpict::to_json(stats).dump(2) + "\n");
  print_diagnostics(diags);
  return 0;
}

int run_report(const std::filesystem::path& report_path,
               const std::string& format, const std::string& stats_path,
               const std::filesystem::path& out_dir) {
  require_exists(report_path);
  auto j = mpict::json::parse(mpict::read_file(report_path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw DataError("not a JSON report: " + report_path.string());

  mpict::EvalReport report;
  try {
    report = mpict::eval_report_from_json(j);
  } catch (const std::exception& e) {
    throw DataError("unrecognized report structure: " + std::string(e.what()));
  }

  std::optional<mpict::CorpusStats> stats;
  if (!stats_path.empty()) {
    require_exists(stats_path);
    auto sj = mpict::json::parse(mpict::read_file(stats_path), nullptr, false);
    if (sj.is_discarded())
      throw DataError("not a JSON stats file: " + stats_path);
    stats = mpict::corpus_stats_from_json(sj);
  }

  auto written = mpict::emit_report(
      report, stats ? &*stats : nullptr,
      format == "json" ? mpict::ReportFormat::Json : mpict::ReportFormat::Csv,
      out_dir);
  for (const auto& path : written) std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mpict: build strip-and-label datasets from C/C++ MPI programs and "
      "score model-generated MPI calls"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 64 usage error, 65 malformed input data, "
      "66 missing input file, 70 internal error.\n"
      "Diagnostics are streamed to stderr as JSON lines.\n"
      "MPICT_JOBS sets the default worker count.");

  RunConfig config;
  // Config file values are applied before flag parsing, so flags win.
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string_view(argv[i]) == "--config") {
      try {
        config.load(argv[i + 1]);
      } catch (const NoInputError& e) {
        print_error(kExitNoInput, e.what());
        return kExitNoInput;
      } catch (const std::exception& e) {
        print_error(kExitData, e.what());
        return kExitData;
      }
    }
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config file (precedence: flags > config > defaults)");

  std::filesystem::path in_path, out_path;
  std::string gt_path, pred_path, out_file, map_path, json_path, stats_path;
  std::string format = "csv";
  bool anonymize_strings = false;

  auto* build = app.add_subcommand(
      "build-corpus", "Ingest raw programs, filter, dedup, strip and label");
  build->add_option("input", in_path,
                    "directory of .c/.cc/.cpp/.h files, or a JSONL file with "
                    "{program_id, origin, text} records")
      ->required();
  build->add_option("out_dir", out_path, "output directory")->required();
  build->add_option("--budget", config.token_budget,
                    "token budget, inclusive (default 2048)")->capture_default_str();
  build->add_option("--tokenizer", config.tokenizer,
                    "token counting scheme: lexical | bpe")->capture_default_str();
  build->add_option("--merges", config.merges_path,
                    "merges file for the bpe scheme");
  build->add_option("--numbering", config.numbering,
                    "line numbering in the code field: prefixed | bare")->capture_default_str();
  build->add_option("--jobs", config.jobs, "worker threads")->capture_default_str();

  auto* preprocess = app.add_subcommand(
      "preprocess", "Print the stripped, labeled rendering of one file");
  preprocess->add_option("file", in_path, "C/C++ source file")->required();
  preprocess->add_option("--numbering", config.numbering,
                         "prefixed | bare (default prefixed)")->capture_default_str();

  auto* anonymize = app.add_subcommand(
      "anonymize", "Replace identifiers and literals with placeholders");
  anonymize->add_option("file", in_path, "C/C++ source file")->required();
  anonymize->add_option("--seed", config.seed, "placeholder PRNG seed")->capture_default_str();
  anonymize->add_option("--map", map_path, "write the anonymization map here");
  anonymize->add_flag("--strings", anonymize_strings,
                      "also replace string/char literals");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Score predictions against a dataset's labels");
  evaluate->add_option("--gt", gt_path, "ground-truth dataset JSONL")
      ->required();
  evaluate->add_option("--pred", pred_path, "predictions JSONL")->required();
  evaluate->add_option("--variance", config.variances,
                       "line variances to evaluate (default 0,1,2)")
      ->delimiter(',')->capture_default_str();
  evaluate->add_option("--max-n", config.max_n,
                       "largest cumulative bucket (default 20)")->capture_default_str();
  evaluate->add_option("--breakdown-variance", config.breakdown_variance,
                       "variance used for the per-function breakdown")->capture_default_str();
  evaluate->add_option("--out", out_file,
                       "write the report here instead of stdout");
  evaluate->add_option("--jobs", config.jobs, "worker threads")->capture_default_str();

  auto* stats = app.add_subcommand(
      "stats", "Common Core function distribution of a corpus or dataset");
  stats->add_option("input", in_path,
                    "directory, raw-corpus JSONL, or dataset JSONL")
      ->required();
  stats->add_option("--json", json_path, "also write full stats JSON here");
  stats->add_option("--jobs", config.jobs, "worker threads")->capture_default_str();

  auto* report = app.add_subcommand(
      "report", "Flatten an evaluation report to plot-ready files");
  report->add_option("report", in_path, "report.json from evaluate")
      ->required();
  report->add_option("--format", format, "csv | json (default csv)")
      ->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  report->add_option("--stats", stats_path,
                     "stats.json for distribution.csv");
  report->add_option("--out-dir", out_path, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*build) return run_build_corpus(in_path, out_path, config);
    if (*preprocess) return run_preprocess(in_path, config);
    if (*anonymize)
      return run_anonymize(in_path, config, map_path, anonymize_strings);
    if (*evaluate)
      return run_evaluate(gt_path, pred_path, out_file, config);
    if (*stats) return run_stats(in_path, json_path, config);
    if (*report) {
      if (out_path.empty()) out_path = ".";
      return run_report(in_path, format, stats_path, out_path);
    }
  } catch (const NoInputError& e) {
    print_error(kExitNoInput, e.what());
    return kExitNoInput;
  } catch (const DataError& e) {
    print_error(kExitData, e.what());
    return kExitData;
  } catch (const CLI::ValidationError& e) {
    print_error(kExitUsage, e.what());
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    print_error(kExitData, e.what());
    return kExitData;
  } catch (const std::exception& e) {
    print_error(kExitInternal, e.what());
    return kExitInternal;
  }
  return kExitUsage;
}

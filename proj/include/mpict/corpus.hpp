#pragma once

// Corpus pipeline: ingest raw programs, keep the MPI ones under the token
// budget, drop normalized duplicates, and emit the three-field dataset
// (program, code, mpi_label) plus corpus statistics.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mpict/diagnostics.hpp"
#include "mpict/jsonl.hpp"
#include "mpict/preprocess.hpp"
#include "mpict/scanner.hpp"
#include "mpict/text.hpp"
#include "mpict/token_count.hpp"

namespace mpict {

struct DatasetRecord {
  std::string program;    // origin id
  std::string code;       // stripped, line-numbered code
  std::string mpi_label;  // serialized (line, call) tail lines
};

struct CorpusStats {
  std::size_t total_ingested = 0;
  std::size_t total_after_filter = 0;
  std::size_t total_after_dedup = 0;
  std::map<std::string, std::size_t> per_function_counts;
};

// The eight most prevalent MPI functions in domain-decomposition code.
inline constexpr std::array<std::string_view, 8> kCommonCoreFunctions = {
    "MPI_Init",      "MPI_Finalize", "MPI_Comm_rank", "MPI_Comm_size",
    "MPI_Send",      "MPI_Recv",     "MPI_Bcast",     "MPI_Reduce"};

// Runs `work(i)` for i in [0, n) on up to `jobs` threads. Results must be
// written to pre-sized slots; output order stays the input order.
inline void parallel_for(std::size_t n, int jobs,
                         const std::function<void(std::size_t)>& work) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
      work(i);
  };
  std::vector<std::thread> pool;
  const int threads = std::min<int>(jobs, static_cast<int>(n));
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}

namespace detail {

inline bool has_source_extension(const std::filesystem::path& p) {
  static constexpr std::string_view kExtensions[] = {".c", ".cc", ".cpp",
                                                     ".h"};
  const std::string ext = p.extension().string();
  for (auto e : kExtensions)
    if (ext == e) return true;
  return false;
}

}  // namespace detail

// One SourceUnit per readable source file under `root`, in lexicographic
// path order. The relative path doubles as program id and origin.
inline std::vector<SourceUnit> ingest_directory(
    const std::filesystem::path& root, Diagnostics* diags = nullptr) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root))
    if (entry.is_regular_file() && detail::has_source_extension(entry.path()))
      paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());

  std::vector<SourceUnit> units;
  units.reserve(paths.size());
  for (const auto& path : paths) {
    std::string id = std::filesystem::relative(path, root).generic_string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      report(diags, "unreadable-file", "skipped", id);
      continue;
    }
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (text.empty()) {
      report(diags, "empty-file", "skipped", id);
      continue;
    }
    units.push_back(make_source_unit(id, id, sanitize_utf8(text, diags)));
  }
  return units;
}

// JSONL records with fields {program_id, origin, text}. Bad lines and
// incomplete records are skipped with diagnostics.
inline std::vector<SourceUnit> ingest_jsonl(std::istream& in,
                                            const std::string& context,
                                            Diagnostics* diags = nullptr) {
  std::vector<SourceUnit> units;
  auto get_string = [](const json& j, const char* key) -> std::string {
    auto it = j.find(key);
    return it != j.end() && it->is_string() ? it->get<std::string>()
                                            : std::string{};
  };
  read_jsonl(
      in, context,
      [&](const json& record, int line_no) {
        std::string text = get_string(record, "text");
        if (text.empty()) {
          report(diags, "missing-text", "record has no usable text field",
                 context, line_no);
          return;
        }
        std::string id = get_string(record, "program_id");
        if (id.empty()) id = context + ":" + std::to_string(line_no);
        std::string origin = get_string(record, "origin");
        if (origin.empty()) origin = id;
        units.push_back(make_source_unit(std::move(id), std::move(origin),
                                         sanitize_utf8(text, diags)));
      },
      diags);
  return units;
}

// Directory or .jsonl file, dispatched on what the path is.
inline std::vector<SourceUnit> ingest(const std::filesystem::path& input,
                                      Diagnostics* diags = nullptr) {
  if (std::filesystem::is_directory(input))
    return ingest_directory(input, diags);
  auto in = open_input(input);
  return ingest_jsonl(in, input.filename().string(), diags);
}

// The corpus admission test: at least one MPI_Init call and one
// MPI_Finalize call, and the whole text within the token budget
// (inclusive).
inline bool filter_mpi_program(const SourceUnit& unit, std::size_t budget,
                               const TokenCounter& counter) {
  bool has_init = false;
  bool has_finalize = false;
  for (const auto& site : extract_mpi_calls(unit)) {
    has_init |= site.function_name == "MPI_Init";
    has_finalize |= site.function_name == "MPI_Finalize";
    if (has_init && has_finalize) break;
  }
  if (!has_init || !has_finalize) return false;
  return counter.count(unit.text) <= budget;
}

// Normalization used for duplicate detection: comments become a space,
// every whitespace run becomes a space, ends trimmed.
inline std::string dedup_normalize(std::string_view text) {
  std::string flattened;
  flattened.reserve(text.size());
  for (const Token& t : tokenize(text))
    if (t.kind == TokenKind::Comment)
      flattened.push_back(' ');
    else
      flattened += t.lexeme;
  return normalize_whitespace(flattened);
}

// Keeps the first-seen unit of each normalization-equivalence class.
inline std::vector<SourceUnit> deduplicate(std::vector<SourceUnit> units) {
  std::unordered_set<std::string> seen;
  std::vector<SourceUnit> out;
  out.reserve(units.size());
  for (auto& unit : units)
    if (seen.insert(dedup_normalize(unit.text)).second)
      out.push_back(std::move(unit));
  return out;
}

struct BuildOptions {
  std::size_t token_budget = 2048;
  TokenizerConfig tokenizer;
  NumberingMode numbering = NumberingMode::Prefixed;
  int jobs = 1;
};

struct BuildResult {
  std::vector<DatasetRecord> records;
  CorpusStats stats;
};

// Strip-and-label step over already filtered and deduplicated units.
// Units with no removable call are excluded; per-function counts tally
// every extracted call in the units that produced records.
inline BuildResult build_dataset(const std::vector<SourceUnit>& units,
                                 const BuildOptions& options,
                                 Diagnostics* diags = nullptr) {
  struct PerUnit {
    bool kept = false;
    DatasetRecord record;
    std::vector<std::string> call_names;
    Diagnostics diags;
  };
  std::vector<PerUnit> results(units.size());

  parallel_for(units.size(), options.jobs, [&](std::size_t i) {
    const SourceUnit& unit = units[i];
    PerUnit& slot = results[i];
    TrainingExample example =
        strip_and_label(unit, options.numbering, &slot.diags);
    if (example.labels.empty()) {
      slot.diags.add("no-removable-calls",
                     "every MPI call is embedded; unit excluded",
                     unit.program_id);
      return;
    }
    slot.kept = true;
    slot.record.program =
        unit.origin.empty() ? unit.program_id : unit.origin;
    slot.record.code = render_body(example);
    slot.record.mpi_label = render_tail(example.labels);

    for (const auto& site : extract_mpi_calls(unit))
      slot.call_names.push_back(site.function_name);
  });

  BuildResult out;
  for (auto& slot : results) {
    if (diags) diags->merge(std::move(slot.diags));
    if (!slot.kept) continue;
    out.records.push_back(std::move(slot.record));
    for (auto& name : slot.call_names)
      ++out.stats.per_function_counts[name];
  }
  return out;
}

// Full pipeline: filter, deduplicate, strip-and-label.
inline BuildResult build_corpus(std::vector<SourceUnit> ingested,
                                const BuildOptions& options,
                                Diagnostics* diags = nullptr) {
  const TokenCounter counter = TokenCounter::from_config(options.tokenizer);

  std::vector<char> keep(ingested.size(), 0);
  parallel_for(ingested.size(), options.jobs, [&](std::size_t i) {
    keep[i] = filter_mpi_program(ingested[i], options.token_budget, counter);
  });
  std::vector<SourceUnit> filtered;
  filtered.reserve(ingested.size());
  for (std::size_t i = 0; i < ingested.size(); ++i)
    if (keep[i]) filtered.push_back(std::move(ingested[i]));

  const std::size_t n_ingested = ingested.size();
  const std::size_t n_filtered = filtered.size();
  std::vector<SourceUnit> unique = deduplicate(std::move(filtered));
  const std::size_t n_unique = unique.size();

  BuildResult result = build_dataset(unique, options, diags);
  result.stats.total_ingested = n_ingested;
  result.stats.total_after_filter = n_filtered;
  result.stats.total_after_dedup = n_unique;
  return result;
}

// Tallies call names straight from raw units, without filtering.
inline CorpusStats corpus_stats(const std::vector<SourceUnit>& units,
                                int jobs = 1, Diagnostics* diags = nullptr) {
  std::vector<std::vector<std::string>> names(units.size());
  std::vector<Diagnostics> per_unit(units.size());
  parallel_for(units.size(), jobs, [&](std::size_t i) {
    for (const auto& site : extract_mpi_calls(units[i], &per_unit[i]))
      names[i].push_back(site.function_name);
  });
  if (diags)
    for (auto& d : per_unit) diags->merge(std::move(d));
  CorpusStats stats;
  stats.total_ingested = units.size();
  stats.total_after_filter = units.size();
  stats.total_after_dedup = units.size();
  for (const auto& per_unit : names)
    for (const auto& name : per_unit) ++stats.per_function_counts[name];
  return stats;
}

// Rows for the Common Core set only, zero-filled when absent, sorted by
// descending count (name breaks ties).
inline std::vector<std::pair<std::string, std::size_t>>
common_core_distribution(const CorpusStats& stats) {
  std::vector<std::pair<std::string, std::size_t>> rows;
  rows.reserve(kCommonCoreFunctions.size());
  for (auto name : kCommonCoreFunctions) {
    auto it = stats.per_function_counts.find(std::string(name));
    rows.emplace_back(std::string(name),
                      it == stats.per_function_counts.end() ? 0 : it->second);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return rows;
}

inline json to_json(const CorpusStats& stats) {
  json counts = json::object();
  for (const auto& [name, count] : stats.per_function_counts)
    counts[name] = count;
  return json{{"total_ingested", stats.total_ingested},
              {"total_after_filter", stats.total_after_filter},
              {"total_after_dedup", stats.total_after_dedup},
              {"per_function_counts", counts}};
}

inline CorpusStats corpus_stats_from_json(const json& j) {
  CorpusStats stats;
  stats.total_ingested = j.at("total_ingested").get<std::size_t>();
  stats.total_after_filter = j.at("total_after_filter").get<std::size_t>();
  stats.total_after_dedup = j.at("total_after_dedup").get<std::size_t>();
  for (const auto& [name, count] : j.at("per_function_counts").items())
    stats.per_function_counts[name] = count.get<std::size_t>();
  return stats;
}

inline json to_json(const DatasetRecord& record) {
  return json{{"program", record.program},
              {"code", record.code},
              {"mpi_label", record.mpi_label}};
}

inline std::vector<DatasetRecord> read_dataset_jsonl(
    std::istream& in, const std::string& context,
    Diagnostics* diags = nullptr) {
  std::vector<DatasetRecord> records;
  read_jsonl(
      in, context,
      [&](const json& j, int line_no) {
        if (!j.contains("code") || !j.contains("mpi_label")) {
          report(diags, "malformed-record",
                 "dataset record lacks code/mpi_label", context, line_no);
          return;
        }
        if (!j["code"].is_string() || !j["mpi_label"].is_string()) {
          report(diags, "malformed-record",
                 "dataset record lacks code/mpi_label", context, line_no);
          return;
        }
        DatasetRecord r;
        if (auto it = j.find("program"); it != j.end() && it->is_string())
          r.program = it->get<std::string>();
        r.code = j["code"].get<std::string>();
        r.mpi_label = j["mpi_label"].get<std::string>();
        records.push_back(std::move(r));
      },
      diags);
  return records;
}

inline void write_dataset_jsonl(std::ostream& out,
                                const std::vector<DatasetRecord>& records) {
  for (const auto& record : records) out << to_json(record).dump() << '\n';
}

}  // namespace mpict

#pragma once

// Scoring of model-generated MPI calls against ground-truth labels.
// Three stages: locations are matched one-to-one within a line variance,
// function names are checked on matched locations only, and argument
// ratios are computed on matched functions only. Aggregation is
// micro-averaged over cumulative buckets of programs with at most n calls.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mpict/corpus.hpp"
#include "mpict/diagnostics.hpp"
#include "mpict/preprocess.hpp"
#include "mpict/scanner.hpp"
#include "mpict/text.hpp"

namespace mpict {

enum class PredictionFormat { Labels, FullCode };

struct PredictionRecord {
  std::string program_id;
  PredictionFormat format = PredictionFormat::Labels;
  std::string payload;
};

struct MatchConfig {
  std::vector<int> variances = {0, 1, 2};
  int max_n = 20;
  int breakdown_variance = 2;  // variance used for per-function accuracy
};

struct MatchPair {
  std::size_t gt_index;
  std::size_t pred_index;
};

// Greedy one-to-one matching over pairs with |gt.line - pred.line| <=
// variance. Candidates are taken nearest-first with deterministic
// tie-breaking; endpoints are never reused. Admissible sets only grow with
// the variance, so the matching size is non-decreasing in it.
inline std::vector<MatchPair> match_locations(const std::vector<Label>& gt,
                                              const std::vector<Label>& pred,
                                              int variance) {
  struct Candidate {
    int delta;
    int gt_line;
    int pred_line;
    std::size_t gi;
    std::size_t pi;
  };
  std::vector<Candidate> candidates;
  for (std::size_t gi = 0; gi < gt.size(); ++gi)
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
      int delta = std::abs(gt[gi].line - pred[pi].line);
      if (delta <= variance)
        candidates.push_back({delta, gt[gi].line, pred[pi].line, gi, pi});
    }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::tie(a.delta, a.gt_line, a.pred_line, a.gi, a.pi) <
                     std::tie(b.delta, b.gt_line, b.pred_line, b.gi, b.pi);
            });
  std::vector<bool> gt_used(gt.size(), false), pred_used(pred.size(), false);
  std::vector<MatchPair> pairs;
  for (const auto& c : candidates) {
    if (gt_used[c.gi] || pred_used[c.pi]) continue;
    gt_used[c.gi] = true;
    pred_used[c.pi] = true;
    pairs.push_back({c.gi, c.pi});
  }
  std::sort(pairs.begin(), pairs.end(),
            [](const MatchPair& a, const MatchPair& b) {
              return a.gt_index < b.gt_index;
            });
  return pairs;
}

// Correct-to-total argument ratio for a matched pair with equal function
// names. Positions are compared textually after whitespace normalization;
// the denominator is the ground-truth argument count, and a call without
// ground-truth arguments scores 1.
inline double score_arguments(const std::string& gt_call,
                              const std::string& pred_call) {
  auto g = parse_call(gt_call);
  auto p = parse_call(pred_call);
  if (!g) return 0.0;
  if (g->args.empty()) return 1.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < g->args.size(); ++i)
    if (p && i < p->args.size() && p->args[i] == g->args[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(g->args.size());
}

struct PerFunctionTally {
  std::size_t gt_count = 0;
  std::size_t matched = 0;
  std::size_t correct = 0;
};

struct ProgramScore {
  std::size_t n_gt_calls = 0;
  std::size_t n_pred_calls = 0;
  std::size_t matched_locations = 0;
  std::size_t correct_functions = 0;
  double argument_ratio_sum = 0.0;
  std::size_t argument_pairs_scored = 0;
  std::map<std::string, PerFunctionTally> per_function;
};

inline ProgramScore score_program(const std::vector<Label>& gt,
                                  const std::vector<Label>& pred,
                                  int variance) {
  ProgramScore score;
  score.n_gt_calls = gt.size();
  score.n_pred_calls = pred.size();

  auto name_of = [](const Label& label) -> std::string {
    auto call = parse_call(label.call_text);
    return call ? call->function_name : std::string{};
  };
  std::vector<std::string> gt_names(gt.size()), pred_names(pred.size());
  for (std::size_t i = 0; i < gt.size(); ++i) gt_names[i] = name_of(gt[i]);
  for (std::size_t i = 0; i < pred.size(); ++i) pred_names[i] = name_of(pred[i]);

  for (const auto& name : gt_names)
    if (!name.empty()) ++score.per_function[name].gt_count;

  for (const MatchPair& pair : match_locations(gt, pred, variance)) {
    ++score.matched_locations;
    const std::string& gname = gt_names[pair.gt_index];
    if (!gname.empty()) ++score.per_function[gname].matched;
    if (!gname.empty() && gname == pred_names[pair.pred_index]) {
      ++score.correct_functions;
      ++score.per_function[gname].correct;
      score.argument_ratio_sum += score_arguments(
          gt[pair.gt_index].call_text, pred[pair.pred_index].call_text);
      ++score.argument_pairs_scored;
    }
  }
  return score;
}

namespace detail {

// Recognizes the `<line>| ` body produced by prefixed rendering. Returns
// the bare lines plus their original numbers, or nothing if any line does
// not carry a prefix.
inline std::optional<std::pair<std::vector<std::string>, std::vector<int>>>
parse_prefixed_body(std::string_view code) {
  std::vector<std::string> bare;
  std::vector<int> nums;
  for (const auto& line : split_lines(code)) {
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i == 0 || i >= line.size() || line[i] != '|') return std::nullopt;
    nums.push_back(std::stoi(line.substr(0, i)));
    std::size_t content = i + 1;
    if (content < line.size() && line[content] == ' ') ++content;
    bare.push_back(line.substr(content));
  }
  return std::make_pair(std::move(bare), std::move(nums));
}

inline std::vector<std::pair<std::size_t, std::size_t>> lcs_pairs(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      pairs.emplace_back(i, j);
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return pairs;
}

}  // namespace detail

// Reconstructs a TrainingExample from a dataset record, whichever
// numbering mode the code field used.
inline TrainingExample example_from_record(const DatasetRecord& record,
                                           Diagnostics* diags = nullptr) {
  TrainingExample example;
  example.labels = parse_labels(record.mpi_label, diags);
  if (auto prefixed = detail::parse_prefixed_body(record.code)) {
    example.numbering = NumberingMode::Prefixed;
    std::string body;
    for (const auto& line : prefixed->first) {
      body += line;
      body += '\n';
    }
    example.stripped_code = std::move(body);
    example.original_lines = std::move(prefixed->second);
  } else {
    example.numbering = NumberingMode::Bare;
    example.stripped_code = record.code;
  }
  return example;
}

// Turns a complete predicted program into labels comparable with ground
// truth. When the prediction's non-MPI lines equal the ground-truth
// stripped lines (whitespace-normalized), call lines are literal; otherwise
// call positions are mapped through a longest-common-subsequence alignment
// of the non-MPI lines, offset from the nearest aligned predecessor.
inline std::vector<Label> align_full_code(const TrainingExample& gt,
                                          std::string_view predicted_full,
                                          Diagnostics* diags = nullptr) {
  if (trim(predicted_full).empty()) {
    report(diags, "empty-prediction", "prediction has no lexable content");
    return {};
  }
  SourceUnit unit =
      make_source_unit("prediction", "", std::string(predicted_full));
  TrainingExample pred = strip_and_label(unit, NumberingMode::Bare, nullptr);

  auto normalize_lines = [](std::string_view code) {
    std::vector<std::string> out;
    for (const auto& line : split_lines(code))
      out.push_back(normalize_whitespace(line));
    return out;
  };
  const auto gt_norm = normalize_lines(gt.stripped_code);
  const auto pred_norm = normalize_lines(pred.stripped_code);
  if (gt_norm == pred_norm) return pred.labels;

  std::vector<int> gt_nums = gt.original_lines;
  if (gt_nums.size() != gt_norm.size())
    gt_nums = detail::derive_original_lines(gt_norm.size(), gt.labels);
  std::vector<int> pred_nums = pred.original_lines;
  if (pred_nums.size() != pred_norm.size())
    pred_nums = detail::derive_original_lines(pred_norm.size(), pred.labels);

  const auto aligned = detail::lcs_pairs(gt_norm, pred_norm);

  std::vector<Label> labels;
  labels.reserve(pred.labels.size());
  for (const auto& label : pred.labels) {
    int mapped = label.line;  // literal fallback
    // Nearest aligned line at or before the call in the predicted file.
    const std::pair<std::size_t, std::size_t>* best = nullptr;
    for (const auto& pair : aligned) {
      if (pred_nums[pair.second] <= label.line)
        best = &pair;
      else
        break;
    }
    if (best)
      mapped = gt_nums[best->first] + (label.line - pred_nums[best->second]);
    labels.push_back(Label{std::max(1, mapped), label.call_text});
  }
  std::stable_sort(labels.begin(), labels.end(),
                   [](const Label& a, const Label& b) { return a.line < b.line; });
  return labels;
}

struct BucketCell {
  std::size_t programs = 0;
  std::size_t gt_calls = 0;
  std::size_t matched = 0;
  std::size_t correct_functions = 0;
  std::size_t argument_pairs = 0;
  std::size_t unmatched_predictions = 0;
  double argument_ratio_sum = 0.0;

  bool location_defined() const { return gt_calls > 0; }
  bool function_defined() const { return matched > 0; }
  bool argument_defined() const { return argument_pairs > 0; }
  double location() const {
    return location_defined()
               ? static_cast<double>(matched) / static_cast<double>(gt_calls)
               : 0.0;
  }
  double function() const {
    return function_defined() ? static_cast<double>(correct_functions) /
                                    static_cast<double>(matched)
                              : 0.0;
  }
  double argument() const {
    return argument_defined()
               ? argument_ratio_sum / static_cast<double>(argument_pairs)
               : 0.0;
  }

  void add(const BucketCell& other) {
    programs += other.programs;
    gt_calls += other.gt_calls;
    matched += other.matched;
    correct_functions += other.correct_functions;
    argument_pairs += other.argument_pairs;
    unmatched_predictions += other.unmatched_predictions;
    argument_ratio_sum += other.argument_ratio_sum;
  }
};

struct EvalReport {
  std::vector<int> variances;
  int max_n = 20;
  int breakdown_variance = 2;
  std::size_t total_programs = 0;
  // Cumulative buckets, index n-1, per variance.
  std::map<int, std::vector<BucketCell>> buckets;
  std::map<int, std::vector<std::map<std::string, PerFunctionTally>>>
      per_function;
  std::size_t missing_predictions = 0;
  std::size_t duplicate_predictions = 0;
  std::size_t unknown_prediction_ids = 0;
  std::size_t empty_predictions = 0;
  std::size_t zero_call_programs = 0;
};

inline EvalReport evaluate_corpus(const std::vector<DatasetRecord>& gt,
                                  const std::vector<PredictionRecord>& preds,
                                  const MatchConfig& config,
                                  Diagnostics* diags = nullptr, int jobs = 1) {
  EvalReport out;
  out.variances = config.variances;
  out.max_n = config.max_n;
  out.breakdown_variance = config.breakdown_variance;
  out.total_programs = gt.size();

  std::unordered_map<std::string, const PredictionRecord*> by_id;
  for (const auto& pred : preds) {
    auto [it, inserted] = by_id.emplace(pred.program_id, &pred);
    if (!inserted) {
      it->second = &pred;  // last wins
      ++out.duplicate_predictions;
      report(diags, "duplicate-prediction", "last record wins",
             pred.program_id);
    }
  }
  for (const auto& pred : preds)
    if (std::none_of(gt.begin(), gt.end(), [&](const DatasetRecord& r) {
          return r.program == pred.program_id;
        })) {
      ++out.unknown_prediction_ids;
      report(diags, "unknown-program-id",
             "prediction does not match any ground-truth program",
             pred.program_id);
    }

  struct PerProgram {
    std::size_t exact_n = 0;
    bool empty_payload = false;
    bool missing = false;
    std::map<int, ProgramScore> scores;  // per variance
    Diagnostics diags;
  };
  std::vector<PerProgram> results(gt.size());

  parallel_for(gt.size(), jobs, [&](std::size_t i) {
    const DatasetRecord& record = gt[i];
    PerProgram& slot = results[i];
    TrainingExample example = example_from_record(record, &slot.diags);

    std::vector<Label> pred_labels;
    auto found = by_id.find(record.program);
    if (found == by_id.end()) {
      slot.missing = true;
    } else if (found->second->format == PredictionFormat::Labels) {
      pred_labels = parse_labels(found->second->payload, &slot.diags);
    } else {
      pred_labels =
          align_full_code(example, found->second->payload, &slot.diags);
      if (pred_labels.empty() && trim(found->second->payload).empty())
        slot.empty_payload = true;
    }

    slot.exact_n = example.labels.size();
    for (int v : config.variances)
      slot.scores[v] = score_program(example.labels, pred_labels, v);
  });

  // Per-exact-n accumulation, then a running prefix over n gives the
  // cumulative buckets.
  const std::size_t n_slots = static_cast<std::size_t>(config.max_n);
  for (int v : config.variances) {
    out.buckets[v].assign(n_slots, BucketCell{});
    out.per_function[v].assign(n_slots, {});
  }

  for (auto& slot : results) {
    if (diags) diags->merge(std::move(slot.diags));
    out.missing_predictions += slot.missing;
    out.empty_predictions += slot.empty_payload;
    if (slot.exact_n == 0) {
      ++out.zero_call_programs;
      continue;
    }
    if (slot.exact_n > n_slots) continue;  // outside every bucket
    const std::size_t idx = slot.exact_n - 1;
    for (int v : config.variances) {
      const ProgramScore& s = slot.scores[v];
      BucketCell& cell = out.buckets[v][idx];
      cell.programs += 1;
      cell.gt_calls += s.n_gt_calls;
      cell.matched += s.matched_locations;
      cell.correct_functions += s.correct_functions;
      cell.argument_pairs += s.argument_pairs_scored;
      cell.argument_ratio_sum += s.argument_ratio_sum;
      cell.unmatched_predictions += s.n_pred_calls - s.matched_locations;
      auto& tallies = out.per_function[v][idx];
      for (const auto& [name, tally] : s.per_function) {
        tallies[name].gt_count += tally.gt_count;
        tallies[name].matched += tally.matched;
        tallies[name].correct += tally.correct;
      }
    }
  }
  for (int v : config.variances) {
    for (std::size_t n = 1; n < n_slots; ++n) {
      out.buckets[v][n].add(out.buckets[v][n - 1]);
      for (const auto& [name, tally] : out.per_function[v][n - 1]) {
        out.per_function[v][n][name].gt_count += tally.gt_count;
        out.per_function[v][n][name].matched += tally.matched;
        out.per_function[v][n][name].correct += tally.correct;
      }
    }
  }
  return out;
}

inline double round4(double x) { return std::round(x * 10000.0) / 10000.0; }

inline json to_json(const EvalReport& report) {
  json variances = json::object();
  for (int v : report.variances) {
    json buckets = json::object();
    const auto& cells = report.buckets.at(v);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const BucketCell& c = cells[i];
      buckets[std::to_string(i + 1)] = {
          {"location", round4(c.location())},
          {"function", round4(c.function())},
          {"argument", round4(c.argument())},
          {"location_defined", c.location_defined()},
          {"function_defined", c.function_defined()},
          {"argument_defined", c.argument_defined()},
          {"programs", c.programs},
          {"gt_calls", c.gt_calls},
          {"matched", c.matched},
          {"correct_functions", c.correct_functions},
          {"argument_pairs", c.argument_pairs},
          {"argument_ratio_sum", c.argument_ratio_sum},
          {"unmatched_predictions", c.unmatched_predictions}};
    }
    json per_function = json::object();
    const auto& by_n = report.per_function.at(v);
    for (std::size_t i = 0; i < by_n.size(); ++i)
      for (const auto& [name, tally] : by_n[i])
        per_function[name][std::to_string(i + 1)] = {
            {"gt_count", tally.gt_count},
            {"matched", tally.matched},
            {"correct", tally.correct}};
    variances[std::to_string(v)] = {{"buckets", buckets},
                                    {"per_function", per_function}};
  }
  return json{
      {"max_n", report.max_n},
      {"breakdown_variance", report.breakdown_variance},
      {"programs", report.total_programs},
      {"variance_list", report.variances},
      {"variances", variances},
      {"diagnostics",
       {{"missing_predictions", report.missing_predictions},
        {"duplicate_predictions", report.duplicate_predictions},
        {"unknown_prediction_ids", report.unknown_prediction_ids},
        {"empty_predictions", report.empty_predictions},
        {"zero_call_programs", report.zero_call_programs}}}};
}

inline EvalReport eval_report_from_json(const json& j) {
  EvalReport report;
  report.max_n = j.at("max_n").get<int>();
  report.breakdown_variance = j.at("breakdown_variance").get<int>();
  report.total_programs = j.at("programs").get<std::size_t>();
  report.variances = j.at("variance_list").get<std::vector<int>>();
  for (int v : report.variances) {
    const json& jv = j.at("variances").at(std::to_string(v));
    auto& cells = report.buckets[v];
    cells.assign(static_cast<std::size_t>(report.max_n), BucketCell{});
    for (const auto& [key, jc] : jv.at("buckets").items()) {
      BucketCell& c = cells.at(static_cast<std::size_t>(std::stoi(key)) - 1);
      c.programs = jc.at("programs").get<std::size_t>();
      c.gt_calls = jc.at("gt_calls").get<std::size_t>();
      c.matched = jc.at("matched").get<std::size_t>();
      c.correct_functions = jc.at("correct_functions").get<std::size_t>();
      c.argument_pairs = jc.at("argument_pairs").get<std::size_t>();
      c.argument_ratio_sum = jc.at("argument_ratio_sum").get<double>();
      c.unmatched_predictions =
          jc.at("unmatched_predictions").get<std::size_t>();
    }
    auto& by_n = report.per_function[v];
    by_n.assign(static_cast<std::size_t>(report.max_n), {});
    for (const auto& [name, jn] : jv.at("per_function").items())
      for (const auto& [key, jt] : jn.items()) {
        PerFunctionTally& t =
            by_n.at(static_cast<std::size_t>(std::stoi(key)) - 1)[name];
        t.gt_count = jt.at("gt_count").get<std::size_t>();
        t.matched = jt.at("matched").get<std::size_t>();
        t.correct = jt.at("correct").get<std::size_t>();
      }
  }
  const json& jd = j.at("diagnostics");
  report.missing_predictions = jd.at("missing_predictions").get<std::size_t>();
  report.duplicate_predictions =
      jd.at("duplicate_predictions").get<std::size_t>();
  report.unknown_prediction_ids =
      jd.at("unknown_prediction_ids").get<std::size_t>();
  report.empty_predictions = jd.at("empty_predictions").get<std::size_t>();
  report.zero_call_programs = jd.at("zero_call_programs").get<std::size_t>();
  return report;
}

inline std::vector<PredictionRecord> read_predictions_jsonl(
    std::istream& in, const std::string& context,
    Diagnostics* diags = nullptr) {
  std::vector<PredictionRecord> records;
  read_jsonl(
      in, context,
      [&](const json& j, int line_no) {
        auto id = j.find("program_id");
        auto format = j.find("format");
        auto payload = j.find("payload");
        if (id == j.end() || !id->is_string() || payload == j.end() ||
            !payload->is_string() || format == j.end() ||
            !format->is_string()) {
          report(diags, "malformed-record",
                 "prediction record needs program_id/format/payload", context,
                 line_no);
          return;
        }
        const std::string f = format->get<std::string>();
        if (f != "labels" && f != "full_code") {
          report(diags, "malformed-record",
                 "prediction format must be labels or full_code", context,
                 line_no);
          return;
        }
        records.push_back(PredictionRecord{
            id->get<std::string>(),
            f == "labels" ? PredictionFormat::Labels
                          : PredictionFormat::FullCode,
            payload->get<std::string>()});
      },
      diags);
  return records;
}

inline void write_predictions_jsonl(std::ostream& out,
                                    const std::vector<PredictionRecord>& preds) {
  for (const auto& p : preds)
    out << json{{"program_id", p.program_id},
                {"format",
                 p.format == PredictionFormat::Labels ? "labels" : "full_code"},
                {"payload", p.payload}}
               .dump()
        << '\n';
}

}  // namespace mpict

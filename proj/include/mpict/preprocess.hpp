#pragma once

// The strip-and-label transformation and its inverse. Removable MPI call
// statements are deleted from the code; each removed statement becomes a
// (line, call) label carrying its 1-based line number in the original file.
// `reinsert` walks the labels back in, reconstructing the original exactly
// when every removed statement occupied whole lines by itself.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpict/diagnostics.hpp"
#include "mpict/scanner.hpp"
#include "mpict/text.hpp"

namespace mpict {

struct Label {
  int line = 1;           // line number in the original, pre-removal code
  std::string call_text;  // full statement text, single-line normalized

  friend bool operator==(const Label&, const Label&) = default;
};

enum class NumberingMode { Prefixed, Bare };

struct TrainingExample {
  std::string stripped_code;
  std::vector<Label> labels;  // ascending by line
  NumberingMode numbering = NumberingMode::Prefixed;
  // Original line number of each surviving line. Optional: when empty,
  // renderers derive numbers by replaying the labels.
  std::vector<int> original_lines;
};

namespace detail {

// Byte offset of the start of each 1-based line, plus one sentinel.
inline std::vector<std::size_t> line_starts(std::string_view text) {
  std::vector<std::size_t> starts = {0, 0};  // starts[1] == 0
  for (std::size_t i = 0; i < text.size(); ++i)
    if (text[i] == '\n') starts.push_back(i + 1);
  if (!text.empty() && text.back() != '\n') starts.push_back(text.size());
  return starts;
}

inline bool all_whitespace(std::string_view s) {
  for (char c : s)
    if (!is_space(c)) return false;
  return true;
}

// Derives original line numbers for surviving lines by replaying labels.
// Assumes each label consumed one original line.
inline std::vector<int> derive_original_lines(std::size_t n_lines,
                                              const std::vector<Label>& labels) {
  std::vector<int> removed;
  removed.reserve(labels.size());
  for (const auto& l : labels) removed.push_back(l.line);
  std::sort(removed.begin(), removed.end());
  std::vector<int> out;
  out.reserve(n_lines);
  int counter = 1;
  std::size_t ri = 0;
  for (std::size_t i = 0; i < n_lines; ++i) {
    while (ri < removed.size() && removed[ri] == counter) {
      ++ri;
      ++counter;
    }
    out.push_back(counter++);
  }
  return out;
}

}  // namespace detail

// Removes every removable MPI call statement from the unit. A statement
// whose lines hold nothing else (beyond whitespace) takes its whole line
// span with it; otherwise only the statement text goes. Embedded calls are
// left in place and reported.
inline TrainingExample strip_and_label(const SourceUnit& unit,
                                       NumberingMode numbering = NumberingMode::Prefixed,
                                       Diagnostics* diags = nullptr) {
  const std::string_view text = unit.text;
  const auto sites = extract_mpi_calls(text, diags, unit.program_id);
  const auto starts = detail::line_starts(text);
  const int n_lines = count_lines(text);

  auto line_content = [&](int line) -> std::string_view {
    std::size_t b = starts[static_cast<std::size_t>(line)];
    std::size_t e = line < n_lines ? starts[static_cast<std::size_t>(line) + 1]
                                   : text.size();
    while (e > b && (text[e - 1] == '\n' || text[e - 1] == '\r')) --e;
    return text.substr(b, e - b);
  };

  struct Cut {
    std::size_t begin, end;
  };
  std::vector<Cut> cuts;
  std::vector<bool> line_deleted(static_cast<std::size_t>(n_lines) + 1, false);

  std::vector<std::pair<std::size_t, std::size_t>> removed_ranges;
  TrainingExample out;
  out.numbering = numbering;

  for (const auto& site : sites) {
    if (!site.removable()) {
      bool inside_removed = false;
      for (auto [b, e] : removed_ranges)
        inside_removed |= site.begin_offset >= b && site.end_offset <= e;
      if (!inside_removed)
        report(diags, "embedded-call",
               site.function_name + " is part of a larger statement; left in place",
               unit.program_id, site.start_line);
      continue;
    }

    // Whole-line when the statement's span holds only the statement itself.
    std::string_view first_line = line_content(site.start_line);
    std::string_view last_line = line_content(site.end_line);
    std::size_t first_begin = starts[static_cast<std::size_t>(site.start_line)];
    std::size_t last_begin = starts[static_cast<std::size_t>(site.end_line)];
    bool whole =
        detail::all_whitespace(first_line.substr(0, site.begin_offset - first_begin)) &&
        detail::all_whitespace(last_line.substr(site.end_offset - last_begin));

    if (whole) {
      std::size_t b = first_begin;
      std::size_t e = site.end_line < n_lines
                          ? starts[static_cast<std::size_t>(site.end_line) + 1]
                          : text.size();
      cuts.push_back({b, e});
      for (int l = site.start_line; l <= site.end_line; ++l)
        line_deleted[static_cast<std::size_t>(l)] = true;
    } else {
      cuts.push_back({site.begin_offset, site.end_offset});
    }
    removed_ranges.emplace_back(site.begin_offset, site.end_offset);

    Label label;
    label.line = site.start_line;
    label.call_text = site.start_line == site.end_line
                          ? site.full_text
                          : normalize_whitespace(site.full_text);
    out.labels.push_back(std::move(label));
  }

  std::sort(cuts.begin(), cuts.end(),
            [](const Cut& a, const Cut& b) { return a.begin < b.begin; });
  std::string stripped;
  stripped.reserve(text.size());
  std::size_t pos = 0;
  for (const auto& cut : cuts) {
    if (cut.begin > pos) stripped.append(text.substr(pos, cut.begin - pos));
    pos = std::max(pos, cut.end);
  }
  if (pos < text.size()) stripped.append(text.substr(pos));
  out.stripped_code = std::move(stripped);

  for (int l = 1; l <= n_lines; ++l)
    if (!line_deleted[static_cast<std::size_t>(l)])
      out.original_lines.push_back(l);
  // Text-only removals can merge lines; trust the derived count if the two
  // disagree (multi-line partial statements).
  if (static_cast<int>(out.original_lines.size()) !=
      count_lines(out.stripped_code))
    out.original_lines.clear();

  return out;
}

// Serialized tail line for one label, exactly `(<line>, <call_text>)`.
inline std::string render_label(const Label& label) {
  return "(" + std::to_string(label.line) + ", " + label.call_text + ")";
}

// The code part of a rendered example: the stripped code as-is in bare
// mode, or each surviving line prefixed `<line>| ` with its original
// number in prefixed mode.
inline std::string render_body(const TrainingExample& example) {
  if (example.numbering == NumberingMode::Bare) return example.stripped_code;
  const auto lines = split_lines(example.stripped_code);
  std::vector<int> nums = example.original_lines;
  if (nums.size() != lines.size())
    nums = detail::derive_original_lines(lines.size(), example.labels);
  std::string out;
  out.reserve(example.stripped_code.size() + lines.size() * 4);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += std::to_string(nums[i]);
    out += "| ";
    out += lines[i];
    out += '\n';
  }
  return out;
}

// One tail line per label, ascending by line, newline-separated.
inline std::string render_tail(const std::vector<Label>& labels) {
  std::vector<Label> ordered = labels;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Label& a, const Label& b) { return a.line < b.line; });
  std::string out;
  for (const auto& label : ordered) {
    if (!out.empty()) out += '\n';
    out += render_label(label);
  }
  return out;
}

// Stripped code first (numbered per the example's mode), then one tail
// line per label in ascending line order.
inline std::string render_example(const TrainingExample& example) {
  std::string out = render_body(example);
  if (example.labels.empty()) return out;
  if (!out.empty() && out.back() != '\n') out += '\n';
  out += render_tail(example.labels);
  out += '\n';
  return out;
}

namespace detail {

inline std::optional<Label> parse_label_line(std::string_view line,
                                             Diagnostics* diags) {
  std::string_view t = trim(line);
  if (t.size() < 2 || t.front() != '(' || t.back() != ')') return std::nullopt;
  std::string_view inner = t.substr(1, t.size() - 2);
  std::size_t comma = inner.find(',');
  if (comma == std::string_view::npos) return std::nullopt;
  if (inner.find("MPI_", comma) == std::string_view::npos) return std::nullopt;

  std::string_view num = trim(inner.substr(0, comma));
  bool numeric = !num.empty();
  for (char c : num) numeric &= std::isdigit(static_cast<unsigned char>(c)) != 0;
  long value = numeric ? std::stol(std::string(num)) : 0;
  if (!numeric || value < 1) {
    report(diags, "malformed-label", "discarded tail line: " + std::string(t));
    return std::nullopt;
  }
  std::string_view call = inner.substr(comma + 1);
  if (!call.empty() && call.front() == ' ') call.remove_prefix(1);
  return Label{static_cast<int>(value), std::string(call)};
}

}  // namespace detail

// Tolerant parse of `(N, MPI_X(...);)` tail lines anywhere in the text.
// Malformed label-shaped lines are discarded with a diagnostic; ordinary
// code lines are ignored silently. Returns labels ascending by line.
inline std::vector<Label> parse_labels(std::string_view text,
                                       Diagnostics* diags = nullptr) {
  std::vector<Label> labels;
  for (const auto& line : split_lines(text))
    if (auto label = detail::parse_label_line(line, diags))
      labels.push_back(std::move(*label));
  std::stable_sort(labels.begin(), labels.end(),
                   [](const Label& a, const Label& b) { return a.line < b.line; });
  return labels;
}

// Inverse of strip_and_label for whole-line removals: walks a line counter
// from 1, emitting the pending label when the counter reaches its line and
// the next surviving line otherwise. Reinserted calls take the indentation
// of the next non-blank surviving line (falling back to the previous one).
inline std::string reinsert(const TrainingExample& example,
                            Diagnostics* diags = nullptr) {
  const auto lines = split_lines(example.stripped_code);
  std::vector<Label> ordered = example.labels;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Label& a, const Label& b) { return a.line < b.line; });

  std::vector<std::string> out;
  out.reserve(lines.size() + ordered.size());
  std::size_t li = 0;
  std::size_t bi = 0;
  int counter = 1;

  auto indent_for_insertion = [&]() -> std::string {
    for (std::size_t k = li; k < lines.size(); ++k)
      if (!is_blank(lines[k])) return std::string(leading_whitespace(lines[k]));
    for (std::size_t k = out.size(); k-- > 0;)
      if (!is_blank(out[k])) return std::string(leading_whitespace(out[k]));
    return {};
  };

  while (bi < ordered.size() || li < lines.size()) {
    if (bi < ordered.size() &&
        (ordered[bi].line <= counter || li >= lines.size())) {
      if (ordered[bi].line > counter)
        report(diags, "label-beyond-end",
               "label line " + std::to_string(ordered[bi].line) +
                   " lies past the reconstructed code; appended",
               {}, ordered[bi].line);
      out.push_back(indent_for_insertion() +
                    std::string(trim(ordered[bi].call_text)));
      ++bi;
      ++counter;
      continue;
    }
    out.push_back(lines[li]);
    ++li;
    ++counter;
  }

  std::string joined;
  for (std::size_t i = 0; i < out.size(); ++i) {
    joined += out[i];
    if (i + 1 < out.size()) joined += '\n';
  }
  const bool final_newline =
      !example.stripped_code.empty() && example.stripped_code.back() == '\n';
  if (final_newline || (example.stripped_code.empty() && !out.empty()))
    joined += '\n';
  return joined;
}

}  // namespace mpict

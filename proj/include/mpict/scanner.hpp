#pragma once

// Locates MPI call statements in lexed source and splits their argument
// lists. Works purely on the token stream; no preprocessing, no AST.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpict/diagnostics.hpp"
#include "mpict/lexer.hpp"
#include "mpict/text.hpp"

namespace mpict {

// One input program plus its origin metadata.
struct SourceUnit {
  std::string program_id;
  std::string origin;  // repository user/name when known
  std::string text;
  int line_count = 0;
};

inline SourceUnit make_source_unit(std::string program_id, std::string origin,
                                   std::string text) {
  SourceUnit u;
  u.program_id = std::move(program_id);
  u.origin = std::move(origin);
  u.text = std::move(text);
  u.line_count = count_lines(u.text);
  return u;
}

enum class StatementForm {
  BareCall,        // MPI_X(...);
  AssignedReturn,  // v = MPI_X(...); possibly with a declaration
  Embedded,        // part of a larger expression or condition
};

struct MpiCallSite {
  std::string function_name;
  std::vector<std::string> args;
  int start_line = 1;  // first line of the owning statement
  int end_line = 1;
  StatementForm form = StatementForm::BareCall;
  std::string full_text;  // statement text (call expression for embedded)
  int column = 1;         // column of the statement start
  std::size_t begin_offset = 0;  // byte range of full_text in the source
  std::size_t end_offset = 0;

  bool removable() const { return form != StatementForm::Embedded; }
};

// Splits the text between a call's outermost parentheses on top-level
// commas. Depth is tracked across ()[]{}; commas inside string/char
// literals and comments never split. Arguments come back trimmed.
inline std::vector<std::string> split_arguments(std::string_view text) {
  std::vector<std::string> args;
  if (trim(text).empty()) return args;
  int depth = 0;
  std::size_t piece_start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    args.emplace_back(trim(text.substr(piece_start, end - piece_start)));
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '"' || c == '\'') {
      ++i;
      while (i < text.size()) {
        if (text[i] == '\\') {
          i += 2;
          continue;
        }
        if (text[i] == c) {
          ++i;
          break;
        }
        ++i;
      }
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      std::size_t close = text.find("*/", i + 2);
      i = close == std::string_view::npos ? text.size() : close + 2;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      std::size_t eol = text.find('\n', i);
      i = eol == std::string_view::npos ? text.size() : eol + 1;
      continue;
    }
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      flush(i);
      piece_start = i + 1;
    }
    ++i;
  }
  flush(text.size());
  return args;
}

namespace detail {

inline bool is_significant(const Token& t) {
  return t.kind != TokenKind::Whitespace && t.kind != TokenKind::Comment;
}

inline bool is_punct(const Token& t, std::string_view lexeme) {
  return t.kind == TokenKind::Punctuation && t.lexeme == lexeme;
}

// C/C++ keywords plus primitive type names. Used both for statement
// classification and by the anonymizer's preserve list.
inline bool is_keyword(std::string_view s) {
  static const std::vector<std::string_view> kKeywords = {
      "alignas",      "alignof",  "auto",          "bool",
      "break",        "case",     "catch",         "char",
      "char8_t",      "char16_t", "char32_t",      "class",
      "const",        "consteval","constexpr",     "constinit",
      "const_cast",   "continue", "decltype",      "default",
      "delete",       "do",       "double",        "dynamic_cast",
      "else",         "enum",     "explicit",      "extern",
      "false",        "float",    "for",           "friend",
      "goto",         "if",       "inline",        "int",
      "long",         "mutable",  "namespace",     "new",
      "noexcept",     "nullptr",  "operator",      "private",
      "protected",    "public",   "register",      "reinterpret_cast",
      "restrict",     "return",   "short",         "signed",
      "sizeof",       "static",   "static_assert", "static_cast",
      "struct",       "switch",   "template",      "this",
      "thread_local", "throw",    "true",          "try",
      "typedef",      "typeid",   "typename",      "union",
      "unsigned",     "using",    "virtual",       "void",
      "volatile",     "wchar_t",  "while",         "_Bool",
      "_Complex",     "_Imaginary"};
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

// Tokens that may appear between a statement boundary and the '=' of an
// assignment/initialization left-hand side. Control-flow keywords are
// excluded so `return rc = MPI_X(...);` stays non-removable.
inline bool is_lhs_token(const Token& t) {
  if (t.kind == TokenKind::Identifier) {
    if (!is_keyword(t.lexeme)) return true;
    static constexpr std::string_view kControl[] = {
        "return", "throw",    "goto",  "case",   "new",   "delete",
        "do",     "else",     "if",    "while",  "for",   "switch",
        "break",  "continue", "sizeof", "typeid", "operator"};
    for (auto k : kControl)
      if (t.lexeme == k) return false;
    return true;  // type and storage keywords: int rc = ...
  }
  if (t.kind == TokenKind::Number) return true;
  if (t.kind != TokenKind::Punctuation) return false;
  static constexpr std::string_view kAllowed[] = {"*", "&",  "::", ".",
                                                  "->", "[", "]",  "<", ">"};
  for (auto a : kAllowed)
    if (t.lexeme == a) return true;
  return false;
}

struct StatementScan {
  StatementForm form = StatementForm::Embedded;
  std::size_t start_sig = 0;  // index into the significant-token list
};

}  // namespace detail

// Finds every syntactic occurrence of `MPI_<name>(` outside comments,
// strings, and preprocessor directives. Argument lists are captured across
// line breaks with balanced bracket tracking; a call left unbalanced at end
// of file is dropped with a diagnostic.
inline std::vector<MpiCallSite> extract_mpi_calls(
    std::string_view text, Diagnostics* diags = nullptr,
    const std::string& context = {}) {
  using namespace detail;
  const std::vector<Token> tokens = tokenize(text, diags);

  std::vector<std::size_t> sig;
  sig.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (is_significant(tokens[i])) sig.push_back(i);

  // Running ( [ nesting depth in front of each significant token. Braces are
  // excluded: block structure is not expression nesting.
  std::vector<int> depth_before(sig.size(), 0);
  {
    int depth = 0;
    for (std::size_t s = 0; s < sig.size(); ++s) {
      depth_before[s] = depth;
      const Token& t = tokens[sig[s]];
      if (is_punct(t, "(") || is_punct(t, "[")) ++depth;
      if (is_punct(t, ")") || is_punct(t, "]")) --depth;
      if (depth < 0) depth = 0;  // tolerate stray closers
    }
  }

  auto is_boundary_token = [&](std::size_t s) -> bool {
    const Token& t = tokens[sig[s]];
    if (t.kind == TokenKind::PreprocessorDirective) return true;
    if (t.kind != TokenKind::Punctuation) return false;
    if (t.lexeme == ";" || t.lexeme == "{" || t.lexeme == "}") return true;
    if (t.lexeme == ":") {
      // A label or case introducer counts; a ternary ':' does not.
      std::size_t back = s;
      std::size_t steps = 0;
      while (back > 0 && steps < 32) {
        --back;
        ++steps;
        const Token& b = tokens[sig[back]];
        if (is_punct(b, "?")) return false;
        if (b.kind == TokenKind::Identifier &&
            (b.lexeme == "case" || b.lexeme == "default"))
          return true;
        if (b.kind == TokenKind::Punctuation &&
            (b.lexeme == ";" || b.lexeme == "{" || b.lexeme == "}"))
          return true;  // plain goto label
      }
      return back == 0;
    }
    return false;
  };

  // Classifies the statement that owns the call whose name sits at sig
  // index `name_sig`.
  auto classify = [&](std::size_t name_sig,
                      std::size_t after_close_sig) -> StatementScan {
    StatementScan out;
    out.start_sig = name_sig;
    if (depth_before[name_sig] > 0) return out;  // inside an expression

    const bool ends_with_semicolon =
        after_close_sig < sig.size() &&
        is_punct(tokens[sig[after_close_sig]], ";");

    if (name_sig == 0 || is_boundary_token(name_sig - 1)) {
      if (ends_with_semicolon) out.form = StatementForm::BareCall;
      return out;
    }

    // v = MPI_X(...);  or  int v = MPI_X(...);
    if (ends_with_semicolon && name_sig >= 2 &&
        is_punct(tokens[sig[name_sig - 1]], "=")) {
      std::size_t back = name_sig - 1;
      while (back > 0 && is_lhs_token(tokens[sig[back - 1]])) --back;
      const bool at_boundary = back == 0 || is_boundary_token(back - 1);
      if (at_boundary && back < name_sig - 1) {
        out.form = StatementForm::AssignedReturn;
        out.start_sig = back;
      }
    }
    return out;
  };

  std::vector<MpiCallSite> sites;
  for (std::size_t s = 0; s < sig.size(); ++s) {
    const Token& name = tokens[sig[s]];
    if (name.kind != TokenKind::Identifier || !is_mpi_name(name.lexeme))
      continue;
    if (s + 1 >= sig.size() || !is_punct(tokens[sig[s + 1]], "(")) continue;

    // Walk to the matching close across ()[]{} nesting.
    int depth = 0;
    std::size_t close = sig.size();
    for (std::size_t k = s + 1; k < sig.size(); ++k) {
      const Token& t = tokens[sig[k]];
      if (is_punct(t, "(") || is_punct(t, "[") || is_punct(t, "{")) ++depth;
      if (is_punct(t, ")") || is_punct(t, "]") || is_punct(t, "}")) {
        --depth;
        if (depth == 0) {
          close = k;
          break;
        }
      }
    }
    if (close == sig.size()) {
      report(diags, "unbalanced-call",
             "argument list of " + name.lexeme + " never closes", context,
             name.line);
      continue;
    }

    const Token& open = tokens[sig[s + 1]];
    const Token& close_tok = tokens[sig[close]];

    MpiCallSite site;
    site.function_name = name.lexeme;
    for (auto& arg : split_arguments(text.substr(
             open.end_offset(), close_tok.offset - open.end_offset())))
      site.args.push_back(normalize_whitespace(arg));

    StatementScan scan = classify(s, close + 1);
    site.form = scan.form;

    const Token& first = tokens[sig[scan.start_sig]];
    const Token& last = site.form == StatementForm::Embedded
                            ? close_tok
                            : tokens[sig[close + 1]];
    site.start_line = first.line;
    site.column = first.column;
    site.end_line = last.line;
    site.begin_offset = first.offset;
    site.end_offset = last.end_offset();
    site.full_text.assign(
        text.substr(site.begin_offset, site.end_offset - site.begin_offset));
    sites.push_back(std::move(site));
  }

  std::stable_sort(sites.begin(), sites.end(),
                   [](const MpiCallSite& a, const MpiCallSite& b) {
                     return a.start_line != b.start_line
                                ? a.start_line < b.start_line
                                : a.column < b.column;
                   });
  return sites;
}

inline std::vector<MpiCallSite> extract_mpi_calls(const SourceUnit& unit,
                                                  Diagnostics* diags = nullptr) {
  return extract_mpi_calls(unit.text, diags, unit.program_id);
}

// Parses "MPI_X(a, b)" shaped text (optionally inside a larger statement)
// into the called name and its split arguments. Used when scoring labels.
struct ParsedCall {
  std::string function_name;
  std::vector<std::string> args;
};

inline std::optional<ParsedCall> parse_call(std::string_view call_text,
                                            Diagnostics* diags = nullptr) {
  auto sites = extract_mpi_calls(call_text, diags);
  if (sites.empty()) return std::nullopt;
  ParsedCall out;
  out.function_name = sites.front().function_name;
  out.args = sites.front().args;
  return out;
}

}  // namespace mpict

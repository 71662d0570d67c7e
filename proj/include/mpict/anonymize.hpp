#pragma once

// Semantic anonymization: user identifiers and numeric literals become
// categorized placeholders (var_N, func_N, type_N, num_N) while keywords,
// punctuation, structure, and called MPI function names stay intact. The
// placeholder numerals come from a PRNG keyed by (seed, token), so the same
// seed always produces the same output.

#include <algorithm>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mpict/diagnostics.hpp"
#include "mpict/lexer.hpp"
#include "mpict/scanner.hpp"

namespace mpict {

enum class PlaceholderCategory { Var, Func, Type, Num, Str };

inline std::string_view category_prefix(PlaceholderCategory c) {
  switch (c) {
    case PlaceholderCategory::Var: return "var";
    case PlaceholderCategory::Func: return "func";
    case PlaceholderCategory::Type: return "type";
    case PlaceholderCategory::Num: return "num";
    case PlaceholderCategory::Str: return "str";
  }
  return "var";
}

inline PlaceholderCategory category_from_prefix(std::string_view s) {
  if (s == "func") return PlaceholderCategory::Func;
  if (s == "type") return PlaceholderCategory::Type;
  if (s == "num") return PlaceholderCategory::Num;
  if (s == "str") return PlaceholderCategory::Str;
  return PlaceholderCategory::Var;
}

struct AnonymizationEntry {
  std::string original;
  std::string placeholder;
  PlaceholderCategory category = PlaceholderCategory::Var;
};

struct AnonymizationMap {
  std::uint64_t seed = 0;
  std::vector<AnonymizationEntry> entries;  // first-occurrence order

  const AnonymizationEntry* find_original(std::string_view original) const {
    for (const auto& e : entries)
      if (e.original == original) return &e;
    return nullptr;
  }
};

struct AnonymizeOptions {
  std::uint64_t seed = 42;
  bool anonymize_strings = false;  // string/char literals -> str_N
};

struct AnonymizeResult {
  std::string code;
  AnonymizationMap map;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t placeholder_draw(std::uint64_t seed,
                                      std::string_view token,
                                      std::uint64_t attempt) {
  std::uint64_t h = splitmix64(seed ^ 0x6D50734D49435455ull);
  for (char c : token)
    h = splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return splitmix64(h ^ attempt);
}

// True when the lexeme looks like one of our placeholders.
inline bool is_placeholder_shaped(std::string_view s) {
  static constexpr std::string_view kPrefixes[] = {"var_", "func_", "type_",
                                                   "num_", "str_"};
  for (auto p : kPrefixes) {
    if (s.size() > p.size() && s.substr(0, p.size()) == p) {
      bool digits = true;
      for (char c : s.substr(p.size()))
        digits &= c >= '0' && c <= '9';
      if (digits) return true;
    }
  }
  return false;
}

}  // namespace detail

inline AnonymizeResult anonymize(std::string_view code,
                                 const AnonymizeOptions& options,
                                 Diagnostics* diags = nullptr) {
  using namespace detail;
  const std::vector<Token> tokens = tokenize(code, diags);

  std::vector<std::size_t> sig;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (is_significant(tokens[i])) sig.push_back(i);
  auto next_sig = [&](std::size_t si) -> const Token* {
    return si + 1 < sig.size() ? &tokens[sig[si + 1]] : nullptr;
  };

  std::unordered_set<std::string> existing_identifiers;
  for (const Token& t : tokens)
    if (t.kind == TokenKind::Identifier) existing_identifiers.insert(t.lexeme);

  // Pass 1: decide per distinct token text whether it is replaced and in
  // which category. Category precedence: func > type > var.
  std::unordered_map<std::string, PlaceholderCategory> category;
  std::unordered_set<std::string> called_mpi;  // MPI_ names seen before '('
  std::vector<std::string> first_seen;

  auto vote = [&](const std::string& text, PlaceholderCategory cat) {
    auto [it, inserted] = category.emplace(text, cat);
    if (inserted) {
      first_seen.push_back(text);
      return;
    }
    auto rank = [](PlaceholderCategory c) {
      switch (c) {
        case PlaceholderCategory::Func: return 3;
        case PlaceholderCategory::Type: return 2;
        case PlaceholderCategory::Num: return 1;
        default: return 0;
      }
    };
    if (rank(cat) > rank(it->second)) it->second = cat;
  };

  for (std::size_t si = 0; si < sig.size(); ++si) {
    const Token& t = tokens[sig[si]];
    if (t.kind == TokenKind::Identifier && is_mpi_name(t.lexeme)) {
      const Token* nxt = next_sig(si);
      if (nxt && is_punct(*nxt, "(")) called_mpi.insert(t.lexeme);
    }
  }

  for (std::size_t si = 0; si < sig.size(); ++si) {
    const Token& t = tokens[sig[si]];
    if (t.kind == TokenKind::Number) {
      vote(t.lexeme, PlaceholderCategory::Num);
      continue;
    }
    if ((t.kind == TokenKind::StringLiteral ||
         t.kind == TokenKind::CharLiteral) &&
        options.anonymize_strings) {
      vote(t.lexeme, PlaceholderCategory::Str);
      continue;
    }
    if (t.kind != TokenKind::Identifier) continue;
    if (is_keyword(t.lexeme)) continue;
    if (is_mpi_name(t.lexeme) && called_mpi.count(t.lexeme)) continue;

    const Token* nxt = next_sig(si);
    if (nxt && is_punct(*nxt, "(")) {
      vote(t.lexeme, PlaceholderCategory::Func);
      continue;
    }
    // struct/union/enum/class tag position.
    if (si > 0) {
      const Token& prev = tokens[sig[si - 1]];
      if (prev.kind == TokenKind::Identifier &&
          (prev.lexeme == "struct" || prev.lexeme == "union" ||
           prev.lexeme == "enum" || prev.lexeme == "class")) {
        vote(t.lexeme, PlaceholderCategory::Type);
        continue;
      }
    }
    vote(t.lexeme, PlaceholderCategory::Var);
  }

  // typedef: the last identifier before the terminating ';' names a type.
  for (std::size_t si = 0; si < sig.size(); ++si) {
    const Token& t = tokens[sig[si]];
    if (t.kind != TokenKind::Identifier || t.lexeme != "typedef") continue;
    const Token* last_ident = nullptr;
    int depth = 0;
    for (std::size_t k = si + 1; k < sig.size(); ++k) {
      const Token& u = tokens[sig[k]];
      if (is_punct(u, "(") || is_punct(u, "[") || is_punct(u, "{")) ++depth;
      if (is_punct(u, ")") || is_punct(u, "]") || is_punct(u, "}")) --depth;
      if (depth == 0 && is_punct(u, ";")) break;
      if (u.kind == TokenKind::Identifier && !is_keyword(u.lexeme))
        last_ident = &u;
    }
    if (last_ident && category.count(last_ident->lexeme) &&
        category[last_ident->lexeme] == PlaceholderCategory::Var)
      category[last_ident->lexeme] = PlaceholderCategory::Type;
  }

  // Pass 2: assign placeholders in first-occurrence order.
  AnonymizationMap map;
  map.seed = options.seed;
  std::unordered_map<std::string, std::string> forward;
  std::unordered_set<std::string> used_placeholders;
  for (const auto& original : first_seen) {
    const PlaceholderCategory cat = category[original];
    std::string placeholder;
    for (std::uint64_t attempt = 0;; ++attempt) {
      // Widen the numeral space if a file is crowded enough to exhaust it.
      const std::uint64_t modulus = attempt < 2000 ? 1000 : 1000000;
      const std::uint64_t n = placeholder_draw(options.seed, original, attempt) % modulus;
      placeholder = std::string(category_prefix(cat)) + "_" + std::to_string(n);
      if (!existing_identifiers.count(placeholder) &&
          !used_placeholders.count(placeholder))
        break;
    }
    used_placeholders.insert(placeholder);
    forward.emplace(original, placeholder);
    map.entries.push_back({original, placeholder, cat});
  }

  std::string out;
  out.reserve(code.size());
  for (const Token& t : tokens) {
    auto it = forward.end();
    if (t.kind == TokenKind::Identifier || t.kind == TokenKind::Number ||
        ((t.kind == TokenKind::StringLiteral ||
          t.kind == TokenKind::CharLiteral) &&
         options.anonymize_strings))
      it = forward.find(t.lexeme);
    out += it != forward.end() ? it->second : t.lexeme;
  }
  return AnonymizeResult{std::move(out), std::move(map)};
}

inline AnonymizeResult anonymize(std::string_view code, std::uint64_t seed,
                                 Diagnostics* diags = nullptr) {
  AnonymizeOptions options;
  options.seed = seed;
  return anonymize(code, options, diags);
}

// Exact inverse substitution. Throws when the code contains a placeholder
// the map does not know.
inline std::string deanonymize(std::string_view code,
                               const AnonymizationMap& map) {
  std::unordered_map<std::string, std::string> inverse;
  for (const auto& e : map.entries) inverse.emplace(e.placeholder, e.original);

  std::string out;
  out.reserve(code.size());
  for (const Token& t : tokenize(code)) {
    if (t.kind == TokenKind::Identifier) {
      auto it = inverse.find(t.lexeme);
      if (it != inverse.end()) {
        out += it->second;
        continue;
      }
      if (detail::is_placeholder_shaped(t.lexeme))
        throw std::runtime_error("placeholder not present in map: " + t.lexeme);
    }
    out += t.lexeme;
  }
  return out;
}

}  // namespace mpict

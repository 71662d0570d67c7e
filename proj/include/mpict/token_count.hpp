#pragma once

// Token-budget counting for the corpus filter. Two schemes: "lexical"
// counts lexer tokens (comments and whitespace excluded) and needs no
// data files; "bpe" applies byte-pair merges loaded from a merges file,
// counting the symbols left after merging.

#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpict/lexer.hpp"
#include "mpict/text.hpp"

namespace mpict {

struct TokenizerConfig {
  std::string scheme = "lexical";  // "lexical" | "bpe"
  std::string merges_path;         // required for "bpe"
};

class TokenCounter {
 public:
  static TokenCounter lexical() {
    TokenCounter c;
    c.scheme_ = "lexical";
    return c;
  }

  static TokenCounter bpe_from_file(const std::string& merges_path) {
    std::ifstream in(merges_path);
    if (!in)
      throw std::invalid_argument("cannot open merges file: " + merges_path);
    TokenCounter c;
    c.scheme_ = "bpe";
    std::string line;
    int rank = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line.front() == '#') continue;
      std::istringstream ls(line);
      std::string a, b;
      if (!(ls >> a >> b))
        throw std::invalid_argument("malformed merges line: " + line);
      c.merge_ranks_.emplace(std::make_pair(a, b), rank++);
    }
    return c;
  }

  static TokenCounter from_config(const TokenizerConfig& config) {
    if (config.scheme == "lexical") return lexical();
    if (config.scheme == "bpe") return bpe_from_file(config.merges_path);
    throw std::invalid_argument("unknown tokenizer scheme: " + config.scheme);
  }

  const std::string& scheme() const { return scheme_; }

  std::size_t count(std::string_view text) const {
    if (scheme_ == "lexical") return count_lexical(text);
    return count_bpe(text);
  }

 private:
  std::string scheme_ = "lexical";
  std::map<std::pair<std::string, std::string>, int> merge_ranks_;

  static std::size_t count_lexical(std::string_view text) {
    std::size_t n = 0;
    for (const Token& t : tokenize(text))
      if (t.kind != TokenKind::Whitespace && t.kind != TokenKind::Comment) ++n;
    return n;
  }

  std::size_t count_bpe(std::string_view text) const {
    std::size_t total = 0;
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      std::size_t start = i;
      while (i < text.size() && !is_space(text[i])) ++i;
      if (i > start) total += bpe_symbol_count(text.substr(start, i - start));
    }
    return total;
  }

  // Splits a word into UTF-8 code points, then repeatedly merges the
  // lowest-ranked adjacent pair until no listed pair remains.
  std::size_t bpe_symbol_count(std::string_view word) const {
    std::vector<std::string> symbols;
    for (std::size_t i = 0; i < word.size();) {
      unsigned char c = static_cast<unsigned char>(word[i]);
      std::size_t len = c < 0x80 ? 1 : (c & 0xE0) == 0xC0 ? 2
                                   : (c & 0xF0) == 0xE0   ? 3
                                   : (c & 0xF8) == 0xF0   ? 4
                                                          : 1;
      if (i + len > word.size()) len = 1;
      symbols.emplace_back(word.substr(i, len));
      i += len;
    }
    while (symbols.size() > 1) {
      int best_rank = -1;
      std::size_t best_pos = 0;
      for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
        auto it = merge_ranks_.find({symbols[i], symbols[i + 1]});
        if (it != merge_ranks_.end() &&
            (best_rank < 0 || it->second < best_rank)) {
          best_rank = it->second;
          best_pos = i;
        }
      }
      if (best_rank < 0) break;
      symbols[best_pos] += symbols[best_pos + 1];
      symbols.erase(symbols.begin() + static_cast<std::ptrdiff_t>(best_pos) + 1);
    }
    return symbols.size();
  }
};

inline std::size_t count_tokens(std::string_view text,
                                const TokenCounter& counter) {
  return counter.count(text);
}

}  // namespace mpict

#pragma once

// Comment- and string-aware lexer for C/C++ sources. It is deliberately not
// a compiler frontend: it never fails, it keeps every input byte in exactly
// one token, and it only distinguishes the categories the rest of the
// pipeline cares about.

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mpict/diagnostics.hpp"
#include "mpict/text.hpp"

namespace mpict {

enum class TokenKind {
  Identifier,
  Number,
  StringLiteral,
  CharLiteral,
  Punctuation,
  Comment,
  Whitespace,
  PreprocessorDirective,
  Other,
};

struct Token {
  TokenKind kind = TokenKind::Other;
  std::string lexeme;
  int line = 1;    // 1-based
  int column = 1;  // 1-based, in bytes
  std::size_t offset = 0;

  std::size_t end_offset() const { return offset + lexeme.size(); }
};

// True for names shaped like an MPI symbol: "MPI_" plus at least one more
// identifier character.
inline bool is_mpi_name(std::string_view lexeme) {
  return lexeme.size() > 4 && lexeme.substr(0, 4) == "MPI_";
}

namespace detail {

inline bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' ||
         c == '$' || c >= 0x80;
}

inline bool is_ident_continue(unsigned char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

inline bool is_alnum(unsigned char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

class Lexer {
 public:
  Lexer(std::string_view text, Diagnostics* diags)
      : text_(text), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < text_.size()) {
      tokens.push_back(next());
    }
    return tokens;
  }

 private:
  std::string_view text_;
  Diagnostics* diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  bool line_has_code_ = false;  // non-comment content seen on current line

  char cur() const { return text_[pos_]; }
  char peek(std::size_t k = 1) const {
    return pos_ + k < text_.size() ? text_[pos_ + k] : '\0';
  }
  bool eof() const { return pos_ >= text_.size(); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  Token make(TokenKind kind, std::size_t start, int line, int column) {
    Token t;
    t.kind = kind;
    t.lexeme.assign(text_.substr(start, pos_ - start));
    t.line = line;
    t.column = column;
    t.offset = start;
    return t;
  }

  Token next() {
    const std::size_t start = pos_;
    const int line = line_;
    const int column = column_;
    const char c = cur();

    if (is_space(c)) {
      bool saw_newline = false;
      while (!eof() && is_space(cur())) {
        saw_newline |= cur() == '\n';
        advance();
      }
      if (saw_newline) line_has_code_ = false;
      return make(TokenKind::Whitespace, start, line, column);
    }

    if (c == '/' && peek() == '/') {
      lex_line_comment();
      return make(TokenKind::Comment, start, line, column);
    }
    if (c == '/' && peek() == '*') {
      if (!lex_block_comment())
        report(diags_, "unterminated-comment", "block comment runs to end of file",
               {}, line);
      // A multi-line comment leaves us at the start-of-line state.
      if (line_ != line) line_has_code_ = false;
      return make(TokenKind::Comment, start, line, column);
    }

    if (c == '#' && !line_has_code_) {
      lex_directive();
      Token t = make(TokenKind::PreprocessorDirective, start, line, column);
      if (t.lexeme.find("MPI_") != std::string::npos)
        report(diags_, "mpi-in-directive",
               "MPI name inside preprocessor directive is not analyzed", {},
               line);
      line_has_code_ = true;
      return t;
    }

    line_has_code_ = true;

    // String/char literals, including encoding prefixes and raw strings.
    if (TokenKind kind; lex_literal_with_prefix(kind, line))
      return make(kind, start, line, column);

    if (is_ident_start(static_cast<unsigned char>(c))) {
      while (!eof() && is_ident_continue(static_cast<unsigned char>(cur())))
        advance();
      return make(TokenKind::Identifier, start, line, column);
    }

    if (is_digit(static_cast<unsigned char>(c)) ||
        (c == '.' && is_digit(static_cast<unsigned char>(peek())))) {
      lex_number();
      return make(TokenKind::Number, start, line, column);
    }

    if (std::size_t len = punctuation_length(); len > 0) {
      for (std::size_t k = 0; k < len; ++k) advance();
      return make(TokenKind::Punctuation, start, line, column);
    }

    advance();
    return make(TokenKind::Other, start, line, column);
  }

  void lex_line_comment() {
    advance();  // '/'
    advance();  // '/'
    while (!eof()) {
      if (cur() == '\n') break;
      if (cur() == '\\' && peek() == '\n') {  // spliced comment continues
        advance();
        advance();
        continue;
      }
      if (cur() == '\\' && peek() == '\r' && peek(2) == '\n') {
        advance();
        advance();
        advance();
        continue;
      }
      advance();
    }
  }

  // Returns false when the comment is unterminated.
  bool lex_block_comment() {
    advance();  // '/'
    advance();  // '*'
    while (!eof()) {
      if (cur() == '*' && peek() == '/') {
        advance();
        advance();
        return true;
      }
      advance();
    }
    return false;
  }

  // One logical preprocessor line: honors backslash continuations and keeps
  // embedded comments inside the directive token. The trailing newline is
  // not consumed.
  void lex_directive() {
    advance();  // '#'
    while (!eof()) {
      char c = cur();
      if (c == '\n') break;
      if (c == '\r' && peek() == '\n') break;
      if (c == '\\') {
        if (peek() == '\n') {
          advance();
          advance();
          continue;
        }
        if (peek() == '\r' && peek(2) == '\n') {
          advance();
          advance();
          advance();
          continue;
        }
        advance();
        continue;
      }
      if (c == '/' && peek() == '*') {
        if (!lex_block_comment()) {
          report(diags_, "unterminated-comment",
                 "block comment runs to end of file", {}, line_);
          return;
        }
        continue;
      }
      if (c == '/' && peek() == '/') {
        while (!eof() && cur() != '\n') advance();
        break;
      }
      advance();
    }
  }

  // Handles "...", '...', R"(...)" and their u/u8/U/L prefixed forms.
  // Returns true (with kind set) when a literal was consumed.
  bool lex_literal_with_prefix(TokenKind& kind, int start_line) {
    static constexpr std::array<std::string_view, 5> kRawPrefixes = {
        "u8R", "uR", "UR", "LR", "R"};
    static constexpr std::array<std::string_view, 4> kEncPrefixes = {"u8", "u",
                                                                     "U", "L"};
    std::string_view rest = text_.substr(pos_);
    for (auto p : kRawPrefixes) {
      if (rest.size() > p.size() && rest.substr(0, p.size()) == p &&
          rest[p.size()] == '"') {
        for (std::size_t k = 0; k < p.size(); ++k) advance();
        lex_raw_string(start_line);
        kind = TokenKind::StringLiteral;
        return true;
      }
    }
    auto quoted = [&](char q) -> std::size_t {
      if (rest.empty()) return 0;
      if (rest[0] == q) return 1;
      for (auto p : kEncPrefixes)
        if (rest.size() > p.size() && rest.substr(0, p.size()) == p &&
            rest[p.size()] == q)
          return p.size() + 1;
      return 0;
    };
    if (std::size_t skip = quoted('"'); skip > 0) {
      for (std::size_t k = 0; k + 1 < skip; ++k) advance();
      lex_quoted('"', start_line, "unterminated-string");
      kind = TokenKind::StringLiteral;
      return true;
    }
    if (std::size_t skip = quoted('\''); skip > 0) {
      for (std::size_t k = 0; k + 1 < skip; ++k) advance();
      lex_quoted('\'', start_line, "unterminated-char");
      kind = TokenKind::CharLiteral;
      return true;
    }
    return false;
  }

  void lex_quoted(char quote, int start_line, const char* diag_code) {
    advance();  // opening quote
    while (!eof()) {
      char c = cur();
      if (c == '\\') {
        advance();
        if (!eof()) advance();
        continue;
      }
      advance();
      if (c == quote) return;
    }
    report(diags_, diag_code, "literal runs to end of file", {}, start_line);
  }

  void lex_raw_string(int start_line) {
    advance();  // 'R' already consumed by caller; this is '"'
    std::string delim;
    while (!eof() && cur() != '(' && delim.size() < 16 && cur() != '"' &&
           cur() != '\\' && !is_space(cur())) {
      delim.push_back(cur());
      advance();
    }
    if (eof() || cur() != '(') {
      // Malformed raw literal; recover as an unterminated string.
      while (!eof()) advance();
      report(diags_, "unterminated-string", "literal runs to end of file", {},
             start_line);
      return;
    }
    advance();  // '('
    const std::string closer = ")" + delim + "\"";
    while (!eof()) {
      if (text_.compare(pos_, closer.size(), closer) == 0) {
        for (std::size_t k = 0; k < closer.size(); ++k) advance();
        return;
      }
      advance();
    }
    report(diags_, "unterminated-string", "literal runs to end of file", {},
           start_line);
  }

  // pp-number: digits, identifier chars, '.', exponent signs, and digit
  // separators. Over-accepts relative to the grammar, which is the right
  // trade for dirty input.
  void lex_number() {
    advance();
    while (!eof()) {
      unsigned char c = static_cast<unsigned char>(cur());
      if ((c == 'e' || c == 'E' || c == 'p' || c == 'P') &&
          (peek() == '+' || peek() == '-')) {
        advance();
        advance();
        continue;
      }
      if (is_alnum(c) || c == '_' || c == '.') {
        advance();
        continue;
      }
      if (c == '\'' && is_alnum(static_cast<unsigned char>(peek()))) {
        advance();
        advance();
        continue;
      }
      break;
    }
  }

  std::size_t punctuation_length() const {
    static constexpr std::array<std::string_view, 5> k3 = {"<<=", ">>=", "...",
                                                           "->*", "<=>"};
    static constexpr std::array<std::string_view, 21> k2 = {
        "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&",
        "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "##"};
    static constexpr std::string_view k1 = "()[]{}<>;:,.?+-*/%&|^!~=#";
    std::string_view rest = text_.substr(pos_);
    for (auto op : k3)
      if (rest.substr(0, 3) == op) return 3;
    for (auto op : k2)
      if (rest.substr(0, 2) == op) return 2;
    if (!rest.empty() && k1.find(rest[0]) != std::string_view::npos) return 1;
    return 0;
  }
};

}  // namespace detail

inline std::vector<Token> tokenize(std::string_view text,
                                   Diagnostics* diags = nullptr) {
  return detail::Lexer(text, diags).run();
}

}  // namespace mpict

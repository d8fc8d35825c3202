#pragma once

#include "hydraplan/syntax.hpp"

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

namespace hydraplan {

enum class TokenKind { identifier, variable, number, punct };

struct Token {
  TokenKind kind;
  std::string text;
  int line = 0;
  int column = 0;

  bool is(std::string_view s) const { return text == s && kind != TokenKind::number; }
};

// One '.'-terminated statement.
struct TokenStatement {
  std::vector<Token> tokens;
  SourcePos pos;
};

// Splits source text into statements. '%' starts a line comment. A '.' ends a
// statement unless it sits between digits.
inline std::vector<TokenStatement> tokenize(std::string_view src) {
  std::vector<TokenStatement> out;
  TokenStatement current;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto push = [&](TokenKind kind, std::string text, int l, int c) {
    if (current.tokens.empty()) current.pos = {l, c};
    current.tokens.push_back(Token{kind, std::move(text), l, c});
  };
  while (i < src.size()) {
    char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      advance(1);
      continue;
    }
    if (ch == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int l = line, c = col;
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string text(src.substr(i, j - i));
      TokenKind kind = is_variable_name(text) && text != "_" ? TokenKind::variable : TokenKind::identifier;
      advance(j - i);
      push(kind, std::move(text), l, c);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      std::string text(src.substr(i, j - i));
      advance(j - i);
      push(TokenKind::number, std::move(text), l, c);
      continue;
    }
    if (ch == '.') {
      advance(1);
      if (current.tokens.empty()) throw ParseError("empty statement", l, c);
      out.push_back(std::move(current));
      current = {};
      continue;
    }
    static const char* two[] = {"!=", "<=", ">=", "=="};
    bool matched = false;
    for (const char* t : two) {
      if (src.substr(i, 2) == t) {
        advance(2);
        push(TokenKind::punct, t, l, c);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string_view("()=<>+-*/^[]{},:").find(ch) != std::string_view::npos) {
      advance(1);
      push(TokenKind::punct, std::string(1, ch), l, c);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
  }
  if (!current.tokens.empty()) {
    const Token& last = current.tokens.back();
    throw ParseError("statement not terminated by '.'", last.line, last.column);
  }
  return out;
}

// Cursor over one statement's tokens.
class TokenCursor {
public:
  TokenCursor(const std::vector<Token>& tokens, std::size_t begin, std::size_t end, SourcePos pos)
      : tokens_(tokens), i_(begin), end_(end), pos_(pos) {}

  bool done() const { return i_ >= end_; }
  const Token* peek(std::size_t ahead = 0) const {
    return i_ + ahead < end_ ? &tokens_[i_ + ahead] : nullptr;
  }
  bool peek_is(std::string_view s, std::size_t ahead = 0) const {
    const Token* t = peek(ahead);
    return t && t->is(s);
  }
  const Token& next() {
    if (done()) fail("unexpected end of statement");
    return tokens_[i_++];
  }
  const Token& expect(std::string_view s) {
    const Token& t = next();
    if (!t.is(s)) fail("expected '" + std::string(s) + "' but found '" + t.text + "'", &t);
    return t;
  }
  bool accept(std::string_view s) {
    if (peek_is(s)) {
      ++i_;
      return true;
    }
    return false;
  }
  std::size_t position() const { return i_; }

  [[noreturn]] void fail(const std::string& what, const Token* at = nullptr) const {
    if (!at) at = i_ < end_ ? &tokens_[i_] : (end_ > 0 && end_ <= tokens_.size() ? &tokens_[end_ - 1] : nullptr);
    if (at) throw ParseError(what, at->line, at->column);
    throw ParseError(what, pos_.line, pos_.column);
  }

private:
  const std::vector<Token>& tokens_;
  std::size_t i_;
  std::size_t end_;
  SourcePos pos_;
};

}  // namespace hydraplan

#include <array>
#include <cctype>
#include <optional>
#include <string_view>

#include "sageforge/syntax.hpp"

namespace sageforge::syntax {

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",       "assert", "async",
    "await", "break",  "class",   "continue", "def",      "del",    "elif",
    "else",  "except", "finally", "for",      "from",     "global", "if",
    "import", "in",    "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",  "raise",  "return",  "try",      "while",    "with",   "yield"};

constexpr std::array<std::string_view, 5> kOps3 = {"**=", "//=", ">>=", "<<=", "..."};
constexpr std::array<std::string_view, 19> kOps2 = {"->", ":=", "**", "//", "<<", ">>", "<=",
                                                    ">=", "==", "!=", "+=", "-=", "*=", "/=",
                                                    "%=", "&=", "|=", "^=", "@="};
constexpr std::string_view kOps1 = "+-*/%@&|^~<>()[]{},:.;=";

bool is_name_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c >= 0x80;
}
bool is_name_char(unsigned char c) { return is_name_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<LexToken> run() {
    const std::size_t n = src_.size();
    std::size_t i = 0;
    while (i < n) {
      if (at_line_start_ && depth_ == 0) {
        i = handle_indentation(i);
        if (i >= n) break;
        if (at_line_start_) continue;  // blank or comment-only line consumed
      }
      const auto c = static_cast<unsigned char>(src_[i]);
      if (c == ' ' || c == '\t' || c == '\f') {
        ++i;
      } else if (c == '\n' || c == '\r') {
        const std::size_t len = (c == '\r' && i + 1 < n && src_[i + 1] == '\n') ? 2 : 1;
        if (depth_ == 0) {
          if (line_has_content_) emit(LexKind::Newline, i, i + len);
          line_has_content_ = false;
          at_line_start_ = true;
        }
        i += len;
      } else if (c == '#') {
        i = lex_comment(i);
      } else if (c == '\\' && i + 1 < n && (src_[i + 1] == '\n' || src_[i + 1] == '\r')) {
        i += (src_[i + 1] == '\r' && i + 2 < n && src_[i + 2] == '\n') ? 3 : 2;
      } else if (auto end = string_end(i)) {
        i = *end;
      } else if (is_name_start(c)) {
        std::size_t j = i + 1;
        while (j < n && is_name_char(static_cast<unsigned char>(src_[j]))) ++j;
        emit_content(LexKind::Name, i, j);
        i = j;
      } else if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(static_cast<unsigned char>(src_[i + 1])))) {
        i = lex_number(i);
      } else {
        i = lex_operator(i);
      }
    }
    if (line_has_content_) emit(LexKind::Newline, n, n);
    while (indents_.size() > 1) {
      indents_.pop_back();
      emit(LexKind::Dedent, n, n);
    }
    emit(LexKind::EndMarker, n, n);
    return std::move(out_);
  }

 private:
  void emit(LexKind kind, std::size_t b, std::size_t e) { out_.push_back({kind, {b, e}}); }
  void emit_content(LexKind kind, std::size_t b, std::size_t e) {
    emit(kind, b, e);
    line_has_content_ = true;
  }

  std::size_t handle_indentation(std::size_t i) {
    const std::size_t n = src_.size();
    std::size_t col = 0;
    std::size_t j = i;
    while (j < n && (src_[j] == ' ' || src_[j] == '\t' || src_[j] == '\f')) {
      if (src_[j] == '\t') {
        col = (col / 8 + 1) * 8;
      } else if (src_[j] == '\f') {
        col = 0;
      } else {
        ++col;
      }
      ++j;
    }
    if (j >= n) return j;
    if (src_[j] == '\n' || src_[j] == '\r') {
      return j + ((src_[j] == '\r' && j + 1 < n && src_[j + 1] == '\n') ? 2 : 1);
    }
    if (src_[j] == '#') {
      std::size_t k = j;
      while (k < n && src_[k] != '\n' && src_[k] != '\r') ++k;
      emit(LexKind::Comment, j, k);
      if (k < n) k += (src_[k] == '\r' && k + 1 < n && src_[k + 1] == '\n') ? 2 : 1;
      return k;
    }
    if (col > indents_.back()) {
      indents_.push_back(col);
      emit(LexKind::Indent, j, j);
    } else {
      while (col < indents_.back()) {
        indents_.pop_back();
        emit(LexKind::Dedent, j, j);
      }
      if (col != indents_.back()) {
        // Inconsistent dedent: surfaces to the parser as an unexpected indent.
        indents_.push_back(col);
        emit(LexKind::Indent, j, j);
      }
    }
    at_line_start_ = false;
    return j;
  }

  std::size_t lex_comment(std::size_t i) {
    std::size_t j = i;
    while (j < src_.size() && src_[j] != '\n' && src_[j] != '\r') ++j;
    emit(LexKind::Comment, i, j);
    return j;
  }

  // If a string literal (with optional prefix) starts at i, emits it and
  // returns the end offset.
  std::optional<std::size_t> string_end(std::size_t i) {
    const std::size_t n = src_.size();
    std::size_t j = i;
    while (j < n && j - i < 2 && std::string_view("rRbBuUfF").find(src_[j]) != std::string_view::npos) {
      ++j;
    }
    if (j >= n || (src_[j] != '\'' && src_[j] != '"')) return std::nullopt;
    const char q = src_[j];
    const bool triple = j + 2 < n && src_[j + 1] == q && src_[j + 2] == q;
    std::size_t k = j + (triple ? 3 : 1);
    while (true) {
      if (k >= n) {
        emit_content(LexKind::Error, i, n);
        return n;
      }
      const char c = src_[k];
      if (c == '\\') {
        k += 2;
        continue;
      }
      if (!triple && (c == '\n' || c == '\r')) {
        emit_content(LexKind::Error, i, k);
        return k;
      }
      if (c == q) {
        if (!triple) {
          emit_content(LexKind::String, i, k + 1);
          return k + 1;
        }
        if (k + 2 < n && src_[k + 1] == q && src_[k + 2] == q) {
          emit_content(LexKind::String, i, k + 3);
          return k + 3;
        }
      }
      ++k;
    }
  }

  std::size_t lex_number(std::size_t i) {
    const std::size_t n = src_.size();
    std::size_t j = i;
    auto digits = [&](auto pred) {
      while (j < n && (pred(static_cast<unsigned char>(src_[j])) || src_[j] == '_')) ++j;
    };
    if (src_[j] == '0' && j + 1 < n && std::string_view("xXoObB").find(src_[j + 1]) != std::string_view::npos) {
      j += 2;
      digits([](unsigned char c) { return std::isxdigit(c) != 0; });
    } else {
      digits(is_digit);
      if (j < n && src_[j] == '.') {
        ++j;
        digits(is_digit);
      }
      if (j < n && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < n && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < n && is_digit(static_cast<unsigned char>(src_[k]))) {
          j = k;
          digits(is_digit);
        }
      }
    }
    if (j < n && (src_[j] == 'j' || src_[j] == 'J')) ++j;
    emit_content(LexKind::Number, i, j);
    return j;
  }

  std::size_t lex_operator(std::size_t i) {
    const auto rest = src_.substr(i);
    for (auto op : kOps3) {
      if (rest.starts_with(op)) return emit_op(i, op.size());
    }
    for (auto op : kOps2) {
      if (rest.starts_with(op)) return emit_op(i, op.size());
    }
    if (kOps1.find(rest[0]) != std::string_view::npos) return emit_op(i, 1);
    emit_content(LexKind::Error, i, i + 1);
    return i + 1;
  }

  std::size_t emit_op(std::size_t i, std::size_t len) {
    const char c = src_[i];
    if (len == 1) {
      if (c == '(' || c == '[' || c == '{') ++depth_;
      if ((c == ')' || c == ']' || c == '}') && depth_ > 0) --depth_;
    }
    emit_content(LexKind::Op, i, i + len);
    return i + len;
  }

  std::string_view src_;
  std::vector<LexToken> out_;
  std::vector<std::size_t> indents_{0};
  int depth_ = 0;
  bool at_line_start_ = true;
  bool line_has_content_ = false;
};

}  // namespace

bool is_python_keyword(std::string_view word) {
  for (auto kw : kKeywords) {
    if (kw == word) return true;
  }
  return false;
}

std::vector<LexToken> lex_python(std::string_view source) { return Lexer(source).run(); }

}  // namespace sageforge::syntax

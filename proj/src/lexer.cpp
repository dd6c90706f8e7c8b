#include "relfix/lexer.hpp"

#include <array>
#include <cctype>

#include "relfix/errors.hpp"

namespace relfix {

namespace {

constexpr std::array<std::string_view, 26> kSymbols = {
    "<=>", "=>", "<=", "=<", ">=", "!=", "->", "&&", "||", "!", "=", "<", ">",
    "{",   "}",  "[",  "]",  "(",  ")",  ",",  ":",  "|",  ".", "~", "^", "*",
};
constexpr std::array<std::string_view, 4> kMoreSymbols = {"#", "+", "-", "&"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

}  // namespace

std::vector<Token> tokenize(std::string_view src, std::shared_ptr<const std::string> file) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto here = [&]() {
    SourceSpan s;
    s.file = file;
    s.start_line = s.end_line = line;
    s.start_col = s.end_col = col;
    return s;
  };
  auto finish = [&](SourceSpan s) {
    s.end_line = line;
    s.end_col = col;
    return s;
  };

  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//" || src.substr(i, 2) == "--") {
      auto start = here();
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      std::string_view body = src.substr(i, end - i);
      auto trimmed = body;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
        trimmed.remove_suffix(1);
      advance(end - i);
      if (trimmed == "//@loc") {
        out.push_back({TokKind::LocMarker, "//@loc", 0, finish(start)});
      } else if (trimmed == "//@oracle") {
        out.push_back({TokKind::OracleMarker, "//@oracle", 0, finish(start)});
      }
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      auto start = here();
      std::size_t end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError("unterminated comment", start);
      advance(end + 2 - i);
      continue;
    }
    auto start = here();
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      Token t{TokKind::Ident, std::string(src.substr(i, j - i)), 0, {}};
      advance(j - i);
      t.span = finish(start);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{TokKind::Number, std::string(src.substr(i, j - i)), 0, {}};
      if (t.text.size() > 9) throw ParseError("integer literal too large", start);
      t.number = std::stoll(t.text);
      advance(j - i);
      t.span = finish(start);
      out.push_back(std::move(t));
      continue;
    }
    bool matched = false;
    for (auto sym : kSymbols) {
      if (src.substr(i, sym.size()) == sym) {
        advance(sym.size());
        out.push_back({TokKind::Symbol, std::string(sym), 0, finish(start)});
        matched = true;
        break;
      }
    }
    if (!matched) {
      for (auto sym : kMoreSymbols) {
        if (src.substr(i, sym.size()) == sym) {
          advance(sym.size());
          out.push_back({TokKind::Symbol, std::string(sym), 0, finish(start)});
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      advance(1);
      throw ParseError(std::string("unexpected character '") + c + "'", finish(start));
    }
  }
  out.push_back({TokKind::End, "<end of input>", 0, here()});
  return out;
}

}  // namespace relfix

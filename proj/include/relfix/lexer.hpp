#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "relfix/source.hpp"

namespace relfix {

enum class TokKind : std::uint8_t { Ident, Number, Symbol, LocMarker, OracleMarker, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t number = 0;
  SourceSpan span;

  bool is(std::string_view s) const {
    return (kind == TokKind::Symbol || kind == TokKind::Ident) && text == s;
  }
};

/// Splits source text into tokens. `//` and `--` comments run to end of line,
/// `/* */` blocks are skipped; `//@loc` and `//@oracle` become marker tokens.
std::vector<Token> tokenize(std::string_view src, std::shared_ptr<const std::string> file);

}  // namespace relfix

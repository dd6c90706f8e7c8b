#pragma once

#include <compare>
#include <memory>
#include <string>

namespace relfix {

/// 1-based line/column range. The end column is exclusive.
struct SourceSpan {
  std::shared_ptr<const std::string> file;
  int start_line = 0;
  int start_col = 0;
  int end_line = 0;
  int end_col = 0;

  bool valid() const noexcept { return start_line > 0; }
  bool synthetic() const noexcept { return !valid(); }

  bool same_range(const SourceSpan& o) const noexcept {
    return start_line == o.start_line && start_col == o.start_col &&
           end_line == o.end_line && end_col == o.end_col;
  }

  /// True when `o` lies within this span.
  bool covers(const SourceSpan& o) const noexcept;

  std::string file_name() const { return file ? *file : std::string{}; }
  std::string str() const;
};

inline bool SourceSpan::covers(const SourceSpan& o) const noexcept {
  auto before = [](int l1, int c1, int l2, int c2) {
    return l1 < l2 || (l1 == l2 && c1 <= c2);
  };
  return before(start_line, start_col, o.start_line, o.start_col) &&
         before(o.end_line, o.end_col, end_line, end_col);
}

}  // namespace relfix

#pragma once

#include <bitset>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treemin {

class PatternError : public std::runtime_error {
public:
  PatternError(const std::string& message, std::size_t offset)
      : std::runtime_error(message), offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Byte-level regular pattern for token definitions, compiled to a Thompson NFA.
///
/// Supported syntax: literal bytes, `.` (any byte but newline), classes `[a-z_]`
/// and `[^...]`, escapes (`\n \t \r \d \w \s` and escaped metacharacters),
/// grouping, alternation, and the postfix operators `*`, `+`, `?`.
class Pattern {
public:
  static Pattern compile(std::string_view source);

  /// Length of the longest prefix of `text.substr(pos)` matched by the pattern.
  std::optional<std::size_t> longest_match(std::string_view text, std::size_t pos = 0) const;

  bool full_match(std::string_view text) const;
  bool matches_empty() const;

private:
  using ByteSet = std::bitset<256>;

  struct State {
    // A state either consumes one byte from `accepts` (moving to `next`) or
    // has up to two epsilon edges.
    bool consumes = false;
    ByteSet accepts;
    int next = -1;
    int epsilon_a = -1;
    int epsilon_b = -1;
  };

  void closure(std::vector<int>& set, std::vector<char>& seen, int state) const;

  std::vector<State> states_;
  int start_ = -1;
  int accept_ = -1;

  friend class PatternCompiler;
};

}  // namespace treemin

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treemin/grammar.hpp"

namespace treemin {

struct Token {
  std::size_t type = 0;  // index into Grammar::tokens()
  std::string text;
  std::size_t offset = 0;
  bool hidden = false;

  friend bool operator==(const Token&, const Token&) = default;
};

class LexError : public std::runtime_error {
public:
  explicit LexError(std::size_t offset)
      : std::runtime_error("lex error at offset " + std::to_string(offset) + ": no token matches"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Longest-match tokenization; equal-length matches go to the token declared
/// first (literal tokens precede named ones). Whitespace between tokens is dropped.
std::vector<Token> tokenize(const Grammar& grammar, std::string_view text);

}  // namespace treemin

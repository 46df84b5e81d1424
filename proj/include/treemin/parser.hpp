#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treemin/fragments.hpp"
#include "treemin/grammar.hpp"
#include "treemin/lexer.hpp"
#include "treemin/tree.hpp"

namespace treemin {

class ParseError : public std::runtime_error {
public:
  /// `token_index` is the first token no viable derivation consumes; it equals
  /// the token count when the input ended too early.
  ParseError(const std::string& message, std::size_t token_index, std::size_t offset, bool at_end);

  std::size_t token_index() const { return token_index_; }
  std::size_t offset() const { return offset_; }
  bool at_end() const { return at_end_; }

private:
  std::size_t token_index_;
  std::size_t offset_;
  bool at_end_;
};

/// Earley parse of a token sequence from the grammar's start rule. Ambiguity
/// is resolved by taking alternatives in declaration order and, within an
/// alternative, the longest span for each symbol from left to right.
/// `fragments` may be null when the tree is only inspected, never pruned.
ParseTree parse(std::shared_ptr<const Grammar> grammar, const std::vector<Token>& tokens,
                std::shared_ptr<const MinimalFragmentTable> fragments = nullptr);

/// Tokenizes and parses `text`.
ParseTree parse_text(std::shared_ptr<const Grammar> grammar, std::string_view text,
                     std::shared_ptr<const MinimalFragmentTable> fragments = nullptr);

/// True iff the tokens derive from the start rule.
bool recognizes(const Grammar& grammar, const std::vector<Token>& tokens);

/// True iff tokenize and parse both succeed from the start rule.
bool is_valid(const Grammar& grammar, std::string_view text);

}  // namespace treemin

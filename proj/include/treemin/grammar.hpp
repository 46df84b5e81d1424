#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "treemin/pattern.hpp"

namespace treemin {

/// Raised for malformed grammar files, undefined or duplicate symbols.
class GrammarError : public std::runtime_error {
public:
  GrammarError(const std::string& message, std::size_t line = 0, std::size_t column = 0);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

enum class Quantifier { Star, Plus, Opt };

enum class SymbolKind { Rule, Token };

/// One element of an alternative. A quantified symbol always wraps a plain
/// rule or token reference; groups are lowered into auxiliary rules at load time.
struct Symbol {
  SymbolKind kind = SymbolKind::Rule;
  std::size_t index = 0;
  std::optional<Quantifier> quantifier;

  bool is_token() const { return kind == SymbolKind::Token; }
  friend bool operator==(const Symbol&, const Symbol&) = default;
};

struct Alternative {
  std::vector<Symbol> symbols;
};

struct Rule {
  std::string name;
  std::vector<Alternative> alternatives;
  /// True for rules synthesized from parenthesized groups.
  bool auxiliary = false;
};

struct TokenDef {
  std::string name;
  /// Literal tokens come from quoted strings in rules and match their text exactly.
  bool literal = false;
  std::string literal_text;
  std::string pattern_source;
  std::shared_ptr<const Pattern> pattern;
  std::string min_text;
  bool hidden = false;
};

class Grammar {
public:
  const std::vector<Rule>& rules() const { return rules_; }
  const std::vector<TokenDef>& tokens() const { return tokens_; }
  const Rule& rule(std::size_t index) const { return rules_.at(index); }
  const TokenDef& token(std::size_t index) const { return tokens_.at(index); }

  std::size_t start() const { return start_; }
  const std::string& start_name() const { return rules_.at(start_).name; }

  std::optional<std::size_t> find_rule(std::string_view name) const;
  std::optional<std::size_t> find_token(std::string_view name) const;

  /// Copy of this grammar with a different start rule.
  Grammar with_start(std::string_view name) const;

  /// Human-readable rendering of a symbol, e.g. `blockItem*` or `"if"`.
  std::string describe(const Symbol& symbol) const;

private:
  friend class GrammarBuilder;

  std::vector<Rule> rules_;
  std::vector<TokenDef> tokens_;
  std::map<std::string, std::size_t, std::less<>> rule_index_;
  std::map<std::string, std::size_t, std::less<>> token_index_;
  std::size_t start_ = 0;
};

/// Parses the grammar file format. `start_override`, when given, replaces the
/// file's `start` directive (and makes the directive optional).
Grammar load_grammar(std::string_view text, std::optional<std::string> start_override = std::nullopt);

Grammar load_grammar_file(const std::string& path, std::optional<std::string> start_override = std::nullopt);

}  // namespace treemin

#pragma once

// Shared helpers for the unit tests and the acceptance runner: corpus paths,
// in-process oracles, a compact tree notation and brute-force enumerators.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "treemin/fragments.hpp"
#include "treemin/grammar.hpp"
#include "treemin/oracle.hpp"
#include "treemin/outcome.hpp"
#include "treemin/parser.hpp"
#include "treemin/preprocess.hpp"
#include "treemin/tree.hpp"

namespace support {

inline std::string source_path(const std::string& relative) {
  return std::string(TREEMIN_SOURCE_DIR) + "/" + relative;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string strip_ws(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') out += c;
  }
  return out;
}

inline std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == ' ' || s.back() == '\r')) s.pop_back();
  return s;
}

/// A grammar together with its fragment table.
struct Language {
  std::shared_ptr<const treemin::Grammar> grammar;
  std::shared_ptr<const treemin::MinimalFragmentTable> fragments;

  static Language from_text(const std::string& text) {
    Language l;
    l.grammar = std::make_shared<const treemin::Grammar>(treemin::load_grammar(text));
    l.fragments = std::make_shared<const treemin::MinimalFragmentTable>(treemin::minimal_fragment_table(*l.grammar));
    return l;
  }

  static Language from_file(const std::string& relative) { return from_text(read_file(source_path(relative))); }

  treemin::ParseTree parse(const std::string& text) const { return treemin::parse_text(grammar, text, fragments); }

  treemin::ParseTree prepared(const std::string& text) const {
    auto tree = parse(text);
    treemin::preprocess(tree);
    return tree;
  }
};

inline const Language& minic() {
  static const Language l = Language::from_file("grammars/minic.grammar");
  return l;
}

inline const Language& minilang() {
  static const Language l = Language::from_file("grammars/minilang.grammar");
  return l;
}

inline const Language& arith() {
  static const Language l = Language::from_file("grammars/arith.grammar");
  return l;
}

inline std::string helloworld_source() { return read_file(source_path("corpus/helloworld/helloworld.c")); }

struct Sample {
  const Language* language;
  std::string name;
  std::string text;
};

/// The bundled corpus inputs plus a few extra programs that exercise more of
/// each grammar.
inline std::vector<Sample> samples() {
  return {
      {&minic(), "helloworld", helloworld_source()},
      {&minic(), "loops",
       "int x ;\nint f ( int a , int b ) { while ( a < b ) { a += 1 ; if ( a == 3 ) break ; } return a * b ; }\n"
       "int main ( ) { int i = 0 ; for ( i = 0 ; i < 10 ; i ++ ) { x = f ( i , 2 ) ; } return x ; }"},
      {&minic(), "nested-blocks", "int main ( ) { { { ; } } if ( 1 ) { if ( 2 ) { return 0 ; } } else ; }"},
      {&minilang(), "localizedpi", read_file(source_path("corpus/localizedpi/localizedpi.mini"))},
      {&minilang(), "calls", "fn main ( args ) { print ( f ( g ( h ( 1 , \"x\" ) ) ) ) ; }"},
      {&arith(), "arith", "@opt x = 1 ; print ( 2 + x ) * 3 ; { y = x * x ; { print y ; } } print 4 ;"},
  };
}

/// In-process equivalent of corpus/helloworld/interesting.sh.
inline treemin::Outcome helloworld_oracle(const std::string& text) {
  if (!treemin::is_valid(*minic().grammar, text)) return treemin::Outcome::Pass;
  return strip_ws(text).find("printf(\"Helloworld!\\n\")") != std::string::npos ? treemin::Outcome::Fail
                                                                                : treemin::Outcome::Pass;
}

/// Valid under the sample's grammar and containing `needle` once whitespace
/// is stripped.
inline treemin::Evaluator keeps(const Language& language, std::string needle) {
  return [&language, needle](const std::string& text) {
    if (!treemin::is_valid(*language.grammar, text)) return treemin::Outcome::Pass;
    return strip_ws(text).find(needle) != std::string::npos ? treemin::Outcome::Fail : treemin::Outcome::Pass;
  };
}

struct ReductionCase {
  Sample sample;
  treemin::Evaluator oracle;
};

/// Samples paired with in-process oracles, for properties of whole reductions.
inline std::vector<ReductionCase> reduction_cases() {
  std::vector<ReductionCase> out;
  for (auto& s : samples()) {
    if (s.name == "helloworld") out.push_back({s, helloworld_oracle});
    if (s.name == "loops") out.push_back({s, keeps(minic(), "returna*b;")});
    if (s.name == "nested-blocks") out.push_back({s, keeps(minic(), "return0")});
    if (s.name == "calls") out.push_back({s, keeps(minilang(), "h(1")});
    if (s.name == "arith") out.push_back({s, keeps(arith(), "*3")});
  }
  return out;
}

/// Builds a tree from a compact notation: `(label child...)` is a rule node,
/// `[child...]` a list node (append `+` right after `[` for a non-empty
/// list), and a bare word a token whose label and text are the word.
class TreeBuilder {
public:
  explicit TreeBuilder(std::string text) : text_(std::move(text)) {}

  treemin::ParseTree build(std::shared_ptr<const treemin::Grammar> grammar = nullptr,
                           std::shared_ptr<const treemin::MinimalFragmentTable> fragments = nullptr) {
    treemin::ParseTree tree(std::move(grammar), std::move(fragments));
    tree.set_root(node(tree));
    tree.refresh_all_sizes();
    return tree;
  }

private:
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')' && text_[pos_] != '[' && text_[pos_] != ']') {
      ++pos_;
    }
    if (start == pos_) throw std::runtime_error("tree notation: expected a word");
    return text_.substr(start, pos_ - start);
  }

  treemin::NodeId node(treemin::ParseTree& tree) {
    skip();
    if (text_[pos_] == '(') {
      ++pos_;
      treemin::NodeId id = tree.add_node(treemin::NodeKind::Rule, word());
      children(tree, id, ')');
      return id;
    }
    if (text_[pos_] == '[') {
      ++pos_;
      treemin::NodeId id = tree.add_node(treemin::NodeKind::List, treemin::kListLabel);
      if (pos_ < text_.size() && text_[pos_] == '+') {
        ++pos_;
        tree.node(id).min_children = 1;
      }
      children(tree, id, ']');
      return id;
    }
    std::string w = word();
    return tree.add_node(treemin::NodeKind::Token, w, w);
  }

  void children(treemin::ParseTree& tree, treemin::NodeId id, char close) {
    while (true) {
      skip();
      if (pos_ >= text_.size()) throw std::runtime_error("tree notation: unbalanced");
      if (text_[pos_] == close) {
        ++pos_;
        return;
      }
      treemin::NodeId child = node(tree);
      tree.append_child(id, child);
    }
  }

  std::string text_;
  std::size_t pos_ = 0;
};

inline treemin::ParseTree tree_of(const std::string& notation) { return TreeBuilder(notation).build(); }

/// Finds reachable nodes with a label, in document order.
inline std::vector<treemin::NodeId> find_all(const treemin::ParseTree& tree, const std::string& label) {
  std::vector<treemin::NodeId> out;
  for (auto id : tree.reachable()) {
    if (tree.node(id).label == label) out.push_back(id);
  }
  return out;
}

/// Every terminal string derivable from each rule, restricted to at most
/// `max_tokens` tokens and `max_cost` non-whitespace characters. Each token
/// is rendered as its declared minimal text, the same alphabet the fragment
/// table works over. Computed as a plain least fixed point over bounded sets.
class DerivationEnumerator {
public:
  using Sentence = std::vector<std::uint32_t>;  // token indices

  DerivationEnumerator(const treemin::Grammar& g, std::size_t max_cost, std::size_t max_tokens)
      : g_(g), max_cost_(max_cost), max_tokens_(max_tokens), sets_(g.rules().size()) {
    for (const auto& t : g.tokens()) token_cost_.push_back(treemin::nonws_size(t.min_text));
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t r = 0; r < g.rules().size(); ++r) {
        for (const auto& alt : g.rule(r).alternatives) {
          for (auto& s : sequences(alt.symbols)) changed |= sets_[r].insert(std::move(s)).second;
        }
      }
    }
  }

  std::size_t cost(const Sentence& s) const {
    std::size_t c = 0;
    for (auto t : s) c += token_cost_[t];
    return c;
  }

  std::string text(const Sentence& s) const {
    std::string out;
    for (auto t : s) {
      const std::string& piece = g_.token(t).min_text;
      if (piece.empty()) continue;
      if (!out.empty()) out += ' ';
      out += piece;
    }
    return out;
  }

  const std::set<Sentence>& derivable(const std::string& rule) const { return sets_.at(*g_.find_rule(rule)); }

  /// Cheapest derivable cost within the bounds, if any string was found.
  std::optional<std::size_t> min_cost(const std::string& rule) const {
    std::optional<std::size_t> best;
    for (const auto& s : derivable(rule)) {
      std::size_t c = cost(s);
      if (!best || c < *best) best = c;
    }
    return best;
  }

  bool derives(const std::string& rule, const std::string& text_form) const {
    for (const auto& s : derivable(rule)) {
      if (text(s) == text_form) return true;
    }
    return false;
  }

private:
  bool fits(const Sentence& s) const { return s.size() <= max_tokens_ && cost(s) <= max_cost_; }

  std::set<Sentence> single(const treemin::Symbol& sym) const {
    if (sym.is_token()) {
      Sentence s{static_cast<std::uint32_t>(sym.index)};
      if (fits(s)) return {s};
      return {};
    }
    return sets_[sym.index];
  }

  std::set<Sentence> concat(const std::set<Sentence>& a, const std::set<Sentence>& b) const {
    std::set<Sentence> out;
    for (const auto& x : a) {
      for (const auto& y : b) {
        Sentence s = x;
        s.insert(s.end(), y.begin(), y.end());
        if (fits(s)) out.insert(std::move(s));
      }
    }
    return out;
  }

  std::set<Sentence> symbol(const treemin::Symbol& sym) const {
    std::set<Sentence> one = single(sym);
    if (!sym.quantifier) return one;
    std::set<Sentence> out;
    if (*sym.quantifier != treemin::Quantifier::Plus) out.insert(Sentence{});
    if (*sym.quantifier == treemin::Quantifier::Opt) {
      out.insert(one.begin(), one.end());
      return out;
    }
    std::set<Sentence> frontier = one;
    while (!frontier.empty()) {
      std::set<Sentence> next;
      for (const auto& s : frontier) {
        if (out.insert(s).second) next.insert(s);
      }
      frontier = concat(next, one);
    }
    return out;
  }

  std::vector<Sentence> sequences(const std::vector<treemin::Symbol>& symbols) const {
    std::set<Sentence> acc{Sentence{}};
    for (const auto& sym : symbols) {
      acc = concat(acc, symbol(sym));
      if (acc.empty()) break;
    }
    return {acc.begin(), acc.end()};
  }

  const treemin::Grammar& g_;
  std::size_t max_cost_;
  std::size_t max_tokens_;
  std::vector<std::size_t> token_cost_;
  std::vector<std::set<Sentence>> sets_;
};

}  // namespace support

#include "treemin/fragments.hpp"

#include <algorithm>
#include <optional>

namespace treemin {

std::size_t nonws_size(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return c != ' ' && c != '\t' && c != '\n' && c != '\r';
  }));
}

namespace {

std::string join_names(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += n;
  }
  return out;
}

bool better(const Fragment& a, const Fragment& b) {
  return a.cost != b.cost ? a.cost < b.cost : a.text < b.text;
}

void append(Fragment& into, const Fragment& part) {
  if (!part.text.empty()) {
    if (!into.text.empty()) into.text += ' ';
    into.text += part.text;
  }
  into.cost += part.cost;
}

}  // namespace

NonProductiveError::NonProductiveError(std::vector<std::string> names)
    : std::runtime_error("non-productive nonterminals: " + join_names(names)), names_(std::move(names)) {}

const Fragment& MinimalFragmentTable::at(std::string_view nonterminal) const {
  auto it = entries_.find(nonterminal);
  if (it == entries_.end()) {
    throw std::out_of_range("no minimal fragment for '" + std::string(nonterminal) + "'");
  }
  return it->second;
}

bool MinimalFragmentTable::contains(std::string_view nonterminal) const {
  return entries_.find(nonterminal) != entries_.end();
}

// Knuth's generalization of Dijkstra to grammars: repeatedly finalize the
// nonterminal with the best tentative fragment. Every alternative is a sum of
// non-negative parts, so a finalized entry can never improve later.
MinimalFragmentTable minimal_fragment_table(const Grammar& grammar) {
  const auto& rules = grammar.rules();
  std::vector<std::optional<Fragment>> done(rules.size());
  std::vector<std::optional<Fragment>> tentative(rules.size());

  auto part = [&](const Symbol& s) -> std::optional<Fragment> {
    if (s.quantifier == Quantifier::Star || s.quantifier == Quantifier::Opt) {
      return Fragment{};
    }
    if (s.is_token()) {
      const std::string& text = grammar.token(s.index).min_text;
      return Fragment{text, nonws_size(text)};
    }
    return done[s.index];
  };

  auto evaluate = [&](std::size_t r) {
    for (const Alternative& alt : rules[r].alternatives) {
      Fragment f;
      bool ok = true;
      for (const Symbol& s : alt.symbols) {
        auto p = part(s);
        if (!p) {
          ok = false;
          break;
        }
        append(f, *p);
      }
      if (ok && (!tentative[r] || better(f, *tentative[r]))) {
        tentative[r] = std::move(f);
      }
    }
  };

  for (std::size_t r = 0; r < rules.size(); ++r) evaluate(r);

  while (true) {
    std::optional<std::size_t> pick;
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (done[r] || !tentative[r]) continue;
      if (!pick || better(*tentative[r], *tentative[*pick])) pick = r;
    }
    if (!pick) break;
    done[*pick] = tentative[*pick];
    for (std::size_t r = 0; r < rules.size(); ++r) {
      if (!done[r]) evaluate(r);
    }
  }

  std::vector<std::string> missing;
  MinimalFragmentTable table;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    if (!done[r]) {
      missing.push_back(rules[r].name);
    } else {
      table.entries_.emplace(rules[r].name, *done[r]);
    }
  }
  if (!missing.empty()) {
    throw NonProductiveError(std::move(missing));
  }
  return table;
}

Fragment symbol_fragment(const Grammar& grammar, const MinimalFragmentTable& table, const Symbol& symbol) {
  if (symbol.quantifier == Quantifier::Star || symbol.quantifier == Quantifier::Opt) {
    return {};
  }
  if (symbol.is_token()) {
    const std::string& text = grammar.token(symbol.index).min_text;
    return {text, nonws_size(text)};
  }
  return table.at(grammar.rule(symbol.index).name);
}

}  // namespace treemin

#include "treemin/parser.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace treemin {

ParseError::ParseError(const std::string& message, std::size_t token_index, std::size_t offset, bool at_end)
    : std::runtime_error(message), token_index_(token_index), offset_(offset), at_end_(at_end) {}

namespace {

struct ISym {
  bool terminal = false;
  std::uint32_t id = 0;
};

struct Production {
  std::uint32_t lhs = 0;
  std::vector<ISym> rhs;
};

struct QuantInfo {
  ISym inner;
  Quantifier quantifier = Quantifier::Star;
  std::string inner_name;
};

// The user grammar lowered to plain BNF. Nonterminals 0..R-1 are the user's
// rules; quantified occurrences get one synthetic nonterminal each.
struct Bnf {
  std::vector<Production> productions;
  std::vector<std::vector<std::uint32_t>> by_lhs;
  std::vector<std::vector<std::uint32_t>> rule_productions;  // [rule][alternative]
  std::unordered_map<std::uint32_t, QuantInfo> quantified;
  std::vector<bool> nullable;
  std::size_t user_rules = 0;
};

Bnf lower(const Grammar& g) {
  Bnf bnf;
  bnf.user_rules = g.rules().size();
  std::uint32_t next_nt = static_cast<std::uint32_t>(g.rules().size());
  std::map<std::tuple<int, std::size_t, int>, std::uint32_t> quant_ids;

  auto plain = [](const Symbol& s) {
    return ISym{s.is_token(), static_cast<std::uint32_t>(s.index)};
  };
  auto add = [&](std::uint32_t lhs, std::vector<ISym> rhs) {
    bnf.productions.push_back(Production{lhs, std::move(rhs)});
    return static_cast<std::uint32_t>(bnf.productions.size() - 1);
  };

  std::vector<std::tuple<std::uint32_t, ISym, Quantifier>> pending;
  auto symbol = [&](const Symbol& s) -> ISym {
    if (!s.quantifier) return plain(s);
    auto key = std::make_tuple(static_cast<int>(s.kind), s.index, static_cast<int>(*s.quantifier));
    auto it = quant_ids.find(key);
    if (it == quant_ids.end()) {
      std::uint32_t id = next_nt++;
      it = quant_ids.emplace(key, id).first;
      ISym inner = plain(s);
      std::string name = s.is_token() ? g.token(s.index).name : g.rule(s.index).name;
      bnf.quantified.emplace(id, QuantInfo{inner, *s.quantifier, name});
      pending.emplace_back(id, inner, *s.quantifier);
    }
    return ISym{false, it->second};
  };

  bnf.rule_productions.resize(g.rules().size());
  for (std::size_t r = 0; r < g.rules().size(); ++r) {
    for (const Alternative& alt : g.rule(r).alternatives) {
      std::vector<ISym> rhs;
      for (const Symbol& s : alt.symbols) rhs.push_back(symbol(s));
      bnf.rule_productions[r].push_back(add(static_cast<std::uint32_t>(r), std::move(rhs)));
    }
  }
  for (const auto& [id, inner, q] : pending) {
    ISym self{false, id};
    switch (q) {
      case Quantifier::Star:
        add(id, {});
        add(id, {self, inner});
        break;
      case Quantifier::Plus:
        add(id, {inner});
        add(id, {self, inner});
        break;
      case Quantifier::Opt:
        add(id, {});
        add(id, {inner});
        break;
    }
  }

  bnf.by_lhs.resize(next_nt);
  for (std::uint32_t p = 0; p < bnf.productions.size(); ++p) {
    bnf.by_lhs[bnf.productions[p].lhs].push_back(p);
  }

  bnf.nullable.assign(next_nt, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Production& p : bnf.productions) {
      if (bnf.nullable[p.lhs]) continue;
      bool all = true;
      for (const ISym& s : p.rhs) {
        if (s.terminal || !bnf.nullable[s.id]) {
          all = false;
          break;
        }
      }
      if (all) {
        bnf.nullable[p.lhs] = true;
        changed = true;
      }
    }
  }
  return bnf;
}

struct Item {
  std::uint32_t prod;
  std::uint32_t dot;
  std::uint32_t origin;
};

struct EarleySet {
  std::vector<Item> items;
  std::unordered_set<std::uint64_t> seen;
  std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> waiting;
  std::unordered_set<std::uint32_t> predicted;

  void add(const Item& item) {
    std::uint64_t key = (static_cast<std::uint64_t>(item.prod) << 44) |
                        (static_cast<std::uint64_t>(item.dot) << 32) | item.origin;
    if (seen.insert(key).second) items.push_back(item);
  }
};

std::uint64_t span_key(std::uint32_t nt, std::size_t start) {
  return (static_cast<std::uint64_t>(nt) << 32) | static_cast<std::uint64_t>(start);
}

struct Chart {
  // completed[end] holds (nonterminal, start) pairs that derive tokens[start, end).
  std::vector<std::unordered_set<std::uint64_t>> completed;
  bool accepted = false;
  std::size_t dead_at = 0;  // first position whose set stayed empty
};

Chart recognize(const Bnf& bnf, std::uint32_t start, const std::vector<Token>& tokens) {
  const std::size_t n = tokens.size();
  std::vector<EarleySet> sets(n + 1);
  Chart chart;
  chart.completed.resize(n + 1);
  chart.dead_at = n + 1;

  for (std::uint32_t p : bnf.by_lhs[start]) sets[0].add(Item{p, 0, 0});
  sets[0].predicted.insert(start);

  for (std::size_t k = 0; k <= n; ++k) {
    EarleySet& set = sets[k];
    if (set.items.empty()) {
      chart.dead_at = k;
      break;
    }
    for (std::size_t i = 0; i < set.items.size(); ++i) {
      const Item item = set.items[i];
      const Production& prod = bnf.productions[item.prod];
      if (item.dot < prod.rhs.size()) {
        const ISym next = prod.rhs[item.dot];
        if (next.terminal) {
          if (k < n && tokens[k].type == next.id) {
            sets[k + 1].add(Item{item.prod, item.dot + 1, item.origin});
          }
          continue;
        }
        set.waiting[next.id].push_back(static_cast<std::uint32_t>(i));
        if (set.predicted.insert(next.id).second) {
          for (std::uint32_t p : bnf.by_lhs[next.id]) {
            set.add(Item{p, 0, static_cast<std::uint32_t>(k)});
          }
        }
        if (bnf.nullable[next.id]) {
          set.add(Item{item.prod, item.dot + 1, item.origin});
        }
        continue;
      }
      chart.completed[k].insert(span_key(prod.lhs, item.origin));
      EarleySet& from = sets[item.origin];
      auto it = from.waiting.find(prod.lhs);
      if (it == from.waiting.end()) continue;
      // Indexing (not iterators): completing into the same set may append.
      for (std::size_t w = 0; w < it->second.size(); ++w) {
        const Item waiting = from.items[it->second[w]];
        set.add(Item{waiting.prod, waiting.dot + 1, waiting.origin});
      }
    }
  }
  chart.accepted = chart.completed[n].count(span_key(start, 0)) > 0;
  return chart;
}

[[noreturn]] void throw_parse_error(const Chart& chart, const std::vector<Token>& tokens) {
  // The set at dead_at is empty, so the token before it could not be scanned.
  std::size_t index = chart.dead_at <= tokens.size() ? chart.dead_at - 1 : tokens.size();
  if (index >= tokens.size()) {
    std::size_t offset = tokens.empty() ? 0 : tokens.back().offset + tokens.back().text.size();
    throw ParseError("parse error at end of input", tokens.size(), offset, true);
  }
  const Token& t = tokens[index];
  throw ParseError("parse error at token " + std::to_string(index) + " (offset " + std::to_string(t.offset) +
                       "): unexpected '" + t.text + "'",
                   index, t.offset, false);
}

struct PNode {
  NodeKind kind = NodeKind::Rule;
  std::string label;
  std::string text;
  bool hidden = false;
  std::size_t min_children = 0;
  std::string fragment_of;
  std::vector<PNode> children;
};

struct TupleHash {
  std::size_t operator()(const std::tuple<std::uint32_t, std::uint32_t, std::size_t, std::size_t>& t) const {
    auto [a, b, c, d] = t;
    std::size_t h = std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(a) << 32) | b);
    h ^= std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(c) << 32) | d) + 0x9e3779b97f4a7c15ULL + (h << 6) +
         (h >> 2);
    return h;
  }
};

// Rebuilds one derivation from the completed spans. Earlier symbols take the
// longest span that still lets the rest of the alternative match.
class Extractor {
public:
  Extractor(const Grammar& g, const Bnf& bnf, const Chart& chart, const std::vector<Token>& tokens)
      : g_(g), bnf_(bnf), chart_(chart), tokens_(tokens) {}

  std::optional<PNode> rule(std::uint32_t r, std::size_t a, std::size_t b) {
    auto key = std::make_tuple(r, 0u, a, b);
    if (!in_progress_.insert(key).second) return std::nullopt;
    std::optional<PNode> result;
    for (std::uint32_t p : bnf_.rule_productions[r]) {
      if (!rest(p, 0, a, b)) continue;
      PNode node;
      node.kind = NodeKind::Rule;
      node.label = g_.rule(r).name;
      if (sequence(p, 0, a, b, node.children)) {
        result = std::move(node);
        break;
      }
    }
    in_progress_.erase(key);
    return result;
  }

private:
  bool matches(const ISym& s, std::size_t a, std::size_t b) const {
    if (s.terminal) return b == a + 1 && tokens_[a].type == s.id;
    return chart_.completed[b].count(span_key(s.id, a)) > 0;
  }

  bool rest(std::uint32_t p, std::uint32_t k, std::size_t a, std::size_t b) {
    const auto& rhs = bnf_.productions[p].rhs;
    if (k == rhs.size()) return a == b;
    auto key = std::make_tuple(p, k, a, b);
    if (auto it = rest_memo_.find(key); it != rest_memo_.end()) return it->second;
    bool ok = false;
    for (std::size_t e = a; e <= b && !ok; ++e) {
      ok = matches(rhs[k], a, e) && rest(p, k + 1, e, b);
    }
    rest_memo_[key] = ok;
    return ok;
  }

  bool repeats(const ISym& x, std::size_t a, std::size_t b) {
    if (a == b) return true;
    auto key = std::make_tuple(x.terminal ? 1u : 0u, x.id, a, b);
    if (auto it = repeat_memo_.find(key); it != repeat_memo_.end()) return it->second;
    bool ok = false;
    for (std::size_t e = a + 1; e <= b && !ok; ++e) {
      ok = matches(x, a, e) && repeats(x, e, b);
    }
    repeat_memo_[key] = ok;
    return ok;
  }

  bool sequence(std::uint32_t p, std::uint32_t k, std::size_t a, std::size_t b, std::vector<PNode>& out) {
    const auto& rhs = bnf_.productions[p].rhs;
    if (k == rhs.size()) return a == b;
    for (std::size_t e = b + 1; e-- > a;) {
      if (!matches(rhs[k], a, e) || !rest(p, k + 1, e, b)) continue;
      auto child = symbol(rhs[k], a, e);
      if (!child) continue;
      out.push_back(std::move(*child));
      if (sequence(p, k + 1, e, b, out)) return true;
      out.pop_back();
    }
    return false;
  }

  std::optional<PNode> symbol(const ISym& s, std::size_t a, std::size_t b) {
    if (s.terminal) {
      PNode leaf;
      leaf.kind = NodeKind::Token;
      leaf.label = g_.token(s.id).name;
      leaf.text = tokens_[a].text;
      leaf.hidden = tokens_[a].hidden;
      return leaf;
    }
    if (s.id < bnf_.user_rules) return rule(s.id, a, b);
    return list(s.id, a, b);
  }

  std::optional<PNode> list(std::uint32_t q, std::size_t a, std::size_t b) {
    const QuantInfo& info = bnf_.quantified.at(q);
    auto key = std::make_tuple(q, 0u, a, b);
    if (!in_progress_.insert(key).second) return std::nullopt;
    PNode node;
    node.kind = NodeKind::List;
    node.label = kListLabel;
    if (info.quantifier == Quantifier::Plus) {
      node.min_children = 1;
      node.fragment_of = info.inner_name;
    }
    bool ok;
    if (a == b) {
      ok = true;
      if (info.quantifier == Quantifier::Plus) {
        auto child = symbol(info.inner, a, a);
        ok = child.has_value();
        if (ok) node.children.push_back(std::move(*child));
      }
    } else if (info.quantifier == Quantifier::Opt) {
      auto child = symbol(info.inner, a, b);
      ok = child.has_value();
      if (ok) node.children.push_back(std::move(*child));
    } else {
      ok = repetitions(info.inner, a, b, node.children);
    }
    in_progress_.erase(key);
    if (!ok) return std::nullopt;
    return node;
  }

  bool repetitions(const ISym& x, std::size_t a, std::size_t b, std::vector<PNode>& out) {
    if (a == b) return true;
    for (std::size_t e = b; e > a; --e) {
      if (!matches(x, a, e) || !repeats(x, e, b)) continue;
      auto child = symbol(x, a, e);
      if (!child) continue;
      out.push_back(std::move(*child));
      if (repetitions(x, e, b, out)) return true;
      out.pop_back();
    }
    return false;
  }

  using Key = std::tuple<std::uint32_t, std::uint32_t, std::size_t, std::size_t>;

  const Grammar& g_;
  const Bnf& bnf_;
  const Chart& chart_;
  const std::vector<Token>& tokens_;
  std::unordered_map<Key, bool, TupleHash> rest_memo_;
  std::unordered_map<Key, bool, TupleHash> repeat_memo_;
  std::unordered_set<Key, TupleHash> in_progress_;
};

NodeId materialize(ParseTree& tree, PNode& p) {
  NodeId id = tree.add_node(p.kind, std::move(p.label), std::move(p.text));
  Node& n = tree.node(id);
  n.hidden = p.hidden;
  n.min_children = p.min_children;
  n.fragment_of = std::move(p.fragment_of);
  for (PNode& c : p.children) {
    NodeId child = materialize(tree, c);
    tree.append_child(id, child);
  }
  return id;
}

}  // namespace

ParseTree parse(std::shared_ptr<const Grammar> grammar, const std::vector<Token>& tokens,
                std::shared_ptr<const MinimalFragmentTable> fragments) {
  const Grammar& g = *grammar;
  Bnf bnf = lower(g);
  auto start = static_cast<std::uint32_t>(g.start());
  Chart chart = recognize(bnf, start, tokens);
  if (!chart.accepted) throw_parse_error(chart, tokens);

  Extractor extractor(g, bnf, chart, tokens);
  auto root = extractor.rule(start, 0, tokens.size());
  if (!root) {
    throw ParseError("parse error: no acyclic derivation for the input", tokens.size(), 0, true);
  }
  ParseTree tree(std::move(grammar), std::move(fragments));
  tree.set_root(materialize(tree, *root));
  tree.refresh_all_sizes();
  return tree;
}

ParseTree parse_text(std::shared_ptr<const Grammar> grammar, std::string_view text,
                     std::shared_ptr<const MinimalFragmentTable> fragments) {
  auto tokens = tokenize(*grammar, text);
  return parse(std::move(grammar), tokens, std::move(fragments));
}

bool recognizes(const Grammar& grammar, const std::vector<Token>& tokens) {
  Bnf bnf = lower(grammar);
  return recognize(bnf, static_cast<std::uint32_t>(grammar.start()), tokens).accepted;
}

bool is_valid(const Grammar& grammar, std::string_view text) {
  try {
    return recognizes(grammar, tokenize(grammar, text));
  } catch (const LexError&) {
    return false;
  }
}

}  // namespace treemin

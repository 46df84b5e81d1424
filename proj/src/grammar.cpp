#include "treemin/grammar.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <variant>

namespace treemin {

GrammarError::GrammarError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? message
                                   : std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

std::optional<std::size_t> Grammar::find_rule(std::string_view name) const {
  auto it = rule_index_.find(name);
  if (it == rule_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Grammar::find_token(std::string_view name) const {
  auto it = token_index_.find(name);
  if (it == token_index_.end()) return std::nullopt;
  return it->second;
}

Grammar Grammar::with_start(std::string_view name) const {
  auto index = find_rule(name);
  if (!index) {
    throw GrammarError("undefined start symbol '" + std::string(name) + "'");
  }
  Grammar copy = *this;
  copy.start_ = *index;
  return copy;
}

std::string Grammar::describe(const Symbol& symbol) const {
  std::string base = symbol.is_token() ? tokens_.at(symbol.index).name : rules_.at(symbol.index).name;
  if (symbol.quantifier) {
    switch (*symbol.quantifier) {
      case Quantifier::Star: base += '*'; break;
      case Quantifier::Plus: base += '+'; break;
      case Quantifier::Opt: base += '?'; break;
    }
  }
  return base;
}

namespace {

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

enum class Tok { Name, String, Regex, Define, Tilde, Bar, Semi, LParen, RParen, Star, Plus, Question, End };

struct Lexeme {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

/// Tokenizer for the grammar file format itself.
class GrammarLexer {
public:
  explicit GrammarLexer(std::string_view src) : src_(src) {}

  std::vector<Lexeme> run() {
    std::vector<Lexeme> out;
    bool after_tilde = false;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) {
        out.push_back({Tok::End, "", line_, col_});
        return out;
      }
      std::size_t line = line_;
      std::size_t col = col_;
      char c = src_[pos_];
      if (after_tilde && c == '/') {
        out.push_back({Tok::Regex, read_regex(), line, col});
        after_tilde = false;
        continue;
      }
      after_tilde = false;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string name;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          name += advance();
        }
        out.push_back({Tok::Name, std::move(name), line, col});
        continue;
      }
      if (c == '"') {
        out.push_back({Tok::String, read_string(), line, col});
        continue;
      }
      if (c == ':' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
        advance();
        advance();
        out.push_back({Tok::Define, ":=", line, col});
        continue;
      }
      advance();
      switch (c) {
        case '~':
          out.push_back({Tok::Tilde, "~", line, col});
          after_tilde = true;
          break;
        case '|': out.push_back({Tok::Bar, "|", line, col}); break;
        case ';': out.push_back({Tok::Semi, ";", line, col}); break;
        case '(': out.push_back({Tok::LParen, "(", line, col}); break;
        case ')': out.push_back({Tok::RParen, ")", line, col}); break;
        case '*': out.push_back({Tok::Star, "*", line, col}); break;
        case '+': out.push_back({Tok::Plus, "+", line, col}); break;
        case '?': out.push_back({Tok::Question, "?", line, col}); break;
        default:
          throw GrammarError(std::string("unexpected character '") + c + "'", line, col);
      }
    }
  }

private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string read_string() {
    std::size_t line = line_;
    std::size_t col = col_;
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw GrammarError("unterminated string literal", line, col);
      }
      char c = advance();
      if (c == '"') break;
      if (c == '\\') {
        if (pos_ >= src_.size()) {
          throw GrammarError("unterminated string literal", line, col);
        }
        char e = advance();
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default:
            throw GrammarError(std::string("unknown escape '\\") + e + "' in string", line_, col_ - 2);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  std::string read_regex() {
    std::size_t line = line_;
    std::size_t col = col_;
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        throw GrammarError("unterminated pattern", line, col);
      }
      char c = advance();
      if (c == '/') break;
      if (c == '\\' && pos_ < src_.size() && src_[pos_] == '/') {
        out += advance();
        continue;
      }
      out += c;
      if (c == '\\' && pos_ < src_.size()) {
        out += advance();
      }
    }
    return out;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

// Unresolved syntax produced by the file parser.
struct RawItem;
struct RawGroup {
  std::vector<std::vector<RawItem>> alternatives;
};
struct RawItem {
  enum class Kind { Name, Literal, Group } kind;
  std::string text;
  std::shared_ptr<RawGroup> group;
  std::optional<Quantifier> quantifier;
  std::size_t line;
  std::size_t column;
};
struct RawRule {
  std::string name;
  RawGroup body;
  std::size_t line;
  std::size_t column;
};
struct RawToken {
  std::string name;
  std::string pattern;
  std::string min_text;
  bool hidden;
  std::size_t line;
  std::size_t column;
};

class GrammarFileParser {
public:
  explicit GrammarFileParser(std::vector<Lexeme> lexemes) : lx_(std::move(lexemes)) {}

  std::vector<RawRule> rules;
  std::vector<RawToken> tokens;
  std::vector<Lexeme> starts;

  void run() {
    while (peek().kind != Tok::End) {
      const Lexeme& head = expect(Tok::Name, "definition name or 'start'");
      if (head.text == "start" && peek().kind == Tok::Name) {
        starts.push_back(next());
        expect(Tok::Semi, "';' after start directive");
        continue;
      }
      if (peek().kind == Tok::Define) {
        next();
        RawRule rule{head.text, parse_alternatives(), head.line, head.column};
        expect(Tok::Semi, "';' terminating rule");
        rules.push_back(std::move(rule));
      } else if (peek().kind == Tok::Tilde) {
        next();
        tokens.push_back(parse_token(head));
      } else {
        throw GrammarError("expected ':=' or '~' after '" + head.text + "'", peek().line, peek().column);
      }
    }
  }

private:
  const Lexeme& peek() const { return lx_[pos_]; }
  const Lexeme& next() { return lx_[pos_++]; }

  const Lexeme& expect(Tok kind, const char* what) {
    if (peek().kind != kind) {
      std::string found = peek().kind == Tok::End ? "end of file" : "'" + peek().text + "'";
      throw GrammarError(std::string("expected ") + what + ", found " + found, peek().line, peek().column);
    }
    return next();
  }

  RawToken parse_token(const Lexeme& head) {
    const Lexeme& pattern = expect(Tok::Regex, "'/pattern/'");
    const Lexeme& min_kw = expect(Tok::Name, "'min'");
    if (min_kw.text != "min") {
      throw GrammarError("expected 'min', found '" + min_kw.text + "'", min_kw.line, min_kw.column);
    }
    const Lexeme& min_text = expect(Tok::String, "quoted minimal text");
    bool hidden = false;
    if (peek().kind == Tok::Name && peek().text == "hidden") {
      next();
      hidden = true;
    }
    expect(Tok::Semi, "';' terminating token definition");
    return RawToken{head.text, pattern.text, min_text.text, hidden, head.line, head.column};
  }

  RawGroup parse_alternatives() {
    RawGroup group;
    group.alternatives.push_back(parse_sequence());
    while (peek().kind == Tok::Bar) {
      next();
      group.alternatives.push_back(parse_sequence());
    }
    return group;
  }

  std::vector<RawItem> parse_sequence() {
    std::vector<RawItem> items;
    while (true) {
      const Lexeme& lx = peek();
      RawItem item;
      item.line = lx.line;
      item.column = lx.column;
      if (lx.kind == Tok::Name) {
        item.kind = RawItem::Kind::Name;
        item.text = next().text;
      } else if (lx.kind == Tok::String) {
        if (lx.text.empty()) {
          throw GrammarError("empty literal", lx.line, lx.column);
        }
        item.kind = RawItem::Kind::Literal;
        item.text = next().text;
      } else if (lx.kind == Tok::LParen) {
        next();
        item.kind = RawItem::Kind::Group;
        item.group = std::make_shared<RawGroup>(parse_alternatives());
        expect(Tok::RParen, "')' closing group");
      } else {
        break;
      }
      while (peek().kind == Tok::Star || peek().kind == Tok::Plus || peek().kind == Tok::Question) {
        Tok op = next().kind;
        Quantifier q = op == Tok::Star ? Quantifier::Star : op == Tok::Plus ? Quantifier::Plus : Quantifier::Opt;
        if (item.quantifier) {
          // `x*?` and friends: wrap the already-quantified item in a group.
          RawItem inner = item;
          item = RawItem{RawItem::Kind::Group, "", std::make_shared<RawGroup>(), std::nullopt, inner.line,
                         inner.column};
          item.group->alternatives.push_back({inner});
        }
        item.quantifier = q;
      }
      items.push_back(std::move(item));
    }
    return items;
  }

  std::vector<Lexeme> lx_;
  std::size_t pos_ = 0;
};

bool uppercase_initial(const std::string& name) {
  return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

}  // namespace

/// Resolves raw definitions into a Grammar: allocates literal tokens, lowers
/// groups into auxiliary rules and checks every reference.
class GrammarBuilder {
public:
  Grammar build(const std::vector<RawRule>& raw_rules, const std::vector<RawToken>& raw_tokens,
                const std::vector<Lexeme>& starts, const std::optional<std::string>& start_override) {
    // Rule names first so forward references resolve.
    for (const RawRule& r : raw_rules) {
      if (g_.rule_index_.count(r.name) != 0) {
        throw GrammarError("duplicate definition of rule '" + r.name + "'", r.line, r.column);
      }
      g_.rule_index_.emplace(r.name, g_.rules_.size());
      g_.rules_.push_back(Rule{r.name, {}, false});
    }

    // Literal tokens take priority over named tokens on equal-length matches,
    // so they are allocated first, in order of appearance.
    for (const RawRule& r : raw_rules) {
      collect_literals(r.body);
    }

    for (const RawToken& t : raw_tokens) {
      if (!uppercase_initial(t.name)) {
        throw GrammarError("token name '" + t.name + "' must start with an uppercase letter", t.line, t.column);
      }
      if (g_.token_index_.count(t.name) != 0 || g_.rule_index_.count(t.name) != 0) {
        throw GrammarError("duplicate definition of '" + t.name + "'", t.line, t.column);
      }
      TokenDef def;
      def.name = t.name;
      def.pattern_source = t.pattern;
      try {
        def.pattern = std::make_shared<const Pattern>(Pattern::compile(t.pattern));
      } catch (const PatternError& e) {
        throw GrammarError("invalid pattern for token '" + t.name + "': " + e.what(), t.line, t.column);
      }
      def.min_text = t.min_text;
      def.hidden = t.hidden;
      if (def.min_text.empty() && !def.pattern->matches_empty()) {
        throw GrammarError("token '" + t.name + "' needs a non-empty min text", t.line, t.column);
      }
      if (!def.pattern->full_match(def.min_text)) {
        throw GrammarError("min text of token '" + t.name + "' does not match its pattern", t.line, t.column);
      }
      g_.token_index_.emplace(def.name, g_.tokens_.size());
      g_.tokens_.push_back(std::move(def));
    }

    for (std::size_t i = 0; i < raw_rules.size(); ++i) {
      aux_counter_ = 0;
      current_rule_ = raw_rules[i].name;
      std::vector<Alternative> alts = lower_group(raw_rules[i].body);
      g_.rules_[i].alternatives = std::move(alts);
    }

    if (starts.size() > 1) {
      throw GrammarError("duplicate start directive", starts[1].line, starts[1].column);
    }
    std::string start_name;
    std::size_t line = 0;
    std::size_t column = 0;
    if (start_override) {
      start_name = *start_override;
    } else if (!starts.empty()) {
      start_name = starts[0].text;
      line = starts[0].line;
      column = starts[0].column;
    } else {
      throw GrammarError("missing start directive");
    }
    auto start = g_.find_rule(start_name);
    if (!start) {
      throw GrammarError("undefined start symbol '" + start_name + "'", line, column);
    }
    g_.start_ = *start;
    return std::move(g_);
  }

private:
  void collect_literals(const RawGroup& group) {
    for (const auto& alt : group.alternatives) {
      for (const RawItem& item : alt) {
        if (item.kind == RawItem::Kind::Literal) {
          literal_token(item.text);
        } else if (item.kind == RawItem::Kind::Group) {
          collect_literals(*item.group);
        }
      }
    }
  }

  std::size_t literal_token(const std::string& text) {
    std::string name = quote(text);
    if (auto it = g_.token_index_.find(name); it != g_.token_index_.end()) {
      return it->second;
    }
    TokenDef def;
    def.name = name;
    def.literal = true;
    def.literal_text = text;
    def.min_text = text;
    g_.token_index_.emplace(name, g_.tokens_.size());
    g_.tokens_.push_back(std::move(def));
    return g_.tokens_.size() - 1;
  }

  std::vector<Alternative> lower_group(const RawGroup& group) {
    std::vector<Alternative> alts;
    for (const auto& raw_alt : group.alternatives) {
      Alternative alt;
      for (const RawItem& item : raw_alt) {
        lower_item(item, alt.symbols);
      }
      alts.push_back(std::move(alt));
    }
    return alts;
  }

  void lower_item(const RawItem& item, std::vector<Symbol>& out) {
    switch (item.kind) {
      case RawItem::Kind::Name: {
        Symbol s;
        if (auto r = g_.find_rule(item.text)) {
          s.kind = SymbolKind::Rule;
          s.index = *r;
        } else if (auto t = g_.find_token(item.text)) {
          s.kind = SymbolKind::Token;
          s.index = *t;
        } else {
          throw GrammarError("undefined symbol '" + item.text + "'", item.line, item.column);
        }
        s.quantifier = item.quantifier;
        out.push_back(s);
        return;
      }
      case RawItem::Kind::Literal: {
        out.push_back(Symbol{SymbolKind::Token, literal_token(item.text), item.quantifier});
        return;
      }
      case RawItem::Kind::Group: {
        const RawGroup& group = *item.group;
        // A single-alternative group without a quantifier is spliced inline; a
        // quantified group around one unquantified item quantifies that item.
        if (group.alternatives.size() == 1) {
          const auto& only = group.alternatives.front();
          if (!item.quantifier) {
            for (const RawItem& inner : only) lower_item(inner, out);
            return;
          }
          if (only.size() == 1 && only.front().kind != RawItem::Kind::Group && !only.front().quantifier) {
            std::vector<Symbol> tmp;
            lower_item(only.front(), tmp);
            tmp.front().quantifier = item.quantifier;
            out.push_back(tmp.front());
            return;
          }
        }
        std::string name = current_rule_ + "__" + std::to_string(++aux_counter_);
        if (g_.rule_index_.count(name) != 0 || g_.token_index_.count(name) != 0) {
          throw GrammarError("auxiliary rule name '" + name + "' collides with a definition", item.line,
                             item.column);
        }
        std::size_t index = g_.rules_.size();
        g_.rule_index_.emplace(name, index);
        g_.rules_.push_back(Rule{name, {}, true});
        std::vector<Alternative> alts = lower_group(group);
        g_.rules_[index].alternatives = std::move(alts);
        out.push_back(Symbol{SymbolKind::Rule, index, item.quantifier});
        return;
      }
    }
  }

  Grammar g_;
  std::string current_rule_;
  int aux_counter_ = 0;
};

Grammar load_grammar(std::string_view text, std::optional<std::string> start_override) {
  GrammarFileParser parser(GrammarLexer(text).run());
  parser.run();
  return GrammarBuilder().build(parser.rules, parser.tokens, parser.starts, start_override);
}

Grammar load_grammar_file(const std::string& path, std::optional<std::string> start_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw GrammarError("cannot read grammar file '" + path + "'");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_grammar(buffer.str(), std::move(start_override));
}

}  // namespace treemin

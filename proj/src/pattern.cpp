#include "treemin/pattern.hpp"

#include <algorithm>
#include <cctype>

namespace treemin {

class PatternCompiler {
public:
  PatternCompiler(std::string_view source, Pattern& out) : src_(source), out_(out) {}

  void run() {
    Fragment whole = parse_alternation();
    if (pos_ != src_.size()) {
      throw PatternError("unexpected ')' in pattern", pos_);
    }
    out_.start_ = whole.start;
    out_.accept_ = whole.end;
  }

private:
  struct Fragment {
    int start;
    int end;
  };

  using ByteSet = Pattern::ByteSet;

  int new_state() {
    out_.states_.emplace_back();
    return static_cast<int>(out_.states_.size()) - 1;
  }

  Pattern::State& at(int index) { return out_.states_[static_cast<std::size_t>(index)]; }

  Fragment empty() {
    int s = new_state();
    return {s, s};
  }

  Fragment bytes(const ByteSet& set) {
    int s = new_state();
    int e = new_state();
    at(s).consumes = true;
    at(s).accepts = set;
    at(s).next = e;
    return {s, e};
  }

  Fragment concat(Fragment a, Fragment b) {
    at(a.end).epsilon_a = b.start;
    return {a.start, b.end};
  }

  Fragment alternate(Fragment a, Fragment b) {
    int s = new_state();
    int e = new_state();
    at(s).epsilon_a = a.start;
    at(s).epsilon_b = b.start;
    at(a.end).epsilon_a = e;
    at(b.end).epsilon_a = e;
    return {s, e};
  }

  Fragment star(Fragment a) {
    int s = new_state();
    int e = new_state();
    at(s).epsilon_a = a.start;
    at(s).epsilon_b = e;
    at(a.end).epsilon_a = a.start;
    at(a.end).epsilon_b = e;
    return {s, e};
  }

  Fragment plus(Fragment a) {
    int e = new_state();
    at(a.end).epsilon_a = a.start;
    at(a.end).epsilon_b = e;
    return {a.start, e};
  }

  Fragment optional(Fragment a) {
    int s = new_state();
    int e = new_state();
    at(s).epsilon_a = a.start;
    at(s).epsilon_b = e;
    at(a.end).epsilon_a = e;
    return {s, e};
  }

  bool done() const { return pos_ >= src_.size(); }
  char peek() const { return src_[pos_]; }

  Fragment parse_alternation() {
    Fragment left = parse_sequence();
    while (!done() && peek() == '|') {
      ++pos_;
      left = alternate(left, parse_sequence());
    }
    return left;
  }

  Fragment parse_sequence() {
    Fragment seq = empty();
    while (!done() && peek() != '|' && peek() != ')') {
      seq = concat(seq, parse_postfix());
    }
    return seq;
  }

  Fragment parse_postfix() {
    Fragment atom = parse_atom();
    while (!done()) {
      char c = peek();
      if (c == '*') {
        atom = star(atom);
      } else if (c == '+') {
        atom = plus(atom);
      } else if (c == '?') {
        atom = optional(atom);
      } else {
        break;
      }
      ++pos_;
    }
    return atom;
  }

  Fragment parse_atom() {
    std::size_t at_pos = pos_;
    char c = peek();
    switch (c) {
      case '(': {
        ++pos_;
        Fragment inner = parse_alternation();
        if (done() || peek() != ')') {
          throw PatternError("unterminated group", at_pos);
        }
        ++pos_;
        return inner;
      }
      case '[':
        return bytes(parse_class());
      case '.': {
        ++pos_;
        ByteSet any;
        any.set();
        any.reset('\n');
        return bytes(any);
      }
      case '*':
      case '+':
      case '?':
        throw PatternError(std::string("dangling '") + c + "'", at_pos);
      case '\\':
        return bytes(parse_escape());
      default:
        ++pos_;
        return bytes(single(c));
    }
  }

  static ByteSet single(char c) {
    ByteSet set;
    set.set(static_cast<unsigned char>(c));
    return set;
  }

  ByteSet parse_escape() {
    std::size_t at_pos = pos_;
    ++pos_;
    if (done()) {
      throw PatternError("trailing backslash", at_pos);
    }
    char c = src_[pos_++];
    ByteSet set;
    switch (c) {
      case 'n': return single('\n');
      case 't': return single('\t');
      case 'r': return single('\r');
      case 'f': return single('\f');
      case 'v': return single('\v');
      case '0': return single('\0');
      case 'd':
        for (char d = '0'; d <= '9'; ++d) set.set(static_cast<unsigned char>(d));
        return set;
      case 's':
        for (char s : {' ', '\t', '\n', '\r', '\f', '\v'}) set.set(static_cast<unsigned char>(s));
        return set;
      case 'w':
        for (int b = 0; b < 256; ++b) {
          if (std::isalnum(b) || b == '_') set.set(static_cast<std::size_t>(b));
        }
        return set;
      default:
        return single(c);
    }
  }

  ByteSet parse_class() {
    std::size_t open = pos_;
    ++pos_;
    bool negate = false;
    if (!done() && peek() == '^') {
      negate = true;
      ++pos_;
    }
    ByteSet set;
    bool first = true;
    while (true) {
      if (done()) {
        throw PatternError("unterminated character class", open);
      }
      if (peek() == ']' && !first) {
        ++pos_;
        break;
      }
      first = false;
      ByteSet lo_set;
      int lo = -1;
      if (peek() == '\\') {
        lo_set = parse_escape();
        if (lo_set.count() == 1) {
          for (int b = 0; b < 256; ++b) {
            if (lo_set.test(static_cast<std::size_t>(b))) lo = b;
          }
        }
      } else {
        lo = static_cast<unsigned char>(src_[pos_++]);
        lo_set.set(static_cast<std::size_t>(lo));
      }
      if (lo >= 0 && pos_ + 1 < src_.size() && peek() == '-' && src_[pos_ + 1] != ']') {
        ++pos_;
        int hi;
        if (peek() == '\\') {
          ByteSet hi_set = parse_escape();
          if (hi_set.count() != 1) {
            throw PatternError("invalid range end in character class", pos_);
          }
          hi = 0;
          for (int b = 0; b < 256; ++b) {
            if (hi_set.test(static_cast<std::size_t>(b))) hi = b;
          }
        } else {
          hi = static_cast<unsigned char>(src_[pos_++]);
        }
        if (hi < lo) {
          throw PatternError("reversed range in character class", pos_);
        }
        for (int b = lo; b <= hi; ++b) set.set(static_cast<std::size_t>(b));
      } else {
        set |= lo_set;
      }
    }
    if (negate) {
      set.flip();
    }
    return set;
  }

  std::string_view src_;
  Pattern& out_;
  std::size_t pos_ = 0;
};

Pattern Pattern::compile(std::string_view source) {
  Pattern pattern;
  PatternCompiler(source, pattern).run();
  return pattern;
}

void Pattern::closure(std::vector<int>& set, std::vector<char>& seen, int state) const {
  std::vector<int> stack{state};
  while (!stack.empty()) {
    int s = stack.back();
    stack.pop_back();
    if (s < 0 || seen[static_cast<std::size_t>(s)]) {
      continue;
    }
    seen[static_cast<std::size_t>(s)] = 1;
    set.push_back(s);
    const State& st = states_[static_cast<std::size_t>(s)];
    if (!st.consumes) {
      stack.push_back(st.epsilon_b);
      stack.push_back(st.epsilon_a);
    }
  }
}

std::optional<std::size_t> Pattern::longest_match(std::string_view text, std::size_t pos) const {
  std::vector<char> seen(states_.size(), 0);
  std::vector<int> current;
  closure(current, seen, start_);

  std::optional<std::size_t> best;
  auto accepting = [&](const std::vector<int>& set) {
    return std::find(set.begin(), set.end(), accept_) != set.end();
  };
  if (accepting(current)) {
    best = 0;
  }
  for (std::size_t i = pos; i < text.size() && !current.empty(); ++i) {
    auto byte = static_cast<unsigned char>(text[i]);
    std::vector<int> next;
    std::fill(seen.begin(), seen.end(), 0);
    for (int s : current) {
      const State& st = states_[static_cast<std::size_t>(s)];
      if (st.consumes && st.accepts.test(byte)) {
        closure(next, seen, st.next);
      }
    }
    current = std::move(next);
    if (accepting(current)) {
      best = i + 1 - pos;
    }
  }
  return best;
}

bool Pattern::full_match(std::string_view text) const {
  // longest_match only reports the longest prefix, so check every reachable
  // accept position instead.
  std::vector<char> seen(states_.size(), 0);
  std::vector<int> current;
  closure(current, seen, start_);
  for (char c : text) {
    auto byte = static_cast<unsigned char>(c);
    std::vector<int> next;
    std::fill(seen.begin(), seen.end(), 0);
    for (int s : current) {
      const State& st = states_[static_cast<std::size_t>(s)];
      if (st.consumes && st.accepts.test(byte)) {
        closure(next, seen, st.next);
      }
    }
    current = std::move(next);
    if (current.empty()) {
      return false;
    }
  }
  return std::find(current.begin(), current.end(), accept_) != current.end();
}

bool Pattern::matches_empty() const { return full_match(""); }

}  // namespace treemin

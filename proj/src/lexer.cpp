#include "treemin/lexer.hpp"

namespace treemin {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::vector<Token> tokenize(const Grammar& grammar, std::string_view text) {
  std::vector<Token> out;
  const auto& defs = grammar.tokens();
  std::size_t pos = 0;
  while (true) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;

    std::size_t best_len = 0;
    std::size_t best_type = 0;
    for (std::size_t i = 0; i < defs.size(); ++i) {
      const TokenDef& def = defs[i];
      std::size_t len = 0;
      if (def.literal) {
        if (text.substr(pos, def.literal_text.size()) == def.literal_text) {
          len = def.literal_text.size();
        }
      } else if (auto m = def.pattern->longest_match(text, pos)) {
        len = *m;
      }
      if (len > best_len) {
        best_len = len;
        best_type = i;
      }
    }
    if (best_len == 0) {
      throw LexError(pos);
    }
    out.push_back(Token{best_type, std::string(text.substr(pos, best_len)), pos, defs[best_type].hidden});
    pos += best_len;
  }
  return out;
}

}  // namespace treemin

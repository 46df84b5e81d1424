#include <gtest/gtest.h>

#include "support/support.hpp"
#include "treemin/tree_io.hpp"

using namespace treemin;

namespace {

std::vector<std::string> child_labels(const ParseTree& tree, NodeId id) {
  std::vector<std::string> out;
  for (auto c : tree.node(id).children) out.push_back(tree.node(c).label);
  return out;
}

}  // namespace

TEST(Squeeze, ChainStopsAboveTheToken) {
  // expr -> term -> factor -> Number: the chain collapses into its lowest rule
  // node, which still owns the token.
  auto tree = support::arith().parse("print 1 ;");
  squeeze(tree);
  auto stmt = support::find_all(tree, "stmt").front();
  EXPECT_EQ(child_labels(tree, stmt), (std::vector<std::string>{"\"print\"", "factor", "\";\""}));
  auto factor = tree.node(stmt).children[1];
  EXPECT_EQ(child_labels(tree, factor), std::vector<std::string>{"Number"});
  EXPECT_TRUE(support::find_all(tree, "expr").empty());
  EXPECT_TRUE(support::find_all(tree, "term").empty());
  EXPECT_EQ(serialize(tree), "print 1 ;");
}

TEST(Squeeze, ChainCollapsesToLowestNode) {
  auto tree = support::tree_of("(r x (a (b (c y z))) w)");
  squeeze(tree);
  EXPECT_EQ(child_labels(tree, tree.root()), (std::vector<std::string>{"x", "c", "w"}));
  EXPECT_EQ(serialize(tree), "x y z w");
}

TEST(Squeeze, NothingToSqueeze) {
  auto tree = support::tree_of("(r x (a y z) (b u v))");
  std::string before = outline(tree);
  squeeze(tree);
  EXPECT_EQ(outline(tree), before);
}

TEST(Squeeze, RootChainGetsNewLabel) {
  auto tree = support::tree_of("(s (t (u a b)))");
  squeeze(tree);
  EXPECT_EQ(tree.node(tree.root()).label, "u");
  EXPECT_EQ(serialize(tree), "a b");
}

TEST(Squeeze, DropsEmptyListsAndMergesNestedLists) {
  auto tree = support::tree_of("(r a [] [ [+ b c ] ] d)");
  squeeze(tree);
  EXPECT_EQ(child_labels(tree, tree.root()), (std::vector<std::string>{"a", "*", "d"}));
  auto list = tree.node(tree.root()).children[1];
  EXPECT_EQ(child_labels(tree, list), (std::vector<std::string>{"b", "c"}));
  EXPECT_EQ(tree.node(list).min_children, 0u);
}

TEST(Flatten, LeftRecursiveSpine) {
  auto tree = support::minic().parse("int main ( ) { x ; y ; z ; }");
  auto spines = support::find_all(tree, "blockItemList");
  ASSERT_EQ(spines.size(), 3u);
  auto items = support::find_all(tree, "blockItem");
  flatten_recursion(tree);
  EXPECT_TRUE(support::find_all(tree, "blockItemList").empty());
  auto list = tree.node(items.front()).parent;
  const Node& l = tree.node(list);
  EXPECT_EQ(l.kind, NodeKind::List);
  EXPECT_EQ(l.label, "*");
  EXPECT_EQ(l.children, items);
  EXPECT_EQ(l.min_children, 1u);
  EXPECT_EQ(l.fragment_of, "blockItemList");
  EXPECT_EQ(serialize(tree), "int main ( ) { x ; y ; z ; }");
}

TEST(Flatten, RightRecursiveSpine) {
  auto l = support::Language::from_text("start s ;\ns := \"a\" | \"a\" s ;");
  auto tree = l.parse("a a a a");
  flatten_recursion(tree);
  const Node& root = tree.node(tree.root());
  EXPECT_EQ(root.kind, NodeKind::List);
  EXPECT_EQ(root.children.size(), 4u);
  EXPECT_EQ(serialize(tree), "a a a a");
}

TEST(Flatten, NoSpineLeavesTreeAlone) {
  auto tree = support::minilang().parse("fn main ( a ) { print ( a ) ; }");
  std::string before = outline(tree);
  flatten_recursion(tree);
  EXPECT_EQ(outline(tree), before);
}

TEST(Flatten, OtherRecursionIsNotAList) {
  // `expr "+" term` recurses but does not have the list shape.
  auto tree = support::arith().parse("print 1 + 2 + 3 ;");
  flatten_recursion(tree);
  auto exprs = support::find_all(tree, "expr");
  ASSERT_EQ(exprs.size(), 3u);
  EXPECT_EQ(tree.node(exprs[0]).children.size(), 3u);
  EXPECT_EQ(tree.node(exprs[0]).children[0], exprs[1]);
}

TEST(Preprocess, HelloworldShape) {
  auto tree = support::minic().prepared(support::helloworld_source());
  const char* expected =
      "translationUnit\n"
      "  *\n"
      "    functionDefinition\n"
      "      typeSpecifier\n"
      "        \"int\" int\n"
      "      Identifier main\n"
      "      \"(\" (\n"
      "      \")\" )\n"
      "      compoundStatement\n"
      "        \"{\" {\n"
      "        *\n"
      "          selectionStatement\n"
      "            \"if\" if\n"
      "            \"(\" (\n"
      "            primaryExpression\n"
      "              Constant 1\n"
      "            \")\" )\n"
      "            compoundStatement\n"
      "              \"{\" {\n"
      "              *\n"
      "                expressionStatement\n"
      "                  *\n"
      "                    postfixExpression\n"
      "                      primaryExpression\n"
      "                        Identifier printf\n"
      "                      *\n"
      "                        postfixSuffix\n"
      "                          \"(\" (\n"
      "                          *\n"
      "                            primaryExpression\n"
      "                              StringLiteral \"Hello world!\\n\"\n"
      "                          \")\" )\n"
      "                  \";\" ;\n"
      "              \"}\" }\n"
      "        \"}\" }\n";
  EXPECT_EQ(outline(tree), expected);
}

TEST(Preprocess, OptionsDisablePasses) {
  const auto& l = support::minic();
  auto raw = l.parse(support::helloworld_source());
  auto tree = l.parse(support::helloworld_source());
  preprocess(tree, {false, false});
  EXPECT_EQ(outline(tree), outline(raw));
  preprocess(tree, {true, false});
  squeeze(raw);
  EXPECT_EQ(outline(tree), outline(raw));
}

// Serialization is unchanged, each pass is idempotent, and node counts never grow.
TEST(PreprocessProperties, PreservingAndIdempotent) {
  using Pass = void (*)(ParseTree&);
  const std::pair<const char*, Pass> passes[] = {
      {"squeeze", squeeze},
      {"flatten", flatten_recursion},
      {"preprocess", [](ParseTree& t) { preprocess(t); }},
  };
  for (const auto& sample : support::samples()) {
    for (const auto& [name, pass] : passes) {
      auto tree = sample.language->parse(sample.text);
      std::string text = serialize(tree);
      std::size_t count = node_count(tree);
      pass(tree);
      EXPECT_EQ(serialize(tree), text) << sample.name << " " << name;
      EXPECT_LE(node_count(tree), count) << sample.name << " " << name;
      std::string once = outline(tree);
      pass(tree);
      EXPECT_EQ(outline(tree), once) << sample.name << " " << name;
    }
  }
}

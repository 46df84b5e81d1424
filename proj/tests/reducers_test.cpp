#include <gtest/gtest.h>

#include "support/support.hpp"
#include "treemin/reducers.hpp"
#include "treemin/tmin.hpp"
#include "treemin/tree_io.hpp"

using namespace treemin;

namespace {

const std::string kHoisted = "int main ( ) { printf ( \"Hello world!\\n\" ) ; }";

// Drops one tagged node the way pruning would: removed from its list when
// the list can spare it, otherwise replaced by its minimal fragment.
Overlay drop_one(const ParseTree& tree, NodeId id) {
  Overlay o;
  const Node& n = tree.node(id);
  if (tree.removable(id) && tree.node(n.parent).children.size() > tree.node(n.parent).min_children) {
    o.removed.insert(id);
  } else {
    o.replaced.emplace(id, tree.fragment_for(id));
  }
  return o;
}

// Every single tagged node, dropped on its own, makes the test stop failing.
// Nodes already in minimal form are skipped: dropping them changes nothing.
std::vector<std::string> tree_minimality_violations(const ParseTree& tree, const Evaluator& test) {
  std::vector<std::string> out;
  std::string current = serialize(tree);
  for (std::size_t level = 0;; ++level) {
    auto row = tag_nodes(tree, level);
    if (row.empty()) break;
    for (NodeId id : row) {
      Overlay o = drop_one(tree, id);
      std::string text = serialize(tree, &o);
      if (text != current && test(text) == Outcome::Fail) out.push_back(text);
    }
  }
  return out;
}

std::vector<std::string> chi_maximality_violations(const ParseTree& tree, const Evaluator& test) {
  std::vector<std::string> out;
  for (NodeId id : tree.reachable()) {
    if (!tree.node(id).kept()) continue;
    for (NodeId c : chi(tree, id)) {
      Overlay o = hoist_overlay({{id, c}});
      std::string text = serialize(tree, &o);
      if (test(text) == Outcome::Fail) out.push_back(text);
    }
  }
  return out;
}

ParseTree helloworld() { return support::minic().prepared(support::helloworld_source()); }

std::string eight_prints() {
  std::string text;
  for (int i = 1; i <= 8; ++i) text += "print " + std::to_string(i) + " ; ";
  return text;
}

// Interesting while the program prints something and every use of `y` has
// an assignment to `y` somewhere.
Outcome two_phase_oracle(const std::string& text) {
  if (!is_valid(*support::arith().grammar, text)) return Outcome::Pass;
  std::string s = support::strip_ws(text);
  if (s.find("print") == std::string::npos) return Outcome::Pass;
  if (s.find('y') != std::string::npos && s.find("y=") == std::string::npos) return Outcome::Pass;
  return Outcome::Fail;
}

}  // namespace

TEST(Pipeline, ParseAndPrint) {
  EXPECT_EQ(to_string(parse_pipeline("hdd")), "hdd*");
  EXPECT_EQ(to_string(parse_pipeline("hoist+hddh")), "hoist*+hddh*");
  EXPECT_EQ(to_string(parse_pipeline("hoist*+hdd*")), "hoist*+hdd*");
  EXPECT_EQ(parse_pipeline("hddh"), (Pipeline{{Algorithm::Hddh, true}}));
  EXPECT_THROW(parse_pipeline(""), std::invalid_argument);
  EXPECT_THROW(parse_pipeline("perses"), std::invalid_argument);
  EXPECT_THROW(parse_pipeline("hdd++hoist"), std::invalid_argument);
}

TEST(Hdd, HelloworldStaysAt42) {
  auto tree = helloworld();
  std::string original = serialize(tree);
  hdd(tree, support::helloworld_oracle);
  EXPECT_EQ(serialize(tree), original);
  EXPECT_EQ(nonws_size(serialize(tree)), 42u);
  EXPECT_TRUE(tree_minimality_violations(tree, support::helloworld_oracle).empty());
}

TEST(Hdd, IrreducibleHeightOneTree) {
  auto tree = support::tree_of("(r a b)");
  auto test = [](const std::string& t) { return t == "a b" ? Outcome::Fail : Outcome::Pass; };
  auto l = support::Language::from_text("start r ;\nr := \"a\" \"b\" ;");
  auto real = l.parse("a b");
  std::string before = outline(real);
  hdd(real, test);
  EXPECT_EQ(outline(real), before);
}

TEST(Hdd, OnlyTheNeededStatementSurvives) {
  const auto& l = support::arith();
  auto tree = l.prepared(eight_prints());
  auto test = support::keeps(l, "print3;");
  hdd(tree, test);
  EXPECT_EQ(serialize(tree), "print 3 ;");
  EXPECT_TRUE(tree_minimality_violations(tree, test).empty());

  // Brute force over every keep-subset of the eight statements: the failing
  // ones are exactly those that keep statement 3, the smallest being {3}.
  auto fresh = l.prepared(eight_prints());
  auto stmts = support::find_all(fresh, "stmt");
  ASSERT_EQ(stmts.size(), 8u);
  std::size_t smallest = 9;
  for (unsigned mask = 1; mask < 256; ++mask) {
    Overlay o;
    for (unsigned i = 0; i < 8; ++i) {
      if (!(mask & (1u << i))) o.removed.insert(stmts[i]);
    }
    bool fails = test(serialize(fresh, &o)) == Outcome::Fail;
    EXPECT_EQ(fails, (mask & 4u) != 0) << mask;
    if (fails) smallest = std::min<std::size_t>(smallest, std::popcount(mask));
  }
  EXPECT_EQ(smallest, 1u);
}

TEST(Hoist, HelloworldBecomesHoistedTree) {
  auto tree = helloworld();
  auto compounds = support::find_all(tree, "compoundStatement");
  hoist(tree, support::helloworld_oracle);
  EXPECT_EQ(serialize(tree), kHoisted);
  EXPECT_EQ(support::find_all(tree, "compoundStatement"), std::vector<NodeId>{compounds[1]});
}

TEST(Hoist, NothingCompatible) {
  auto tree = support::tree_of("(a (b x) (c y))");
  std::string before = outline(tree);
  hoist(tree, [](const std::string&) { return Outcome::Fail; });
  EXPECT_EQ(outline(tree), before);
}

TEST(Hoist, InnermostCallReachesTheTop) {
  const auto& l = support::minilang();
  auto tree = l.prepared("fn main ( a ) { print ( f ( g ( h ( a ) ) ) ) ; }");
  auto test = support::keeps(l, "h(a)");
  hoist(tree, test);
  EXPECT_EQ(serialize(tree), "fn main ( a ) { h ( a ) ; }");
  EXPECT_TRUE(chi_maximality_violations(tree, test).empty());
}

TEST(Hddh, HelloworldReaches35) {
  auto tree = helloworld();
  hddh(tree, support::helloworld_oracle);
  EXPECT_EQ(serialize(tree), kHoisted);
}

TEST(Hddh, MinimalInputUnchanged) {
  const auto& l = support::arith();
  auto tree = l.prepared("print 0 ;");
  std::string before = outline(tree);
  hddh(tree, support::keeps(l, "print"));
  EXPECT_EQ(outline(tree), before);
}

TEST(Hddh, HoistedNodesArePrunedAtLaterLevels) {
  // The call chain is hoisted and the surrounding statements pruned away.
  const auto& l = support::minilang();
  auto tree = l.prepared("fn main ( a ) { let b = a ; print ( f ( g ( h ( b ) ) ) ) ; print ( b ) ; }");
  auto test = support::keeps(l, "h(b)");
  hddh(tree, test);
  EXPECT_EQ(serialize(tree), "fn a ( ) { h ( b ) ; }");
}

TEST(Fixpoint, AlreadyMinimalTakesOneIteration) {
  const auto& l = support::arith();
  auto tree = l.prepared("print 0 ;");
  EXPECT_EQ(fixpoint(Algorithm::Hdd, tree, support::keeps(l, "print")), 1u);
  EXPECT_EQ(serialize(tree), "print 0 ;");
}

TEST(Fixpoint, HelloworldHdd) {
  auto tree = helloworld();
  EXPECT_EQ(fixpoint(Algorithm::Hdd, tree, support::helloworld_oracle), 1u);
  EXPECT_EQ(nonws_size(serialize(tree)), 42u);
}

TEST(Fixpoint, SecondIterationShrinksFurther) {
  const auto& l = support::arith();
  auto once = l.prepared("y = 1 ; print ( 2 + y ) ;");
  hdd(once, two_phase_oracle);
  EXPECT_EQ(serialize(once), "y = 0 ; print 0 ;");

  auto tree = l.prepared("y = 1 ; print ( 2 + y ) ;");
  std::size_t iterations = fixpoint(Algorithm::Hdd, tree, two_phase_oracle);
  EXPECT_GE(iterations, 2u);
  std::string result = serialize(tree);
  EXPECT_EQ(result, "print 0 ;");
  EXPECT_EQ(two_phase_oracle(result), Outcome::Fail);

  // No program of the grammar that is strictly smaller is interesting.
  std::size_t size = nonws_size(result);
  support::DerivationEnumerator all(*l.grammar, size - 1, 10);
  for (const auto& sentence : all.derivable("program")) {
    EXPECT_NE(two_phase_oracle(all.text(sentence)), Outcome::Fail) << all.text(sentence);
  }
}

TEST(Fixpoint, CapIsEnforced) {
  const auto& l = support::arith();
  auto tree = l.prepared("y = 1 ; print ( 2 + y ) ;");
  try {
    fixpoint(Algorithm::Hdd, tree, two_phase_oracle, 1);
    FAIL() << "expected IterationCapError";
  } catch (const IterationCapError& e) {
    EXPECT_EQ(e.cap(), 1u);
    EXPECT_NE(std::string(e.what()).find('1'), std::string::npos);
  }
}

TEST(RunPipeline, HoistThenHdd) {
  auto tree = helloworld();
  CachedOracle oracle(support::helloworld_oracle);
  auto result = run_pipeline(parse_pipeline("hoist+hdd"), tree, oracle);
  ASSERT_EQ(result.stages.size(), 2u);
  EXPECT_EQ(result.stages[0].name, "hoist*");
  EXPECT_EQ(result.stages[1].name, "hdd*");
  EXPECT_EQ(result.stages[0].size, 35u);
  EXPECT_EQ(result.output_size, 35u);
  EXPECT_EQ(result.output, kHoisted);
  EXPECT_EQ(result.stages[0].invocations + result.stages[1].invocations, oracle.steps().invocations);
  EXPECT_EQ(result.stages[0].hits + result.stages[1].hits, oracle.steps().hits);
}

TEST(RunPipeline, OnlyTheOriginalFails) {
  auto tree = helloworld();
  std::string original = serialize(tree);
  CachedOracle oracle([&](const std::string& t) { return t == original ? Outcome::Fail : Outcome::Pass; });
  auto result = run_pipeline(parse_pipeline("hdd"), tree, oracle);
  EXPECT_EQ(result.output, original);
  EXPECT_EQ(result.stages[0].iterations, 1u);
}

TEST(RunPipeline, RejectsEmptyPipeline) {
  auto tree = helloworld();
  CachedOracle oracle(support::helloworld_oracle);
  EXPECT_THROW(run_pipeline({}, tree, oracle), std::invalid_argument);
}

// Over every sample and algorithm: the result still fails, never grows, stays
// valid at every candidate, and a rerun of the star variant changes nothing.
TEST(ReducerProperties, CorpusInvariants) {
  const Algorithm algorithms[] = {Algorithm::Hdd, Algorithm::Hoist, Algorithm::Hddh};
  for (const auto& rc : support::reduction_cases()) {
    const Grammar& g = *rc.sample.language->grammar;
    for (Algorithm alg : algorithms) {
      auto tree = rc.sample.language->prepared(rc.sample.text);
      std::string name = rc.sample.name + "/" + to_string(AlgorithmId{alg, true});
      ASSERT_EQ(rc.oracle(serialize(tree)), Outcome::Fail) << name;
      std::size_t input = nonws_size(serialize(tree));
      std::size_t invalid = 0;
      Diagnostics diag;
      if (alg != Algorithm::Hoist) {
        diag.on_candidate = [&](const std::string& text) { invalid += !is_valid(g, text); };
      }
      diag.on_hoist = [&](const ParseTree& t, NodeId, NodeId from, NodeId to) {
        EXPECT_LT(subtree_measure(t, to), subtree_measure(t, from)) << name;
      };
      fixpoint(alg, tree, rc.oracle, 100, diag);
      std::string out = serialize(tree);
      EXPECT_EQ(invalid, 0u) << name;
      EXPECT_EQ(rc.oracle(out), Outcome::Fail) << name;
      EXPECT_LE(nonws_size(out), input) << name;
      if (alg == Algorithm::Hdd) EXPECT_TRUE(tree_minimality_violations(tree, rc.oracle).empty()) << name;
      if (alg == Algorithm::Hoist) EXPECT_TRUE(chi_maximality_violations(tree, rc.oracle).empty()) << name;
      std::string shape = outline(tree);
      EXPECT_EQ(fixpoint(alg, tree, rc.oracle), 1u) << name;
      EXPECT_EQ(outline(tree), shape) << name;
    }
  }
}

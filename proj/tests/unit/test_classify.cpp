#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../classify_cases.hpp"
#include "../support.hpp"
#include "repair_miner/classify.hpp"
#include "repair_miner/errors.hpp"
#include "repair_miner/mini_java.hpp"

#include <algorithm>

namespace rm = repair_miner;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

Pairs pairs_of(const rm::Classification &c) {
  Pairs out;
  for (const auto &ch : c.changes)
    out.emplace_back(ch.ct, ch.et);
  std::sort(out.begin(), out.end());
  return out;
}

rm::Classification run(const std::string &before, const std::string &after,
                       const rm::Taxonomy &tax = rm::Taxonomy::default_taxonomy()) {
  return rm::diff_and_classify(rm::parse_mini_java(before), rm::parse_mini_java(after),
                               tax, "T.java");
}

} // namespace

TEST_CASE("handcrafted before/after suite") {
  for (const auto &k : support::classify_cases()) {
    CAPTURE(k.name);
    const auto before =
        support::read_file(support::data_path("classify/" + k.name + ".before.java"));
    const auto after =
        support::read_file(support::data_path("classify/" + k.name + ".after.java"));
    auto want = k.expected;
    std::sort(want.begin(), want.end());
    CHECK(pairs_of(run(before, after)) == want);
  }
}

TEST_CASE("every operation is classified or dropped with a reason") {
  for (const auto &k : support::classify_cases()) {
    CAPTURE(k.name);
    const auto a = rm::parse_mini_java(
        support::read_file(support::data_path("classify/" + k.name + ".before.java")));
    const auto b = rm::parse_mini_java(
        support::read_file(support::data_path("classify/" + k.name + ".after.java")));
    const auto ops = rm::edit_script(a, b, rm::match_trees(a, b));
    const auto c = rm::classify(ops, rm::Taxonomy::default_taxonomy(), "X.java");
    CHECK(c.changes.size() + c.dropped.size() == ops.size());
    for (const auto &d : c.dropped)
      CHECK_FALSE(d.reason.empty());
    for (const auto &ch : c.changes) {
      CHECK(rm::Taxonomy::default_taxonomy().is_valid(ch.ct, ch.et));
      CHECK(ch.path == "X.java");
      CHECK(ch.line >= 1);
    }
  }
}

TEST_CASE("changes carry the line of the edited node") {
  const auto c = run("class A {\n  void f() {\n    g();\n  }\n}\n",
                     "class A {\n  void f() {\n    g();\n    h();\n  }\n}\n");
  REQUIRE(c.changes.size() == 1);
  CHECK(c.changes[0].line == 4);
}

TEST_CASE("reverse direction of each insertion is the matching removal") {
  CHECK(pairs_of(run("class A { void f() { g(); } }", "class A { void f() { } }")) ==
        Pairs{{"statement delete", "method_invocation"}});
  CHECK(pairs_of(run("class A { int x; }", "class A { }")) ==
        Pairs{{"attribute removal", "attribute"}});
  CHECK(pairs_of(run("class A extends B { }", "class A { }")) ==
        Pairs{{"parent class delete", "parent_class"}});
  CHECK(pairs_of(run("class A { void f(int a, int b) { } }",
                     "class A { void f(int a) { } }")) ==
        Pairs{{"parameter delete", "parameter"}});
  CHECK(pairs_of(run("class A { void f() { if (x) { g(); } else { h(); } } }",
                     "class A { void f() { if (x) { g(); } } }")) ==
        Pairs{{"else-part delete", "else_statement"}, {"statement delete", "method_invocation"}});
}

TEST_CASE("accessibility changes follow the access order") {
  CHECK(pairs_of(run("class A { public void f() { } }", "class A { private void f() { } }")) ==
        Pairs{{"decreasing accessibility change", "method"}});
  CHECK(pairs_of(run("class A { void f() { } }", "class A { protected void f() { } }")) ==
        Pairs{{"increasing accessibility change", "method"}});
  CHECK(pairs_of(run("class A { protected int x; }", "class A { int x; }")) ==
        Pairs{{"decreasing accessibility change", "attribute"}});
}

TEST_CASE("final on classes and methods") {
  CHECK(pairs_of(run("class A { }", "final class A { }")) ==
        Pairs{{"addition of class derivability", "class"}});
  CHECK(pairs_of(run("class A { final void f() { } }", "class A { void f() { } }")) ==
        Pairs{{"removal of method overridability", "method"}});
}

TEST_CASE("renames and class-level changes") {
  CHECK(pairs_of(run("class A { int x; void f() { g(); } }",
                     "class Renamed { int x; void f() { g(); } }")) ==
        Pairs{{"class renaming", "class"}});
  CHECK(pairs_of(run("class A { int count; }", "class A { int counter; }")) ==
        Pairs{{"attribute renaming", "attribute"}});
  CHECK(pairs_of(run("class A { void f(int a) { } }", "class A { void f(int b) { } }")) ==
        Pairs{{"parameter renaming", "parameter"}});
  CHECK(pairs_of(run("class A { }", "class A { }\nclass B { }")) ==
        Pairs{{"additional class", "class"}});
  CHECK(pairs_of(run("class A implements I { }", "class A implements J { }")) ==
        Pairs{{"parent interface change", "parent_interface"}});
}

TEST_CASE("the method body rule decides whether body statements count") {
  const std::string before = "class A { }";
  const std::string after = "class A { void f() { g(); h(); } }";
  CHECK(pairs_of(run(before, after)) == Pairs{{"additional functionality", "method"}});

  auto counting = rm::Taxonomy::default_taxonomy();
  counting.set_method_body_rule(rm::MethodBodyRule::count);
  CHECK(pairs_of(run(before, after, counting)) ==
        Pairs{{"additional functionality", "method"},
              {"statement insert", "method_invocation"},
              {"statement insert", "method_invocation"}});
}

TEST_CASE("strict mode rejects operations without a rule, permissive drops them") {
  rm::EditOperation op;
  op.op = rm::EditKind::update;
  op.kind = "compilation_unit";
  op.value = "a";
  op.new_value = "b";
  const std::vector<rm::EditOperation> ops{op};
  auto tax = rm::Taxonomy::default_taxonomy();
  CHECK_THROWS_AS(rm::classify(ops, tax), rm::UnclassifiableChange);
  tax.set_strict(false);
  const auto c = rm::classify(ops, tax);
  CHECK(c.changes.empty());
  REQUIRE(c.dropped.size() == 1);
  CHECK(c.dropped[0].index == 0);
}

TEST_CASE("known but unmodeled modifiers are dropped, not rejected") {
  const auto c = run("class A { void f() { } }", "class A { static void f() { } }");
  CHECK(c.changes.empty());
  REQUIRE(c.dropped.size() == 1);
  CHECK(c.dropped[0].reason.find("static") != std::string::npos);
}

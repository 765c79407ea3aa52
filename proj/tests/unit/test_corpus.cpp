#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "repair_miner/corpus.hpp"
#include "repair_miner/errors.hpp"
#include "repair_miner/interchange.hpp"
#include "repair_miner/mini_java.hpp"

#include <cstdlib>
#include <thread>

namespace rm = repair_miner;

namespace {

rm::Transaction source_tx(const std::string &project, const std::string &id,
                          const std::string &message, const std::string &before,
                          const std::string &after) {
  rm::Transaction t;
  t.project = project;
  t.id = id;
  t.message = message;
  t.timestamp = 1000;
  t.files.push_back({"src/A.java", before, after});
  return t;
}

const std::string kBefore = "class A { void f() { g(); } }\n";
const std::string kAfter = "class A { void f() { g(); h(); } }\n";

bool have_git() { return std::system("git --version >/dev/null 2>&1") == 0; }

void sh(const std::string &cmd) {
  REQUIRE(std::system(("cd " + cmd + " >/dev/null 2>&1").c_str()) == 0);
}

// Three commits touching A.java (add, fix, reformat) plus one commit that only
// touches a text file.
void build_fixture_repo(const support::ScratchDir &dir) {
  const auto p = dir.path().string();
  const std::string git =
      "git -c user.name=t -c user.email=t@example.org -c commit.gpgsign=false ";
  auto commit = [&](const std::string &msg, int when) {
    const std::string date = std::to_string(1400000000 + when) + " +0000";
    sh(p + " && git add -A && GIT_AUTHOR_DATE='" + date + "' GIT_COMMITTER_DATE='" +
       date + "' " + git + "commit -q -m '" + msg + "'");
  };
  sh(p + " && git init -q .");
  support::write_file(dir.file("A.java"), "class A {\n  void f() {\n    g();\n  }\n}\n");
  commit("Initial import", 1);
  support::write_file(dir.file("A.java"),
                      "class A {\n  void f() {\n    g();\n    h();\n  }\n}\n");
  commit("Fix bug in f", 2);
  support::write_file(dir.file("notes.txt"), "todo\n");
  commit("Notes", 3);
  support::write_file(dir.file("A.java"), "class A\n{\n\tvoid f()\n\t{\n\t\tg( );\n\t\th( );\n\t}\n}\n");
  commit("Reformat", 4);
}

} // namespace

TEST_CASE("records round trip") {
  auto t = source_tx("p", "r1", "Fix \"quoted\"\nmessage", kBefore, kAfter);
  CHECK(rm::from_record(rm::to_record(t)) == t);
  t.changes = std::vector<rm::SourceCodeChange>{{"statement insert", "method_invocation",
                                                 "src/A.java", 1}};
  const auto line = rm::to_record(t);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(rm::from_record(line) == t);
}

TEST_CASE("interchange records embed trees") {
  auto t = source_tx("p", "r1", "m", "", "");
  t.format = rm::SourceFormat::interchange;
  t.files[0].after = rm::serialize_interchange(rm::parse_mini_java(kAfter));
  const auto back = rm::from_record(rm::to_record(t));
  CHECK(back.format == rm::SourceFormat::interchange);
  CHECK(back.files[0].before.empty());
  CHECK(rm::parse_interchange(back.files[0].after).root ==
        rm::parse_mini_java(kAfter).root);
}

TEST_CASE("malformed records") {
  CHECK_THROWS_AS(rm::from_record("{"), rm::SchemaError);
  CHECK_THROWS_AS(rm::from_record(R"({"id": "x"})"), rm::SchemaError);
  CHECK_THROWS_AS(rm::from_record("[]"), rm::SchemaError);
}

TEST_CASE("corpus files: supersede, torn tail, atomic rewrite") {
  support::ScratchDir dir("corpus");
  const auto path = dir.file("c.jsonl");
  auto a = source_tx("p", "r1", "first", kBefore, kAfter);
  auto b = source_tx("p", "r2", "second", kBefore, kAfter);
  auto a2 = a;
  a2.changes = std::vector<rm::SourceCodeChange>{};
  support::write_file(path, rm::to_record(a) + "\n" + rm::to_record(b) + "\n" +
                                rm::to_record(a2) + "\n" + rm::to_record(b).substr(0, 20));
  const auto loaded = rm::read_corpus(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0] == a2); // replaced in place
  CHECK(loaded[1] == b);

  rm::write_corpus(path, {b});
  CHECK(rm::read_corpus(path) == std::vector<rm::Transaction>{b});
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));

  support::write_file(path, rm::to_record(a) + "\nnot json\n");
  try {
    rm::read_corpus(path);
    FAIL("expected a schema error");
  } catch (const rm::SchemaError &e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("concurrent appends never interleave records") {
  support::ScratchDir dir("store");
  rm::CorpusStore store(dir.file("s.jsonl"));
  CHECK(store.load().empty());
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w)
    threads.emplace_back([&, w] {
      for (int i = 0; i < 50; ++i)
        store.append(source_tx("p" + std::to_string(w), std::to_string(i),
                               std::string(200, 'x'), kBefore, kAfter));
    });
  for (auto &t : threads)
    t.join();
  CHECK(store.load().size() == 200);
}

TEST_CASE("bags") {
  std::vector<rm::Transaction> c;
  for (const char *m : {"Fixed NPE", "BUGFIX", "apply PATCH 3", "prefix handling",
                        "Refactor", "update docs"})
    c.push_back(source_tx("p", m, m, "", ""));
  for (std::size_t i = 0; i < c.size(); ++i)
    c[i].changes = std::vector<rm::SourceCodeChange>(
        i % 3, rm::SourceCodeChange{"statement insert", "assignment", "", 1});

  CHECK(rm::bag_all(c).size() == 6);
  CHECK(rm::bag_all(c).name == "ALL");
  const auto bfp = rm::slice_bfp(c);
  CHECK(bfp.name == "BFP");
  // substring matching also catches "prefix"
  CHECK(bfp.size() == 4);
  CHECK(rm::slice_bfp(c, {"docs"}).size() == 1);
  CHECK(rm::slice_nsc(c, 1).size() == 2);
  CHECK(rm::slice_nsc(rm::slice_bfp(c), 2).size() == 1);
  CHECK_THROWS_AS(rm::slice_nsc(c, 0), rm::DomainError);
  c[0].changes.reset();
  CHECK_THROWS_AS(rm::slice_nsc(c, 1), rm::NotMined);
  CHECK_THROWS_AS(c[0].change_count(), rm::NotMined);
}

TEST_CASE("mining fills changes and reports skipped pairs") {
  std::vector<rm::Transaction> c;
  c.push_back(source_tx("p", "ok", "Fix", kBefore, kAfter));
  c.push_back(source_tx("p", "added", "Add", "", kBefore));
  c.push_back(source_tx("p", "broken", "Break", kBefore, "class A { void f( }"));
  auto t = source_tx("p", "two", "Two files", kBefore, kAfter);
  t.files.push_back({"src/B.java", "class B { }", "class B { int x; }"});
  c.push_back(t);

  const auto report = rm::mine(c, rm::Taxonomy::default_taxonomy(), 2);
  CHECK(report.transactions == 4);
  CHECK(report.file_pairs == 5);
  CHECK(c[0].change_count() == 1);
  CHECK(c[1].change_count() == 1); // additional class
  CHECK(c[2].change_count() == 0);
  CHECK(c[3].change_count() == 2);
  REQUIRE(report.skipped.size() == 1);
  CHECK(report.skipped[0].transaction == "broken");
  CHECK(report.changes == 4);
}

TEST_CASE("parallel mining equals the serial reference") {
  std::vector<rm::Transaction> c;
  for (int i = 0; i < 40; ++i) {
    std::string after = "class A { void f() { g(); ";
    for (int k = 0; k < i % 5; ++k)
      after += "x" + std::to_string(k) + " = " + std::to_string(i) + "; ";
    after += "} }";
    c.push_back(source_tx("p" + std::to_string(i % 3), std::to_string(i), "m", kBefore, after));
  }
  auto serial = c;
  const auto r1 = rm::mine(c, rm::Taxonomy::default_taxonomy(), 4);
  const auto r2 = rm::mine_serial(serial, rm::Taxonomy::default_taxonomy());
  CHECK(c == serial);
  CHECK(r1.changes == r2.changes);
  CHECK(r1.skipped == r2.skipped);
}

TEST_CASE("git ingestion of a fixture repository") {
  if (!have_git()) {
    MESSAGE("git not available; skipping");
    return;
  }
  support::ScratchDir dir("repo");
  build_fixture_repo(dir);
  std::vector<std::string> warnings;
  auto txs = rm::ingest_vcs(dir.path().string(), "fixture", {}, &warnings);
  CHECK(warnings.empty());
  REQUIRE(txs.size() == 3);
  CHECK(txs[0].message == "Initial import");
  CHECK(txs[1].message == "Fix bug in f");
  CHECK(txs[2].message == "Reformat");
  CHECK(txs[0].timestamp < txs[1].timestamp);
  CHECK(txs[0].files[0].before.empty());
  CHECK(txs[0].project == "fixture");
  rm::mine(txs, rm::Taxonomy::default_taxonomy());
  CHECK(txs[0].change_count() == 1); // additional class
  CHECK(txs[1].change_count() == 1); // statement insert
  CHECK(txs[2].change_count() == 0); // formatting only
  CHECK(txs[1].mined_changes()[0].ct == "statement insert");
}

TEST_CASE("git ingestion edge cases") {
  if (!have_git())
    return;
  support::ScratchDir dir("empty");
  sh(dir.path().string() + " && git init -q .");
  CHECK(rm::ingest_vcs(dir.path().string(), "e").empty());
  CHECK_THROWS_AS(rm::ingest_vcs(dir.file("missing"), "m"), rm::Error);
  support::ScratchDir plain("plain");
  CHECK_THROWS_AS(rm::ingest_vcs(plain.path().string(), "n"), rm::Error);
  rm::VcsCommands broken;
  broken.probe = "definitely-not-a-vcs-tool --version";
  CHECK_THROWS_AS(rm::ingest_vcs(dir.path().string(), "e", broken), rm::EnvironmentError);
}

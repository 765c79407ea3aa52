#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../support.hpp"
#include "repair_miner/corpus.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdio>

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the CLI through the shell; `env` is prepended verbatim.
Run cli(const std::string &args, const std::string &env = "") {
  static support::ScratchDir scratch("cli-stderr");
  const auto err_path = scratch.file("stderr.txt");
  const std::string cmd = env + " '" + std::string(CLI_PATH) + "' " + args + " 2>'" + err_path + "'";
  Run r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0)
    r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = support::read_file(err_path);
  return r;
}

nlohmann::json json_of(const Run &r) {
  INFO(r.err);
  REQUIRE(r.code == 0);
  return nlohmann::json::parse(r.out);
}

const std::string kGcd = SOURCE_DIR "/scenarios/gcd.scenario";

bool have_git() { return std::system("git --version >/dev/null 2>&1") == 0; }

} // namespace

TEST_CASE("simulate in every format") {
  const auto j = json_of(cli("simulate --scenario " + kGcd));
  std::vector<int> times;
  for (const auto &row : j["rows"])
    times.push_back(row["logical_time"].get<int>());
  CHECK(times == std::vector<int>{219, 185, 160, 180, 144, 120});

  const auto csv = cli("--format csv simulate --scenario " + kGcd);
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("p_insert,p_delete,p_swap,n_place,probability,logical_time\n", 0) == 0);
  const auto md = cli("simulate --scenario " + kGcd + " --format md");
  CHECK(md.out.find("| 0.60 | 0.20 | 0.20 | 120 |") != std::string::npos);

  const auto fl = json_of(cli("simulate --scenario " SOURCE_DIR "/scenarios/gcd-faultloc.scenario"));
  CHECK(fl["rows"][0]["logical_time"] == 118);
  const auto two = json_of(cli("simulate --scenario " SOURCE_DIR "/scenarios/two-action.scenario"));
  CHECK(two["rows"][0]["logical_time"] == 636499);
}

TEST_CASE("report files") {
  support::ScratchDir dir("cli-out");
  const auto r = cli("--out " + dir.file("t.csv") + " --format csv simulate --scenario " + kGcd);
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(support::read_file(dir.file("t.csv")).find(",219") != std::string::npos);
}

TEST_CASE("exit codes and messages") {
  support::ScratchDir dir("cli-errors");
  CHECK(cli("--help").code == 0);
  CHECK(cli("").code == 2);
  CHECK(cli("simulate --scenario " + kGcd + " --frobnicate").code == 2);
  CHECK(cli("--format xml simulate --scenario " + kGcd).code == 2);

  const auto missing = cli("simulate --scenario " + dir.file("none.scenario"));
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);

  support::write_file(dir.file("bad.scenario"),
                      R"({"n_place": 2, "n_ast": 2, "operators": [)"
                      R"({"p_insert": 0.4, "p_delete": 0.3, "p_swap": 0.3},)"
                      R"({"p_insert": 0.8, "p_delete": 0.3, "p_swap": 0.3}],)"
                      R"("fix": [{"op": "delete", "ast": 0}]})");
  const auto bad = cli("simulate --scenario " + dir.file("bad.scenario"));
  CHECK(bad.code == 2);
  CHECK(bad.err.find("operator row 2") != std::string::npos);

  const auto repo = cli("mine --repo " + dir.file("no-such-repo") + " --project x --corpus-out " +
                        dir.file("c.jsonl"));
  CHECK(repo.code == 2);

  for (const char *v : {"abc", "-1", "3x"}) {
    const auto w = cli("simulate --scenario " + kGcd, std::string("REPAIR_MINER_WORKERS=") + v);
    CHECK(w.code == 2);
    CHECK(w.err.find("REPAIR_MINER_WORKERS") != std::string::npos);
  }
  CHECK(cli("simulate --scenario " + kGcd, "REPAIR_MINER_WORKERS=2").code == 0);
}

TEST_CASE("agreement from a ratings file") {
  support::ScratchDir dir("cli-agree");
  support::write_file(dir.file("r.csv"), "yes,no\n1,1\n1,1\n1,1\n2,0\n0,2\n");
  const auto j = json_of(cli("stats agreement --ratings " + dir.file("r.csv")));
  // P_bar = 2/5, P_e = 1/2
  CHECK(j["kappa"].get<double>() == doctest::Approx(-0.2));
  CHECK(j["p_bar"].get<double>() == doctest::Approx(0.4));
  support::write_file(dir.file("uneven.csv"), "1,1\n3,0\n");
  CHECK(cli("stats agreement --ratings " + dir.file("uneven.csv")).code == 2);
}

TEST_CASE("repair median") {
  const auto j = json_of(cli("repair median --p 0.0005"));
  CHECK(j["median_attempts"] == 1386);
  CHECK(json_of(cli("repair median --p 0"))["median_attempts"] == "infinite");
  CHECK(cli("repair median --p 1.5").code == 2);

  const auto eqp = json_of(cli("--bag eqp repair median --shape 'statement insert'"));
  CHECK(eqp["median_attempts"] == 29);
  CHECK(cli("--bag eqp repair median --shape 'no such action'").code == 2);

  const auto a = cli("--seed 5 --bag eqp repair median --shape 'statement insert' --trials 2000");
  const auto b = cli("--seed 5 --bag eqp repair median --shape 'statement insert' --trials 2000",
                     "REPAIR_MINER_WORKERS=3");
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("corpus commands over a synthetic multi-project corpus") {
  support::ScratchDir dir("cli-corpus");
  const auto &tax = repair_miner::Taxonomy::default_taxonomy();
  repair_miner::write_corpus(dir.file("c.jsonl"), support::synthetic_corpus(4, 3, 50, tax));
  const auto corpus = " --corpus " + dir.file("c.jsonl");

  const auto freq = json_of(cli("stats freq" + corpus));
  CHECK(freq["total"].get<int>() > 0);
  const auto bfp = json_of(cli("--bag bfp slice" + corpus));
  CHECK(bfp["bag"] == "BFP");
  CHECK(bfp["size"].get<int>() < 150);
  CHECK(bfp["of"] == 150);
  CHECK(cli("stats spearman" + corpus).code == 0);

  const auto cv = json_of(cli("--bag eqp crossval --sizes 1-3" + corpus));
  REQUIRE(cv["rows"].size() == 3);
  for (const auto &row : cv["rows"])
    if (!row["cells"][0]["median"].is_null())
      CHECK(row["cells"][0]["median"] == 29);

  const auto first = cli("--model ctet crossval --sizes 1-4" + corpus);
  const auto again = cli("--model ctet crossval --sizes 1-4" + corpus, "REPAIR_MINER_WORKERS=4");
  CHECK(first.code == 0);
  CHECK(first.out == again.out);

  const auto series = cli("--format csv --bag all,bfp,eqp crossval --sizes 1-2" + corpus);
  CHECK(series.code == 0);
  CHECK(series.out.rfind("size,ALL,BFP,EQP\n", 0) == 0);
}

TEST_CASE("mining a git repository end to end") {
  if (!have_git())
    return;
  support::ScratchDir repo("cli-repo");
  const auto p = repo.path().string();
  const std::string git = "git -c user.name=t -c user.email=t@example.org -c commit.gpgsign=false";
  support::write_file(repo.file("A.java"), "class A {\n  void f() {\n    g();\n  }\n}\n");
  REQUIRE(std::system(("cd '" + p + "' && git init -q . && git add -A && " + git +
                       " commit -qm 'Initial import'").c_str()) == 0);
  support::write_file(repo.file("A.java"), "class A {\n  void f() {\n    g();\n    h();\n  }\n}\n");
  REQUIRE(std::system(("cd '" + p + "' && " + git + " commit -qam 'Fix bug in f'").c_str()) == 0);
  support::write_file(repo.file("A.java"), "class A\n{\n\tvoid f()\n\t{\n\t\tg( );\n\t\th( );\n\t}\n}\n");
  REQUIRE(std::system(("cd '" + p + "' && " + git + " commit -qam 'Reformat'").c_str()) == 0);

  support::ScratchDir out("cli-mined");
  const auto corpus = out.file("fx.jsonl");
  const auto mined = json_of(cli("mine --repo '" + p + "' --project fx --corpus-out " + corpus));
  CHECK(mined["transactions"] == 3);
  CHECK(mined["changes"] == 2);
  const auto records = repair_miner::read_corpus(corpus);
  REQUIRE(records.size() == 3);
  // commits within one second are ordered by id, so look the record up
  int reformats = 0;
  for (const auto &r : records)
    if (r.message == "Reformat") {
      ++reformats;
      CHECK(r.change_count() == 0);
    }
  CHECK(reformats == 1);

  // a second run has nothing left to mine
  const auto again = json_of(cli("mine --corpus " + corpus + " --corpus-out " + corpus));
  CHECK(again["mined_now"] == 0);

  // single project: cross-validation is impossible
  CHECK(cli("crossval --corpus " + corpus).code == 2);

  support::ScratchDir empty("cli-empty-repo");
  REQUIRE(std::system(("cd '" + empty.path().string() + "' && git init -q .").c_str()) == 0);
  const auto none = json_of(cli("mine --repo '" + empty.path().string() +
                                "' --project e --corpus-out " + out.file("e.jsonl")));
  CHECK(none["transactions"] == 0);
}

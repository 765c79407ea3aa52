#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "../oracles/crossval_oracle.hpp"
#include "../support.hpp"
#include "repair_miner/crossval.hpp"
#include "repair_miner/errors.hpp"

#include <json.hpp>

namespace rm = repair_miner;

namespace {

rm::Transaction tx(const std::string &project, const std::string &id, const std::string &msg,
                   std::vector<std::string> cts) {
  rm::Transaction t;
  t.project = project;
  t.id = id;
  t.message = msg;
  t.changes = std::vector<rm::SourceCodeChange>{};
  for (auto &ct : cts)
    t.changes->push_back({ct, "assignment", "", 1});
  return t;
}

// a: insert | insert+update | delete (not a fix); b: update | insert
std::vector<rm::Transaction> hand_corpus() {
  return {tx("a", "a1", "fix a1", {"statement insert"}),
          tx("a", "a2", "fix a2", {"statement insert", "statement update"}),
          tx("a", "a3", "refactor", {"statement delete"}),
          tx("b", "b1", "bug b1", {"statement update"}),
          tx("b", "b2", "Fix b2", {"statement insert"})};
}

rm::CrossValSpec spec_for(const std::vector<rm::Transaction> &c, rm::Provenance h,
                          std::vector<std::size_t> sizes = {1, 2}) {
  rm::CrossValSpec s;
  s.corpus = &c;
  s.taxonomy = &rm::Taxonomy::default_taxonomy();
  s.heuristic = h;
  s.sizes = std::move(sizes);
  return s;
}

rm::Cell cell(std::optional<rm::Attempts> m, std::size_t n, std::size_t f = 0) {
  return rm::Cell{m, n, f};
}

} // namespace

TEST_CASE("split") {
  const auto c = hand_corpus();
  const auto s = rm::split(c, "a");
  CHECK(s.evaluation.size() == 3);
  CHECK(s.training.size() == 2);
  for (const auto *t : s.training.members)
    CHECK(t->project == "b");
  CHECK(rm::projects_of(c) == std::vector<std::string>{"a", "b"});
  CHECK_THROWS_AS(rm::split(c, "zzz"), rm::SplitError);
  const std::vector<rm::Transaction> single{tx("a", "1", "fix", {"statement insert"})};
  CHECK_THROWS_AS(rm::split(single, "a"), rm::SplitError);
}

TEST_CASE("median_of is the lower median with infinity last") {
  using A = rm::Attempts;
  CHECK_FALSE(rm::median_of({}).has_value());
  CHECK(*rm::median_of({A(5)}) == A(5));
  CHECK(*rm::median_of({A(3), A(1)}) == A(1));
  CHECK(*rm::median_of({A::infinite(), A(2), A(9)}) == A(9));
  CHECK(*rm::median_of({A::infinite(), A::infinite(), A(2)}) == A::infinite());
}

TEST_CASE("hand-computed table, ALL heuristic") {
  const auto c = hand_corpus();
  auto spec = spec_for(c, rm::Provenance::all());
  const auto t = rm::run_crossval(spec);
  REQUIRE(t.projects == std::vector<std::string>{"a", "b"});
  CHECK(t.training_sizes == std::vector<std::size_t>{2, 3});
  // a held out: P(insert) = .5 and P({insert, update}) = 2 * .5 * .5
  CHECK(t.cells[0][0] == cell(rm::Attempts(1), 1));
  CHECK(t.cells[0][1] == cell(rm::Attempts(1), 1));
  // b held out: update .25 -> 3, insert .5 -> 1; lower median 1
  CHECK(t.cells[1][0] == cell(rm::Attempts(1), 2));
  CHECK(t.cells[1][1] == cell(std::nullopt, 0));

  spec.evaluation = rm::EvaluationFilter::all;
  const auto all = rm::run_crossval(spec);
  // the refactoring {delete} never occurs in b: infinite, lower median still 1
  CHECK(all.cells[0][0] == cell(rm::Attempts(1), 2));

  const auto md = rm::table_markdown(t);
  CHECK(md.find("**1** (2)") != std::string::npos);
  CHECK(md.find("- (0)") != std::string::npos);
  CHECK(rm::table_csv(t).rfind("heuristic,project,size,median,evaluated,failures\n", 0) == 0);
  CHECK(nlohmann::json::parse(rm::table_json(t))["rows"].size() == 2);
}

TEST_CASE("heuristics on the training side") {
  const auto c = hand_corpus();
  const auto one = rm::run_crossval(spec_for(c, rm::Provenance::nsc(1)));
  // b held out, training {insert, delete}: update is never seen
  CHECK(one.cells[1][0] == cell(rm::Attempts(1), 2));
  CHECK(one.training_sizes[1] == 2);

  // no 2-change transactions in b: the model cannot be trained
  const auto two = rm::run_crossval(spec_for(c, rm::Provenance::nsc(2)));
  CHECK(two.cells[0][0] == cell(std::nullopt, 0, 1));
  CHECK(two.cells[0][1] == cell(std::nullopt, 0, 1));
  CHECK(two.training_sizes[0] == 0);

  const auto eqp = rm::run_crossval(spec_for(c, rm::Provenance::eqp(), {1}));
  CHECK(eqp.cells[0][0] == cell(rm::Attempts(29), 1));
  CHECK(eqp.cells[1][0] == cell(rm::Attempts(29), 2));
}

TEST_CASE("unseen actions give infinity") {
  const std::vector<rm::Transaction> c{tx("x", "1", "fix", {"statement delete"}),
                                       tx("y", "2", "fix", {"statement insert"})};
  const auto t = rm::run_crossval(spec_for(c, rm::Provenance::all(), {1}));
  CHECK(t.cells[0][0] == cell(rm::Attempts::infinite(), 1));
  CHECK(rm::table_markdown(t).find("**∞** (1)") != std::string::npos);
  CHECK(rm::summarize(t).medians[0] == rm::Attempts::infinite());
}

TEST_CASE("parallel equals serial and matches the brute-force oracle") {
  const auto &tax = rm::Taxonomy::default_taxonomy();
  const auto c = support::synthetic_corpus(21, 4, 60, tax);
  for (auto model : {rm::ChangeModel::ct, rm::ChangeModel::ctet})
    for (const auto &h : {rm::Provenance::all(), rm::Provenance::bfp(), rm::Provenance::nsc(2)}) {
      auto spec = spec_for(c, h, {1, 2, 3, 4, 5});
      spec.model = model;
      const auto serial = rm::run_crossval_serial(spec);
      for (int w : {1, 2, 4}) {
        spec.workers = w;
        CHECK(rm::run_crossval(spec) == serial);
      }
      const auto brute = oracle::brute_crossval(c, tax, model, h, spec.sizes, true);
      for (std::size_t r = 0; r < brute.size(); ++r)
        for (std::size_t s = 0; s < spec.sizes.size(); ++s) {
          const auto &got = serial.cells[r][s];
          CHECK(got.evaluated == brute[r][s].evaluated);
          CHECK(got.failures == brute[r][s].failures);
          REQUIRE(got.median.has_value() == brute[r][s].median.has_value());
          if (got.median) {
            const auto &want = *brute[r][s].median;
            CHECK(got.median->is_infinite() == !want.has_value());
            if (want)
              CHECK(got.median->value() == *want);
          }
        }
    }
}

TEST_CASE("summaries across heuristics") {
  const auto &tax = rm::Taxonomy::default_taxonomy();
  const auto c = support::synthetic_corpus(8, 3, 40, tax);
  auto base = spec_for(c, rm::Provenance::all(), {1, 2, 3});
  const auto series = rm::compare_heuristics(
      base, {rm::Provenance::all(), rm::Provenance::bfp(), rm::Provenance::eqp()});
  REQUIRE(series.size() == 3);
  CHECK(series[1].heuristic == rm::Provenance::bfp());
  base.heuristic = rm::Provenance::bfp();
  CHECK(series[1] == rm::summarize(rm::run_crossval(base)));
  for (const auto &s : series)
    CHECK(s.medians.size() == 3);
  CHECK(rm::series_csv(series).rfind("size,ALL,BFP,EQP\n", 0) == 0);
  CHECK(rm::series_markdown(series).find("EQP") != std::string::npos);
  CHECK(nlohmann::json::parse(rm::series_json(series)).is_array());
}

TEST_CASE("unmined corpus is rejected") {
  std::vector<rm::Transaction> c = hand_corpus();
  c[3].changes.reset();
  CHECK_THROWS_AS(rm::run_crossval(spec_for(c, rm::Provenance::all())), rm::NotMined);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

// Every OpenMP kernel against its serial reference, over several worker counts.

#include "../support.hpp"
#include "repair_miner/corpus.hpp"
#include "repair_miner/crossval.hpp"
#include "repair_miner/repair_model.hpp"
#include "repair_miner/statistics.hpp"

#include <random>

namespace rm = repair_miner;

namespace {

const int kWorkers[] = {1, 2, 4, 7};

std::vector<rm::Transaction> source_corpus(std::size_t n) {
  std::mt19937_64 rng(13);
  const char *stmts[] = {"g();", "x = 1;", "if (a) { b(); }", "while (c) { d(); }", "return;",
                         "y = y + 2;"};
  auto body = [&](int len) {
    std::string s;
    for (int i = 0; i < len; ++i)
      s += std::string(stmts[rng() % 6]) + " ";
    return s;
  };
  std::vector<rm::Transaction> out;
  for (std::size_t i = 0; i < n; ++i) {
    rm::Transaction t;
    t.project = "p" + std::to_string(i % 4);
    t.id = std::to_string(i);
    t.message = i % 2 ? "fix" : "change";
    const auto before = "class A { void f() { " + body(1 + i % 5) + "} }";
    auto after = "class A { void f() { " + body(1 + i % 4) + "} }";
    if (i % 9 == 0)
      after = "class A { void f( }"; // parse failure
    t.files.push_back({"A.java", before, after});
    out.push_back(std::move(t));
  }
  return out;
}

} // namespace

TEST_CASE("mine") {
  const auto &tax = rm::Taxonomy::default_taxonomy();
  auto reference = source_corpus(120);
  const auto ref = rm::mine_serial(reference, tax);
  CHECK(ref.skipped.size() == 14);
  for (int w : kWorkers) {
    auto c = source_corpus(120);
    const auto r = rm::mine(c, tax, w);
    CHECK(c == reference);
    CHECK(r.changes == ref.changes);
    CHECK(r.dropped_operations == ref.dropped_operations);
    CHECK(r.skipped == ref.skipped);
  }
}

TEST_CASE("monte carlo") {
  const rm::RepairModel m(rm::FeatureSpace(rm::ChangeModel::ct, {"A", "B", "C", "D"}),
                          {0.4, 0.3, 0.2, 0.1}, rm::Provenance::all());
  const rm::RepairShape s({"A", "B", "D"});
  const auto ref = rm::monte_carlo_median_serial(s, m, 30'003, 7);
  for (int w : kWorkers) {
    rm::MonteCarloOptions o;
    o.workers = w;
    const auto r = rm::monte_carlo_median(s, m, 30'003, 7, o);
    CHECK(r.median == ref.median);
    CHECK(r.trials == ref.trials);
    CHECK(r.capped == ref.capped);
  }
  CHECK(rm::monte_carlo_median_serial(s, m, 30'003, 8).trials == 30'003);
}

TEST_CASE("cross-validation") {
  const auto &tax = rm::Taxonomy::default_taxonomy();
  const auto c = support::synthetic_corpus(2, 6, 80, tax);
  rm::CrossValSpec spec;
  spec.corpus = &c;
  spec.taxonomy = &tax;
  spec.model = rm::ChangeModel::ctet;
  spec.evaluation = rm::EvaluationFilter::all;
  const auto ref = rm::run_crossval_serial(spec);
  for (int w : kWorkers) {
    spec.workers = w;
    CHECK(rm::run_crossval(spec) == ref);
  }
}

TEST_CASE("spearman matrix") {
  std::mt19937_64 rng(1);
  std::vector<std::string> names;
  std::vector<std::vector<double>> v;
  for (int i = 0; i < 12; ++i) {
    names.push_back("p" + std::to_string(i));
    std::vector<double> row(60);
    for (auto &x : row)
      x = static_cast<double>(rng() % 10);
    v.push_back(row);
  }
  const auto ref = rm::spearman_matrix_serial(names, v);
  for (int w : kWorkers) {
    const auto r = rm::spearman_matrix(names, v, 0.01, w);
    CHECK(r.rho == ref.rho);
    CHECK(r.significant == ref.significant);
  }
}

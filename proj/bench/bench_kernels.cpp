// Parallel kernels against their serial references.
// Run: ./build/bench_kernels [--benchmark_filter=...]

#include "repair_miner/corpus.hpp"
#include "repair_miner/crossval.hpp"
#include "repair_miner/repair_model.hpp"
#include "repair_miner/statistics.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace rm = repair_miner;

namespace {

std::vector<rm::Transaction> source_corpus(std::size_t n) {
  std::mt19937_64 rng(13);
  const char *stmts[] = {"g();", "x = 1;", "if (a) { b(); }", "while (c) { d(); }",
                         "return;", "y = y + 2;"};
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
    t.files.push_back({"A.java", "class A { void f() { " + body(3 + i % 20) + "} }",
                       "class A { void f() { " + body(3 + i % 17) + "} }"});
    out.push_back(std::move(t));
  }
  return out;
}

// Mined corpus with random valid changes over `projects` projects.
std::vector<rm::Transaction> mined_corpus(std::size_t projects, std::size_t per_project) {
  const auto &tax = rm::Taxonomy::default_taxonomy();
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto &ct : tax.change_types())
    for (const auto &k : tax.entities().kinds())
      if (tax.is_valid(ct, k.id))
        pairs.emplace_back(ct, k.id);
  std::mt19937_64 rng(5);
  std::vector<rm::Transaction> out;
  for (std::size_t p = 0; p < projects; ++p)
    for (std::size_t i = 0; i < per_project; ++i) {
      rm::Transaction t;
      t.project = "p" + std::to_string(p);
      t.id = std::to_string(i);
      t.message = rng() % 2 ? "fix" : "refactor";
      t.changes = std::vector<rm::SourceCodeChange>{};
      const auto n = 1 + rng() % 6;
      for (std::size_t k = 0; k < n; ++k) {
        // the first pairs (statement level) dominate
        const auto &[ct, et] = pairs[rng() % 3 == 0 ? rng() % pairs.size() : rng() % 40];
        t.changes->push_back({ct, et, "", 1});
      }
      out.push_back(std::move(t));
    }
  return out;
}

void BM_mine(benchmark::State &state) {
  const auto corpus = source_corpus(400);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto c = corpus;
    const auto r = workers == 0 ? rm::mine_serial(c, rm::Taxonomy::default_taxonomy())
                                : rm::mine(c, rm::Taxonomy::default_taxonomy(), workers);
    benchmark::DoNotOptimize(r.changes);
  }
}

void BM_monte_carlo(benchmark::State &state) {
  const rm::RepairModel m(rm::FeatureSpace(rm::ChangeModel::ct, {"A", "B", "C", "D"}),
                          {0.4, 0.3, 0.2, 0.1}, rm::Provenance::all());
  const rm::RepairShape s({"A", "B", "D"});
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    rm::MonteCarloOptions o;
    o.workers = workers;
    const auto r = workers == 0 ? rm::monte_carlo_median_serial(s, m, 100'000, 1)
                                : rm::monte_carlo_median(s, m, 100'000, 1, o);
    benchmark::DoNotOptimize(r.median);
  }
}

void BM_crossval(benchmark::State &state) {
  const auto corpus = mined_corpus(8, 500);
  rm::CrossValSpec spec;
  spec.corpus = &corpus;
  spec.taxonomy = &rm::Taxonomy::default_taxonomy();
  spec.workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto t = spec.workers == 0 ? rm::run_crossval_serial(spec) : rm::run_crossval(spec);
    benchmark::DoNotOptimize(t.cells.size());
  }
}

void BM_spearman(benchmark::State &state) {
  std::mt19937_64 rng(1);
  std::vector<std::string> names;
  std::vector<std::vector<double>> v;
  for (int i = 0; i < 40; ++i) {
    names.push_back("p" + std::to_string(i));
    std::vector<double> row(173);
    for (auto &x : row)
      x = static_cast<double>(rng() % 50);
    v.push_back(row);
  }
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const auto m = workers == 0 ? rm::spearman_matrix_serial(names, v)
                                : rm::spearman_matrix(names, v, 0.01, workers);
    benchmark::DoNotOptimize(m.rho.size());
  }
}

// Argument: worker count, 0 = serial reference.
BENCHMARK(BM_mine)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_monte_carlo)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_crossval)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spearman)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();

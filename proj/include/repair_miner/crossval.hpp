#pragma once

#include "repair_miner/corpus.hpp"
#include "repair_miner/repair_model.hpp"
#include "repair_miner/taxonomy.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace repair_miner {

struct Split {
  TransactionBag training;
  TransactionBag evaluation;
};

/// Evaluation = the held-out project's transactions, training = the rest.
/// Throws SplitError for a single-project corpus or an absent project.
Split split(const std::vector<Transaction> &corpus,
            const std::string &held_out_project);

/// Sorted distinct project names.
std::vector<std::string> projects_of(const std::vector<Transaction> &corpus);

/// Which held-out transactions are evaluated.
enum class EvaluationFilter { bfp, all };

struct CrossValSpec {
  const std::vector<Transaction> *corpus = nullptr;
  const Taxonomy *taxonomy = nullptr;
  ChangeModel model = ChangeModel::ct;
  Provenance heuristic = Provenance::all(); // applied to the training side
  std::vector<std::size_t> sizes = {1, 2, 3, 4, 5, 6, 7, 8};
  EvaluationFilter evaluation = EvaluationFilter::bfp;
  std::vector<std::string> keywords = default_bfp_keywords();
  int workers = 0;
};

struct Cell {
  std::optional<Attempts> median; // empty when nothing was evaluated
  std::size_t evaluated = 0;      // transactions with a repairability value
  std::size_t failures = 0;       // shape extraction or scoring failed

  bool empty() const noexcept { return !median.has_value(); }
  friend bool operator==(const Cell &, const Cell &) = default;
};

struct RepairabilityTable {
  Provenance heuristic;
  ChangeModel model = ChangeModel::ct;
  std::vector<std::string> projects; // rows
  std::vector<std::size_t> sizes;    // columns
  std::vector<std::vector<Cell>> cells;
  std::vector<std::size_t> training_sizes; // per row, after the heuristic

  friend bool operator==(const RepairabilityTable &,
                         const RepairabilityTable &) = default;
};

/// Lower median; INFINITE sorts greatest. Empty input gives no value.
std::optional<Attempts> median_of(std::vector<Attempts> values);

/// Leave-one-project-out evaluation; rows run in parallel.
RepairabilityTable run_crossval(const CrossValSpec &spec);
/// Single-threaded reference.
RepairabilityTable run_crossval_serial(const CrossValSpec &spec);

struct HeuristicSeries {
  Provenance heuristic;
  std::vector<std::size_t> sizes;
  std::vector<std::optional<Attempts>> medians; // median of per-project medians
  friend bool operator==(const HeuristicSeries &, const HeuristicSeries &) = default;
};

HeuristicSeries summarize(const RepairabilityTable &table);

std::vector<HeuristicSeries>
compare_heuristics(const CrossValSpec &base,
                   const std::vector<Provenance> &heuristics);

// Reports.
std::string table_csv(const RepairabilityTable &table);
/// Bold median with the evaluated count in brackets; ∞ for INFINITE.
std::string table_markdown(const RepairabilityTable &table);
std::string table_json(const RepairabilityTable &table);
/// One row per size, one column per heuristic.
std::string series_csv(const std::vector<HeuristicSeries> &series);
std::string series_markdown(const std::vector<HeuristicSeries> &series);
std::string series_json(const std::vector<HeuristicSeries> &series);

} // namespace repair_miner

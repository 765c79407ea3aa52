#pragma once

#include "repair_miner/corpus.hpp"
#include "repair_miner/taxonomy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repair_miner {

/// α (absolute counts) and χ (relative frequencies) over a feature space.
struct FrequencyTable {
  FeatureSpace space;
  std::vector<std::uint64_t> alpha;
  std::vector<double> chi; // all zero when total == 0
  std::uint64_t total = 0;

  bool chi_defined() const noexcept { return total > 0; }
  std::uint64_t alpha_of(std::string_view label) const;
  double chi_of(std::string_view label) const;
};

FrequencyTable frequency_table(FeatureSpace space,
                               std::vector<std::uint64_t> counts);

/// Projects every change of every member into the space. In permissive
/// taxonomy mode unseen labels are appended to the table's copy of the space.
FrequencyTable frequencies(const TransactionBag &bag, const FeatureSpace &space,
                           const Taxonomy &taxonomy);

/// Average ranks (1-based) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double> &x);

/// Pearson correlation of the average-rank vectors. Empty when either rank
/// vector has zero variance. Throws DimensionError on length mismatch or
/// fewer than two elements.
std::optional<double> spearman_rho(const std::vector<double> &x,
                                   const std::vector<double> &y);

/// Critical values of Spearman's rho. Rows apply either to one exact size or
/// to every size from a lower bound upwards.
class CriticalValueTable {
public:
  struct Row {
    double alpha_level;
    std::size_t size;
    bool open_ended; // row covers every size >= size
    double value;
  };

  CriticalValueTable() = default;
  explicit CriticalValueTable(std::vector<Row> rows) : rows_(std::move(rows)) {}

  /// alpha = 0.01: 0.364 for 41 features, 0.301 for 60 or more.
  static const CriticalValueTable &builtin();

  /// Throws UnsupportedSize when no row applies.
  double lookup(std::size_t size, double alpha_level) const;
  void add(Row row) { rows_.push_back(row); }
  const std::vector<Row> &rows() const noexcept { return rows_; }

private:
  std::vector<Row> rows_;
};

bool spearman_significant(double rho, const FeatureSpace &space,
                          double alpha_level = 0.01,
                          const CriticalValueTable &table =
                              CriticalValueTable::builtin());
bool spearman_significant(double rho, std::size_t features,
                          double alpha_level = 0.01,
                          const CriticalValueTable &table =
                              CriticalValueTable::builtin());

struct SpearmanMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> rho; // symmetric
  std::vector<std::vector<bool>> significant;
};

/// Pairwise correlation of the rows of `vectors` (all of one length).
/// Significance uses the vector length as the feature count; sizes missing
/// from the table are reported as not significant.
SpearmanMatrix spearman_matrix(const std::vector<std::string> &names,
                               const std::vector<std::vector<double>> &vectors,
                               double alpha_level = 0.01, int workers = 0);
SpearmanMatrix
spearman_matrix_serial(const std::vector<std::string> &names,
                       const std::vector<std::vector<double>> &vectors,
                       double alpha_level = 0.01);

/// items x categories; every row sums to the same rater count.
struct RatingMatrix {
  std::vector<std::vector<std::uint64_t>> counts;
};

struct Agreement {
  std::vector<double> p_i;
  double p_bar = 0;
  double p_e = 0;
  std::optional<double> kappa; // empty when P_e == 1
};

/// Fleiss' construction. Throws DimensionError for fewer than two items,
/// fewer than two raters or unequal row sums.
Agreement agreement(const RatingMatrix &ratings);

/// Rows of non-negative integers separated by commas; a first line that is
/// not numeric is taken as a header.
RatingMatrix read_ratings_csv(std::string_view text);

// Reports.
std::string frequencies_csv(const FrequencyTable &table);
std::string frequencies_markdown(const FrequencyTable &table, std::size_t top = 0);
std::string frequencies_json(const FrequencyTable &table);
std::string spearman_csv(const SpearmanMatrix &m);
std::string spearman_markdown(const SpearmanMatrix &m);
std::string spearman_json(const SpearmanMatrix &m);
std::string agreement_json(const Agreement &a);

} // namespace repair_miner

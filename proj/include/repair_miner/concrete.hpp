#pragma once

#include "repair_miner/repair_model.hpp"

#include <compare>
#include <optional>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace repair_miner {

struct OperatorProbabilities {
  double insert = 0;
  double remove = 0;
  double swap = 0;
  double sum() const noexcept { return insert + remove + swap; }
  friend bool operator==(const OperatorProbabilities &,
                         const OperatorProbabilities &) = default;
};

/// Default slack on the operator sum. Two-decimal rows such as
/// (.33, .33, .33) are accepted.
inline constexpr double operator_sum_tolerance = 0.01 + 1e-9;

/// Insert/delete/swap action universe over n_ast statements and n_place
/// insertion places. Indices are 0-based.
struct ConcreteSpace {
  std::size_t n_place = 1;
  std::size_t n_ast = 1;
  OperatorProbabilities operators;

  /// Throws DomainError on empty geometry, negative probabilities or an
  /// operator sum further than `tolerance` from 1.
  void validate(double tolerance = operator_sum_tolerance) const;

  std::size_t insertions() const noexcept { return n_place * n_ast; }
  std::size_t deletions() const noexcept { return n_ast; }
  std::size_t swaps() const noexcept { return n_ast * n_ast; }
};

struct ConcreteAction {
  enum class Kind { insert, remove, swap };
  Kind kind = Kind::insert;
  std::size_t ast = 0;
  std::size_t other = 0; // place for insert, second node for swap

  static ConcreteAction insert(std::size_t ast, std::size_t place) {
    return {Kind::insert, ast, place};
  }
  static ConcreteAction remove(std::size_t ast) { return {Kind::remove, ast, 0}; }
  static ConcreteAction swap(std::size_t a, std::size_t b) {
    return {Kind::swap, a, b};
  }

  std::string to_string() const;
  friend auto operator<=>(const ConcreteAction &, const ConcreteAction &) = default;
};

using ConcreteFix = std::vector<ConcreteAction>;

/// p_insert / (n_place n_ast), p_delete / n_ast or p_swap / n_ast^2.
/// Throws DomainError for an index out of bounds.
double concrete_action_probability(const ConcreteSpace &space,
                                   const ConcreteAction &action);

/// Multinomial probability of the fix as an unordered multiset.
double fix_probability(const ConcreteSpace &space, const ConcreteFix &fix);

/// Median attempts to draw the fix. Throws EmptyShape for an empty fix.
Attempts logical_time(const ConcreteSpace &space, const ConcreteFix &fix);

/// logical_time for each operator distribution over the same geometry.
std::vector<Attempts>
operator_sweep(const ConcreteSpace &space, const ConcreteFix &fix,
               const std::vector<OperatorProbabilities> &distributions);

/// Same operators, n_place replaced. Throws DomainError unless
/// 1 <= surviving_places <= n_place.
ConcreteSpace fault_localization_factor(const ConcreteSpace &space,
                                        std::size_t surviving_places);

/// logical_time for fixes of two or more actions. Throws DomainError for a
/// smaller fix.
Attempts multi_action_time(const ConcreteSpace &space, const ConcreteFix &fix);

/// Scenario file: {"n_place", "n_ast", "operators": [{"p_insert",
/// "p_delete", "p_swap"}...], "fix": [{"op": "insert", "ast", "place"} |
/// {"op": "delete", "ast"} | {"op": "swap", "ast", "ast2"}],
/// "surviving_places"?: n}.
struct Scenario {
  std::string name;
  std::size_t n_place = 1;
  std::size_t n_ast = 1;
  std::vector<OperatorProbabilities> operators;
  ConcreteFix fix;
  std::optional<std::size_t> surviving_places;
};

/// Throws SchemaError for malformed documents and DomainError naming the
/// offending row for non-normalized operators or out-of-bounds actions.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string &path);

struct SweepRow {
  OperatorProbabilities operators;
  std::size_t n_place = 0;
  double p = 0;
  Attempts time;
};

/// One row per operator distribution; with surviving_places set, each row
/// uses the reduced geometry.
std::vector<SweepRow> simulate(const Scenario &scenario);

std::string sweep_csv(const std::vector<SweepRow> &rows);
std::string sweep_markdown(const std::vector<SweepRow> &rows);
std::string sweep_json(const Scenario &scenario, const std::vector<SweepRow> &rows);

} // namespace repair_miner

#pragma once

#include "repair_miner/corpus.hpp"
#include "repair_miner/taxonomy.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace repair_miner {

/// Bag or baseline a distribution was trained from.
struct Provenance {
  enum class Kind { all, bfp, nsc, eqp, custom };
  Kind kind = Kind::all;
  std::size_t n = 0;   // N-SC only
  std::string name;    // custom only

  static Provenance all() { return {Kind::all, 0, {}}; }
  static Provenance bfp() { return {Kind::bfp, 0, {}}; }
  static Provenance nsc(std::size_t n) { return {Kind::nsc, n, {}}; }
  static Provenance eqp() { return {Kind::eqp, 0, {}}; }

  /// "all", "bfp", "nsc:3", "eqp". Throws Error.
  static Provenance parse(std::string_view text);
  /// Inverse of parse; custom provenances print their name.
  std::string to_string() const;
  /// Table heading: ALL, BFP, 3-SC, EQP.
  std::string heading() const;

  friend bool operator==(const Provenance &, const Provenance &) = default;
};

/// Applies a training heuristic to a bag. EQP keeps the bag unchanged.
TransactionBag apply_heuristic(const TransactionBag &bag, const Provenance &p);

class RepairModel {
public:
  /// Throws Error unless probabilities lie in [0, 1] and sum to 1 within
  /// 1e-12 plus a few ulps per feature.
  RepairModel(FeatureSpace space, std::vector<double> probabilities,
              Provenance provenance, std::vector<std::uint64_t> counts = {});

  const FeatureSpace &space() const noexcept { return space_; }
  const std::vector<double> &probabilities() const noexcept { return p_; }
  const std::vector<std::uint64_t> &counts() const noexcept { return counts_; }
  const Provenance &provenance() const noexcept { return provenance_; }

  /// Throws UnknownFeature.
  double probability(std::string_view label) const;

  std::string to_json() const;
  static RepairModel from_json(std::string_view text);

private:
  FeatureSpace space_;
  std::vector<double> p_;
  std::vector<std::uint64_t> counts_;
  Provenance provenance_;
};

/// Frequencies of the bag's changes. Throws TrainingError on an empty bag
/// or a bag without changes.
RepairModel train(const TransactionBag &bag, const FeatureSpace &space,
                  const Taxonomy &taxonomy, Provenance provenance = {});

/// Uniform baseline.
RepairModel eqp(const FeatureSpace &space);

/// Unordered multiset of repair actions.
class RepairShape {
public:
  RepairShape() = default;
  /// Throws EmptyShape for an empty list.
  explicit RepairShape(const std::vector<std::string> &actions);

  std::size_t n() const noexcept { return n_; }
  const std::map<std::string, std::size_t> &multiplicities() const noexcept {
    return e_;
  }
  std::string to_string() const;

  friend bool operator==(const RepairShape &, const RepairShape &) = default;

private:
  std::map<std::string, std::size_t> e_;
  std::size_t n_ = 0;
};

/// Throws EmptyShape for a transaction without changes, NotMined when
/// unmined.
RepairShape extract_shape(const Transaction &t, const FeatureSpace &space,
                          const Taxonomy &taxonomy);

/// n! / prod(e_j!) * prod P(r_j)^e_j; log-space for n > 20. Throws
/// UnknownFeature for an action outside the model's space.
double shape_probability(const RepairShape &shape, const RepairModel &model);

/// Exact multinomial coefficient for n <= 20.
std::uint64_t multinomial_coefficient(const RepairShape &shape);

/// Median attempt count; empty means INFINITE.
class Attempts {
public:
  Attempts() = default; // INFINITE
  explicit Attempts(std::uint64_t k) : k_(k) {}
  static Attempts infinite() { return {}; }

  bool is_infinite() const noexcept { return !k_; }
  std::uint64_t value() const; // throws Error if infinite
  std::string to_string() const; // "∞" when infinite

  friend bool operator==(const Attempts &, const Attempts &) = default;
  /// INFINITE is greater than every count.
  friend std::strong_ordering operator<=>(const Attempts &a, const Attempts &b) {
    if (a.is_infinite() || b.is_infinite())
      return a.is_infinite() <=> b.is_infinite();
    return *a.k_ <=> *b.k_;
  }

private:
  std::optional<std::uint64_t> k_;
};

inline constexpr double default_probability_floor = 1e-15;

/// Smallest k with 1 - (1 - p)^k >= 0.5. Returns 1 for p >= 0.5 and INFINITE
/// for p == 0 or p < floor. Throws DomainError for p outside [0, 1].
Attempts median_attempts(double p, double floor = default_probability_floor);

struct Repairability {
  double p = 0;
  Attempts median;
};

Repairability repairability(const RepairShape &shape, const RepairModel &model);

struct MonteCarloOptions {
  std::uint64_t cap = 10'000'000; // attempts per trial
  int workers = 0;                // 0 = runtime default
};

struct MonteCarloResult {
  std::uint64_t median = 0; // lower median over all trials
  std::uint64_t trials = 0;
  std::uint64_t capped = 0; // trials that hit the cap (counted as the cap)
};

/// Simulates the search: each attempt draws n actions independently from
/// the model until the drawn multiset equals the shape. Streams are derived
/// per block of trials from the seed, so the result is independent of the
/// worker count. Throws NonterminatingOracle when the shape has probability
/// 0 and DomainError for trials == 0.
MonteCarloResult monte_carlo_median(const RepairShape &shape,
                                    const RepairModel &model,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const MonteCarloOptions &options = {});

/// Single-threaded reference with identical streams.
MonteCarloResult monte_carlo_median_serial(const RepairShape &shape,
                                           const RepairModel &model,
                                           std::uint64_t trials,
                                           std::uint64_t seed,
                                           const MonteCarloOptions &options = {});

} // namespace repair_miner

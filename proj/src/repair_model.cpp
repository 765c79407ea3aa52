#include "repair_miner/repair_model.hpp"

#include "repair_miner/errors.hpp"
#include "repair_miner/statistics.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace repair_miner {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Provenance

Provenance Provenance::parse(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "all")
    return all();
  if (t == "bfp")
    return bfp();
  if (t == "eqp")
    return eqp();
  std::string digits;
  if (t.rfind("nsc:", 0) == 0)
    digits = t.substr(4);
  else if (t.size() > 3 && t.compare(t.size() - 3, 3, "-sc") == 0)
    digits = t.substr(0, t.size() - 3);
  if (!digits.empty() &&
      std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(c); })) {
    const auto n = std::stoull(digits);
    if (n == 0)
      throw Error("nsc bag needs n >= 1");
    return nsc(n);
  }
  throw Error("unknown bag '" + std::string(text) +
              "' (expected all, bfp, nsc:<n> or eqp)");
}

std::string Provenance::to_string() const {
  switch (kind) {
  case Kind::all:
    return "all";
  case Kind::bfp:
    return "bfp";
  case Kind::nsc:
    return "nsc:" + std::to_string(n);
  case Kind::eqp:
    return "eqp";
  case Kind::custom:
    return name;
  }
  return name;
}

std::string Provenance::heading() const {
  switch (kind) {
  case Kind::all:
    return "ALL";
  case Kind::bfp:
    return "BFP";
  case Kind::nsc:
    return std::to_string(n) + "-SC";
  case Kind::eqp:
    return "EQP";
  case Kind::custom:
    return name;
  }
  return name;
}

TransactionBag apply_heuristic(const TransactionBag &bag, const Provenance &p) {
  switch (p.kind) {
  case Provenance::Kind::bfp:
    return slice_bfp(bag);
  case Provenance::Kind::nsc:
    return slice_nsc(bag, p.n);
  default:
    return bag;
  }
}

// ---------------------------------------------------------------------------
// RepairModel

RepairModel::RepairModel(FeatureSpace space, std::vector<double> probabilities,
                         Provenance provenance, std::vector<std::uint64_t> counts)
    : space_(std::move(space)), p_(std::move(probabilities)),
      counts_(std::move(counts)), provenance_(std::move(provenance)) {
  if (p_.size() != space_.size())
    throw DimensionError("model has " + std::to_string(p_.size()) +
                         " probabilities for " + std::to_string(space_.size()) +
                         " features");
  if (!counts_.empty() && counts_.size() != space_.size())
    throw DimensionError("model counts do not match its space");
  long double sum = 0;
  for (double v : p_) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error("model probability outside [0, 1]");
    sum += v;
  }
  // 1e-12 plus a few ulps per term for large spaces.
  const long double tolerance = 1e-12L + 4e-16L * static_cast<long double>(p_.size());
  if (std::abs(sum - 1.0L) > tolerance)
    throw Error("model probabilities sum to " +
                std::to_string(static_cast<double>(sum)) + ", expected 1");
}

double RepairModel::probability(std::string_view label) const {
  return p_[space_.index_of(label)];
}

std::string RepairModel::to_json() const {
  ordered_json j;
  j["model"] = std::string(repair_miner::to_string(space_.model()));
  j["provenance"] = provenance_.to_string();
  j["features"] = space_.features();
  if (!counts_.empty())
    j["counts"] = counts_;
  j["probabilities"] = p_;
  return j.dump(2) + "\n";
}

RepairModel RepairModel::from_json(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
  try {
    const auto model = parse_change_model(j.at("model").get<std::string>());
    FeatureSpace space(model, j.at("features").get<std::vector<std::string>>());
    Provenance provenance;
    const auto prov = j.value("provenance", "all");
    try {
      provenance = Provenance::parse(prov);
    } catch (const Error &) {
      provenance = {Provenance::Kind::custom, 0, prov};
    }
    return RepairModel(std::move(space),
                       j.at("probabilities").get<std::vector<double>>(),
                       std::move(provenance),
                       j.value("counts", std::vector<std::uint64_t>{}));
  } catch (const nlohmann::json::exception &e) {
    throw SchemaError(std::string("invalid model file: ") + e.what());
  }
}

RepairModel train(const TransactionBag &bag, const FeatureSpace &space,
                  const Taxonomy &taxonomy, Provenance provenance) {
  if (bag.empty())
    throw TrainingError("cannot train on an empty bag");
  auto table = frequencies(bag, space, taxonomy);
  if (table.total == 0)
    throw TrainingError("bag '" + bag.name + "' contains no changes");
  return RepairModel(std::move(table.space), std::move(table.chi),
                     std::move(provenance), std::move(table.alpha));
}

RepairModel eqp(const FeatureSpace &space) {
  if (space.size() == 0)
    throw TrainingError("uniform model over an empty space");
  return RepairModel(space,
                     std::vector<double>(space.size(),
                                         1.0 / static_cast<double>(space.size())),
                     Provenance::eqp());
}

// ---------------------------------------------------------------------------
// Shapes

RepairShape::RepairShape(const std::vector<std::string> &actions) {
  if (actions.empty())
    throw EmptyShape("a repair shape needs at least one action");
  for (const auto &a : actions)
    ++e_[a];
  n_ = actions.size();
}

std::string RepairShape::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto &[action, e] : e_) {
    if (!first)
      out += ", ";
    first = false;
    out += action;
    if (e > 1)
      out += " x" + std::to_string(e);
  }
  return out + "}";
}

RepairShape extract_shape(const Transaction &t, const FeatureSpace &space,
                          const Taxonomy &taxonomy) {
  const auto &changes = t.mined_changes();
  if (changes.empty())
    throw EmptyShape("transaction " + t.project + "/" + t.id +
                     " has no changes");
  std::vector<std::string> actions;
  actions.reserve(changes.size());
  for (const auto &c : changes)
    actions.push_back(project_to_feature(c, space, taxonomy));
  return RepairShape(actions);
}

std::uint64_t multinomial_coefficient(const RepairShape &shape) {
  if (shape.n() > 20)
    throw DomainError("exact multinomial coefficient limited to n <= 20");
  // Product of binomials C(m, e) built incrementally; every intermediate is
  // an integer no larger than 20!.
  std::uint64_t coefficient = 1;
  std::uint64_t m = 0;
  for (const auto &[action, e] : shape.multiplicities()) {
    for (std::uint64_t i = 1; i <= e; ++i) {
      ++m;
      coefficient = coefficient * m / i;
    }
  }
  return coefficient;
}

double shape_probability(const RepairShape &shape, const RepairModel &model) {
  if (shape.n() == 0)
    throw EmptyShape("empty repair shape");
  std::vector<std::pair<double, std::size_t>> terms;
  for (const auto &[action, e] : shape.multiplicities())
    terms.emplace_back(model.probability(action), e);
  for (const auto &[p, e] : terms)
    if (p == 0.0)
      return 0.0;
  double result;
  if (shape.n() <= 20) {
    result = static_cast<double>(multinomial_coefficient(shape));
    for (const auto &[p, e] : terms)
      result *= std::pow(p, static_cast<double>(e));
  } else {
    double log_p = std::lgamma(static_cast<double>(shape.n()) + 1.0);
    for (const auto &[p, e] : terms)
      log_p += static_cast<double>(e) * std::log(p) -
               std::lgamma(static_cast<double>(e) + 1.0);
    result = std::exp(log_p);
  }
  return std::min(result, 1.0);
}

// ---------------------------------------------------------------------------
// Median attempts

std::uint64_t Attempts::value() const {
  if (!k_)
    throw Error("attempt count is infinite");
  return *k_;
}

std::string Attempts::to_string() const {
  return k_ ? std::to_string(*k_) : "∞";
}

Attempts median_attempts(double p, double floor) {
  if (!(p >= 0.0 && p <= 1.0))
    throw DomainError("probability " + std::to_string(p) + " outside [0, 1]");
  if (p >= 0.5)
    return Attempts(1);
  if (p == 0.0 || p < floor)
    return Attempts::infinite();
  const long double log_q = std::log1p(-static_cast<long double>(p));
  // CDF(k) = 1 - (1 - p)^k = -expm1(k ln(1 - p))
  auto reaches_half = [&](std::uint64_t k) {
    return -std::expm1(static_cast<long double>(k) * log_q) >= 0.5L;
  };
  auto k = static_cast<std::uint64_t>(std::ceil(std::log(0.5L) / log_q));
  k = std::max<std::uint64_t>(k, 1);
  while (!reaches_half(k))
    ++k;
  while (k > 1 && reaches_half(k - 1))
    --k;
  return Attempts(k);
}

Repairability repairability(const RepairShape &shape, const RepairModel &model) {
  const double p = shape_probability(shape, model);
  return {p, median_attempts(p)};
}

// ---------------------------------------------------------------------------
// Monte Carlo

namespace {

constexpr std::uint64_t block_size = 1024;

struct Sampler {
  std::vector<std::uint64_t> thresholds; // cumulative, scaled to 2^64
  std::vector<int> slot;                 // model index -> shape slot or -1
  std::vector<std::uint32_t> target;     // multiplicity per slot
  std::size_t last_positive = 0;
  std::size_t n = 0;

  Sampler(const RepairShape &shape, const RepairModel &model) {
    const auto &p = model.probabilities();
    thresholds.resize(p.size());
    long double cum = 0;
    const long double scale = 18446744073709551616.0L; // 2^64
    for (std::size_t i = 0; i < p.size(); ++i) {
      cum += p[i];
      const long double t = std::min(cum, 1.0L) * scale;
      thresholds[i] = t >= scale ? std::numeric_limits<std::uint64_t>::max()
                                 : static_cast<std::uint64_t>(t);
      if (p[i] > 0)
        last_positive = i;
    }
    thresholds[last_positive] = std::numeric_limits<std::uint64_t>::max();
    slot.assign(p.size(), -1);
    for (const auto &[action, e] : shape.multiplicities()) {
      slot[model.space().index_of(action)] = static_cast<int>(target.size());
      target.push_back(static_cast<std::uint32_t>(e));
    }
    n = shape.n();
  }

  std::size_t draw(std::mt19937_64 &rng) const {
    const auto u = rng();
    auto it = std::upper_bound(thresholds.begin(), thresholds.end(), u);
    const auto i = static_cast<std::size_t>(it - thresholds.begin());
    return std::min(i, last_positive);
  }

  // Attempts until one draw of n actions equals the target multiset.
  std::uint64_t trial(std::mt19937_64 &rng, std::uint64_t cap) const {
    std::vector<std::uint32_t> remaining(target.size());
    for (std::uint64_t attempt = 1; attempt <= cap; ++attempt) {
      std::copy(target.begin(), target.end(), remaining.begin());
      bool hit = true;
      for (std::size_t d = 0; d < n; ++d) {
        const int s = slot[draw(rng)];
        if (s < 0 || remaining[s] == 0) {
          hit = false; // already cannot match
          break;
        }
        --remaining[s];
      }
      if (hit)
        return attempt;
    }
    return cap;
  }
};

void check_oracle_input(const RepairShape &shape, const RepairModel &model,
                        std::uint64_t trials, const MonteCarloOptions &options) {
  if (trials == 0)
    throw DomainError("monte carlo needs at least one trial");
  if (options.cap == 0)
    throw DomainError("monte carlo attempt cap must be positive");
  if (shape_probability(shape, model) == 0.0)
    throw NonterminatingOracle("shape " + shape.to_string() +
                               " has probability 0; the search never ends");
}

void run_block(const Sampler &sampler, std::uint64_t seed, std::uint64_t block,
               std::uint64_t trials, std::uint64_t cap,
               std::vector<std::uint64_t> &out) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block),
                    static_cast<std::uint32_t>(block >> 32)};
  std::mt19937_64 rng(seq);
  const auto begin = block * block_size;
  const auto end = std::min(trials, begin + block_size);
  for (auto t = begin; t < end; ++t)
    out[t] = sampler.trial(rng, cap);
}

MonteCarloResult summarize(std::vector<std::uint64_t> &attempts,
                           std::uint64_t cap) {
  MonteCarloResult r;
  r.trials = attempts.size();
  r.capped = static_cast<std::uint64_t>(
      std::count(attempts.begin(), attempts.end(), cap));
  // A trial that succeeded exactly at the cap is indistinguishable here and
  // is counted as capped.
  const auto mid = attempts.begin() + static_cast<std::ptrdiff_t>((attempts.size() - 1) / 2);
  std::nth_element(attempts.begin(), mid, attempts.end());
  r.median = *mid;
  return r;
}

} // namespace

MonteCarloResult monte_carlo_median(const RepairShape &shape,
                                    const RepairModel &model,
                                    std::uint64_t trials, std::uint64_t seed,
                                    const MonteCarloOptions &options) {
  check_oracle_input(shape, model, trials, options);
  const Sampler sampler(shape, model);
  std::vector<std::uint64_t> attempts(trials);
  const auto blocks = static_cast<std::int64_t>((trials + block_size - 1) / block_size);
  const int threads = options.workers > 0 ? options.workers : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t b = 0; b < blocks; ++b)
    run_block(sampler, seed, static_cast<std::uint64_t>(b), trials, options.cap,
              attempts);
  return summarize(attempts, options.cap);
}

MonteCarloResult monte_carlo_median_serial(const RepairShape &shape,
                                           const RepairModel &model,
                                           std::uint64_t trials,
                                           std::uint64_t seed,
                                           const MonteCarloOptions &options) {
  check_oracle_input(shape, model, trials, options);
  const Sampler sampler(shape, model);
  std::vector<std::uint64_t> attempts(trials);
  const auto blocks = (trials + block_size - 1) / block_size;
  for (std::uint64_t b = 0; b < blocks; ++b)
    run_block(sampler, seed, b, trials, options.cap, attempts);
  return summarize(attempts, options.cap);
}

} // namespace repair_miner
